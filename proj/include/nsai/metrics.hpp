#pragma once

#include <span>
#include <string>

namespace nsai {

/// Mean of squared residuals. Throws on empty or mismatched inputs.
double mse(std::span<const double> y_true, std::span<const double> y_pred);

/// 1 - SS_res / SS_tot with the baseline mean taken over y_true itself.
/// Throws on mismatched inputs, fewer than 2 samples, or constant y_true
/// (zero denominator is an error, never NaN).
double r2(std::span<const double> y_true, std::span<const double> y_pred);

/// The four-number evaluation of one model, Table-2 style.
struct ModelReport {
    std::string algorithm;
    double mse_train = 0.0;
    double mse_val = 0.0;
    double r2_train = 0.0;
    double r2_val = 0.0;
};

inline constexpr const char* kReportCsvHeader = "algorithm,mse_train,mse_val,r2_train,r2_val";

/// One CSV row in kReportCsvHeader column order (no newline).
std::string report_csv_row(const ModelReport& report);

}  // namespace nsai
