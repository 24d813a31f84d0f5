#include "nsai/metrics.hpp"

#include "nsai/errors.hpp"
#include "nsai/text.hpp"

namespace nsai {

double mse(std::span<const double> y_true, std::span<const double> y_pred) {
    if (y_true.empty()) throw ValidationError("mse: empty input");
    if (y_true.size() != y_pred.size()) {
        throw ValidationError("mse: length mismatch (" + std::to_string(y_true.size()) + " vs " +
                              std::to_string(y_pred.size()) + ")");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const double r = y_true[i] - y_pred[i];
        acc += r * r;
    }
    return acc / static_cast<double>(y_true.size());
}

double r2(std::span<const double> y_true, std::span<const double> y_pred) {
    if (y_true.size() != y_pred.size()) {
        throw ValidationError("r2: length mismatch (" + std::to_string(y_true.size()) + " vs " +
                              std::to_string(y_pred.size()) + ")");
    }
    if (y_true.size() < 2) throw ValidationError("r2: need at least 2 samples");

    double mean = 0.0;
    for (double v : y_true) mean += v;
    mean /= static_cast<double>(y_true.size());

    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const double r = y_true[i] - y_pred[i];
        const double d = y_true[i] - mean;
        ss_res += r * r;
        ss_tot += d * d;
    }
    if (ss_tot == 0.0) {
        throw ValidationError("r2: y_true is constant (zero total sum of squares)");
    }
    return 1.0 - ss_res / ss_tot;
}

std::string report_csv_row(const ModelReport& report) {
    return report.algorithm + "," + fmt_double(report.mse_train) + "," +
           fmt_double(report.mse_val) + "," + fmt_double(report.r2_train) + "," +
           fmt_double(report.r2_val);
}

}  // namespace nsai
