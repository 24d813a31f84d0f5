#pragma once

// Finite-difference gradient oracle for the MLP, independent of the
// analytic backward pass. Coordinates whose perturbation could cross a
// ReLU kink (any pre-activation within kink_tol of zero on the batch)
// are excluded:
//   - a near-zero z1[i] excludes W1 row i and b1[i];
//   - a near-zero z2[u] excludes W2 row u and b2[u], and every W1/b1
//     coordinate (layer-1 parameters move all of z2);
//   - W3/b3 feed a purely linear head and are never excluded.

#include <cmath>
#include <cstddef>
#include <vector>

#include "nsai/matrix.hpp"
#include "nsai/mlp.hpp"

namespace nsai_test {

struct GradCheckResult {
    std::size_t checked = 0;
    std::size_t excluded = 0;
    double max_rel_err = 0.0;
    bool pass = true;
};

inline double batch_loss(const nsai::MlpParams& p, const nsai::Matrix& x,
                         const std::vector<double>& y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
        const double r = nsai::forward(p, x.row(i)).y_hat - y[i];
        acc += r * r;
    }
    return acc / static_cast<double>(x.rows);
}

inline GradCheckResult check_gradients(const nsai::MlpParams& params, const nsai::Matrix& x,
                                       const std::vector<double>& y, double h = 1e-6,
                                       double rel_tol = 1e-6, double kink_tol = 1e-4) {
    const std::size_t h1 = params.hidden1();
    const std::size_t h2 = params.hidden2();

    // Pre-activation kink scan, computed here from scratch.
    std::vector<bool> z1_kink(h1, false), z2_kink(h2, false);
    bool any_z2_kink = false;
    std::vector<double> z1(h1), a1(h1);
    for (std::size_t s = 0; s < x.rows; ++s) {
        const auto row = x.row(s);
        for (std::size_t i = 0; i < h1; ++i) {
            double acc = params.b1[i];
            for (std::size_t j = 0; j < params.input_dim(); ++j) acc += params.w1(i, j) * row[j];
            z1[i] = acc;
            a1[i] = acc > 0.0 ? acc : 0.0;
            if (std::abs(acc) < kink_tol) z1_kink[i] = true;
        }
        for (std::size_t u = 0; u < h2; ++u) {
            double acc = params.b2[u];
            for (std::size_t i = 0; i < h1; ++i) acc += params.w2(u, i) * a1[i];
            if (std::abs(acc) < kink_tol) {
                z2_kink[u] = true;
                any_z2_kink = true;
            }
        }
    }

    auto excluded = [&](std::size_t block, std::size_t index) {
        switch (block) {
            case 0: return any_z2_kink || z1_kink[index / params.input_dim()];  // w1
            case 1: return any_z2_kink || z1_kink[index];                       // b1
            case 2: return z2_kink[index / h1];                                 // w2
            case 3: return z2_kink[index];                                      // b2
            default: return false;                                              // w3, b3
        }
    };

    auto [analytic, loss] = nsai::backward(params, x, y);
    (void)loss;
    const auto analytic_blocks = analytic.blocks();

    GradCheckResult result;
    nsai::MlpParams work = params;
    auto work_blocks = work.blocks();
    for (std::size_t blk = 0; blk < work_blocks.size(); ++blk) {
        for (std::size_t i = 0; i < work_blocks[blk].size(); ++i) {
            if (excluded(blk, i)) {
                ++result.excluded;
                continue;
            }
            const double saved = work_blocks[blk][i];
            work_blocks[blk][i] = saved + h;
            const double up = batch_loss(work, x, y);
            work_blocks[blk][i] = saved - h;
            const double down = batch_loss(work, x, y);
            work_blocks[blk][i] = saved;

            const double fd = (up - down) / (2.0 * h);
            const double an = analytic_blocks[blk][i];
            const double denom = std::max({std::abs(fd), std::abs(an), 1e-3});
            const double rel = std::abs(fd - an) / denom;
            result.max_rel_err = std::max(result.max_rel_err, rel);
            if (rel > rel_tol) result.pass = false;
            ++result.checked;
        }
    }
    return result;
}

}  // namespace nsai_test
