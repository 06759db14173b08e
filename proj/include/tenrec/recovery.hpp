#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "tenrec/tensor.hpp"

namespace tenrec {

/// Suboptimality certificate of a converged run: the objective reached is
/// within `bound` of the global optimum, where
/// bound = c * epsilon_hat + sum_n lambda_n * I_n * prod_{m!=n} I_m * eps.
struct Certificate {
    double epsilon_hat = 0.0; // |sum_n (Y*_n - Yhat*_n)|_inf
    double c = 0.0;
    double bound = 0.0;
};

struct RecoveryResult {
    DenseTensor x;                         // combined low-rank estimate
    DenseTensor e;                         // sparse estimate
    std::vector<DenseTensor> z;            // per-mode low-rank estimates Z_n
    int iters = 0;
    bool converged = false;
    std::vector<double> residual_history;  // per iteration: max_n |T - Z_n - E|_inf
    std::vector<double> final_residuals;   // per mode at termination
    double objective = 0.0;
    std::optional<Certificate> certificate;

    // Final multipliers, kept so the certificate can be recomputed.
    std::vector<DenseTensor> y;
    std::vector<DenseTensor> y_hat;
};

/// Snapshot handed to an iteration observer after each completed iteration.
/// u/v are only set by the factored solver.
struct IterationView {
    int iter = 0;        // 1-based count of completed iterations
    double mu_used = 0;  // penalty used by this iteration's updates
    double mu_next = 0;  // penalty after the schedule step
    const std::vector<double>& residual_inf; // per mode, |T - Z_n - E|_inf
    const DenseTensor& e;
    const std::vector<DenseTensor>& z;
    const std::vector<DenseTensor>& y;
    const std::vector<Matrix>* u = nullptr;
    const std::vector<Matrix>* v = nullptr;
};

using IterationObserver = std::function<void(const IterationView&)>;

/// (sum_n w_n)^-1 * sum_n w_n * z_n.
DenseTensor weighted_mean(const std::vector<DenseTensor>& z, const std::vector<double>& weights);

} // namespace tenrec
