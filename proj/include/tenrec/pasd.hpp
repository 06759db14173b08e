#pragma once

#include "tenrec/recovery.hpp"

namespace tenrec {

/// Hyperparameters of the factored (active-subspace) ADMM solver.
struct PasdConfig {
    std::vector<double> lambdas;        // nuclear-norm weights, one per mode
    std::vector<Index> ranks;           // subspace widths R_n (upper bounds on mode-n ranks)
    double mu0 = 1e-4;
    double mu_max = 1e10;
    double rho = 1.1;                   // penalty growth factor
    double eps = 1e-5;                  // stopping tolerance on |T - Z_n - E|_inf
    int maxiter = 1000;
    std::vector<double> output_weights; // alpha_n for the combined output; empty = lambdas

    void validate(const std::vector<Index>& dims) const;

    /// Weighting rule lambda_n = sqrt(max(I_n, prod_{j!=n} I_j)) / N.
    static std::vector<double> default_lambdas(const std::vector<Index>& dims);

    /// Subspace width rule R = floor(1.2 * r) for a target rank r.
    static Index default_rank_bound(Index target_rank);

    const std::vector<double>& alphas() const { return output_weights.empty() ? lambdas : output_weights; }
};

/// Solver iterate: per-mode orthonormal bases u[n] (I_n x R_n), coefficient
/// matrices v[n] (R_n x prod_{m!=n} I_m), sparse iterate e, multipliers y[n],
/// auxiliary multipliers y_hat[n] (filled at the final iterate only), penalty
/// mu, and the count of completed iterations.
struct PasdState {
    std::vector<Matrix> u;
    std::vector<Matrix> v;
    DenseTensor e;
    std::vector<DenseTensor> y;
    std::vector<DenseTensor> y_hat;
    double mu = 0.0;
    int iter = 0;
};

/// G_n = unfold_n(T - E + Y_n / mu) evaluated on the current state.
Matrix pasd_g_matrix(const DenseTensor& t, const DenseTensor& e, const DenseTensor& y, double mu,
                     Index mode);

/// Basis update: polar factor of G_n * V_n^T. When the product is numerically
/// zero (first iteration starts from V = 0) the previous basis is kept.
Matrix update_u(const PasdState& state, const DenseTensor& t, Index mode);

/// Coefficient update: SVT_{lambda/mu}(U_n^T * G_n). Expects state.u[mode-1]
/// to hold the already-updated basis; state.e and state.y are still the
/// previous iterate's.
Matrix update_v(const PasdState& state, const DenseTensor& t, Index mode, double lambda);

/// Sparse update: shrink of the mean of H_n = T - fold_n(U_n V_n) + Y_n / mu
/// at threshold 1 / (mu * N). Expects all u/v already updated.
DenseTensor update_e(const PasdState& state, const DenseTensor& t);

/// Full ADMM loop. Per iteration and mode: basis and coefficient updates, the
/// shared sparse update, multiplier ascent Y_n += mu * (T - Z_n - E), penalty
/// growth mu = min(rho * mu, mu_max); stops when |T - Z_n - E|_inf < eps for
/// every mode or at maxiter (converged=false, not an error). A non-finite
/// iterate raises NumericalError naming the iteration.
RecoveryResult pasd_recover(const DenseTensor& t, const PasdConfig& config,
                            const IterationObserver& observer = {});

/// Certificate quantities for a converged run (throws StateError otherwise).
Certificate suboptimality_certificate(const RecoveryResult& result, const DenseTensor& t,
                                      const PasdConfig& config);

namespace detail {
// Shared update kernels; the spec-shaped wrappers and the solver both call these.
Matrix update_u_from(const Matrix& g, const Matrix& v_prev, const Matrix& u_prev);
Matrix update_v_from(const Matrix& g, const Matrix& u_next, double lambda, double mu);
} // namespace detail

} // namespace tenrec
