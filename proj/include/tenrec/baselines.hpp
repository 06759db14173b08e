#pragma once

#include "tenrec/recovery.hpp"

namespace tenrec {

/// Hyperparameters of the full-SVT ADMM baseline (one nuclear-norm term per
/// unfolding, no factorization).
struct SnnConfig {
    std::vector<double> lambdas;
    double mu0 = 1e-4;
    double mu_max = 1e10;
    double rho = 1.1;
    double eps = 1e-5;
    int maxiter = 1000;
    std::vector<double> output_weights; // empty = lambdas

    void validate(const std::vector<Index>& dims) const;
    const std::vector<double>& alphas() const { return output_weights.empty() ? lambdas : output_weights; }
};

/// Matrix robust PCA settings. lambda <= 0 selects the standard rule
/// 1/sqrt(max(rows, cols)) of the matrix it is applied to.
struct RpcaConfig {
    double lambda = 0.0;
    double mu0 = 1e-4;
    double mu_max = 1e10;
    double rho = 1.1;
    double eps = 1e-5;
    int maxiter = 1000;

    void validate() const;
};

/// ADMM on the sum-of-nuclear-norms model: per mode
/// Z_n = fold_n(SVT_{lambda_n/mu}(unfold_n(T - E + Y_n/mu))), then the shared
/// sparse update, multiplier ascent and penalty growth exactly as in
/// pasd_recover, same stopping rule and output combination.
RecoveryResult snn_recover(const DenseTensor& t, const SnnConfig& config,
                           const IterationObserver& observer = {});

struct RpcaMatrixResult {
    Matrix low_rank;
    Matrix sparse;
    int iters = 0;
    bool converged = false;
    double final_residual = 0.0; // |M - L - S|_inf at exit
    std::vector<double> residual_history;
};

/// Inexact-ALM matrix robust PCA: L = SVT_{1/mu}(M - S + Y/mu),
/// S = shrink(M - L + Y/mu, lambda/mu), Y += mu*(M - L - S),
/// mu = min(rho*mu, mu_max); stops when |M - L - S|_inf < eps.
RpcaMatrixResult rpca_matrix(const Matrix& m, const RpcaConfig& config);

/// Runs rpca_matrix on every mode-n unfolding and reports the fold-back of the
/// run with the smallest final residual (ties go to the lowest mode). z holds
/// every mode's folded low-rank estimate.
RecoveryResult rpca_unfold_recover(const DenseTensor& t, const RpcaConfig& config);

} // namespace tenrec
