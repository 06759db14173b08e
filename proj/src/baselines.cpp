#include "tenrec/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tenrec/linops.hpp"

namespace tenrec {

void SnnConfig::validate(const std::vector<Index>& dims) const {
    const std::size_t n_modes = dims.size();
    dims_product(dims);
    if (lambdas.size() != n_modes)
        throw ArgumentError("config: expected " + std::to_string(n_modes) + " lambdas, got " +
                            std::to_string(lambdas.size()));
    for (std::size_t n = 0; n < n_modes; ++n)
        if (!(lambdas[n] > 0.0) || !std::isfinite(lambdas[n]))
            throw ArgumentError("config: lambda of mode " + std::to_string(n + 1) + " must be positive");
    if (!(mu0 > 0.0) || !(mu_max >= mu0) || !(rho > 1.0) || !(eps > 0.0) || maxiter < 1)
        throw ArgumentError("config: invalid penalty schedule or stopping parameters");
    if (!output_weights.empty()) {
        if (output_weights.size() != n_modes)
            throw ArgumentError("config: expected " + std::to_string(n_modes) + " output weights");
        for (double w : output_weights)
            if (!(w > 0.0))
                throw ArgumentError("config: output weights must be positive");
    }
}

void RpcaConfig::validate() const {
    if (!(mu0 > 0.0) || !(mu_max >= mu0) || !(rho > 1.0) || !(eps > 0.0) || maxiter < 1)
        throw ArgumentError("config: invalid penalty schedule or stopping parameters");
}

RecoveryResult snn_recover(const DenseTensor& t, const SnnConfig& config,
                           const IterationObserver& observer) {
    config.validate(t.dims());
    if (!t.all_finite())
        throw ArgumentError("snn: input tensor contains non-finite entries");

    const std::vector<Index>& dims = t.dims();
    const Index n_modes = t.order();
    const Index total = t.size();
    const double* td = t.data();

    DenseTensor e = DenseTensor::zeros(dims);
    std::vector<DenseTensor> y(static_cast<std::size_t>(n_modes), DenseTensor::zeros(dims));
    std::vector<DenseTensor> z(static_cast<std::size_t>(n_modes), DenseTensor::zeros(dims));
    DenseTensor scratch = DenseTensor::zeros(dims);
    Matrix m;
    double mu = config.mu0;
    std::vector<double> resid(static_cast<std::size_t>(n_modes),
                              std::numeric_limits<double>::infinity());

    RecoveryResult res;
    bool converged = false;
    int iter = 0;

    while (iter < config.maxiter && !converged) {
        const double mu_used = mu;
        const double inv_mu = 1.0 / mu;

        // Z_n = fold_n(SVT_{lambda_n/mu}(unfold_n(T - E + Y_n/mu))); every mode
        // reads the same previous-iteration E.
        for (Index n = 0; n < n_modes; ++n) {
            const auto ni = static_cast<std::size_t>(n);
            const double* ed = e.data();
            const double* yd = y[ni].data();
            double* sd = scratch.data();
            for (Index i = 0; i < total; ++i)
                sd[i] = td[i] - ed[i] + yd[i] * inv_mu;
            const Index rows = dims[ni];
            m.resize(rows, total / rows);
            detail::unfold_into(scratch.data(), dims, n + 1, m.data());
            const Matrix zmat = svt(m, config.lambdas[ni] * inv_mu);
            detail::fold_into(zmat.data(), dims, n + 1, z[ni].data());
        }

        {
            double* sd = scratch.data();
            std::fill(sd, sd + total, 0.0);
            for (Index n = 0; n < n_modes; ++n) {
                const double* zd = z[static_cast<std::size_t>(n)].data();
                const double* yd = y[static_cast<std::size_t>(n)].data();
                for (Index i = 0; i < total; ++i)
                    sd[i] += td[i] - zd[i] + yd[i] * inv_mu;
            }
            const double inv_n = 1.0 / static_cast<double>(n_modes);
            const double tau = 1.0 / (mu * static_cast<double>(n_modes));
            double* ed = e.data();
            for (Index i = 0; i < total; ++i)
                ed[i] = soft_threshold(sd[i] * inv_n, tau);
        }

        bool bad = false;
        for (Index n = 0; n < n_modes; ++n) {
            const auto ni = static_cast<std::size_t>(n);
            const double* zd = z[ni].data();
            const double* ed = e.data();
            double* yd = y[ni].data();
            double worst = 0.0;
            for (Index i = 0; i < total; ++i) {
                const double r = td[i] - zd[i] - ed[i];
                yd[i] += mu * r;
                const double a = std::fabs(r);
                if (a > worst)
                    worst = a;
                bad |= !std::isfinite(r);
            }
            resid[ni] = worst;
        }
        const double mu_next = std::min(config.rho * mu, config.mu_max);
        ++iter;
        if (bad)
            throw NumericalError("snn: non-finite iterate at iteration " + std::to_string(iter));

        res.residual_history.push_back(*std::max_element(resid.begin(), resid.end()));
        converged = true;
        for (double r : resid)
            converged = converged && (r < config.eps);

        mu = mu_next;
        if (observer) {
            IterationView view{iter, mu_used, mu_next, resid, e, z, y, nullptr, nullptr};
            observer(view);
        }
    }

    res.converged = converged;
    res.iters = iter;
    res.final_residuals = resid;
    res.objective = tensor_norm(e, NormKind::l1);
    for (Index n = 0; n < n_modes; ++n)
        res.objective += config.lambdas[static_cast<std::size_t>(n)] *
                         nuclear_norm(unfold(z[static_cast<std::size_t>(n)], n + 1));
    res.e = std::move(e);
    res.z = std::move(z);
    res.x = weighted_mean(res.z, config.alphas());
    res.y = std::move(y);
    return res;
}

RpcaMatrixResult rpca_matrix(const Matrix& m, const RpcaConfig& config) {
    config.validate();
    if (!m.allFinite())
        throw ArgumentError("rpca: input contains non-finite entries");

    const double lambda = config.lambda > 0.0
                              ? config.lambda
                              : 1.0 / std::sqrt(static_cast<double>(std::max(m.rows(), m.cols())));

    RpcaMatrixResult res;
    res.low_rank = Matrix::Zero(m.rows(), m.cols());
    res.sparse = Matrix::Zero(m.rows(), m.cols());
    Matrix y = Matrix::Zero(m.rows(), m.cols());
    double mu = config.mu0;

    while (res.iters < config.maxiter && !res.converged) {
        const double inv_mu = 1.0 / mu;
        res.low_rank = svt(m - res.sparse + y * inv_mu, inv_mu);
        {
            const Matrix target = m - res.low_rank + y * inv_mu;
            const double tau = lambda * inv_mu;
            for (Eigen::Index j = 0; j < target.cols(); ++j)
                for (Eigen::Index i = 0; i < target.rows(); ++i)
                    res.sparse(i, j) = soft_threshold(target(i, j), tau);
        }
        const Matrix r = m - res.low_rank - res.sparse;
        y += mu * r;
        mu = std::min(config.rho * mu, config.mu_max);
        ++res.iters;

        const double worst = r.lpNorm<Eigen::Infinity>();
        if (!std::isfinite(worst))
            throw NumericalError("rpca: non-finite iterate at iteration " + std::to_string(res.iters));
        res.residual_history.push_back(worst);
        res.final_residual = worst;
        res.converged = worst < config.eps;
    }
    return res;
}

RecoveryResult rpca_unfold_recover(const DenseTensor& t, const RpcaConfig& config) {
    config.validate();
    if (!t.all_finite())
        throw ArgumentError("rpca: input tensor contains non-finite entries");

    const Index n_modes = t.order();
    RecoveryResult res;
    res.z.reserve(static_cast<std::size_t>(n_modes));

    int best = -1;
    double best_residual = std::numeric_limits<double>::infinity();
    std::vector<RpcaMatrixResult> runs;
    runs.reserve(static_cast<std::size_t>(n_modes));
    for (Index n = 0; n < n_modes; ++n) {
        runs.push_back(rpca_matrix(unfold(t, n + 1), config));
        res.z.push_back(fold(runs.back().low_rank, n + 1, t.dims()));
        if (runs.back().final_residual < best_residual) { // strict: ties keep the lowest mode
            best_residual = runs.back().final_residual;
            best = static_cast<int>(n);
        }
    }

    const RpcaMatrixResult& win = runs[static_cast<std::size_t>(best)];
    res.x = res.z[static_cast<std::size_t>(best)];
    res.e = fold(win.sparse, best + 1, t.dims());
    res.iters = win.iters;
    res.converged = win.converged;
    res.residual_history = win.residual_history;
    res.final_residuals.assign(1, win.final_residual);
    res.objective = nuclear_norm(win.low_rank) +
                    (config.lambda > 0.0
                         ? config.lambda
                         : 1.0 / std::sqrt(static_cast<double>(std::max(win.low_rank.rows(),
                                                                         win.low_rank.cols())))) *
                        win.sparse.cwiseAbs().sum();
    return res;
}

} // namespace tenrec
