#include "tenrec/pasd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tenrec/linops.hpp"

namespace tenrec {

void PasdConfig::validate(const std::vector<Index>& dims) const {
    const std::size_t n_modes = dims.size();
    dims_product(dims);
    if (lambdas.size() != n_modes)
        throw ArgumentError("config: expected " + std::to_string(n_modes) + " lambdas, got " +
                            std::to_string(lambdas.size()));
    for (std::size_t n = 0; n < n_modes; ++n)
        if (!(lambdas[n] > 0.0) || !std::isfinite(lambdas[n]))
            throw ArgumentError("config: lambda of mode " + std::to_string(n + 1) + " must be positive");
    if (ranks.size() != n_modes)
        throw ArgumentError("config: expected " + std::to_string(n_modes) + " ranks, got " +
                            std::to_string(ranks.size()));
    for (std::size_t n = 0; n < n_modes; ++n) {
        if (ranks[n] < 1)
            throw ArgumentError("config: rank of mode " + std::to_string(n + 1) + " must be positive");
        if (ranks[n] > dims[n])
            throw ArgumentError("config: rank " + std::to_string(ranks[n]) + " exceeds dimension " +
                                std::to_string(dims[n]) + " in mode " + std::to_string(n + 1));
    }
    if (!(mu0 > 0.0) || !std::isfinite(mu0))
        throw ArgumentError("config: mu0 must be positive");
    if (!(mu_max >= mu0))
        throw ArgumentError("config: mu_max must be at least mu0");
    if (!(rho > 1.0) || !std::isfinite(rho))
        throw ArgumentError("config: rho must exceed 1");
    if (!(eps > 0.0))
        throw ArgumentError("config: eps must be positive");
    if (maxiter < 1)
        throw ArgumentError("config: maxiter must be positive");
    if (!output_weights.empty()) {
        if (output_weights.size() != n_modes)
            throw ArgumentError("config: expected " + std::to_string(n_modes) + " output weights");
        for (std::size_t n = 0; n < n_modes; ++n)
            if (!(output_weights[n] > 0.0) || !std::isfinite(output_weights[n]))
                throw ArgumentError("config: output weight of mode " + std::to_string(n + 1) +
                                    " must be positive");
    }
}

std::vector<double> PasdConfig::default_lambdas(const std::vector<Index>& dims) {
    const Index total = dims_product(dims);
    const double n_modes = static_cast<double>(dims.size());
    std::vector<double> lambdas(dims.size());
    for (std::size_t n = 0; n < dims.size(); ++n) {
        const double big = static_cast<double>(std::max(dims[n], total / dims[n]));
        lambdas[n] = std::sqrt(big) / n_modes;
    }
    return lambdas;
}

Index PasdConfig::default_rank_bound(Index target_rank) {
    if (target_rank < 1)
        throw ArgumentError("target rank must be positive");
    return (12 * target_rank) / 10; // floor(1.2 r) in exact integer arithmetic
}

namespace detail {

Matrix update_u_from(const Matrix& g, const Matrix& v_prev, const Matrix& u_prev) {
    if (auto u = procrustes(g, v_prev))
        return std::move(*u);
    return u_prev;
}

Matrix update_v_from(const Matrix& g, const Matrix& u_next, double lambda, double mu) {
    return svt(u_next.transpose() * g, lambda / mu);
}

} // namespace detail

Matrix pasd_g_matrix(const DenseTensor& t, const DenseTensor& e, const DenseTensor& y, double mu,
                     Index mode) {
    if (!t.same_dims(e) || !t.same_dims(y))
        throw ArgumentError("g_matrix: dimension mismatch");
    const double inv_mu = 1.0 / mu;
    std::vector<double> buf(static_cast<std::size_t>(t.size()));
    const double* td = t.data();
    const double* ed = e.data();
    const double* yd = y.data();
    for (Index i = 0; i < t.size(); ++i)
        buf[static_cast<std::size_t>(i)] = td[i] - ed[i] + yd[i] * inv_mu;
    const Index rows = t.dim(mode);
    Matrix g(rows, t.size() / rows);
    detail::unfold_into(buf.data(), t.dims(), mode, g.data());
    return g;
}

Matrix update_u(const PasdState& state, const DenseTensor& t, Index mode) {
    const auto n = static_cast<std::size_t>(mode - 1);
    const Matrix g = pasd_g_matrix(t, state.e, state.y[n], state.mu, mode);
    return detail::update_u_from(g, state.v[n], state.u[n]);
}

Matrix update_v(const PasdState& state, const DenseTensor& t, Index mode, double lambda) {
    const auto n = static_cast<std::size_t>(mode - 1);
    const Matrix g = pasd_g_matrix(t, state.e, state.y[n], state.mu, mode);
    return detail::update_v_from(g, state.u[n], lambda, state.mu);
}

DenseTensor update_e(const PasdState& state, const DenseTensor& t) {
    const Index n_modes = t.order();
    const Index total = t.size();
    const double inv_mu = 1.0 / state.mu;
    std::vector<double> acc(static_cast<std::size_t>(total), 0.0);
    const double* td = t.data();
    for (Index n = 0; n < n_modes; ++n) {
        const Matrix zmat = state.u[static_cast<std::size_t>(n)] * state.v[static_cast<std::size_t>(n)];
        DenseTensor z = fold(zmat, n + 1, t.dims());
        const double* zd = z.data();
        const double* yd = state.y[static_cast<std::size_t>(n)].data();
        for (Index i = 0; i < total; ++i)
            acc[static_cast<std::size_t>(i)] += td[i] - zd[i] + yd[i] * inv_mu;
    }
    const double inv_n = 1.0 / static_cast<double>(n_modes);
    const double tau = 1.0 / (state.mu * static_cast<double>(n_modes));
    for (double& a : acc)
        a = soft_threshold(a * inv_n, tau);
    return DenseTensor::from_raw(t.dims(), std::move(acc));
}

RecoveryResult pasd_recover(const DenseTensor& t, const PasdConfig& config,
                            const IterationObserver& observer) {
    config.validate(t.dims());
    if (!t.all_finite())
        throw ArgumentError("pasd: input tensor contains non-finite entries");

    const std::vector<Index>& dims = t.dims();
    const Index n_modes = t.order();
    const Index total = t.size();
    const double* td = t.data();

    PasdState s;
    s.mu = config.mu0;
    s.e = DenseTensor::zeros(dims);
    s.y.assign(static_cast<std::size_t>(n_modes), DenseTensor::zeros(dims));
    s.u.resize(static_cast<std::size_t>(n_modes));
    s.v.resize(static_cast<std::size_t>(n_modes));
    for (Index n = 0; n < n_modes; ++n) {
        const Index rows = dims[static_cast<std::size_t>(n)];
        const Index rank = config.ranks[static_cast<std::size_t>(n)];
        s.u[static_cast<std::size_t>(n)] = Matrix::Identity(rows, rank);
        s.v[static_cast<std::size_t>(n)] = Matrix::Zero(rank, total / rows);
    }

    std::vector<DenseTensor> z(static_cast<std::size_t>(n_modes), DenseTensor::zeros(dims));
    DenseTensor scratch = DenseTensor::zeros(dims);
    DenseTensor e_prev = DenseTensor::zeros(dims);
    Matrix g;
    std::vector<double> resid(static_cast<std::size_t>(n_modes),
                              std::numeric_limits<double>::infinity());

    RecoveryResult res;
    res.residual_history.reserve(static_cast<std::size_t>(config.maxiter));
    bool converged = false;
    double mu_used = s.mu;

    while (s.iter < config.maxiter && !converged) {
        mu_used = s.mu;
        const double inv_mu = 1.0 / s.mu;

        // Per-mode basis/coefficient updates. Each mode reads only the shared
        // previous-iteration state (e, y, mu) and its own u/v, so the order of
        // modes cannot change the result.
        for (Index n = 0; n < n_modes; ++n) {
            const auto ni = static_cast<std::size_t>(n);
            const Index rows = dims[ni];
            {
                const double* ed = s.e.data();
                const double* yd = s.y[ni].data();
                double* sd = scratch.data();
                for (Index i = 0; i < total; ++i)
                    sd[i] = td[i] - ed[i] + yd[i] * inv_mu;
            }
            g.resize(rows, total / rows);
            detail::unfold_into(scratch.data(), dims, n + 1, g.data());
            s.u[ni] = detail::update_u_from(g, s.v[ni], s.u[ni]);
            s.v[ni] = detail::update_v_from(g, s.u[ni], config.lambdas[ni], s.mu);
            const Matrix zmat = s.u[ni] * s.v[ni];
            detail::fold_into(zmat.data(), dims, n + 1, z[ni].data());
        }

        // Sparse update from the mean of H_n = T - Z_n + Y_n / mu.
        e_prev.values() = s.e.values();
        {
            double* sd = scratch.data();
            std::fill(sd, sd + total, 0.0);
            for (Index n = 0; n < n_modes; ++n) {
                const double* zd = z[static_cast<std::size_t>(n)].data();
                const double* yd = s.y[static_cast<std::size_t>(n)].data();
                for (Index i = 0; i < total; ++i)
                    sd[i] += td[i] - zd[i] + yd[i] * inv_mu;
            }
            const double inv_n = 1.0 / static_cast<double>(n_modes);
            const double tau = 1.0 / (s.mu * static_cast<double>(n_modes));
            double* ed = s.e.data();
            for (Index i = 0; i < total; ++i)
                ed[i] = soft_threshold(sd[i] * inv_n, tau);
        }

        // Multiplier ascent with the same mu the updates used.
        bool bad = false;
        for (Index n = 0; n < n_modes; ++n) {
            const auto ni = static_cast<std::size_t>(n);
            const double* zd = z[ni].data();
            const double* ed = s.e.data();
            double* yd = s.y[ni].data();
            double worst = 0.0;
            for (Index i = 0; i < total; ++i) {
                const double r = td[i] - zd[i] - ed[i];
                yd[i] += s.mu * r;
                const double a = std::fabs(r);
                if (a > worst)
                    worst = a;
                bad |= !std::isfinite(r);
            }
            resid[ni] = worst;
        }
        const double mu_next = std::min(config.rho * s.mu, config.mu_max);
        ++s.iter;
        if (bad)
            throw NumericalError("pasd: non-finite iterate at iteration " + std::to_string(s.iter));

        res.residual_history.push_back(*std::max_element(resid.begin(), resid.end()));
        converged = true;
        for (double r : resid)
            converged = converged && (r < config.eps);

        s.mu = mu_next;
        if (observer) {
            IterationView view{s.iter, mu_used, mu_next, resid, s.e, z, s.y, &s.u, &s.v};
            observer(view);
        }
    }

    // Auxiliary multipliers at the final iterate. From their definition
    // Yhat_n = Y_n^prev + mu * (T - Z_n - E_prev) and the ascent step
    // Y_n = Y_n^prev + mu * (T - Z_n - E), so Yhat_n = Y_n + mu * (E - E_prev).
    s.y_hat.assign(static_cast<std::size_t>(n_modes), DenseTensor::zeros(dims));
    for (Index n = 0; n < n_modes; ++n) {
        const auto ni = static_cast<std::size_t>(n);
        const double* yd = s.y[ni].data();
        const double* ed = s.e.data();
        const double* pd = e_prev.data();
        double* hd = s.y_hat[ni].data();
        for (Index i = 0; i < total; ++i)
            hd[i] = yd[i] + mu_used * (ed[i] - pd[i]);
    }

    res.converged = converged;
    res.iters = s.iter;
    res.final_residuals = resid;
    res.objective = tensor_norm(s.e, NormKind::l1);
    for (Index n = 0; n < n_modes; ++n)
        res.objective += config.lambdas[static_cast<std::size_t>(n)] *
                         nuclear_norm(s.v[static_cast<std::size_t>(n)]);
    res.e = std::move(s.e);
    res.z = std::move(z);
    res.x = weighted_mean(res.z, config.alphas());
    res.y = std::move(s.y);
    res.y_hat = std::move(s.y_hat);
    if (converged)
        res.certificate = suboptimality_certificate(res, t, config);
    return res;
}

Certificate suboptimality_certificate(const RecoveryResult& result, const DenseTensor& t,
                                      const PasdConfig& config) {
    if (!result.converged)
        throw StateError("certificate requires a converged result");
    const auto n_modes = static_cast<std::size_t>(t.order());
    if (result.y.size() != n_modes || result.y_hat.size() != n_modes)
        throw StateError("certificate requires the final multipliers");

    const Index total = t.size();
    std::vector<double> acc(static_cast<std::size_t>(total), 0.0);
    for (std::size_t n = 0; n < n_modes; ++n) {
        const double* yd = result.y[n].data();
        const double* hd = result.y_hat[n].data();
        for (Index i = 0; i < total; ++i)
            acc[static_cast<std::size_t>(i)] += yd[i] - hd[i];
    }
    double eps_hat = 0.0;
    for (double a : acc)
        eps_hat = std::max(eps_hat, std::fabs(a));

    const int k_star = result.iters - 1;
    const double geom = config.rho * (1.0 + config.rho) / (config.rho - 1.0) +
                        0.5 / std::pow(config.rho, k_star);
    double dim_sum = 0.0;   // sum_n I_n * prod_{m!=n} I_m
    double lam_term = 0.0;  // sum_n lambda_n * I_n * prod_{m!=n} I_m * eps
    for (std::size_t n = 0; n < n_modes; ++n) {
        dim_sum += static_cast<double>(total);
        lam_term += config.lambdas[n] * static_cast<double>(total) * config.eps;
    }
    const double nn = static_cast<double>(n_modes);
    const double c = dim_sum * geom / (config.mu0 * nn * nn) + tensor_norm(t, NormKind::l1);
    return Certificate{eps_hat, c, c * eps_hat + lam_term};
}

} // namespace tenrec
