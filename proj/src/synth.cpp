#include "tenrec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tenrec/linops.hpp"

namespace tenrec {

void SynthSpec::validate() const {
    const Index total = dims_product(dims);
    (void)total;
    if (ranks.size() != dims.size())
        throw ArgumentError("SynthSpec: ranks and dims must have the same order");
    for (std::size_t n = 0; n < dims.size(); ++n) {
        if (ranks[n] < 1)
            throw ArgumentError("SynthSpec: rank of mode " + std::to_string(n + 1) + " must be positive");
        if (ranks[n] > dims[n])
            throw ArgumentError("SynthSpec: rank " + std::to_string(ranks[n]) + " exceeds dimension " +
                                std::to_string(dims[n]) + " in mode " + std::to_string(n + 1));
        // The mode-n rank of the core cannot exceed the product of the other
        // core dimensions, so larger requests are unattainable.
        Index other = 1;
        for (std::size_t m = 0; m < ranks.size(); ++m)
            if (m != n)
                other *= ranks[m];
        if (ranks[n] > other)
            throw ArgumentError("SynthSpec: rank " + std::to_string(ranks[n]) + " in mode " +
                                std::to_string(n + 1) + " is unattainable (product of other ranks is " +
                                std::to_string(other) + ")");
    }
    if (!(corruption_fraction >= 0.0 && corruption_fraction <= 1.0))
        throw ArgumentError("SynthSpec: corruption fraction must lie in [0, 1]");
}

namespace {

Matrix haar_orthonormal(Index rows, Index cols, RngStream& rng) {
    Matrix a(rows, cols);
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            a(i, j) = rng.gaussian();
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
    const Matrix r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
    // Fixing the sign of diag(R) makes Q unique and Haar-distributed.
    for (Eigen::Index j = 0; j < cols; ++j)
        if (r(j, j) < 0.0)
            q.col(j) = -q.col(j);
    return q;
}

void verify_tucker_rank(const DenseTensor& t, const std::vector<Index>& ranks) {
    for (std::size_t n = 0; n < ranks.size(); ++n) {
        const ThinSvd svd = thin_svd(unfold(t, static_cast<Index>(n + 1)));
        const double sigma1 = svd.s(0);
        const Index r = ranks[n];
        if (!(svd.s(r - 1) >= 1e-8 * sigma1))
            throw NumericalError("generated tensor misses rank " + std::to_string(r) + " in mode " +
                                 std::to_string(n + 1));
        if (r < svd.s.size() && !(svd.s(r) <= 1e-10 * sigma1))
            throw NumericalError("generated tensor exceeds rank " + std::to_string(r) + " in mode " +
                                 std::to_string(n + 1));
    }
}

} // namespace

DenseTensor gen_lowrank_tucker(const SynthSpec& spec) {
    spec.validate();
    const Index core_size = dims_product(spec.ranks);

    RngStream core_rng(spec.seed, 0, rng_purpose::core);
    std::vector<double> core_data(static_cast<std::size_t>(core_size));
    for (double& x : core_data)
        x = core_rng.gaussian();
    DenseTensor t = DenseTensor::from_raw(spec.ranks, std::move(core_data));

    for (std::size_t n = 0; n < spec.dims.size(); ++n) {
        RngStream factor_rng(spec.seed, 0, rng_purpose::factor + n + 1);
        const Matrix q = haar_orthonormal(spec.dims[n], spec.ranks[n], factor_rng);
        t = mode_product(t, q, static_cast<Index>(n + 1));
    }

    verify_tucker_rank(t, spec.ranks);
    return t;
}

Corruption corrupt_sparse(const DenseTensor& t, double rho, std::uint64_t seed, CorruptMode mode) {
    if (!(rho >= 0.0 && rho <= 1.0))
        throw ArgumentError("corrupt_sparse: rho must lie in [0, 1]");
    const Index total = t.size();
    const Index count = static_cast<Index>(std::llround(rho * static_cast<double>(total)));

    Corruption out{t, {}};
    if (count == 0)
        return out;

    // Partial Fisher-Yates gives a uniform draw without replacement.
    RngStream support_rng(seed, 0, rng_purpose::support);
    std::vector<Index> pool(static_cast<std::size_t>(total));
    std::iota(pool.begin(), pool.end(), Index{0});
    for (Index i = 0; i < count; ++i) {
        const Index j = i + static_cast<Index>(support_rng.below(static_cast<std::uint64_t>(total - i)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    pool.resize(static_cast<std::size_t>(count));
    std::sort(pool.begin(), pool.end());

    RngStream noise_rng(seed, 0, rng_purpose::noise);
    for (Index idx : pool) {
        if (mode == CorruptMode::additive_uniform)
            out.tensor[idx] += noise_rng.uniform(-1.0, 1.0);
        else
            out.tensor[idx] = noise_rng.uniform(0.0, 255.0);
    }
    out.support = std::move(pool);
    return out;
}

double rse(const DenseTensor& x, const DenseTensor& t0) {
    if (!x.same_dims(t0))
        throw ArgumentError("rse: dimension mismatch");
    const double ref = tensor_norm(t0, NormKind::frobenius);
    const double err = (x.flat() - t0.flat()).norm();
    if (ref == 0.0)
        return err == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return err / ref;
}

double psnr(const DenseTensor& x, const DenseTensor& t0, double peak) {
    if (!x.same_dims(t0))
        throw ArgumentError("psnr: dimension mismatch");
    if (!(peak > 0.0))
        throw ArgumentError("psnr: peak must be positive");
    const double mse = (x.flat() - t0.flat()).squaredNorm() / static_cast<double>(x.size());
    if (mse == 0.0)
        return 99.0;
    return std::min(99.0, 10.0 * std::log10(peak * peak / mse));
}

} // namespace tenrec
