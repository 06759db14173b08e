#pragma once

#include <cstdint>

#include "tenrec/rng.hpp"
#include "tenrec/tensor.hpp"

namespace tenrec {

/// Parameters of one synthetic recovery instance.
struct SynthSpec {
    std::vector<Index> dims;
    std::vector<Index> ranks;        // target Tucker rank r_n per mode
    double corruption_fraction = 0.0; // fraction of entries hit
    std::uint64_t seed = 0;

    void validate() const;
};

/// Random low-Tucker-rank tensor: a standard-normal core multiplied along each
/// mode by a Haar-distributed orthonormal factor (Q of a Gaussian matrix's QR,
/// sign-fixed by the R diagonal). Deterministic per seed. The generated tensor
/// is verified to have numerical mode-n rank exactly ranks[n]:
/// sigma_{r} >= 1e-8*sigma_1 and sigma_{r+1} <= 1e-10*sigma_1 per unfolding.
DenseTensor gen_lowrank_tucker(const SynthSpec& spec);

struct Corruption {
    DenseTensor tensor;
    std::vector<Index> support; // linear indices, ascending
};

enum class CorruptMode {
    additive_uniform,  // add U[-1, 1] draws
    replace_uniform255 // overwrite with U[0, 255] draws (image-like volumes)
};

/// Corrupts exactly round(rho * size) entries chosen uniformly without
/// replacement. Additive mode adds i.i.d. U[-1,1]; replace mode overwrites
/// with U[0,255].
Corruption corrupt_sparse(const DenseTensor& t, double rho, std::uint64_t seed,
                          CorruptMode mode = CorruptMode::additive_uniform);

/// Relative square error |x - t0|_F / |t0|_F. Both zero -> 0; t0 zero with
/// x nonzero -> +infinity.
double rse(const DenseTensor& x, const DenseTensor& t0);

/// Peak signal-to-noise ratio 10*log10(peak^2 / MSE), capped at 99 dB
/// (the cap is also the zero-MSE sentinel).
double psnr(const DenseTensor& x, const DenseTensor& t0, double peak = 255.0);

} // namespace tenrec
