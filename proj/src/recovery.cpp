#include "tenrec/recovery.hpp"

#include <string>

namespace tenrec {

DenseTensor weighted_mean(const std::vector<DenseTensor>& z, const std::vector<double>& weights) {
    if (z.empty())
        throw ArgumentError("weighted_mean: no tensors");
    if (weights.size() != z.size())
        throw ArgumentError("weighted_mean: expected " + std::to_string(z.size()) + " weights");
    double wsum = 0.0;
    for (double w : weights) {
        if (!(w > 0.0))
            throw ArgumentError("weighted_mean: weights must be positive");
        wsum += w;
    }
    DenseTensor out = DenseTensor::zeros(z.front().dims());
    for (std::size_t n = 0; n < z.size(); ++n) {
        if (!z[n].same_dims(out))
            throw ArgumentError("weighted_mean: dimension mismatch");
        out.flat() += (weights[n] / wsum) * z[n].flat();
    }
    return out;
}

} // namespace tenrec
