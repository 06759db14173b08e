#pragma once

#include <cmath>
#include <optional>

#include "tenrec/tensor.hpp"

namespace tenrec {

/// Thin singular value decomposition m = u * diag(s) * v^T with k = min(rows, cols).
///
/// u is rows x k and v is cols x k, both with orthonormal columns; s is
/// nonincreasing and nonnegative. Sign convention: in every u-column the entry
/// of largest magnitude is nonnegative (ties resolved to the lowest row index).
struct ThinSvd {
    Matrix u;
    Vector s;
    Matrix v;
};

ThinSvd thin_svd(const Matrix& m);

/// Sum of singular values.
double nuclear_norm(const Matrix& m);

/// Singular value thresholding: u * diag(max(s - tau, 0)) * v^T.
/// tau == 0 returns the input unchanged.
Matrix svt(const Matrix& m, double tau);

/// Orthogonal procrustes: the columnwise-orthonormal U (g.rows() x v.rows())
/// minimizing |U*v - g|_F, i.e. the polar factor of g*v^T. Returns nullopt when
/// g*v^T is numerically zero (|g*v^T|_F <= 1e-14 * max(1, |g|_F*|v|_F)); every
/// orthonormal U is optimal there and the caller owns the tie-break.
std::optional<Matrix> procrustes(const Matrix& g, const Matrix& v);

/// Elementwise soft threshold sgn(x) * max(|x| - tau, 0).
inline double soft_threshold(double x, double tau) {
    if (x > tau)
        return x - tau;
    if (x < -tau)
        return x + tau;
    return 0.0;
}

/// Elementwise shrinkage of a tensor.
DenseTensor shrink(const DenseTensor& t, double tau);

} // namespace tenrec
