#include "tenrec/linops.hpp"

#include <lapacke.h>

#include <algorithm>
#include <mutex>
#include <string>

namespace tenrec {

namespace {

// Results must be reproducible run to run, so LAPACK's BLAS backend is pinned
// to one thread if it exposes the OpenBLAS control hook.
extern "C" void openblas_set_num_threads(int) __attribute__((weak));

void pin_blas_threads() {
    static std::once_flag flag;
    std::call_once(flag, [] {
        if (openblas_set_num_threads)
            openblas_set_num_threads(1);
    });
}

void apply_sign_convention(Matrix& u, Matrix& v) {
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
        Eigen::Index pivot = 0;
        double best = std::abs(u(0, j));
        for (Eigen::Index i = 1; i < u.rows(); ++i) {
            const double a = std::abs(u(i, j));
            if (a > best) { // strict: ties keep the lowest row index
                best = a;
                pivot = i;
            }
        }
        if (u(pivot, j) < 0.0) {
            u.col(j) = -u.col(j);
            v.col(j) = -v.col(j);
        }
    }
}

} // namespace

ThinSvd thin_svd(const Matrix& m) {
    if (m.rows() < 1 || m.cols() < 1)
        throw ArgumentError("thin_svd: matrix must be nonempty");
    if (!m.allFinite())
        throw ArgumentError("thin_svd: input contains non-finite entries");
    pin_blas_threads();

    const lapack_int rows = static_cast<lapack_int>(m.rows());
    const lapack_int cols = static_cast<lapack_int>(m.cols());
    const lapack_int k = std::min(rows, cols);

    Matrix work = m; // dgesdd destroys its input
    ThinSvd out;
    out.u.resize(rows, k);
    out.s.resize(k);
    Matrix vt(k, cols);

    const lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'S', rows, cols, work.data(), rows,
                                           out.s.data(), out.u.data(), rows, vt.data(), k);
    if (info > 0)
        throw NumericalError("thin_svd: dgesdd did not converge (info=" + std::to_string(info) + ")");
    if (info < 0)
        throw ArgumentError("thin_svd: bad argument " + std::to_string(-info) + " to dgesdd");

    out.v = vt.transpose();
    apply_sign_convention(out.u, out.v);
    return out;
}

double nuclear_norm(const Matrix& m) {
    return thin_svd(m).s.sum();
}

Matrix svt(const Matrix& m, double tau) {
    if (tau < 0.0 || !std::isfinite(tau))
        throw ArgumentError("svt: threshold must be a nonnegative finite number");
    if (tau == 0.0)
        return m;
    const ThinSvd svd = thin_svd(m);
    Eigen::Index keep = 0;
    while (keep < svd.s.size() && svd.s(keep) > tau)
        ++keep;
    if (keep == 0)
        return Matrix::Zero(m.rows(), m.cols());
    const Vector shrunk = svd.s.head(keep).array() - tau;
    return svd.u.leftCols(keep) * shrunk.asDiagonal() * svd.v.leftCols(keep).transpose();
}

std::optional<Matrix> procrustes(const Matrix& g, const Matrix& v) {
    if (g.cols() != v.cols())
        throw ArgumentError("procrustes: g and v must have the same number of columns");
    if (v.rows() > g.rows())
        throw ArgumentError("procrustes: v has more rows than g (R must not exceed I)");
    const Matrix w = g * v.transpose();
    const double scale = std::max(1.0, g.norm() * v.norm());
    if (w.norm() <= 1e-14 * scale)
        return std::nullopt;
    const ThinSvd svd = thin_svd(w);
    return svd.u * svd.v.transpose();
}

DenseTensor shrink(const DenseTensor& t, double tau) {
    if (tau < 0.0 || !std::isfinite(tau))
        throw ArgumentError("shrink: threshold must be a nonnegative finite number");
    std::vector<double> out(t.values());
    for (double& x : out)
        x = soft_threshold(x, tau);
    return DenseTensor::from_raw(t.dims(), std::move(out));
}

} // namespace tenrec
