#include "tenrec/tensor.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <string>

namespace tenrec {

Index dims_product(const std::vector<Index>& dims) {
    if (dims.empty())
        throw ArgumentError("tensor order must be at least 1");
    Index prod = 1;
    for (std::size_t n = 0; n < dims.size(); ++n) {
        const Index d = dims[n];
        if (d < 1)
            throw ArgumentError("dimension " + std::to_string(n + 1) + " must be positive, got " +
                                std::to_string(d));
        if (prod > std::numeric_limits<Index>::max() / d)
            throw ArgumentError("dimension product overflows");
        prod *= d;
    }
    return prod;
}

DenseTensor DenseTensor::zeros(std::vector<Index> dims) {
    const Index n = dims_product(dims);
    return DenseTensor(std::move(dims), std::vector<double>(static_cast<std::size_t>(n), 0.0));
}

DenseTensor DenseTensor::from_data(std::vector<Index> dims, std::vector<double> data) {
    DenseTensor t = from_raw(std::move(dims), std::move(data));
    if (!t.all_finite())
        throw ArgumentError("tensor data contains non-finite entries");
    return t;
}

DenseTensor DenseTensor::from_raw(std::vector<Index> dims, std::vector<double> data) {
    const Index n = dims_product(dims);
    if (n != static_cast<Index>(data.size()))
        throw ArgumentError("data length " + std::to_string(data.size()) +
                            " does not match dimension product " + std::to_string(n));
    return DenseTensor(std::move(dims), std::move(data));
}

Index DenseTensor::offset(const std::vector<Index>& index) const {
    if (index.size() != dims_.size())
        throw ArgumentError("index order mismatch");
    Index off = 0;
    Index stride = 1;
    for (std::size_t n = 0; n < dims_.size(); ++n) {
        if (index[n] < 0 || index[n] >= dims_[n])
            throw ArgumentError("index out of range in mode " + std::to_string(n + 1));
        off += index[n] * stride;
        stride *= dims_[n];
    }
    return off;
}

double DenseTensor::at(const std::vector<Index>& index) const {
    return data_[static_cast<std::size_t>(offset(index))];
}

double& DenseTensor::at(const std::vector<Index>& index) {
    return data_[static_cast<std::size_t>(offset(index))];
}

bool DenseTensor::all_finite() const {
    for (double x : data_)
        if (!std::isfinite(x))
            return false;
    return true;
}

namespace detail {

namespace {

// Split the dimension vector around `mode` (1-based): inner = product of the
// lower modes, outer = product of the higher ones.
struct ModeSplit {
    Index inner;
    Index mode_dim;
    Index outer;
};

ModeSplit split_dims(const std::vector<Index>& dims, Index mode) {
    ModeSplit s{1, dims[static_cast<std::size_t>(mode - 1)], 1};
    for (Index l = 0; l < mode - 1; ++l)
        s.inner *= dims[static_cast<std::size_t>(l)];
    for (Index l = mode; l < static_cast<Index>(dims.size()); ++l)
        s.outer *= dims[static_cast<std::size_t>(l)];
    return s;
}

} // namespace

void unfold_into(const double* tensor_src, const std::vector<Index>& dims, Index mode, double* matrix_dst) {
    const ModeSplit s = split_dims(dims, mode);
    const Index slab = s.inner * s.mode_dim;
    if (s.inner == 1) {
        // Mode-1 fibers are already contiguous: the unfolding is a reshape.
        std::memcpy(matrix_dst, tensor_src, static_cast<std::size_t>(slab * s.outer) * sizeof(double));
        return;
    }
    // Tensor entry (p, r, q) sits at p + inner*r + slab*q and maps to
    // row r, column p + inner*q: each outer slice is an inner x mode_dim transpose.
    for (Index q = 0; q < s.outer; ++q) {
        Eigen::Map<const Matrix> src(tensor_src + q * slab, s.inner, s.mode_dim);
        Eigen::Map<Matrix> dst(matrix_dst + q * slab, s.mode_dim, s.inner);
        dst.noalias() = src.transpose();
    }
}

void fold_into(const double* matrix_src, const std::vector<Index>& dims, Index mode, double* tensor_dst) {
    const ModeSplit s = split_dims(dims, mode);
    const Index slab = s.inner * s.mode_dim;
    if (s.inner == 1) {
        std::memcpy(tensor_dst, matrix_src, static_cast<std::size_t>(slab * s.outer) * sizeof(double));
        return;
    }
    for (Index q = 0; q < s.outer; ++q) {
        Eigen::Map<const Matrix> src(matrix_src + q * slab, s.mode_dim, s.inner);
        Eigen::Map<Matrix> dst(tensor_dst + q * slab, s.inner, s.mode_dim);
        dst.noalias() = src.transpose();
    }
}

} // namespace detail

namespace {

void check_mode(const std::vector<Index>& dims, Index mode) {
    if (mode < 1 || mode > static_cast<Index>(dims.size()))
        throw ArgumentError("mode " + std::to_string(mode) + " out of range 1.." +
                            std::to_string(dims.size()));
}

} // namespace

Matrix unfold(const DenseTensor& t, Index mode) {
    check_mode(t.dims(), mode);
    const Index rows = t.dim(mode);
    const Index cols = t.size() / rows;
    Matrix m(rows, cols);
    detail::unfold_into(t.data(), t.dims(), mode, m.data());
    return m;
}

DenseTensor fold(const Matrix& m, Index mode, const std::vector<Index>& dims) {
    const Index total = dims_product(dims);
    check_mode(dims, mode);
    const Index rows = dims[static_cast<std::size_t>(mode - 1)];
    if (m.rows() != rows || m.cols() != total / rows)
        throw ArgumentError("matrix shape " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                            " does not match mode-" + std::to_string(mode) + " unfolding of the target dims");
    DenseTensor t = DenseTensor::zeros(dims);
    detail::fold_into(m.data(), dims, mode, t.data());
    return t;
}

DenseTensor mode_product(const DenseTensor& t, const Matrix& m, Index mode) {
    check_mode(t.dims(), mode);
    if (m.cols() != t.dim(mode))
        throw ArgumentError("mode_product: matrix has " + std::to_string(m.cols()) +
                            " columns, mode-" + std::to_string(mode) + " dimension is " +
                            std::to_string(t.dim(mode)));
    std::vector<Index> new_dims = t.dims();
    new_dims[static_cast<std::size_t>(mode - 1)] = m.rows();
    const Matrix product = m * unfold(t, mode);
    return fold(product, mode, new_dims);
}

double tensor_norm(const DenseTensor& t, NormKind kind) {
    const auto v = t.flat();
    switch (kind) {
    case NormKind::frobenius:
        return v.norm();
    case NormKind::l1:
        return v.lpNorm<1>();
    case NormKind::linf:
        return v.lpNorm<Eigen::Infinity>();
    }
    throw ArgumentError("unknown norm kind");
}

} // namespace tenrec
