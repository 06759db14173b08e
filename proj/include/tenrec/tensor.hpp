#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "tenrec/errors.hpp"

namespace tenrec {

using Index = std::int64_t;

/// Column-major dense matrix of doubles; `data()` is contiguous.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Product of a dimension vector, with overflow and positivity checks.
Index dims_product(const std::vector<Index>& dims);

/// Dense N-order tensor of 64-bit floats.
///
/// Entries are stored with the first index varying fastest (mode-1 fibers are
/// contiguous), so the mode-1 unfolding is a plain reshape of the buffer.
class DenseTensor {
public:
    DenseTensor() = default;

    static DenseTensor zeros(std::vector<Index> dims);

    /// Takes ownership of `data`; rejects length mismatch and non-finite entries.
    static DenseTensor from_data(std::vector<Index> dims, std::vector<double> data);

    /// Same as from_data but skips the finiteness scan. For internal arithmetic
    /// whose inputs are already validated.
    static DenseTensor from_raw(std::vector<Index> dims, std::vector<double> data);

    Index order() const { return static_cast<Index>(dims_.size()); }
    const std::vector<Index>& dims() const { return dims_; }
    Index dim(Index mode) const { return dims_[static_cast<std::size_t>(mode - 1)]; } // mode is 1-based
    Index size() const { return static_cast<Index>(data_.size()); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    double operator[](Index i) const { return data_[static_cast<std::size_t>(i)]; }
    double& operator[](Index i) { return data_[static_cast<std::size_t>(i)]; }

    /// Entry at a 0-based multi-index (bounds-checked).
    double at(const std::vector<Index>& index) const;
    double& at(const std::vector<Index>& index);

    /// Linear offset of a 0-based multi-index.
    Index offset(const std::vector<Index>& index) const;

    bool same_dims(const DenseTensor& other) const { return dims_ == other.dims_; }
    bool all_finite() const;

    Eigen::Map<Vector> flat() { return {data_.data(), size()}; }
    Eigen::Map<const Vector> flat() const { return {data_.data(), size()}; }

private:
    DenseTensor(std::vector<Index> dims, std::vector<double> data)
        : dims_(std::move(dims)), data_(std::move(data)) {}

    std::vector<Index> dims_;
    std::vector<double> data_;
};

/// Mode-n unfolding X_(n): rows = I_n, columns = mode-n fibers ordered with the
/// lower non-mode indices varying fastest. `mode` is 1-based.
Matrix unfold(const DenseTensor& t, Index mode);

/// Inverse of unfold for the given mode and dimension vector; bit-exact round trip.
DenseTensor fold(const Matrix& m, Index mode, const std::vector<Index>& dims);

/// Mode-n product: replaces dimension I_n by m.rows(); requires m.cols() == I_n.
DenseTensor mode_product(const DenseTensor& t, const Matrix& m, Index mode);

enum class NormKind { frobenius, l1, linf };

double tensor_norm(const DenseTensor& t, NormKind kind);

namespace detail {
// Raw unfold/fold between a tensor buffer and a column-major I_n x (size/I_n)
// matrix buffer. Both buffers must be preallocated to the right sizes.
void unfold_into(const double* tensor_src, const std::vector<Index>& dims, Index mode, double* matrix_dst);
void fold_into(const double* matrix_src, const std::vector<Index>& dims, Index mode, double* tensor_dst);
} // namespace detail

} // namespace tenrec
