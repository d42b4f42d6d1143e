#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace dpw::linalg {

using Index = std::int64_t;

struct Triplet {
    Index row;
    Index col;
    double value;
};

/// Compressed sparse row matrix. Immutable after construction.
class CsrMatrix {
public:
    CsrMatrix() = default;

    /// Duplicates are summed, columns sorted, explicit zeros kept. When
    /// `symmetric` is set the stored pattern and values must be exactly
    /// symmetric, otherwise StructuralError is thrown.
    static CsrMatrix from_triplets(Index nrows, Index ncols, std::span<const Triplet> triplets,
                                   bool symmetric = false);

    Index rows() const noexcept { return nrows_; }
    Index cols() const noexcept { return ncols_; }
    Index nnz() const noexcept { return static_cast<Index>(values_.size()); }
    bool symmetric() const noexcept { return symmetric_; }

    std::span<const Index> row_offsets() const noexcept { return row_offsets_; }
    std::span<const Index> col_indices() const noexcept { return col_indices_; }
    std::span<const double> values() const noexcept { return values_; }

    /// y = A x
    void multiply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> multiply(std::span<const double> x) const;

    /// Entry (i, j); zero when not stored.
    double at(Index i, Index j) const;
    std::vector<double> diagonal() const;

    /// max_i sum_j |a_ij|
    double norm_inf() const;
    double max_abs() const;

    /// alpha * this + beta * other (patterns merged).
    CsrMatrix combine(double alpha, const CsrMatrix& other, double beta) const;

    /// Row-major dense copy; intended for small test problems.
    std::vector<double> to_dense() const;

private:
    Index nrows_ = 0;
    Index ncols_ = 0;
    std::vector<Index> row_offsets_{0};
    std::vector<Index> col_indices_;
    std::vector<double> values_;
    bool symmetric_ = false;
};

inline CsrMatrix csr_from_triplets(Index nrows, Index ncols, std::span<const Triplet> triplets,
                                   bool symmetric = false) {
    return CsrMatrix::from_triplets(nrows, ncols, triplets, symmetric);
}

double dot(std::span<const double> a, std::span<const double> b);
/// sum_{i < n} a[i] b[i], four-way unrolled
double dot(const double* a, const double* b, Index n) noexcept;
double norm2(std::span<const double> a);

}  // namespace dpw::linalg
