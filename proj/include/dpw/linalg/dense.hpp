#pragma once

#include <span>
#include <vector>

#include "dpw/linalg/csr.hpp"
#include "dpw/linalg/spectrum.hpp"

namespace dpw::linalg {

/// Small row-major dense matrix.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(Index rows, Index cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols), fill) {}
    DenseMatrix(Index rows, Index cols, std::vector<double> data);

    static DenseMatrix identity(Index n);
    static DenseMatrix from_csr(const CsrMatrix& a);

    Index rows() const noexcept { return rows_; }
    Index cols() const noexcept { return cols_; }

    double& operator()(Index i, Index j) { return data_[static_cast<std::size_t>(i * cols_ + j)]; }
    double operator()(Index i, Index j) const { return data_[static_cast<std::size_t>(i * cols_ + j)]; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    bool is_symmetric(double tol = 0.0) const;

private:
    Index rows_ = 0;
    Index cols_ = 0;
    std::vector<double> data_;
};

struct DenseEigen {
    std::vector<double> values;  // ascending
    DenseMatrix vectors;         // column j belongs to values[j]
};

/// Householder tridiagonalisation followed by implicit QL.
/// Throws ContractError when `a` is not symmetric (relative 1e-12).
DenseEigen dense_symmetric_eigen(const DenseMatrix& a);

/// Full spectrum of a dense symmetric matrix; residuals are zero and
/// `converged` is true.
Spectrum dense_eig_small(const DenseMatrix& a);

/// K u = lambda M u with M positive definite, reduced through the Cholesky
/// factor of M. Eigenvectors are M-orthonormal.
DenseEigen dense_generalized_eigen(const DenseMatrix& k, const DenseMatrix& m);

/// Lower Cholesky factor; ContractError if `a` is not positive definite.
DenseMatrix dense_cholesky(const DenseMatrix& a);

}  // namespace dpw::linalg
