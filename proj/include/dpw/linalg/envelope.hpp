#pragma once

#include <span>
#include <vector>

#include "dpw/linalg/csr.hpp"

namespace dpw::linalg {

/// Reverse Cuthill-McKee ordering of the (symmetrised) pattern of `a`.
/// perm[new] = old. Disconnected components are ordered one after another.
std::vector<Index> reverse_cuthill_mckee(const CsrMatrix& a);

/// Number of stored entries a profile factorisation of `a` would need
/// under the given ordering (perm[new] = old).
Index envelope_size(const CsrMatrix& a, std::span<const Index> perm);

/// Profile (skyline) Cholesky factorisation A = P^T L L^T P of a symmetric
/// positive definite matrix.
class EnvelopeCholesky {
public:
    /// Orders with reverse Cuthill-McKee. Throws ContractError when a pivot is
    /// not positive and BudgetError when the profile exceeds `max_entries`.
    explicit EnvelopeCholesky(const CsrMatrix& a, Index max_entries = Index{1} << 27);

    Index size() const noexcept { return n_; }
    Index stored_entries() const noexcept { return static_cast<Index>(values_.size()); }

    /// x = A^{-1} b
    void solve(std::span<const double> b, std::span<double> x) const;
    std::vector<double> solve(std::span<const double> b) const;

private:
    Index n_ = 0;
    std::vector<Index> perm_;        // perm_[new] = old
    std::vector<Index> first_;       // first column stored in row i
    std::vector<Index> row_start_;   // offset of row i in values_
    std::vector<double> values_;     // row i holds columns first_[i]..i
};

}  // namespace dpw::linalg
