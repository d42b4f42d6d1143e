#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dpw/linalg/csr.hpp"
#include "dpw/linalg/spectrum.hpp"

namespace dpw::linalg {

enum class Preconditioner {
    automatic,     // shift-invert when the profile fits the budget, else Jacobi
    jacobi,        // diag(K + sigma M)^{-1}
    shift_invert,  // (K + sigma M)^{-1} by envelope Cholesky
};

struct EigenOptions {
    /// Known exact eigenvectors of K (e.g. constants in the kernel). They are
    /// kept out of the iteration and reported as eigenpairs themselves.
    std::vector<std::vector<double>> deflation;
    Preconditioner preconditioner = Preconditioner::automatic;
    double shift = 1.0;              // sigma
    int max_iterations = 300;        // block iterations before the fallback
    int fallback_iterations = 3000;  // shift-invert subspace iterations
    int guard_vectors = -1;          // extra block columns; -1 picks max(4, m/4)
    Index profile_budget = Index{1} << 26;
    bool allow_dense = true;         // direct dense solve for tiny problems
};

struct EigenResult {
    Spectrum spectrum;
    std::vector<std::vector<double>> vectors;  // M-orthonormal, one per value
    int iterations = 0;
    std::string method;
};

/// The m smallest eigenpairs of K u = lambda M u, K symmetric positive
/// semidefinite, M symmetric positive definite.
///
/// Residuals are ||K u - lambda M u|| measured in the diag(M)^{-1} norm with
/// ||u||_M = 1, divided by max(1, |lambda|). Throws ContractError when
/// m >= nrows and ConvergenceError (carrying the residuals) on failure.
EigenResult smallest_eigenpairs(const CsrMatrix& k, const CsrMatrix& m, int count, double tol,
                                std::uint64_t seed, const EigenOptions& options = {});

/// Residual of one pair in the norm described above.
double eigen_residual(const CsrMatrix& k, const CsrMatrix& m, std::span<const double> u, double lambda);

}  // namespace dpw::linalg
