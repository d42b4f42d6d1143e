#pragma once

#include <vector>

#include "dpw/linalg/spectrum.hpp"
#include "dpw/solvable1d/model.hpp"

namespace dpw::solvable1d {

/// u'(L_plus) for the solution started at L_minus with (u, u') = (1, 0).
/// Its zeros are the eigenvalues of the model. For decoupled models the
/// product of the two one-sided Neumann secular functions is returned.
double secular_function(const PointModel1d& model, double lambda);

/// m smallest eigenvalues, bisected to 1e-10 absolute. Residuals hold the
/// final bracket widths. Throws ConvergenceError when the scan cap of 1e6
/// secular evaluations is reached first.
linalg::Spectrum eigenvalues_1d(const PointModel1d& model, int m);

/// Every eigenvalue <= lambda_max (multiplicities repeated).
std::vector<double> eigenvalues_1d_below(const PointModel1d& model, double lambda_max);

/// Lumped P1 finite differences on a grid snapped to L_minus, 0, L_plus and
/// the potential breakpoints, spacing close to h. The two nodes at z = 0 are
/// coupled by (1/beta)[[1,-1],[-1,1]]; beta = 0 merges them, beta = inf
/// leaves them apart. Throws ResolutionError if a subinterval gets fewer
/// than 8 nodes.
linalg::Spectrum fd_eigenvalues_1d(const PointModel1d& model, double h, int m);

}  // namespace dpw::solvable1d
