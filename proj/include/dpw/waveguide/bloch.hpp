#pragma once

#include <cstdint>
#include <vector>

#include "dpw/solvable1d/floquet.hpp"
#include "dpw/waveguide/mesh.hpp"

namespace dpw::waveguide {

struct BlochOptions {
    double tol = 1e-9;
    std::uint64_t seed = 0;
    double pair_tol = 1e-9;  // relative match of the doubled eigenvalues
    int threads = 1;         // concurrent theta solves
    int initial_count = 8;   // eigenvalues per theta on the first attempt
};

/// Eigenvalues below lambda_max of the quasi-periodic cell problem
/// u(z = L_plus) = e^{i theta} u(z = L_minus), solved through the real 2x2
/// embedding of the Hermitian pair.
std::vector<double> bloch_eigenvalues(const Mesh2d& cell, const solvable1d::PiecewisePotential& potential,
                                      double theta, int m, const BlochOptions& options = {});

/// Bands [min_theta lambda_k, max_theta lambda_k] below lambda_max. The count
/// per theta grows until every theta has a value above lambda_max. thetas
/// must lie in [0, pi] and contain both ends.
solvable1d::BandStructure bloch_bands(const Mesh2d& cell, const solvable1d::PiecewisePotential& potential,
                                      const std::vector<double>& thetas, double lambda_max,
                                      const BlochOptions& options = {});

/// n points uniform on [0, pi].
std::vector<double> uniform_thetas(int n = 9);

}  // namespace dpw::waveguide
