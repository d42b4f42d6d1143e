#pragma once

#include <array>

#include "dpw/linalg/csr.hpp"
#include "dpw/solvable1d/model.hpp"
#include "dpw/waveguide/mesh.hpp"

namespace dpw::waveguide {

using ElementMatrix = std::array<std::array<double, 4>, 4>;

/// Q1 stiffness (plus v times mass) and mass of an hx x hz rectangle, corners
/// counter-clockwise from the lower left.
std::array<ElementMatrix, 2> q1_element(double hx, double hz, double v);

struct AssembledPair {
    linalg::CsrMatrix K;  // stiffness + V(z) mass
    linalg::CsrMatrix M;  // consistent mass
    solvable1d::PiecewisePotential potential;
    std::vector<int> component;  // connected component of every node
    int components = 1;
};

/// V enters through its value at each element's z midpoint, so the potential
/// term depends on z only.
AssembledPair assemble(const Mesh2d& mesh, const solvable1d::PiecewisePotential& potential);

}  // namespace dpw::waveguide
