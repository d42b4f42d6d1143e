#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "dpw/linalg/spectrum.hpp"
#include "dpw/waveguide/assemble.hpp"

namespace dpw::waveguide {

struct ModeResult {
    linalg::Spectrum spectrum;
    std::vector<std::vector<double>> vectors;  // M-orthonormal
};

/// Lowest m eigenpairs. With V == 0 the constant on every connected
/// component is deflated.
ModeResult solve_modes(const AssembledPair& pair, int m, double tol = 1e-9, std::uint64_t seed = 0);

struct ProfilePoint {
    double z = 0.0;
    double value = 0.0;
    Side side = Side::shared;  // lower / upper for the two rows at z = 0
};

/// mu^{-1/2} * integral of u over the cross-section on every z line
/// (trapezoid on the mesh nodes). The slit line gives two rows, lower and
/// upper copy; meshes without a slit line still report z = 0 once.
std::vector<ProfilePoint> cross_section_average(const Mesh2d& mesh, std::span<const double> u,
                                                const WaveguideGeometry& geom);

/// CSV with header "z,value,side" (side is lower, upper or empty).
void write_profile_csv(std::ostream& os, const std::vector<ProfilePoint>& profile);

}  // namespace dpw::waveguide
