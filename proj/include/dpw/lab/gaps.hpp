#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dpw/solvable1d/floquet.hpp"
#include "dpw/waveguide/geometry.hpp"
#include "dpw/waveguide/mesh.hpp"

namespace dpw::lab {

struct GapConfig {
    /// Cross-section, r and eps. The cell is (-period / 2, period / 2).
    waveguide::WaveguideGeometry geometry;
    double period = 2.0;
    /// Target gamma for the window; infinity selects d = eps with the free
    /// limit, empty uses geometry.d as given.
    std::optional<double> gamma;
    solvable1d::PiecewisePotential potential;
    double lambda_max = 100.0;
    int thetas = 9;
    waveguide::Grading grading;
    double tol = 1e-9;
    int threads = 1;
    std::uint64_t seed = 0;
};

struct GapMatch {
    solvable1d::Interval waveguide;
    std::optional<solvable1d::Interval> kp;  // KP gap overlapping most, else nearest
    double rel_lo = 0.0;  // |lo - lo_kp| / max(1, lo_kp)
    double rel_hi = 0.0;
    double deviation() const { return rel_lo > rel_hi ? rel_lo : rel_hi; }
};

struct GapReport {
    double d = 0.0;
    double beta = 0.0;  // limit strength; infinity when the window is closed
    solvable1d::BandStructure waveguide;
    solvable1d::BandStructure kp;
    std::vector<GapMatch> matches;  // one per waveguide gap

    /// Waveguide gaps whose endpoints are within rel_tol of their KP gap.
    int matched_within(double rel_tol) const;
};

/// Bloch bands of the waveguide cell against kp_bands of the limit with
/// beta = 4 / gamma_eps (gamma_eps from the window actually used; d = 0
/// decouples the cells).
GapReport gap_comparison_study(const GapConfig& cfg);

}  // namespace dpw::lab
