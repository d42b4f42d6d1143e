#pragma once

#include <vector>

#include "dpw/solvable1d/model.hpp"

namespace dpw::solvable1d {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
    bool operator==(const Interval&) const = default;
};

/// Closed bands and open gaps below a cutoff; gaps are the complement of the
/// bands inside [first band edge, lambda_max].
struct BandStructure {
    std::vector<Interval> bands;
    std::vector<Interval> gaps;
    double lambda_max = 0.0;
};

/// Trace of the one-period monodromy over the cell (-period/2, period/2)
/// with the interaction at 0. Band spectrum is {|D| <= 2}.
double floquet_discriminant(double period, const PointInteraction& interaction, const PiecewisePotential& potential,
                            double lambda);

/// Band edges to 1e-9 by bisection on |D| - 2 after a scan uniform in
/// sqrt(lambda) with extremum refinement. Decoupled interactions give point
/// bands at the Neumann eigenvalues of one period.
BandStructure kp_bands(double period, const PointInteraction& interaction, const PiecewisePotential& potential,
                       double lambda_max);

/// Number of gaps of positive length below lambda_max.
int count_gaps(const BandStructure& bands);

/// Rebuild `gaps` from `bands` (sorted, merged, clipped to lambda_max).
/// Gaps shorter than merge_tol * max(1, lambda) are closed.
BandStructure normalise_bands(std::vector<Interval> bands, double lambda_max, double merge_tol = 1e-8);

}  // namespace dpw::solvable1d
