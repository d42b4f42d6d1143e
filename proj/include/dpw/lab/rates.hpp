#pragma once

#include <span>
#include <vector>

#include "dpw/linalg/spectrum.hpp"

namespace dpw::lab {

enum class GammaMode { finite, infinite };

/// Rate shape with unit constant, plus v_term:
///   finite,   n = 2:  eps^{1/2} |ln eps|
///   finite,   n >= 3: eps^{1/2}
///   infinite:         eps^{1/2} + gamma_eps^{-1/2}
/// ContractError unless 0 < eps < 1 (and gamma_eps > 0 in infinite mode).
double rate_delta(double eps, int n, GammaMode mode, double gamma_eps_val = 0.0, double v_term = 0.0);

/// {(lambda + 1)^{-1} >= cutoff} together with 0, sorted descending.
std::vector<double> resolvent_map(const linalg::Spectrum& spec, double cutoff);
std::vector<double> resolvent_map(std::span<const double> values, double cutoff);

/// max over x in X of min over y in Y |x - y|. ContractError on empty sets.
double dist_out(std::span<const double> x, std::span<const double> y);
/// dist_out(Y, X)
double dist_in(std::span<const double> x, std::span<const double> y);
double dist_hausdorff(std::span<const double> x, std::span<const double> y);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;  // log err = intercept + slope log eps
    double r2 = 0.0;
    int dropped = 0;         // points with err <= 0, left out
};

/// Least squares of log err against log eps. Non-positive errors are dropped
/// (counted in `dropped`, with a warning on stderr); ContractError when fewer
/// than 3 points remain or the eps values coincide.
RateFit fit_rate(std::span<const double> eps, std::span<const double> err);

struct ConstantFit {
    double c = 0.0;                // geometric mean of err / rate
    double residual_factor = 0.0;  // max over points of max(q / c, c / q)
};

/// Single constant with err ~ c rate, fitted in log space. Points with
/// err <= 0 are skipped; ContractError when none remain.
ConstantFit fit_constant(std::span<const double> err, std::span<const double> rate);

}  // namespace dpw::lab
