#pragma once

#include <limits>
#include <vector>

namespace dpw::solvable1d {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

/// Piecewise-constant potential on the real line. `values[i]` holds on
/// (breakpoints[i-1], breakpoints[i]) with the outer pieces unbounded, so
/// values.size() == breakpoints.size() + 1.
struct PiecewisePotential {
    std::vector<double> breakpoints;
    std::vector<double> values{0.0};

    static PiecewisePotential constant(double v);
    /// `left` for z < at, `right` for z > at.
    static PiecewisePotential step(double at, double left, double right);

    /// Throws ContractError on unsorted breakpoints, size mismatch,
    /// negative or non-finite values.
    void validate() const;

    /// Right-continuous evaluation.
    double operator()(double z) const;
    double min_value() const;
    double max_value() const;
    bool is_zero() const;

    /// Breakpoints strictly inside (a, b).
    std::vector<double> breakpoints_in(double a, double b) const;

    bool operator==(const PiecewisePotential&) const = default;
};

struct PointInteraction {
    enum class Kind { delta_prime, delta, none, neumann_decoupled };

    Kind kind = Kind::none;
    double strength = 0.0;  // beta for delta_prime, alpha for delta

    static PointInteraction delta_prime(double beta) { return {Kind::delta_prime, beta}; }
    static PointInteraction delta(double alpha) { return {Kind::delta, alpha}; }
    static PointInteraction free() { return {Kind::none, 0.0}; }
    static PointInteraction decoupled() { return {Kind::neumann_decoupled, infinity}; }

    /// delta_prime(inf) and neumann_decoupled: the two half-lines separate.
    bool is_decoupled() const;
    void validate() const;

    bool operator==(const PointInteraction&) const = default;
};

/// Limit-model data: -u'' + V u on (L_minus, L_plus), Neumann ends and a
/// point interaction at z = 0.
struct PointModel1d {
    double L_minus = -1.0;
    double L_plus = 1.0;
    PointInteraction interaction{};
    PiecewisePotential potential{};

    void validate() const;
};

/// beta = 4 / gamma; gamma = inf gives 0.
double beta_from_gamma(double gamma);

}  // namespace dpw::solvable1d
