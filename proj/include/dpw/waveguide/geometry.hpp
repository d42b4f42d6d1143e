#pragma once

namespace dpw::waveguide {

/// Two tubes (L_minus, 0) x eps*S and (0, L_plus) x eps*S, S = (s_a, s_b),
/// joined through the window {z = 0, |x| <= d r}.
struct WaveguideGeometry {
    double L_minus = -1.0;
    double L_plus = 1.0;
    double eps = 0.2;
    double d = 0.0;  // window scale; 0 closes the window
    double s_a = -0.5;
    double s_b = 0.5;
    double r = 0.4;  // reference window (-r, r)

    double window_half() const { return d * r; }
    double x_min() const { return eps * s_a; }
    double x_max() const { return eps * s_b; }
    /// Measure of the scaled cross-section, eps (s_b - s_a).
    double mu_cross() const { return eps * (s_b - s_a); }
    /// First non-zero Neumann eigenvalue of S, (pi / (s_b - s_a))^2.
    double lambda_S() const;

    /// Conditions needed to mesh the domain: L_minus < 0 < L_plus,
    /// 0 < eps < 1, s_a < 0 < s_b, d >= 0, r > 0 and a window that fits the
    /// cross-section. ContractError otherwise.
    void validate_structure() const;

    /// Modelling conditions d <= eps and [-r, r] strictly inside (s_a, s_b).
    /// InfeasibleError naming the violated condition.
    void check_paper_conditions() const;
};

}  // namespace dpw::waveguide
