#pragma once

#include <optional>
#include <vector>

namespace dpw::capacity {

struct WindowSpec {
    int n = 2;       // ambient dimension, 2 or 3
    double d = 0.0;  // window scale d_eps
    double r = 1.0;  // half-width of the reference window (n = 2)
    std::optional<double> capD_ref;  // cap of the reference window (n = 3)
};

/// Leading-order capacity: 2 pi / |ln d| for n = 2, d * capD_ref for n = 3.
/// DomainError for n = 2 with d >= 1, ContractError otherwise on bad input.
double cap_asymptotic(const WindowSpec& spec);

struct CapacityMeshParams {
    int n_phi = 64;      // angular cells around the slit on the base mesh
    int level = 0;       // uniform refinements of the base mesh
    double cg_tol = 1e-12;
    int max_iter = 200000;
};

/// Nodal potential on the ring mesh of the unit disk minus the slit.
/// Node (i, j) sits at mu_i, phi_j with index i * n_phi + j; row i = 0 is the
/// slit (each interior slit point appears twice, once per face, the tips
/// once), row n_s is the unit circle.
struct CapacityPotential {
    int n_phi = 0;
    int n_s = 0;
    std::vector<double> x, y, values;
};

struct CapacityResult {
    double energy = 0.0;  // Dirichlet energy of the discrete potential
    double flux = 0.0;    // flux through both slit faces
    CapacityPotential potential;
    int cg_iterations = 0;
};

/// Capacity of the slit {z = 0, |x| <= d r} relative to the unit disk, by
/// mapped Q1 finite elements on a ring mesh in slit-adapted elliptic
/// coordinates (cells shrink toward the tips). Levels are nested and share one
/// bilinear form, so the energy is non-increasing in `level`.
/// ResolutionError below 6 cells across the slit; ContractError unless
/// 0 < d r < 1.
CapacityResult cap_numeric_2d(const WindowSpec& spec, const CapacityMeshParams& params = {});

/// gamma_eps = cap / mu.
double gamma_eps(double cap_val, double mu_cross);

/// Window scale realising gamma_target: n = 2 gives exp(-2 pi / (gamma eps s_width)),
/// n = 3 gives gamma eps^2 s_width / capD_ref. InfeasibleError when d > eps.
double window_for_gamma(double gamma_target, double eps, double s_width, int n,
                        std::optional<double> capD_ref = std::nullopt);

/// |a - b| / |a|
double relative_gap(double a, double b);

}  // namespace dpw::capacity
