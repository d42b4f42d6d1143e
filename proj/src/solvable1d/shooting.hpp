#pragma once
// Shooting through a chain of constant-potential slabs and point jumps.

#include <vector>

#include "dpw/solvable1d/model.hpp"
#include "dpw/solvable1d/transfer.hpp"

namespace dpw::solvable1d::detail {

struct Op {
    bool is_jump = false;
    double length = 0.0;  // slab
    double v = 0.0;       // slab potential
    TransferMatrix jump{};
    bool jump_moves_u = false;  // delta': u jumps, u' continuous
};

struct Profile {
    std::vector<Op> ops;
    double length = 0.0;
    double v_min = 0.0;
    double jump_bound = 0.0;  // |alpha| of a delta jump, 0 otherwise
};

/// Slabs of (z0, z1) split at potential breakpoints, with `interaction`
/// inserted at z = 0 when 0 lies inside (z0, z1) and it is not `none`.
Profile make_profile(double z0, double z1, const PiecewisePotential& v, const PointInteraction* interaction);

struct ShotResult {
    double u = 1.0;
    double du = 0.0;
    long zeros = 0;  // zeros of u in (z0, z1]
};

/// Initial state (1, 0); state renormalised when its norm exceeds 1e100.
ShotResult shoot(const Profile& p, double lambda);

/// Number of Neumann eigenvalues strictly below lambda.
long count_below(const Profile& p, double lambda);

/// Monodromy (product of all ops, first op applied first).
TransferMatrix monodromy(const Profile& p, double lambda);

struct Eigen1dOptions {
    double abs_tol = 1e-10;
    long max_evaluations = 1000000;
};

/// m smallest Neumann eigenvalues by grid scan, oscillation-count refinement
/// and bisection on the secular function.
std::vector<double> lowest_eigenvalues(const Profile& p, int m, const Eigen1dOptions& opt = {});

/// All Neumann eigenvalues <= lambda_max.
std::vector<double> eigenvalues_below(const Profile& p, double lambda_max, const Eigen1dOptions& opt = {});

}  // namespace dpw::solvable1d::detail
