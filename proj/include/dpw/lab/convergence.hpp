#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpw/lab/rates.hpp"
#include "dpw/solvable1d/model.hpp"
#include "dpw/waveguide/geometry.hpp"
#include "dpw/waveguide/mesh.hpp"

namespace dpw::lab {

struct StudyConfig {
    /// Lengths, cross-section and r. eps and d are set per row.
    waveguide::WaveguideGeometry geometry;
    /// Target gamma; empty selects the gamma = infinity design d = eps.
    std::optional<double> gamma;
    std::vector<double> eps_list;  // strictly decreasing, in (0, 1)
    solvable1d::PiecewisePotential potential;
    int m = 5;
    /// Base grading. Breakpoints of the potential are added as z lines.
    waveguide::Grading grading;
    /// Solve on levels refine and refine + 1 and extrapolate.
    bool richardson = true;
    double tol = 1e-9;
    /// 0 picks (lambda_m^gamma + 1)^{-1} / 2.
    double cutoff = 0.0;
    int threads = 1;
    std::uint64_t seed = 0;

    /// ContractError on a malformed list, m < 1 or gamma <= 0.
    void validate() const;
};

struct ConvergenceRow {
    double eps = 0.0;
    double d = 0.0;
    double gamma_eps = 0.0;  // cap_asymptotic(d) / mu
    bool feasible = true;
    std::string infeasible_reason;
    bool mesh_limited = false;
    long long nodes = 0;  // fine level

    std::vector<double> lambda;       // extrapolated when richardson is on
    std::vector<double> mesh_error;   // |fine - coarse| / 3, 0 without richardson
    std::vector<double> lambda_diff;  // |lambda_k,eps - lambda_k^gamma|
    std::vector<double> diff;         // resolvent scale, index pairing
    std::vector<double> diff_nearest; // resolvent scale, nearest limit value
    double rate = 0.0;
    double dist_out = 0.0;
    double dist_in = 0.0;
    double dist_h = 0.0;
};

struct ModeSummary {
    int k = 0;  // 1-based
    bool exact = false;      // the pair agrees to rounding in every row (kernel)
    bool monotone = false;   // diff strictly decreasing along the used rows
    double slope = 0.0;      // fit_rate over the used rows, NaN if not fitted
    double r2 = 0.0;
    double c_fit = 0.0;      // fit_constant(diff, rate)
    double residual_factor = 0.0;
};

struct StudyResult {
    std::vector<ConvergenceRow> rows;  // sorted by eps, descending
    std::vector<double> limit;         // lambda_k^gamma
    double beta = 0.0;
    double cutoff = 0.0;
    std::vector<ModeSummary> modes;
    /// Feasible rows that are not mesh limited, in row order.
    std::vector<std::size_t> used_rows;
    bool hausdorff_monotone = false;
    /// dist_h <= max_k diff + 1e-10 in the last used row.
    bool hausdorff_bounded = false;
};

/// Runs every eps: window scale from window_for_gamma (or d = eps), mesh,
/// assembly, m modes; the limit spectrum comes from eigenvalues_1d with the
/// delta' strength 4 / gamma (free for gamma = infinity). Infeasible rows are
/// kept and flagged. A row is mesh limited when its estimated mesh error
/// exceeds 10% of the smallest |lambda_k,eps - lambda_k^gamma| of the study
/// for some non-exact k. InfeasibleError "need >= 3 feasible eps" before any
/// solve when fewer than 3 rows are feasible.
StudyResult convergence_study(const StudyConfig& cfg);

/// Feasibility of one row without solving. Returns the empty string when
/// feasible, else the violated condition.
std::string row_feasibility(const StudyConfig& cfg, double eps, double* d_out = nullptr);

}  // namespace dpw::lab
