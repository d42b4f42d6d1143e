#include "dpw/lab/convergence.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "dpw/capacity/capacity.hpp"
#include "dpw/error.hpp"
#include "dpw/solvable1d/spectrum1d.hpp"
#include "dpw/waveguide/assemble.hpp"
#include "dpw/waveguide/modes.hpp"

namespace dpw::lab {

namespace {

waveguide::WaveguideGeometry row_geometry(const StudyConfig& cfg, double eps, double d) {
    auto g = cfg.geometry;
    g.eps = eps;
    g.d = d;
    return g;
}

double window_scale(const StudyConfig& cfg, double eps) {
    if (!cfg.gamma) return eps;
    return capacity::window_for_gamma(*cfg.gamma, eps, cfg.geometry.s_b - cfg.geometry.s_a, 2);
}

std::vector<double> solve_level(const StudyConfig& cfg, const waveguide::WaveguideGeometry& g, int refine,
                                std::uint64_t seed, long long* nodes) {
    auto grading = cfg.grading;
    for (double t : cfg.potential.breakpoints_in(g.L_minus, g.L_plus)) grading.z_lines.push_back(t);
    grading.refine = refine;
    const auto mesh = waveguide::build_mesh(g, grading);
    if (nodes) *nodes = static_cast<long long>(mesh.node_count());
    const auto pair = waveguide::assemble(mesh, cfg.potential);
    return waveguide::solve_modes(pair, cfg.m, cfg.tol, seed).spectrum.values;
}

void solve_row(const StudyConfig& cfg, ConvergenceRow& row, std::uint64_t seed) {
    const auto g = row_geometry(cfg, row.eps, row.d);
    const int base = cfg.grading.refine;
    row.lambda = solve_level(cfg, g, cfg.richardson ? base + 1 : base, seed, &row.nodes);
    row.mesh_error.assign(row.lambda.size(), 0.0);
    if (!cfg.richardson) return;
    const auto coarse = solve_level(cfg, g, base, seed, nullptr);
    for (std::size_t k = 0; k < row.lambda.size(); ++k) {
        const double delta = row.lambda[k] - coarse[k];
        row.mesh_error[k] = std::abs(delta) / 3;
        row.lambda[k] += delta / 3;
    }
}

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

}  // namespace

void StudyConfig::validate() const {
    if (eps_list.empty()) throw ContractError("StudyConfig: eps list is empty");
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0 && eps_list[i] < 1)) throw ContractError("StudyConfig: every eps must lie in (0, 1)");
        if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
            throw ContractError("StudyConfig: eps list must be strictly decreasing");
    }
    if (m < 1) throw ContractError("StudyConfig: m must be at least 1");
    if (gamma && !(*gamma > 0)) throw ContractError("StudyConfig: gamma must be positive");
    if (!(cutoff >= 0 && cutoff < 1)) throw ContractError("StudyConfig: cutoff must lie in [0, 1)");
    potential.validate();
}

std::string row_feasibility(const StudyConfig& cfg, double eps, double* d_out) {
    try {
        const double d = window_scale(cfg, eps);
        if (d_out) *d_out = d;
        const auto g = row_geometry(cfg, eps, d);
        g.check_paper_conditions();
        g.validate_structure();
    } catch (const InfeasibleError& e) {
        return e.condition();
    } catch (const ContractError& e) {
        return e.what();
    }
    return {};
}

StudyResult convergence_study(const StudyConfig& cfg) {
    cfg.validate();
    StudyResult res;

    res.rows.resize(cfg.eps_list.size());
    std::vector<std::size_t> feasible;
    for (std::size_t i = 0; i < cfg.eps_list.size(); ++i) {
        auto& row = res.rows[i];
        row.eps = cfg.eps_list[i];
        row.infeasible_reason = row_feasibility(cfg, row.eps, &row.d);
        row.feasible = row.infeasible_reason.empty();
        if (row.feasible) feasible.push_back(i);
    }
    if (feasible.size() < 3) {
        throw InfeasibleError("need >= 3 feasible eps", "convergence_study: need ≥ 3 feasible ε, got " +
                                                            std::to_string(feasible.size()));
    }

    solvable1d::PointModel1d limit_model;
    limit_model.L_minus = cfg.geometry.L_minus;
    limit_model.L_plus = cfg.geometry.L_plus;
    res.beta = cfg.gamma ? solvable1d::beta_from_gamma(*cfg.gamma) : 0.0;
    limit_model.interaction = solvable1d::PointInteraction::delta_prime(res.beta);
    limit_model.potential = cfg.potential;
    res.limit = solvable1d::eigenvalues_1d(limit_model, cfg.m).values;
    res.cutoff = cfg.cutoff > 0 ? cfg.cutoff : 0.5 / (res.limit.back() + 1);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t j = next++; j < feasible.size(); j = next++) {
            const std::size_t i = feasible[j];
            try {
                solve_row(cfg, res.rows[i], cfg.seed + i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int nt = std::clamp(cfg.threads, 1, static_cast<int>(feasible.size()));
    std::vector<std::thread> pool;
    for (int w = 1; w < nt; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);

    const std::size_t m = res.limit.size();
    const auto limit_set = resolvent_map(std::span<const double>(res.limit), res.cutoff);
    for (std::size_t i : feasible) {
        auto& row = res.rows[i];
        row.gamma_eps = capacity::gamma_eps(capacity::cap_asymptotic({2, row.d, cfg.geometry.r, {}}),
                                            row_geometry(cfg, row.eps, row.d).mu_cross());
        row.rate = cfg.gamma ? rate_delta(row.eps, 2, GammaMode::finite)
                             : rate_delta(row.eps, 2, GammaMode::infinite, row.gamma_eps);
        row.lambda_diff.resize(m);
        row.diff.resize(m);
        row.diff_nearest.resize(m);
        for (std::size_t k = 0; k < m; ++k) {
            row.lambda_diff[k] = std::abs(row.lambda[k] - res.limit[k]);
            const double r = 1 / (row.lambda[k] + 1);
            row.diff[k] = std::abs(r - 1 / (res.limit[k] + 1));
            double best = std::numeric_limits<double>::infinity();
            for (double l : res.limit) best = std::min(best, std::abs(r - 1 / (l + 1)));
            row.diff_nearest[k] = best;
        }
        const auto set = resolvent_map(std::span<const double>(row.lambda), res.cutoff);
        row.dist_out = dist_out(set, limit_set);
        row.dist_in = dist_in(set, limit_set);
        row.dist_h = std::max(row.dist_out, row.dist_in);
    }

    res.modes.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        auto& mode = res.modes[k];
        mode.k = static_cast<int>(k + 1);
        const double floor = 1e-8 * std::max(1.0, std::abs(res.limit[k]));
        mode.exact = std::all_of(feasible.begin(), feasible.end(),
                                 [&](std::size_t i) { return res.rows[i].lambda_diff[k] <= floor; });
        if (mode.exact) continue;
        double smallest = std::numeric_limits<double>::infinity();
        for (std::size_t i : feasible) smallest = std::min(smallest, res.rows[i].lambda_diff[k]);
        for (std::size_t i : feasible)
            if (res.rows[i].mesh_error[k] > 0.1 * smallest) res.rows[i].mesh_limited = true;
    }
    for (std::size_t i : feasible)
        if (!res.rows[i].mesh_limited) res.used_rows.push_back(i);

    std::vector<double> eps_used, rate_used, dist_used;
    for (std::size_t i : res.used_rows) {
        eps_used.push_back(res.rows[i].eps);
        rate_used.push_back(res.rows[i].rate);
        dist_used.push_back(res.rows[i].dist_h);
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < m; ++k) {
        auto& mode = res.modes[k];
        if (mode.exact) {
            mode.monotone = true;
            mode.slope = mode.r2 = mode.c_fit = mode.residual_factor = nan;
            continue;
        }
        std::vector<double> diffs;
        for (std::size_t i : res.used_rows) diffs.push_back(res.rows[i].diff[k]);
        mode.monotone = diffs.size() >= 2 && strictly_decreasing(diffs);
        mode.slope = mode.r2 = mode.c_fit = mode.residual_factor = nan;
        try {
            const auto f = fit_rate(eps_used, diffs);
            mode.slope = f.slope;
            mode.r2 = f.r2;
        } catch (const ContractError&) {
        }
        try {
            const auto c = fit_constant(diffs, rate_used);
            mode.c_fit = c.c;
            mode.residual_factor = c.residual_factor;
        } catch (const ContractError&) {
        }
    }
    res.hausdorff_monotone = dist_used.size() >= 2 && strictly_decreasing(dist_used);
    if (!res.used_rows.empty()) {
        const auto& last = res.rows[res.used_rows.back()];
        res.hausdorff_bounded = last.dist_h <= *std::max_element(last.diff.begin(), last.diff.end()) + 1e-10;
    }
    return res;
}

}  // namespace dpw::lab
