#include "dpw/lab/gaps.hpp"

#include <algorithm>
#include <cmath>

#include "dpw/capacity/capacity.hpp"
#include "dpw/error.hpp"
#include "dpw/waveguide/bloch.hpp"

namespace dpw::lab {

namespace {

double overlap(const solvable1d::Interval& a, const solvable1d::Interval& b) {
    return std::min(a.hi, b.hi) - std::max(a.lo, b.lo);
}

double mid_distance(const solvable1d::Interval& a, const solvable1d::Interval& b) {
    return std::abs((a.lo + a.hi) - (b.lo + b.hi)) / 2;
}

}  // namespace

int GapReport::matched_within(double rel_tol) const {
    return static_cast<int>(std::count_if(matches.begin(), matches.end(), [&](const GapMatch& g) {
        return g.kp && g.deviation() <= rel_tol;
    }));
}

GapReport gap_comparison_study(const GapConfig& cfg) {
    if (!(cfg.period > 0)) throw ContractError("gap_comparison_study: period must be positive");
    if (!(cfg.lambda_max > 0)) throw ContractError("gap_comparison_study: lambda_max must be positive");
    auto g = cfg.geometry;
    g.L_minus = -cfg.period / 2;
    g.L_plus = cfg.period / 2;
    const double s_width = g.s_b - g.s_a;
    const bool free_design = cfg.gamma && std::isinf(*cfg.gamma);
    if (free_design)
        g.d = g.eps;
    else if (cfg.gamma)
        g.d = capacity::window_for_gamma(*cfg.gamma, g.eps, s_width, 2);
    g.check_paper_conditions();

    GapReport rep;
    rep.d = g.d;
    solvable1d::PointInteraction limit = solvable1d::PointInteraction::decoupled();
    if (free_design) {
        rep.beta = 0.0;
        limit = solvable1d::PointInteraction::free();
    } else if (cfg.gamma) {
        rep.beta = solvable1d::beta_from_gamma(*cfg.gamma);
        limit = solvable1d::PointInteraction::delta_prime(rep.beta);
    } else if (g.d > 0) {
        const double gamma = capacity::gamma_eps(capacity::cap_asymptotic({2, g.d, g.r, {}}), g.mu_cross());
        rep.beta = solvable1d::beta_from_gamma(gamma);
        limit = solvable1d::PointInteraction::delta_prime(rep.beta);
    } else {
        rep.beta = solvable1d::infinity;
    }

    auto grading = cfg.grading;
    for (double t : cfg.potential.breakpoints_in(g.L_minus, g.L_plus)) grading.z_lines.push_back(t);
    const auto cell = waveguide::build_mesh(g, grading);
    waveguide::BlochOptions opt;
    opt.tol = cfg.tol;
    opt.seed = cfg.seed;
    opt.threads = cfg.threads;
    rep.waveguide = waveguide::bloch_bands(cell, cfg.potential, waveguide::uniform_thetas(cfg.thetas), cfg.lambda_max, opt);
    rep.kp = solvable1d::kp_bands(cfg.period, limit, cfg.potential, cfg.lambda_max);

    for (const auto& gap : rep.waveguide.gaps) {
        GapMatch match{gap, std::nullopt, 0.0, 0.0};
        const solvable1d::Interval* best = nullptr;
        for (const auto& k : rep.kp.gaps) {
            if (!best) {
                best = &k;
                continue;
            }
            const double ob = overlap(gap, *best), ok = overlap(gap, k);
            if (ok > 0 || ob > 0) {
                if (ok > ob) best = &k;
            } else if (mid_distance(gap, k) < mid_distance(gap, *best)) {
                best = &k;
            }
        }
        if (best) {
            match.kp = *best;
            match.rel_lo = std::abs(gap.lo - best->lo) / std::max(1.0, std::abs(best->lo));
            match.rel_hi = std::abs(gap.hi - best->hi) / std::max(1.0, std::abs(best->hi));
        }
        rep.matches.push_back(match);
    }
    return rep;
}

}  // namespace dpw::lab
