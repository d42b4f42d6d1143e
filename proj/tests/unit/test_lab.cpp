#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "dpw/error.hpp"
#include "dpw/lab/convergence.hpp"
#include "dpw/lab/gaps.hpp"
#include "dpw/lab/rates.hpp"
#include "dpw/solvable1d/floquet.hpp"
#include "oracles.hpp"

using namespace dpw;
using namespace dpw::lab;
using Catch::Approx;

namespace {

// gamma = infinity design on an asymmetric guide, coarse enough for a unit test
StudyConfig small_study() {
    StudyConfig c;
    c.geometry.L_plus = 1.5;
    c.eps_list = {0.4, 0.2, 0.1};
    c.m = 3;
    c.grading.far_cell_z = 0.05;
    return c;
}

}  // namespace

TEST_CASE("rate_delta examples") {
    CHECK(rate_delta(0.01, 2, GammaMode::finite) == Approx(0.1 * std::log(100.0)).epsilon(1e-14));
    CHECK(rate_delta(0.01, 2, GammaMode::finite) == Approx(0.460517).epsilon(1e-6));
    CHECK(rate_delta(0.25, 2, GammaMode::infinite, 16.0) == Approx(0.75).epsilon(1e-14));
    for (double eps : {0.05, 0.3, 0.9}) CHECK(rate_delta(eps, 3, GammaMode::finite) == Approx(std::sqrt(eps)));
    CHECK(rate_delta(0.01, 2, GammaMode::finite, 0.0, 0.5) == Approx(0.5 + 0.1 * std::log(100.0)));
    CHECK_THROWS_AS(rate_delta(0.0, 2, GammaMode::finite), ContractError);
    CHECK_THROWS_AS(rate_delta(1.0, 2, GammaMode::finite), ContractError);
    CHECK_THROWS_AS(rate_delta(0.5, 2, GammaMode::infinite, 0.0), ContractError);
}

TEST_CASE("resolvent_map examples") {
    linalg::Spectrum s;
    s.values = {0.0, 3.0};
    CHECK(resolvent_map(s, 0.1) == std::vector<double>{1.0, 0.25, 0.0});
    s.values = {99.0};
    CHECK(resolvent_map(s, 0.1) == std::vector<double>{0.0});
    s.values = {20.0, 50.0};
    CHECK(resolvent_map(s, 0.5) == std::vector<double>{0.0});
}

TEST_CASE("resolvent_map is antitone") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    for (int t = 0; t < 100; ++t) {
        const double a = u(rng), b = u(rng);
        if (a == b) continue;
        const double lo = std::min(a, b), hi = std::max(a, b);
        const auto ilo = resolvent_map(std::vector<double>{lo}, 0.0);
        const auto ihi = resolvent_map(std::vector<double>{hi}, 0.0);
        CHECK(ilo.front() > ihi.front());
    }
}

TEST_CASE("set distances examples") {
    const std::vector<double> x{0.2, 0.5, 1.0}, y{0.25, 0.5, 1.0};
    CHECK(dist_out(x, x) == 0.0);
    CHECK(dist_in(x, x) == 0.0);
    CHECK(dist_hausdorff(x, x) == 0.0);
    CHECK(dist_out(x, y) == Approx(0.05).epsilon(1e-12));
    CHECK(dist_in(x, y) == Approx(0.05).epsilon(1e-12));
    CHECK(dist_hausdorff(x, y) == Approx(0.05).epsilon(1e-12));
    const std::vector<double> a{0.0}, b{0.0, 0.5};
    CHECK(dist_out(a, b) == 0.0);
    CHECK(dist_in(a, b) == 0.5);
    CHECK(dist_hausdorff(a, b) == 0.5);
    CHECK_THROWS_AS(dist_out(std::vector<double>{}, b), ContractError);
    CHECK_THROWS_AS(dist_hausdorff(a, std::vector<double>{}), ContractError);
}

TEST_CASE("Hausdorff distance is a metric on random finite sets") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> len(1, 6);
    auto draw = [&] {
        std::vector<double> v(static_cast<std::size_t>(len(rng)));
        for (double& e : v) e = u(rng);
        return v;
    };
    for (int t = 0; t < 200; ++t) {
        const auto x = draw(), y = draw(), z = draw();
        CHECK(dist_hausdorff(x, y) == dist_hausdorff(y, x));
        CHECK(dist_hausdorff(x, z) <= dist_hausdorff(x, y) + dist_hausdorff(y, z) + 1e-15);
        CHECK(dist_hausdorff(x, y) == std::max(dist_out(x, y), dist_in(x, y)));
    }
}

TEST_CASE("fit_rate recovers power laws") {
    const std::vector<double> eps{0.4, 0.2, 0.1};
    const auto f = fit_rate(eps, std::vector<double>{0.2, 0.1, 0.05});
    CHECK(f.slope == Approx(1.0).epsilon(1e-12));
    CHECK(f.r2 == Approx(1.0).epsilon(1e-12));
    CHECK(std::exp(f.intercept) == Approx(0.5).epsilon(1e-12));

    std::vector<double> e2{0.4, 0.3, 0.2, 0.1, 0.05}, err;
    for (double e : e2) err.push_back(std::sqrt(e));
    CHECK(fit_rate(e2, err).slope == Approx(0.5).epsilon(1e-12));
}

TEST_CASE("fit_rate of the logarithmic rate against normal equations") {
    const std::vector<double> eps{0.4, 0.3, 0.2, 0.1, 0.05};
    std::vector<double> err;
    for (double e : eps) err.push_back(std::sqrt(e) * std::abs(std::log(e)));
    const auto f = fit_rate(eps, err);

    oracle::Matrix ata(2, std::vector<double>(2, 0.0));
    std::vector<double> atb(2, 0.0);
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const double row[2] = {1.0, std::log(eps[i])};
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) ata[a][b] += row[a] * row[b];
            atb[a] += row[a] * std::log(err[i]);
        }
    }
    const auto coef = oracle::gauss_solve(ata, atb);
    CHECK(f.slope == Approx(coef[1]).epsilon(1e-12));
    CHECK(f.intercept == Approx(coef[0]).epsilon(1e-12));
    // the local log-slope is 1/2 + 1/ln eps, so the fit sits between its extremes
    CHECK(f.slope > 0.5 + 1 / std::log(0.4));
    CHECK(f.slope < 0.5 + 1 / std::log(0.05));
}

TEST_CASE("fit_rate drops non-positive errors and needs three points") {
    const auto f = fit_rate(std::vector<double>{0.4, 0.3, 0.2, 0.1}, std::vector<double>{0.4, 0.0, 0.2, 0.1});
    CHECK(f.dropped == 1);
    CHECK(f.slope == Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(fit_rate(std::vector<double>{0.4, 0.2, 0.1}, std::vector<double>{0.4, -1.0, 0.1}), ContractError);
    CHECK_THROWS_AS(fit_rate(std::vector<double>{0.4, 0.2}, std::vector<double>{0.4, 0.2}), ContractError);
    CHECK_THROWS_AS(fit_rate(std::vector<double>{0.2, 0.2, 0.2}, std::vector<double>{0.4, 0.2, 0.1}), ContractError);
}

TEST_CASE("fit_constant is the geometric mean ratio") {
    const std::vector<double> rate{1.0, 1.0}, err{0.5, 2.0};
    const auto c = fit_constant(err, rate);
    CHECK(c.c == Approx(1.0).epsilon(1e-14));
    CHECK(c.residual_factor == Approx(2.0).epsilon(1e-14));
    const auto e = fit_constant(std::vector<double>{0.3, 0.6, 0.9}, std::vector<double>{1.0, 2.0, 3.0});
    CHECK(e.c == Approx(0.3).epsilon(1e-14));
    CHECK(e.residual_factor == Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(fit_constant(std::vector<double>{0.0}, std::vector<double>{1.0}), ContractError);
}

TEST_CASE("StudyConfig validation") {
    auto c = small_study();
    CHECK_NOTHROW(c.validate());
    c.eps_list = {0.2, 0.4, 0.1};
    CHECK_THROWS_AS(c.validate(), ContractError);
    c.eps_list = {1.0, 0.4, 0.1};
    CHECK_THROWS_AS(c.validate(), ContractError);
    c.eps_list = {0.4, 0.4, 0.1};
    CHECK_THROWS_AS(c.validate(), ContractError);
    c = small_study();
    c.m = 0;
    CHECK_THROWS_AS(c.validate(), ContractError);
    c = small_study();
    c.gamma = -1.0;
    CHECK_THROWS_AS(c.validate(), ContractError);
}

TEST_CASE("row feasibility names d_eps <= eps") {
    StudyConfig c = small_study();
    c.gamma = 40.0;
    double d = 0;
    CHECK(row_feasibility(c, 0.5, &d) == "d_eps <= eps");
    CHECK(row_feasibility(c, 0.05, &d).empty());
    CHECK(d == Approx(std::exp(-2 * std::numbers::pi / (40.0 * 0.05))));
    c.gamma.reset();
    CHECK(row_feasibility(c, 0.3, &d).empty());
    CHECK(d == 0.3);
    c.geometry.r = 0.5;
    CHECK_FALSE(row_feasibility(c, 0.3).empty());
}

TEST_CASE("convergence_study aborts with fewer than three feasible eps") {
    StudyConfig c = small_study();
    c.gamma = 40.0;
    c.eps_list = {0.5, 0.05, 0.04};
    try {
        convergence_study(c);
        FAIL("expected InfeasibleError");
    } catch (const InfeasibleError& e) {
        CHECK(std::string(e.what()).find("need ≥ 3 feasible ε") != std::string::npos);
    }
    c = small_study();
    c.eps_list = {0.4, 0.2};
    CHECK_THROWS_AS(convergence_study(c), InfeasibleError);
}

TEST_CASE("convergence_study in the decoupled design") {
    const auto c = small_study();
    const auto res = convergence_study(c);
    REQUIRE(res.rows.size() == 3);
    REQUIRE(res.limit.size() == 3);
    CHECK(res.beta == 0.0);
    // free guide on (-1, 1.5): (pi k / 2.5)^2
    for (int k = 0; k < 3; ++k) {
        const double exact = std::pow(std::numbers::pi * k / 2.5, 2);
        CHECK(std::abs(res.limit[k] - exact) <= 1e-9 * std::max(1.0, exact));
    }
    CHECK(res.cutoff == Approx(0.5 / (res.limit[2] + 1)));

    for (std::size_t i = 0; i < res.rows.size(); ++i) {
        const auto& row = res.rows[i];
        INFO("eps = " << row.eps);
        CHECK(row.eps == c.eps_list[i]);
        CHECK(row.feasible);
        CHECK(row.d == row.eps);
        CHECK(row.gamma_eps == Approx(2 * std::numbers::pi / std::abs(std::log(row.eps)) / row.eps));
        CHECK(row.rate == Approx(std::sqrt(row.eps) + 1 / std::sqrt(row.gamma_eps)));
        CHECK(row.dist_h == std::max(row.dist_out, row.dist_in));
        const double worst = *std::max_element(row.diff.begin(), row.diff.end());
        CHECK(row.dist_in <= worst + 1e-12);
        for (std::size_t k = 0; k < 3; ++k) {
            CHECK(row.diff[k] >= 0);
            CHECK(row.diff_nearest[k] <= row.diff[k]);
            CHECK(row.diff[k] == Approx(std::abs(1 / (row.lambda[k] + 1) - 1 / (res.limit[k] + 1))));
        }
    }
    // the constant is an exact eigenfunction at every eps
    CHECK(res.modes[0].exact);
    CHECK(std::isnan(res.modes[0].slope));
    for (std::size_t k = 1; k < 3; ++k) {
        INFO("k = " << k + 1);
        CHECK_FALSE(res.modes[k].exact);
        std::vector<double> d;
        for (const auto& row : res.rows) d.push_back(row.lambda_diff[k]);
        CHECK(d[1] < d[0]);
        CHECK(d[2] < d[1]);
    }
}

TEST_CASE("convergence_study is deterministic across thread counts") {
    auto c = small_study();
    c.m = 2;
    const auto a = convergence_study(c);
    c.threads = 3;
    const auto b = convergence_study(c);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].lambda == b.rows[i].lambda);
        CHECK(a.rows[i].diff == b.rows[i].diff);
        CHECK(a.rows[i].nodes == b.rows[i].nodes);
    }
}

TEST_CASE("convergence_study keeps infeasible rows flagged") {
    auto c = small_study();
    c.gamma = 40.0;
    c.m = 2;
    c.eps_list = {0.5, 0.05, 0.045, 0.04};
    const auto res = convergence_study(c);
    REQUIRE(res.rows.size() == 4);
    CHECK_FALSE(res.rows[0].feasible);
    CHECK(res.rows[0].infeasible_reason == "d_eps <= eps");
    CHECK(res.rows[0].lambda.empty());
    CHECK(res.beta == Approx(0.1));
    for (std::size_t i = 1; i < 4; ++i) {
        CHECK(res.rows[i].feasible);
        CHECK(res.rows[i].gamma_eps == Approx(40.0).epsilon(1e-12));
    }
    CHECK(std::find(res.used_rows.begin(), res.used_rows.end(), 0u) == res.used_rows.end());
}

TEST_CASE("gap study with closed windows gives flat bands") {
    GapConfig c;
    c.geometry.eps = 0.25;
    c.geometry.d = 0.0;
    c.lambda_max = 30.0;
    c.thetas = 3;
    c.grading.far_cell_z = 0.05;
    const auto rep = gap_comparison_study(c);
    CHECK(std::isinf(rep.beta));
    // decoupled cells: tube eigenvalues (pi k / 2)^2 below 30 are 0, 2.47, 9.87, 22.2
    REQUIRE(rep.waveguide.bands.size() == 4);
    for (const auto& b : rep.waveguide.bands) CHECK(b.length() <= 1e-8 * std::max(1.0, b.hi));
    CHECK(solvable1d::count_gaps(rep.waveguide) == solvable1d::count_gaps(rep.kp));
    CHECK(rep.matches.size() == rep.waveguide.gaps.size());
    for (const auto& m : rep.matches) {
        REQUIRE(m.kp);
        CHECK(m.deviation() <= 2e-2);
    }
}

TEST_CASE("gap study in the free design has no limit gaps") {
    GapConfig c;
    c.geometry.eps = 0.25;
    c.gamma = std::numeric_limits<double>::infinity();
    c.lambda_max = 12.0;
    c.thetas = 3;
    c.grading.far_cell_z = 0.05;
    const auto rep = gap_comparison_study(c);
    CHECK(rep.beta == 0.0);
    CHECK(rep.d == 0.25);
    CHECK(solvable1d::count_gaps(rep.kp) == 0);
    for (const auto& m : rep.matches) CHECK_FALSE(m.kp);
    CHECK(rep.matched_within(1.0) == 0);
}

TEST_CASE("gap study rejects infeasible windows") {
    GapConfig c;
    c.geometry.eps = 0.5;
    c.gamma = 1000.0;
    CHECK_THROWS_AS(gap_comparison_study(c), InfeasibleError);
    c.gamma = 8.0;
    c.period = 0.0;
    CHECK_THROWS_AS(gap_comparison_study(c), ContractError);
}
