#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "dpw/error.hpp"
#include "dpw/solvable1d/floquet.hpp"
#include "dpw/solvable1d/spectrum1d.hpp"
#include "dpw/solvable1d/transfer.hpp"
#include "oracles.hpp"

using namespace dpw::solvable1d;
using Catch::Approx;
constexpr double pi = std::numbers::pi;

namespace {

PointModel1d model(double beta, PiecewisePotential v = PiecewisePotential::constant(0.0)) {
    PointModel1d m;
    m.L_minus = -1.0;
    m.L_plus = 1.0;
    m.interaction = std::isinf(beta) ? PointInteraction::decoupled() : PointInteraction::delta_prime(beta);
    m.potential = std::move(v);
    return m;
}

// Eigenvalues of (-1, 1), V = 0, delta'(beta): k = n pi together with the
// roots of 2 cos k = beta k sin k, found by bisection per branch.
std::vector<double> analytic_delta_prime(double beta, int count) {
    std::vector<double> out{0.0};
    auto g = [&](double k) { return 2 * std::cos(k) - beta * k * std::sin(k); };
    for (int n = 0; static_cast<int>(out.size()) < 3 * count; ++n) {
        if (n > 0) out.push_back(std::pow(n * pi, 2));
        double a = n * pi + 1e-12, b = (n + 1) * pi - 1e-12;
        if (g(a) * g(b) < 0) {
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (a + b);
                (g(mid) * g(a) > 0 ? a : b) = mid;
            }
            out.push_back(std::pow(0.5 * (a + b), 2));
        }
    }
    std::sort(out.begin(), out.end());
    out.resize(count);
    return out;
}

// RK4 shooting through (-1, 0), the delta' jump, then (0, 1).
double rk4_secular(double beta, double lambda, int steps) {
    auto y = oracle::rk4_propagate({1.0, 0.0}, lambda, 0.0, 1.0, steps);
    y[0] += beta * y[1];
    y = oracle::rk4_propagate(y, lambda, 0.0, 1.0, steps);
    return y[1];
}

}  // namespace

TEST_CASE("transfer_matrix_free closed forms") {
    const auto t0 = transfer_matrix_free(0.0, 1.0, 0.0);
    CHECK(t0.a == 1.0);
    CHECK(t0.b == 1.0);
    CHECK(t0.c == 0.0);
    CHECK(t0.d == 1.0);
    const auto t1 = transfer_matrix_free(pi * pi, 1.0, 0.0);
    CHECK(t1.a == Approx(-1.0));
    CHECK(t1.b == Approx(0.0).margin(1e-15));
    CHECK(t1.c == Approx(0.0).margin(1e-14));
    CHECK(t1.d == Approx(-1.0));
}

TEST_CASE("transfer_matrix_free matches RK4 below the potential") {
    const auto t = transfer_matrix_free(1.0, 0.7, 3.0);
    const auto c0 = oracle::rk4_propagate({1.0, 0.0}, 1.0, 3.0, 0.7, 4000);
    const auto c1 = oracle::rk4_propagate({0.0, 1.0}, 1.0, 3.0, 0.7, 4000);
    CHECK(std::abs(t.a - c0[0]) < 1e-10);
    CHECK(std::abs(t.c - c0[1]) < 1e-10);
    CHECK(std::abs(t.b - c1[0]) < 1e-10);
    CHECK(std::abs(t.d - c1[1]) < 1e-10);
}

TEST_CASE("transfer matrices are continuous across the turning value") {
    for (double dl : {-1e-11, -1e-13, 0.0, 1e-13, 1e-11}) {
        const auto t = transfer_matrix_free(2.0 + dl, 1.3, 2.0);
        CHECK(t.a == Approx(1.0).margin(1e-10));
        CHECK(t.b == Approx(1.3).margin(1e-10));
    }
}

TEST_CASE("transfer_matrix_point readings of the jump conditions") {
    const auto i = transfer_matrix_point(PointInteraction::delta_prime(0.0));
    CHECK((i.a == 1 && i.b == 0 && i.c == 0 && i.d == 1));
    const auto p = transfer_matrix_point(PointInteraction::delta_prime(1.0));
    CHECK((p.a == 1 && p.b == 1 && p.c == 0 && p.d == 1));
    const auto d = transfer_matrix_point(PointInteraction::delta(2.0));
    CHECK((d.a == 1 && d.b == 0 && d.c == 2 && d.d == 1));
    CHECK_THROWS_AS(transfer_matrix_point(PointInteraction::delta_prime(infinity)), dpw::ContractError);
    CHECK_THROWS_AS(transfer_matrix_point(PointInteraction::decoupled()), dpw::ContractError);
}

TEST_CASE("transfer determinants equal one on random samples") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> lam(-50, 400), len(1e-3, 3), pot(0, 20), beta(0, 10);
    double worst = 0;
    for (int i = 0; i < 2000; ++i) {
        auto t = transfer_matrix_free(lam(rng), len(rng), pot(rng));
        t = transfer_matrix_point(PointInteraction::delta_prime(beta(rng))) * t;
        t = transfer_matrix_point(PointInteraction::delta(beta(rng) - 5)) * t;
        const double scale = std::max(1.0, std::abs(t.a * t.d));
        worst = std::max(worst, std::abs(t.det() - 1.0) / scale);
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("secular_function examples") {
    const auto m0 = model(0.0);
    CHECK(secular_function(m0, 0.0) == 0.0);
    CHECK(std::abs(secular_function(m0, std::pow(pi / 2, 2))) < 1e-14);
    const double s = secular_function(model(1.0), 1.0);
    CHECK(std::abs(s - rk4_secular(1.0, 1.0, 10000)) < 1e-6);
    CHECK(s == Approx(-std::sin(1.0) * (2 * std::cos(1.0) - std::sin(1.0))).margin(1e-14));
}

TEST_CASE("eigenvalues_1d Neumann interval and decoupled case") {
    const auto s0 = eigenvalues_1d(model(0.0), 3);
    CHECK(s0.values[0] == Approx(0.0).margin(1e-10));
    CHECK(s0.values[1] == Approx(pi * pi / 4).epsilon(1e-12));
    CHECK(s0.values[2] == Approx(pi * pi).epsilon(1e-12));

    const auto si = eigenvalues_1d(model(infinity), 4);
    CHECK(si.values[0] == Approx(0.0).margin(1e-10));
    CHECK(si.values[1] == Approx(0.0).margin(1e-10));
    CHECK(si.values[2] == Approx(pi * pi).epsilon(1e-12));
    CHECK(si.values[3] == Approx(pi * pi).epsilon(1e-12));
}

TEST_CASE("eigenvalues_1d matches the closed-form delta' secular roots") {
    for (double beta : {0.5, 1.0, 4.0, 0.01}) {
        const auto s = eigenvalues_1d(model(beta), 8);
        const auto ref = analytic_delta_prime(beta, 8);
        for (int i = 0; i < 8; ++i) CHECK(s.values[i] == Approx(ref[i]).margin(1e-9));
    }
}

TEST_CASE("eigenvalues_1d agrees with Richardson-extrapolated finite differences") {
    const auto s = eigenvalues_1d(model(1.0), 3);
    const auto fh = fd_eigenvalues_1d(model(1.0), 2e-3, 3);
    const auto fh2 = fd_eigenvalues_1d(model(1.0), 1e-3, 3);
    for (int i = 0; i < 3; ++i) {
        const double extrap = (4 * fh2.values[i] - fh.values[i]) / 3;
        CHECK(std::abs(extrap - s.values[i]) < 1e-6);
    }
}

TEST_CASE("delta'(0) is spectrally the free model") {
    const auto step = PiecewisePotential::step(0.3, 0.0, 2.0);
    auto a = model(0.0, step);
    auto b = a;
    b.interaction = PointInteraction::free();
    const auto sa = eigenvalues_1d(a, 6), sb = eigenvalues_1d(b, 6);
    for (int i = 0; i < 6; ++i) CHECK(sa.values[i] == Approx(sb.values[i]).margin(1e-10));
}

TEST_CASE("eigenvalues_1d are strictly increasing for finite beta") {
    for (double beta : {0.0, 0.5, 1.0, 4.0}) {
        const auto s = eigenvalues_1d(model(beta, PiecewisePotential::step(0.3, 0.0, 2.0)), 10);
        for (int i = 1; i < 10; ++i) CHECK(s.values[i] > s.values[i - 1]);
    }
}

TEST_CASE("eigenvalues approach the decoupled limit monotonically in beta") {
    const auto lim = eigenvalues_1d(model(infinity), 5).values;
    std::vector<std::vector<double>> seq;
    for (double beta : {0.0, 1.0, 10.0, 100.0}) seq.push_back(eigenvalues_1d(model(beta), 5).values);
    for (int k = 0; k < 5; ++k) {
        for (std::size_t j = 1; j < seq.size(); ++j) {
            CHECK(std::abs(seq[j][k] - lim[k]) <= std::abs(seq[j - 1][k] - lim[k]) + 1e-12);
        }
    }
    // beta = 100 vs decoupled: O(1/beta) shift, far below the Neumann spacing
    for (int k = 0; k < 5; ++k) CHECK(std::abs(seq.back()[k] - lim[k]) < 0.05);
}

TEST_CASE("eigenvalues_1d handles a delta interaction") {
    PointModel1d m = model(0.0);
    m.interaction = PointInteraction::delta(-3.0);
    const auto s = eigenvalues_1d(m, 3);
    CHECK(s.values[0] < 0.0);
    const auto f = fd_eigenvalues_1d(m, 1e-3, 3);
    for (int i = 0; i < 3; ++i) CHECK(f.values[i] == Approx(s.values[i]).margin(1e-4));
}

TEST_CASE("eigenvalues_1d_below lists every eigenvalue under the cutoff") {
    const auto vals = eigenvalues_1d_below(model(0.5), 50.0);
    const auto ref = analytic_delta_prime(0.5, 12);
    std::size_t expected = 0;
    for (double v : ref) expected += v <= 50.0;
    REQUIRE(vals.size() == expected);
    for (std::size_t i = 0; i < vals.size(); ++i) CHECK(vals[i] == Approx(ref[i]).margin(1e-9));
}

TEST_CASE("fd_eigenvalues_1d examples") {
    const auto s = fd_eigenvalues_1d(model(0.0), 1e-3, 2);
    CHECK(std::abs(s.values[0]) < 1e-5);
    CHECK(std::abs(s.values[1] - pi * pi / 4) < 1e-5);
    const auto d = fd_eigenvalues_1d(model(infinity), 1e-3, 2);
    CHECK(std::abs(d.values[0]) < 1e-8);
    CHECK(std::abs(d.values[1]) < 1e-8);
    CHECK_THROWS_AS(fd_eigenvalues_1d(model(1.0), 0.2, 2), dpw::ResolutionError);
}

TEST_CASE("fd_eigenvalues_1d converges at second order") {
    for (double beta : {0.5, 1.0, 4.0}) {
        for (bool step : {false, true}) {
            const auto m = model(beta, step ? PiecewisePotential::step(0.3, 0.0, 2.0) : PiecewisePotential::constant(0));
            const auto exact = eigenvalues_1d(m, 5).values;
            const auto e1 = fd_eigenvalues_1d(m, 1e-2, 5).values;
            const auto e2 = fd_eigenvalues_1d(m, 5e-3, 5).values;
            for (int k = 0; k < 5; ++k) {
                const double d1 = std::abs(e1[k] - exact[k]), d2 = std::abs(e2[k] - exact[k]);
                if (d1 < 1e-11) continue;  // exact kernel
                CHECK(std::log2(d1 / d2) >= 1.9);
            }
        }
    }
}

TEST_CASE("floquet_discriminant examples") {
    const auto one = PointInteraction::delta_prime(1.0);
    const auto v0 = PiecewisePotential::constant(0.0);
    CHECK(floquet_discriminant(1.0, one, v0, 1e-14) == Approx(2.0).margin(1e-6));
    CHECK(floquet_discriminant(1.0, one, v0, pi * pi) == Approx(-2.0).margin(1e-12));
    CHECK(floquet_discriminant(1.0, one, v0, pi * pi / 4) == Approx(-pi / 2).margin(1e-12));
}

TEST_CASE("floquet band edges at sin(k a) = 0 have |D| = 2") {
    for (double a : {1.0, 2.0, 0.7}) {
        for (int n = 1; n < 8; ++n) {
            const double lam = std::pow(n * pi / a, 2);
            CHECK(std::abs(std::abs(floquet_discriminant(a, PointInteraction::delta_prime(0.8),
                                                         PiecewisePotential::constant(0), lam)) - 2.0) < 1e-10);
        }
    }
}

TEST_CASE("kp_bands free line and decoupled cells") {
    const auto v0 = PiecewisePotential::constant(0.0);
    const auto free = kp_bands(1.0, PointInteraction::delta_prime(0.0), v0, 100.0);
    REQUIRE(free.bands.size() == 1);
    CHECK(free.bands[0].lo == Approx(0.0).margin(1e-12));
    CHECK(free.bands[0].hi == 100.0);
    CHECK(count_gaps(free) == 0);

    const auto dec = kp_bands(1.0, PointInteraction::delta_prime(infinity), v0, 100.0);
    REQUIRE(dec.bands.size() == 4);
    for (int n = 0; n < 4; ++n) {
        CHECK(dec.bands[n].lo == Approx(std::pow(n * pi, 2)).margin(1e-9));
        CHECK(dec.bands[n].hi == dec.bands[n].lo);
    }
    CHECK(count_gaps(dec) == 4);
}

TEST_CASE("kp_bands matches a dense |D| grid scan") {
    const auto ia = PointInteraction::delta_prime(1.0);
    const auto v0 = PiecewisePotential::constant(0.0);
    const auto bs = kp_bands(1.0, ia, v0, 100.0);

    // grid oracle: contiguous runs of |D| > 2 at resolution 1e-4
    std::vector<Interval> gaps;
    bool in_gap = false;
    double start = 0;
    for (long i = 0; i <= 1000000; ++i) {
        const double lam = i * 1e-4;
        const double t = 2 * std::cos(std::sqrt(lam)) - std::sqrt(lam) * std::sin(std::sqrt(lam));
        const bool g = std::abs(t) > 2 + 1e-12;
        if (g && !in_gap) start = lam;
        if (!g && in_gap) gaps.push_back({start, lam});
        in_gap = g;
    }
    if (in_gap) gaps.push_back({start, 100.0});

    REQUIRE(bs.gaps.size() == gaps.size());
    CHECK(count_gaps(bs) == static_cast<int>(gaps.size()));
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        CHECK(std::abs(bs.gaps[i].lo - gaps[i].lo) <= 1.01e-4);
        CHECK(std::abs(bs.gaps[i].hi - gaps[i].hi) <= 1.01e-4);
    }
}

TEST_CASE("kp bands and gaps partition the scanned range") {
    const auto bs = kp_bands(2.0, PointInteraction::delta_prime(0.5), PiecewisePotential::step(0.3, 0.0, 2.0), 80.0);
    REQUIRE(!bs.bands.empty());
    CHECK(bs.gaps.size() >= bs.bands.size() - 1);
    for (std::size_t i = 0; i + 1 < bs.bands.size(); ++i) {
        CHECK(bs.bands[i].hi == bs.gaps[i].lo);
        CHECK(bs.gaps[i].hi == bs.bands[i + 1].lo);
        CHECK(bs.bands[i].lo <= bs.bands[i].hi);
    }
}

TEST_CASE("count_gaps on hand-made structures") {
    CHECK(count_gaps(normalise_bands({{0, 10}}, 10)) == 0);
    CHECK(count_gaps(normalise_bands({{0, 2}, {3, 10}}, 10)) == 1);
}

TEST_CASE("models reject invalid data") {
    PointModel1d m = model(1.0);
    m.L_minus = 0.5;
    CHECK_THROWS_AS(eigenvalues_1d(m, 2), dpw::ContractError);
    m = model(-1.0);
    CHECK_THROWS_AS(eigenvalues_1d(m, 2), dpw::ContractError);
    m = model(1.0, PiecewisePotential{{0.1}, {-1.0, 0.0}});
    CHECK_THROWS_AS(eigenvalues_1d(m, 2), dpw::ContractError);
}
