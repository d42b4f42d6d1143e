#include <algorithm>
#include <cmath>
#include <string>

#include "dpw/error.hpp"
#include "dpw/linalg/eigen.hpp"
#include "dpw/solvable1d/spectrum1d.hpp"

namespace dpw::solvable1d {

namespace {

// Nodes of [a, b] snapped to the cut points; returns coordinates incl. both ends.
std::vector<double> snapped_nodes(double a, double b, const std::vector<double>& cuts, double h) {
    std::vector<double> pts{a};
    for (double c : cuts) pts.push_back(c);
    pts.push_back(b);
    std::vector<double> nodes{a};
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double len = pts[i + 1] - pts[i];
        const long n = std::max(1L, std::lround(len / h));
        if (n + 1 < 8) {
            throw ResolutionError("fd_eigenvalues_1d: h = " + std::to_string(h) + " leaves " + std::to_string(n + 1) +
                                  " nodes on [" + std::to_string(pts[i]) + ", " + std::to_string(pts[i + 1]) +
                                  "], need at least 8");
        }
        for (long j = 1; j <= n; ++j) nodes.push_back(j == n ? pts[i + 1] : pts[i] + len * double(j) / double(n));
    }
    return nodes;
}

}  // namespace

linalg::Spectrum fd_eigenvalues_1d(const PointModel1d& model, double h, int m) {
    model.validate();
    if (!(h > 0.0)) throw ContractError("fd_eigenvalues_1d: h must be positive");
    const auto& ia = model.interaction;
    const bool decoupled = ia.is_decoupled();
    const bool split = decoupled || (ia.kind == PointInteraction::Kind::delta_prime && ia.strength > 0.0);

    const auto left = snapped_nodes(model.L_minus, 0.0, model.potential.breakpoints_in(model.L_minus, 0.0), h);
    const auto right = snapped_nodes(0.0, model.L_plus, model.potential.breakpoints_in(0.0, model.L_plus), h);

    // global numbering: left nodes, then right nodes (right[0] shares the
    // interface index unless the model splits there)
    const auto nl = static_cast<linalg::Index>(left.size());
    const linalg::Index i_minus = nl - 1;
    const linalg::Index i_plus = split ? nl : i_minus;
    const linalg::Index n = i_plus + static_cast<linalg::Index>(right.size());

    std::vector<linalg::Triplet> kt, mt;
    auto add_element = [&](linalg::Index a, linalg::Index b, double za, double zb) {
        const double he = zb - za;
        const double v = model.potential(0.5 * (za + zb));
        kt.push_back({a, a, 1.0 / he + 0.5 * v * he});
        kt.push_back({b, b, 1.0 / he + 0.5 * v * he});
        kt.push_back({a, b, -1.0 / he});
        kt.push_back({b, a, -1.0 / he});
        mt.push_back({a, a, 0.5 * he});
        mt.push_back({b, b, 0.5 * he});
    };
    for (linalg::Index i = 0; i + 1 < nl; ++i) add_element(i, i + 1, left[i], left[i + 1]);
    for (std::size_t j = 0; j + 1 < right.size(); ++j) {
        const auto a = i_plus + static_cast<linalg::Index>(j);
        add_element(a, a + 1, right[j], right[j + 1]);
    }
    if (split && !decoupled) {
        const double c = 1.0 / ia.strength;
        kt.push_back({i_minus, i_minus, c});
        kt.push_back({i_plus, i_plus, c});
        kt.push_back({i_minus, i_plus, -c});
        kt.push_back({i_plus, i_minus, -c});
    }
    if (ia.kind == PointInteraction::Kind::delta) kt.push_back({i_minus, i_minus, ia.strength});

    const auto k = linalg::csr_from_triplets(n, n, kt, true);
    const auto mm = linalg::csr_from_triplets(n, n, mt, true);

    linalg::EigenOptions opt;
    if (ia.kind == PointInteraction::Kind::delta && ia.strength < 0.0) {
        // K is indefinite; shift past the form bound alpha^2 + 2|alpha|/L
        const double a = std::abs(ia.strength);
        opt.shift = 1.0 + a * a + 2.0 * a / std::min(-model.L_minus, model.L_plus);
    }
    const bool delta_on = ia.kind == PointInteraction::Kind::delta && ia.strength != 0.0;
    if (model.potential.is_zero() && !delta_on) {
        if (decoupled) {
            std::vector<double> a(static_cast<std::size_t>(n), 0.0), b(static_cast<std::size_t>(n), 0.0);
            for (linalg::Index i = 0; i < n; ++i) (i <= i_minus ? a : b)[i] = 1.0;
            opt.deflation = {a, b};
        } else {
            opt.deflation = {std::vector<double>(static_cast<std::size_t>(n), 1.0)};
        }
    }
    auto r = linalg::smallest_eigenpairs(k, mm, m, 1e-9, 0, opt);
    return r.spectrum;
}

}  // namespace dpw::solvable1d
