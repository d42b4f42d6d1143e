#include "dpw/capacity/capacity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "dpw/error.hpp"
#include "dpw/linalg/cg.hpp"
#include "dpw/linalg/csr.hpp"

namespace dpw::capacity {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Slit-adapted coordinates x = rho cosh(mu) cos(phi), y = rho sinh(mu) sin(phi) q(mu).
// With q = 1 these are confocal elliptic coordinates (conformal, the potential
// is almost linear in mu and the tips need no grading); q rises smoothly from 1
// on the inner half to 1 / sqrt(1 - rho^2) so that mu_max = acosh(1 / rho) is
// the unit circle.
struct SlitMap {
    double rho, mu_max, mu_in, q_max;

    SlitMap(double r) : rho(r), mu_max(std::acosh(1.0 / r)), mu_in(0.5 * mu_max), q_max(1.0 / std::sqrt(1.0 - r * r)) {}

    // q and dq/dmu
    std::array<double, 2> q(double mu) const {
        if (mu <= mu_in) return {1.0, 0.0};
        const double w = mu_max - mu_in, t = std::min(1.0, (mu - mu_in) / w);
        return {1.0 + (q_max - 1.0) * t * t * (3 - 2 * t), (q_max - 1.0) * 6 * t * (1 - t) / w};
    }

    std::array<double, 2> operator()(double mu, double phi) const {
        return {rho * std::cosh(mu) * std::cos(phi), rho * std::sinh(mu) * std::sin(phi) * q(mu)[0]};
    }

    // Jacobian columns d/dmu and d/dphi as (xm, ym, xp, yp)
    std::array<double, 4> jacobian(double mu, double phi) const {
        const auto [qv, dq] = q(mu);
        const double ch = std::cosh(mu), sh = std::sinh(mu), c = std::cos(phi), s = std::sin(phi);
        return {rho * sh * c, rho * s * (ch * qv + sh * dq), -rho * ch * s, rho * sh * c * qv};
    }
};

// Metric det(J) J^{-1} J^{-T} in (mu, phi), averaged over a parameter cell.
struct Metric {
    double mm, mp, pp;
};

Metric cell_metric(const SlitMap& map, double mu0, double mu1, double phi0, double phi1) {
    const double g = 0.5 / std::sqrt(3.0);
    Metric m{0, 0, 0};
    for (double u : {0.5 - g, 0.5 + g}) {
        for (double v : {0.5 - g, 0.5 + g}) {
            const auto [xm, ym, xp, yp] = map.jacobian(mu0 + u * (mu1 - mu0), phi0 + v * (phi1 - phi0));
            const double det = xm * yp - xp * ym;
            m.mm += 0.25 * (xp * xp + yp * yp) / det;
            m.pp += 0.25 * (xm * xm + ym * ym) / det;
            m.mp -= 0.25 * (xm * xp + ym * yp) / det;
        }
    }
    return m;
}

// The metric is frozen on a grid that splits every base cell metric_split
// times per direction, independent of the level. Every level then discretises
// the same bilinear form on nested spaces, and the energy cannot increase
// under refinement.
constexpr int metric_split = 8;

// Q1 stiffness of fine cell (i, j) with extents hm x hp; nodes in the order
// (i, j), (i, j+1), (i+1, j+1), (i+1, j). The form is integrated exactly
// (2x2 Gauss per constant-metric piece).
std::array<std::array<double, 4>, 4> cell_stiffness(const SlitMap& map, int i, int j, int f, double hm, double hp) {
    std::array<std::array<double, 4>, 4> k{};
    const double u_ref[4] = {0, 0, 1, 1};
    const double v_ref[4] = {0, 1, 1, 0};
    const double g = 0.5 / std::sqrt(3.0);
    // metric pieces inside this cell, in local units
    const int pieces = std::max(1, metric_split / f);
    const double hm_metric = hm * f / metric_split, hp_metric = hp * f / metric_split;
    for (int pi = 0; pi < pieces; ++pi) {
        for (int pj = 0; pj < pieces; ++pj) {
            const long mi = f >= metric_split ? long(i) * metric_split / f : long(i) * pieces + pi;
            const long mj = f >= metric_split ? long(j) * metric_split / f : long(j) * pieces + pj;
            const Metric m = cell_metric(map, mi * hm_metric, (mi + 1) * hm_metric, mj * hp_metric, (mj + 1) * hp_metric);
            const double s = 1.0 / pieces;
            for (double gu : {0.5 - g, 0.5 + g}) {
                for (double gv : {0.5 - g, 0.5 + g}) {
                    const double u = (pi + gu) * s, v = (pj + gv) * s;
                    double dm[4], dp[4];
                    for (int a = 0; a < 4; ++a) {
                        const double su = u_ref[a] ? u : 1 - u, sv = v_ref[a] ? v : 1 - v;
                        dm[a] = (u_ref[a] ? 1.0 : -1.0) * sv / hm;
                        dp[a] = (v_ref[a] ? 1.0 : -1.0) * su / hp;
                    }
                    const double w = 0.25 * hm * hp * s * s;
                    for (int a = 0; a < 4; ++a)
                        for (int b = 0; b < 4; ++b)
                            k[a][b] += w * (m.mm * dm[a] * dm[b] + m.mp * (dm[a] * dp[b] + dp[a] * dm[b]) +
                                            m.pp * dp[a] * dp[b]);
                }
            }
        }
    }
    return k;
}

// one-sided second-order derivative at s0 from three nodes
double d_ds(double s0, double s1, double s2, double f0, double f1, double f2) {
    const double h1 = s1 - s0, h2 = s2 - s1;
    return -(2 * h1 + h2) / (h1 * (h1 + h2)) * f0 + (h1 + h2) / (h1 * h2) * f1 - h1 / (h2 * (h1 + h2)) * f2;
}

}  // namespace

double cap_asymptotic(const WindowSpec& spec) {
    if (spec.n == 2) {
        if (!(spec.d > 0.0)) throw ContractError("cap_asymptotic: d must be positive");
        if (spec.d >= 1.0) throw DomainError("cap_asymptotic: n = 2 needs d < 1 (|ln d| vanishes at d = 1)");
        return two_pi / std::abs(std::log(spec.d));
    }
    if (spec.n == 3) {
        if (!(spec.d > 0.0)) throw ContractError("cap_asymptotic: d must be positive");
        if (!spec.capD_ref || !(*spec.capD_ref > 0.0)) {
            throw ContractError("cap_asymptotic: n = 3 needs a positive capD_ref");
        }
        return spec.d * *spec.capD_ref;
    }
    throw ContractError("cap_asymptotic: n must be 2 or 3");
}

CapacityResult cap_numeric_2d(const WindowSpec& spec, const CapacityMeshParams& params) {
    if (spec.n != 2) throw ContractError("cap_numeric_2d: only n = 2 is supported");
    const double rho = spec.d * spec.r;
    if (!(rho > 0.0) || !(rho < 1.0)) {
        throw ContractError("cap_numeric_2d: slit half-width d*r must lie in (0, 1)");
    }
    if (params.n_phi / 2 < 6) {
        throw ResolutionError("cap_numeric_2d: " + std::to_string(params.n_phi / 2) +
                              " cells across the slit, need at least 6");
    }
    if (params.level < 0 || params.level > 8) throw ContractError("cap_numeric_2d: level must lie in [0, 8]");

    const int nphi0 = params.n_phi;
    const double dphi0 = two_pi / nphi0;
    const SlitMap map(rho);
    const double mu_max = map.mu_max;
    const int ns0 = std::max(4, static_cast<int>(std::ceil(mu_max / dphi0)));
    const int f = 1 << params.level;
    const int nphi = nphi0 * f;
    const int ns = ns0 * f;

    CapacityResult out;
    auto& pot = out.potential;
    pot.n_phi = nphi;
    pot.n_s = ns;
    const auto nn = static_cast<std::size_t>((ns + 1) * nphi);
    pot.x.resize(nn);
    pot.y.resize(nn);
    std::vector<double> mu_of_row(static_cast<std::size_t>(ns) + 1);

    // level l splits every base cell into 2^l x 2^l, nodes on the exact map
    const double dphi = two_pi / nphi, dmu = mu_max / ns;
    for (int i = 0; i <= ns; ++i) {
        mu_of_row[i] = i == ns ? mu_max : i * dmu;
        for (int j = 0; j < nphi; ++j) {
            const auto p = map(mu_of_row[i], j * dphi);
            const auto id = static_cast<std::size_t>(i * nphi + j);
            pot.x[id] = p[0];
            pot.y[id] = p[1];
        }
    }
    // the slit is exactly straight
    for (int j = 0; j < nphi; ++j) pot.y[j] = 0.0;

    auto node = [&](int i, int j) { return static_cast<linalg::Index>(i * nphi + ((j % nphi) + nphi) % nphi); };

    // full stiffness on all nodes
    std::vector<linalg::Triplet> kt;
    kt.reserve(static_cast<std::size_t>(ns) * nphi * 16);
    std::vector<std::array<std::array<double, 4>, 4>> cells;
    cells.reserve(static_cast<std::size_t>(ns) * nphi);
    for (int i = 0; i < ns; ++i) {
        for (int j = 0; j < nphi; ++j) {
            const linalg::Index ids[4] = {node(i, j), node(i, j + 1), node(i + 1, j + 1), node(i + 1, j)};
            const auto& ke = cells.emplace_back(cell_stiffness(map, i, j, f, dmu, dphi));
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) kt.push_back({ids[a], ids[b], ke[a][b]});
        }
    }
    const auto n_all = static_cast<linalg::Index>(nn);
    const auto k_all = linalg::csr_from_triplets(n_all, n_all, kt, false);

    // Dirichlet rows: i = 0 (value 1) and i = ns (value 0)
    pot.values.assign(nn, 0.0);
    for (int j = 0; j < nphi; ++j) pot.values[j] = 1.0;
    const linalg::Index first = nphi, last = static_cast<linalg::Index>(ns) * nphi;  // interior [first, last)
    const linalg::Index ni = last - first;
    std::vector<linalg::Triplet> rt;
    rt.reserve(kt.size());
    std::vector<double> rhs(static_cast<std::size_t>(ni), 0.0);
    const auto ro = k_all.row_offsets();
    const auto ci = k_all.col_indices();
    const auto va = k_all.values();
    for (linalg::Index r = first; r < last; ++r) {
        for (linalg::Index p = ro[r]; p < ro[r + 1]; ++p) {
            const linalg::Index c = ci[p];
            if (c >= first && c < last) rt.push_back({r - first, c - first, va[p]});
            else rhs[r - first] -= va[p] * pot.values[c];
        }
    }
    const auto k_ii = linalg::csr_from_triplets(ni, ni, rt, false);
    linalg::CgReport rep;
    const auto sol = linalg::cg_solve(k_ii, rhs, params.cg_tol, params.max_iter, {}, &rep);
    std::copy(sol.begin(), sol.end(), pot.values.begin() + first);
    out.cg_iterations = rep.iterations;

    // Sum of cell energies on differences (cell matrices annihilate constants),
    // which avoids the cancellation in psi^T K psi.
    double energy = 0.0;
    for (int i = 0; i < ns; ++i) {
        for (int j = 0; j < nphi; ++j) {
            const linalg::Index ids[4] = {node(i, j), node(i, j + 1), node(i + 1, j + 1), node(i + 1, j)};
            const auto& ke = cells[static_cast<std::size_t>(i) * nphi + j];
            double dv[4];
            for (int a = 0; a < 4; ++a) dv[a] = pot.values[ids[a]] - pot.values[ids[0]];
            for (int a = 1; a < 4; ++a)
                for (int b = 1; b < 4; ++b) energy += dv[a] * ke[a][b] * dv[b];
        }
    }
    out.energy = energy;

    // the map is conformal at the slit, so flux = -int_0^{2 pi} dpsi/dmu dphi
    double acc = 0.0;
    for (int j = 0; j < nphi; ++j) {
        acc += d_ds(mu_of_row[0], mu_of_row[1], mu_of_row[2], pot.values[node(0, j)], pot.values[node(1, j)],
                    pot.values[node(2, j)]);
    }
    out.flux = -acc * dphi;
    return out;
}

double gamma_eps(double cap_val, double mu_cross) {
    if (!(cap_val > 0.0) || !(mu_cross > 0.0)) throw ContractError("gamma_eps: inputs must be positive");
    return cap_val / mu_cross;
}

double window_for_gamma(double gamma_target, double eps, double s_width, int n, std::optional<double> capD_ref) {
    if (!(gamma_target > 0.0) || !(eps > 0.0) || !(s_width > 0.0)) {
        throw ContractError("window_for_gamma: gamma, eps and s_width must be positive");
    }
    double d = 0.0;
    if (n == 2) {
        d = std::exp(-two_pi / (gamma_target * eps * s_width));
    } else if (n == 3) {
        if (!capD_ref || !(*capD_ref > 0.0)) throw ContractError("window_for_gamma: n = 3 needs capD_ref > 0");
        d = gamma_target * eps * eps * s_width / *capD_ref;
    } else {
        throw ContractError("window_for_gamma: n must be 2 or 3");
    }
    if (d > eps) {
        throw InfeasibleError("d_eps <= eps", "window_for_gamma: gamma = " + std::to_string(gamma_target) +
                                                  " at eps = " + std::to_string(eps) + " needs d = " +
                                                  std::to_string(d) + " > eps, violating d_eps <= eps");
    }
    return d;
}

double relative_gap(double a, double b) { return std::abs(a - b) / std::abs(a); }

}  // namespace dpw::capacity
