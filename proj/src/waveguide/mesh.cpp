#include "dpw/waveguide/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "dpw/error.hpp"

namespace dpw::waveguide {

namespace {

constexpr double max_lines = 1e7;
constexpr double max_cells = 1e7;
constexpr double max_aspect = 50.0;
constexpr double inf = std::numeric_limits<double>::infinity();

// Cell sizes on one segment [p, q] between required lines:
// h(t) = min(H, h_p + s (t - p), h_q + s (q - t)). Lines sit where
// F(t) = int_p^t dt / h is an integer.
struct Profile {
    double p, q, hp, hq, s, H;
    double t1 = 0, t2 = 0;  // end of the rising piece, start of the falling one

    Profile(double p_, double q_, double hp_, double hq_, double s_, double H_)
        : p(p_), q(q_), hp(hp_), hq(hq_), s(s_), H(H_) {
        const double tm = std::clamp((hq - hp + s * (p + q)) / (2 * s), p, q);
        t1 = std::clamp(p + (H - hp) / s, p, tm);
        t2 = std::clamp(q - (H - hq) / s, tm, q);
        if (H >= hp + s * (tm - p)) t1 = t2 = tm;
    }
    double rise(double t) const { return std::log1p(s * (t - p) / hp) / s; }
    double fall(double t) const { return std::log((hq + s * (q - t2)) / (hq + s * (q - t))) / s; }
    double total() const { return rise(t1) + (t2 - t1) / H + fall(q); }
    double inverse(double g) const {
        const double g1 = rise(t1), g2 = g1 + (t2 - t1) / H;
        if (g <= g1) return p + hp * std::expm1(s * g) / s;
        if (g <= g2) return t1 + (g - g1) * H;
        return q - ((hq + s * (q - t2)) * std::exp(-s * (g - g2)) - hq) / s;
    }
};

// Solves f(v) = target for v in [lo, hi] with f monotone.
template <class F>
double bisect_for(F f, double lo, double hi, double target) {
    const bool increasing = f(hi) > f(lo);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        ((f(mid) < target) == increasing ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Fills (p, q] so the cell count is an integer without disturbing the size
// hp pinned at p: the plateau lowers or the slope steepens (up to s_max) when
// that suffices, otherwise the size at q is lowered. Returns the size reached
// at q, which the next segment inherits.
double segment(std::vector<double>& out, double p, double q, double hp, double hq, double s, double s_max,
               double h_max) {
    const double base = Profile(p, q, hp, hq, s, h_max).total();
    if (base > max_lines) throw BudgetError("build_mesh: more than 1e7 mesh lines");
    const double pinned = std::max(hp, hq);
    auto with_plateau = [&](double H) { return Profile(p, q, hp, hq, s, H).total(); };
    auto with_slope = [&](double sl) { return Profile(p, q, hp, hq, sl, h_max).total(); };
    auto with_end = [&](double h) { return Profile(p, q, hp, h, s, h_max).total(); };
    const double up = std::ceil(base - 1e-9), down = std::floor(base + 1e-9);
    Profile prof(p, q, hp, hq, s, h_max);
    double n = up;
    if (std::abs(base - std::round(base)) <= 1e-9 && std::round(base) >= 1) {
        n = std::round(base);
    } else if (pinned < h_max && with_plateau(pinned) >= up) {
        prof = Profile(p, q, hp, hq, s, bisect_for(with_plateau, pinned, h_max, n));
    } else if (down >= 1 && with_slope(s_max) <= down) {
        n = down;
        prof = Profile(p, q, hp, hq, bisect_for(with_slope, s, s_max, n), h_max);
    } else {
        double lo = hq;
        while (with_end(lo) < up) lo *= 0.5;
        prof = Profile(p, q, hp, bisect_for(with_end, lo, hq, n), s, h_max);
    }
    const double total = prof.total();
    const long cells = static_cast<long>(n);
    for (long k = 1; k < cells; ++k) out.push_back(std::clamp(prof.inverse(total * double(k) / n), p, q));
    out.push_back(q);
    return std::min({prof.H, prof.hp + prof.s * (q - p), prof.hq});
}

std::vector<double> bisect(const std::vector<double>& v) {
    std::vector<double> out;
    out.reserve(2 * v.size());
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        out.push_back(v[i]);
        out.push_back(0.5 * (v[i] + v[i + 1]));
    }
    out.push_back(v.back());
    return out;
}

}  // namespace

std::vector<double> graded_lines(double a, double b, std::vector<double> required, const std::vector<double>& anchors,
                                 double h_min, double h_max, double ratio) {
    if (!(a < b)) throw ContractError("graded_lines: need a < b");
    if (!(h_min > 0.0) || !(h_max > 0.0) || !(ratio > 1.0)) {
        throw ContractError("graded_lines: need h_min, h_max > 0 and ratio > 1");
    }
    required.push_back(a);
    required.push_back(b);
    std::erase_if(required, [&](double t) { return t < a || t > b; });
    std::sort(required.begin(), required.end());
    required.erase(std::unique(required.begin(), required.end()), required.end());
    std::vector<double> sorted_anchors = anchors;
    std::sort(sorted_anchors.begin(), sorted_anchors.end());

    // mirror-symmetric data gives mirror-symmetric lines
    auto is_mirrored = [](const std::vector<double>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i] != -v[v.size() - 1 - i]) return false;
        }
        return true;
    };
    if (a == -b && is_mirrored(required) && is_mirrored(sorted_anchors)) {
        std::vector<double> half_req{0.0}, half_anchors;
        for (double t : required) {
            if (t > 0.0) half_req.push_back(t);
        }
        for (double t : sorted_anchors) {
            if (t >= 0.0) half_anchors.push_back(t);
        }
        const auto half = graded_lines(0.0, b, half_req, half_anchors, h_min, h_max, ratio);
        std::vector<double> out;
        for (auto it = half.rbegin(); it + 1 != half.rend(); ++it) out.push_back(-*it);
        out.insert(out.end(), half.begin(), half.end());
        return out;
    }

    if (sorted_anchors.empty()) {
        std::vector<double> out{required.front()};
        for (std::size_t k = 0; k + 1 < required.size(); ++k) {
            const double p = required[k], q = required[k + 1];
            const double n = std::ceil((q - p) / h_max - 1e-9);
            if (n > max_lines) throw BudgetError("build_mesh: more than 1e7 mesh lines");
            for (double i = 1; i < n; ++i) out.push_back(p + (q - p) * i / n);
            out.push_back(q);
        }
        return out;
    }

    // design slope below ln(ratio) leaves room to make cell counts integral
    const double c = 0.75 * std::log(ratio), c_max = 0.98 * std::log(ratio);
    // a cell of unit count next to an anchor is then at most h_min
    const double h0 = h_min * c_max / std::expm1(c_max);
    auto size_at = [&](double t) {
        double dist = inf;
        for (double an : sorted_anchors) dist = std::min(dist, std::abs(t - an));
        return std::isinf(dist) ? h_max : std::min(h_max, h0 + c * dist);
    };
    std::vector<double> out{required.front()};
    double hp = size_at(required.front());
    for (std::size_t k = 0; k + 1 < required.size(); ++k) {
        const double p = required[k], q = required[k + 1];
        hp = segment(out, p, q, hp, size_at(q), c, c_max, h_max);
    }
    return out;
}

Index Mesh2d::node(std::size_t j, std::size_t i, bool upper) const {
    if (upper && slit_line && j == *slit_line) return upper_id[i];
    Index base = static_cast<Index>(j * x.size());
    if (slit_line && j > *slit_line) base += static_cast<Index>(duplicated());
    return base + static_cast<Index>(i);
}

std::size_t Mesh2d::duplicated() const {
    return node_x.size() - x.size() * z.size();
}

double Mesh2d::min_cell() const {
    double h = inf;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) h = std::min(h, x[i + 1] - x[i]);
    for (std::size_t j = 0; j + 1 < z.size(); ++j) h = std::min(h, z[j + 1] - z[j]);
    return h;
}

double Mesh2d::max_aspect_ratio() const {
    double hx_min = inf, hx_max = 0, hz_min = inf, hz_max = 0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        hx_min = std::min(hx_min, x[i + 1] - x[i]);
        hx_max = std::max(hx_max, x[i + 1] - x[i]);
    }
    for (std::size_t j = 0; j + 1 < z.size(); ++j) {
        hz_min = std::min(hz_min, z[j + 1] - z[j]);
        hz_max = std::max(hz_max, z[j + 1] - z[j]);
    }
    return std::max(hx_max / hz_min, hz_max / hx_min);
}

Mesh2d tensor_mesh(std::vector<double> x, std::vector<double> z, bool slit, double window_half) {
    auto strictly_sorted = [](const std::vector<double>& v) {
        return v.size() >= 2 && std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
    };
    if (!strictly_sorted(x) || !strictly_sorted(z)) {
        throw ContractError("tensor_mesh: need at least two strictly increasing lines per direction");
    }
    if (static_cast<double>(x.size() - 1) * static_cast<double>(z.size() - 1) > max_cells) {
        throw BudgetError("tensor_mesh: more than 1e7 cells");
    }
    Mesh2d m;
    m.x = std::move(x);
    m.z = std::move(z);
    m.window_half = window_half;
    const std::size_t nx = m.x.size(), nz = m.z.size();
    if (slit) {
        const auto it = std::find(m.z.begin(), m.z.end(), 0.0);
        if (it == m.z.end() || it == m.z.begin() || it + 1 == m.z.end()) {
            throw ContractError("tensor_mesh: a slit needs z = 0 as an interior line");
        }
        m.slit_line = static_cast<std::size_t>(it - m.z.begin());
    }
    auto doubled = [&](double xi) { return window_half <= 0.0 || std::abs(xi) > window_half * (1 + 1e-12); };

    std::size_t dup = 0;
    if (m.slit_line) dup = static_cast<std::size_t>(std::count_if(m.x.begin(), m.x.end(), doubled));
    const std::size_t n = nx * nz + dup;
    m.node_x.reserve(n);
    m.node_z.reserve(n);
    m.node_side.reserve(n);
    for (std::size_t j = 0; j < nz; ++j) {
        const bool at_slit = m.slit_line && j == *m.slit_line;
        for (std::size_t i = 0; i < nx; ++i) {
            m.node_x.push_back(m.x[i]);
            m.node_z.push_back(m.z[j]);
            m.node_side.push_back(at_slit && doubled(m.x[i]) ? Side::lower : Side::shared);
        }
        if (at_slit) {
            m.upper_id.resize(nx);
            for (std::size_t i = 0; i < nx; ++i) {
                if (doubled(m.x[i])) {
                    m.upper_id[i] = static_cast<Index>(m.node_x.size());
                    m.node_x.push_back(m.x[i]);
                    m.node_z.push_back(0.0);
                    m.node_side.push_back(Side::upper);
                } else {
                    m.upper_id[i] = static_cast<Index>(j * nx + i);
                }
            }
        }
    }
    m.elements.reserve((nx - 1) * (nz - 1));
    for (std::size_t j = 0; j + 1 < nz; ++j) {
        for (std::size_t i = 0; i + 1 < nx; ++i) {
            // cells above the slit use the upper copies of their bottom nodes
            m.elements.push_back({m.node(j, i, true), m.node(j, i + 1, true), m.node(j + 1, i + 1), m.node(j + 1, i)});
        }
    }
    return m;
}

Mesh2d build_mesh(const WaveguideGeometry& geom, const Grading& grading) {
    geom.validate_structure();
    if (!(grading.ratio > 1.0)) throw ContractError("build_mesh: grading ratio must exceed 1");
    if (!(grading.min_frac > 0.0)) throw ContractError("build_mesh: min_frac must be positive");
    if (grading.refine < 0 || grading.refine > 6) throw ContractError("build_mesh: refine must lie in [0, 6]");

    const double w = geom.window_half();
    double far = grading.far_cell > 0.0 ? grading.far_cell : geom.eps / 8.0;
    double far_z = grading.far_cell_z > 0.0 ? grading.far_cell_z : far;
    const double h_min = w > 0.0 ? std::min({grading.min_frac * w, far, far_z}) : std::min(far, far_z);
    far = std::min(far, max_aspect * h_min);
    far_z = std::min(far_z, max_aspect * h_min);

    std::vector<double> x_req, x_anchor, z_req{0.0}, z_anchor;
    if (w > 0.0) {
        x_req = {-w, 0.0, w};
        x_anchor = {-w, w};
        z_req.push_back(-w);
        z_req.push_back(w);
        z_anchor = {0.0};
    }
    for (double t : grading.z_lines) {
        if (t > geom.L_minus && t < geom.L_plus) z_req.push_back(t);
    }
    auto extent = [](const std::vector<double>& v) {
        double lo = inf, hi = 0.0;
        for (std::size_t i = 0; i + 1 < v.size(); ++i) {
            lo = std::min(lo, v[i + 1] - v[i]);
            hi = std::max(hi, v[i + 1] - v[i]);
        }
        return std::pair{lo, hi};
    };
    std::vector<double> x, z;
    for (int pass = 0; pass < 20; ++pass) {
        x = graded_lines(geom.x_min(), geom.x_max(), x_req, x_anchor, h_min, far, grading.ratio);
        z = graded_lines(geom.L_minus, geom.L_plus, z_req, z_anchor, h_min, far_z, grading.ratio);
        // cells next to the anchors may fall below h_min; shrink the far sizes
        // until the aspect cap holds
        const auto [x_lo, x_hi] = extent(x);
        const auto [z_lo, z_hi] = extent(z);
        if (x_hi <= max_aspect * z_lo && z_hi <= max_aspect * x_lo) break;
        far = std::min(far, 0.99 * max_aspect * z_lo);
        far_z = std::min(far_z, 0.99 * max_aspect * x_lo);
    }
    const double cells = double(x.size() - 1) * double(z.size() - 1) * std::pow(4.0, grading.refine);
    if (cells > max_cells) {
        std::ostringstream os;
        os << "build_mesh: " << cells << " cells exceed the budget of 1e7 (d r = " << w << ")";
        throw BudgetError(os.str());
    }
    for (int k = 0; k < grading.refine; ++k) {
        x = bisect(x);
        z = bisect(z);
    }
    return tensor_mesh(std::move(x), std::move(z), true, w);
}

void write_mesh(std::ostream& os, const Mesh2d& mesh) {
    char buf[128];
    os << "# tensor mesh: " << mesh.nx() << " x lines, " << mesh.nz() << " z lines\n";
    os << "nodes " << mesh.node_count() << "\n";
    for (Index n = 0; n < mesh.node_count(); ++n) {
        std::snprintf(buf, sizeof buf, "%lld %.17g %.17g %d\n", static_cast<long long>(n), mesh.node_x[n],
                      mesh.node_z[n], static_cast<int>(mesh.node_side[n]));
        os << buf;
    }
    os << "elements " << mesh.elements.size() << "\n";
    for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
        const auto& q = mesh.elements[e];
        os << e << ' ' << q[0] << ' ' << q[1] << ' ' << q[2] << ' ' << q[3] << '\n';
    }
    os << "duplicates " << mesh.duplicated() << "\n";
    if (mesh.slit_line) {
        for (std::size_t i = 0; i < mesh.nx(); ++i) {
            const Index lo = mesh.node(*mesh.slit_line, i), hi = mesh.node(*mesh.slit_line, i, true);
            if (lo != hi) os << lo << ' ' << hi << '\n';
        }
    }
}

}  // namespace dpw::waveguide
