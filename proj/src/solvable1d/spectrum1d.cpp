#include "dpw/solvable1d/spectrum1d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dpw/error.hpp"
#include "shooting.hpp"

namespace dpw::solvable1d {

namespace detail {

Profile make_profile(double z0, double z1, const PiecewisePotential& v, const PointInteraction* interaction) {
    Profile p;
    p.length = z1 - z0;
    std::vector<double> cuts = v.breakpoints_in(z0, z1);
    const bool with_point = interaction && z0 < 0.0 && z1 > 0.0 && interaction->kind != PointInteraction::Kind::none;
    if (with_point) cuts.push_back(0.0);
    cuts.push_back(z0);
    cuts.push_back(z1);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    p.v_min = infinity;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        Op slab;
        slab.length = cuts[i + 1] - cuts[i];
        slab.v = v(mid);
        p.v_min = std::min(p.v_min, slab.v);
        p.ops.push_back(slab);
        if (with_point && cuts[i + 1] == 0.0) {
            Op j;
            j.is_jump = true;
            j.jump = transfer_matrix_point(*interaction);
            j.jump_moves_u = interaction->kind == PointInteraction::Kind::delta_prime;
            if (interaction->kind == PointInteraction::Kind::delta) p.jump_bound = std::abs(interaction->strength);
            p.ops.push_back(j);
        }
    }
    return p;
}

namespace {

int sign(double x) { return (x > 0) - (x < 0); }

void renormalise(double& u, double& du) {
    const double nrm = std::hypot(u, du);
    if (nrm > 1e100) {
        u /= nrm;
        du /= nrm;
    }
}

}  // namespace

ShotResult shoot(const Profile& p, double lambda) {
    ShotResult s;
    for (const Op& op : p.ops) {
        const double u0 = s.u, du0 = s.du;
        if (op.is_jump) {
            const auto next = op.jump.apply({u0, du0});
            // delta' moves the Pruefer angle forward inside its half branch;
            // a sign change of u is a crossing of a multiple of pi
            if (op.jump_moves_u && u0 != 0.0 && (next[0] == 0.0 || sign(next[0]) != sign(u0))) ++s.zeros;
            s.u = next[0];
            s.du = next[1];
        } else {
            const TransferMatrix t = transfer_matrix_free(lambda, op.length, op.v);
            const auto next = t.apply({u0, du0});
            const double k2 = lambda - op.v;
            if (k2 >= 1e-12) {
                // scaled angle psi = atan2(k u, u') advances by exactly k * length
                const double k = std::sqrt(k2);
                const double psi0 = std::atan2(k * u0, du0);
                const double psi1 = psi0 + k * op.length;
                s.zeros += static_cast<long>(std::floor(psi1 / std::numbers::pi) - std::floor(psi0 / std::numbers::pi));
            } else if (u0 != 0.0 && (next[0] == 0.0 || sign(next[0]) != sign(u0))) {
                ++s.zeros;  // at most one zero without oscillation
            }
            s.u = next[0];
            s.du = next[1];
        }
        renormalise(s.u, s.du);
    }
    return s;
}

long count_below(const Profile& p, double lambda) {
    const ShotResult s = shoot(p, lambda);
    double omega = std::atan2(s.u, s.du);
    if (omega < 0.0) omega += std::numbers::pi;
    if (omega >= std::numbers::pi) omega -= std::numbers::pi;
    return s.zeros + (omega > 0.5 * std::numbers::pi ? 1 : 0);
}

TransferMatrix monodromy(const Profile& p, double lambda) {
    TransferMatrix m;
    for (const Op& op : p.ops) {
        m = (op.is_jump ? op.jump : transfer_matrix_free(lambda, op.length, op.v)) * m;
    }
    return m;
}

namespace {

class Scanner {
public:
    Scanner(const Profile& p, const Eigen1dOptions& opt) : p_(p), opt_(opt) {}

    long count(double lambda) {
        tick();
        return count_below(p_, lambda);
    }
    double secular(double lambda) {
        tick();
        return shoot(p_, lambda).du;
    }

    // the single root in [a, b), given count(a) + 1 == count(b)
    double isolate(double a, double b) {
        double sa = secular(a);
        if (sa == 0.0) return a;
        const double sb = secular(b);
        if (sb != 0.0 && sign(sa) != sign(sb)) {
            while (!converged(a, b)) {
                const double mid = 0.5 * (a + b);
                const double sm = secular(mid);
                if (sm == 0.0) return mid;
                if (sign(sm) == sign(sa)) {
                    a = mid;
                    sa = sm;
                } else {
                    b = mid;
                }
            }
            return 0.5 * (a + b);
        }
        // no clean sign change, bisect on the count instead
        const long ca = count(a);
        while (!converged(a, b)) {
            const double mid = 0.5 * (a + b);
            if (count(mid) > ca) b = mid;
            else a = mid;
        }
        return 0.5 * (a + b);
    }

    // all roots in [a, b), refining x4 while a cell holds several
    void collect(double a, long ca, double b, long cb, std::vector<double>& roots, int depth = 0) {
        if (cb == ca) return;
        if (cb == ca + 1 || depth > 40) {
            roots.push_back(isolate(a, b));
            return;
        }
        double x0 = a;
        long c0 = ca;
        for (int i = 1; i <= 4; ++i) {
            const double x1 = i == 4 ? b : a + (b - a) * i / 4.0;
            const long c1 = i == 4 ? cb : count(x1);
            collect(x0, c0, x1, c1, roots, depth + 1);
            x0 = x1;
            c0 = c1;
        }
    }

private:
    // bisection runs to working precision; abs_tol is the guaranteed bound
    bool converged(double a, double b) const {
        const double w = b - a;
        return w <= 1e-18 || w <= 4e-16 * std::max(std::abs(a), std::abs(b)) ||
               (w <= opt_.abs_tol && (0.5 * (a + b) == a || 0.5 * (a + b) == b));
    }

    void tick() {
        if (++evaluations_ > opt_.max_evaluations) {
            throw ConvergenceError("eigenvalue scan reached " + std::to_string(opt_.max_evaluations) +
                                       " secular evaluations before bracketing all roots; enlarge the lambda scan",
                                   {});
        }
    }

    const Profile& p_;
    const Eigen1dOptions& opt_;
    long evaluations_ = 0;
};

double scan_start(const Profile& p, Scanner& sc) {
    double lo = p.v_min - p.jump_bound * p.jump_bound - 1.0;
    double width = 1.0 + std::abs(lo);
    while (sc.count(lo) > 0) {
        lo -= width;
        width *= 2.0;
    }
    return lo;
}

}  // namespace

std::vector<double> lowest_eigenvalues(const Profile& p, int m, const Eigen1dOptions& opt) {
    if (m < 1) throw ContractError("eigenvalues_1d: m must be at least 1");
    Scanner sc(p, opt);
    const double step = std::pow(std::numbers::pi / p.length, 2) / 8.0;
    double a = scan_start(p, sc);
    long ca = 0;
    std::vector<double> roots;
    while (static_cast<long>(roots.size()) < m) {
        const double b = a + step;
        const long cb = sc.count(b);
        if (cb > ca) sc.collect(a, ca, b, cb, roots);
        a = b;
        ca = cb;
    }
    std::sort(roots.begin(), roots.end());
    roots.resize(static_cast<std::size_t>(m));
    return roots;
}

std::vector<double> eigenvalues_below(const Profile& p, double lambda_max, const Eigen1dOptions& opt) {
    const long n = count_below(p, std::nextafter(lambda_max, infinity));
    if (n <= 0) return {};
    auto values = lowest_eigenvalues(p, static_cast<int>(n), opt);
    while (!values.empty() && values.back() > lambda_max) values.pop_back();
    return values;
}

}  // namespace detail

namespace {

std::pair<detail::Profile, detail::Profile> halves(const PointModel1d& model) {
    return {detail::make_profile(model.L_minus, 0.0, model.potential, nullptr),
            detail::make_profile(0.0, model.L_plus, model.potential, nullptr)};
}

linalg::Spectrum as_spectrum(std::vector<double> values, double tol) {
    linalg::Spectrum s;
    s.residuals.assign(values.size(), tol);
    s.values = std::move(values);
    s.tol = tol;
    s.converged = true;
    return s;
}

}  // namespace

double secular_function(const PointModel1d& model, double lambda) {
    model.validate();
    if (model.interaction.is_decoupled()) {
        const auto [left, right] = halves(model);
        return detail::shoot(left, lambda).du * detail::shoot(right, lambda).du;
    }
    const auto p = detail::make_profile(model.L_minus, model.L_plus, model.potential, &model.interaction);
    return detail::shoot(p, lambda).du;
}

linalg::Spectrum eigenvalues_1d(const PointModel1d& model, int m) {
    model.validate();
    const detail::Eigen1dOptions opt;
    if (model.interaction.is_decoupled()) {
        const auto [left, right] = halves(model);
        auto a = detail::lowest_eigenvalues(left, m, opt);
        const auto b = detail::lowest_eigenvalues(right, m, opt);
        a.insert(a.end(), b.begin(), b.end());
        std::sort(a.begin(), a.end());
        a.resize(static_cast<std::size_t>(m));
        return as_spectrum(std::move(a), opt.abs_tol);
    }
    const auto p = detail::make_profile(model.L_minus, model.L_plus, model.potential, &model.interaction);
    return as_spectrum(detail::lowest_eigenvalues(p, m, opt), opt.abs_tol);
}

std::vector<double> eigenvalues_1d_below(const PointModel1d& model, double lambda_max) {
    model.validate();
    if (model.interaction.is_decoupled()) {
        const auto [left, right] = halves(model);
        auto a = detail::eigenvalues_below(left, lambda_max);
        const auto b = detail::eigenvalues_below(right, lambda_max);
        a.insert(a.end(), b.begin(), b.end());
        std::sort(a.begin(), a.end());
        return a;
    }
    const auto p = detail::make_profile(model.L_minus, model.L_plus, model.potential, &model.interaction);
    return detail::eigenvalues_below(p, lambda_max);
}

}  // namespace dpw::solvable1d
