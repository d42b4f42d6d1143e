#include "dpw/solvable1d/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dpw/error.hpp"
#include "shooting.hpp"

namespace dpw::solvable1d {

namespace {

detail::Profile cell_profile(double period, const PointInteraction& interaction, const PiecewisePotential& potential) {
    if (!(period > 0.0)) throw ContractError("floquet: period must be positive");
    interaction.validate();
    potential.validate();
    return detail::make_profile(-0.5 * period, 0.5 * period, potential, &interaction);
}

double excess(const detail::Profile& p, double lambda) {
    return std::abs(detail::monodromy(p, lambda).trace()) - 2.0;
}

struct Sample {
    double lambda;
    double f;  // |D| - 2
};

// golden-section search for the minimum (sense = +1) or maximum (-1) of f
Sample golden(const detail::Profile& p, double a, double b, double sense) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = sense * excess(p, x1), f2 = sense * excess(p, x2);
    for (int it = 0; it < 80 && b - a > 1e-13 * std::max(1.0, std::abs(b)); ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = sense * excess(p, x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = sense * excess(p, x2);
        }
    }
    return f1 < f2 ? Sample{x1, sense * f1} : Sample{x2, sense * f2};
}

double edge(const detail::Profile& p, double a, double b) {
    const bool a_in = excess(p, a) <= 0.0;
    while (b - a > 1e-9) {
        const double mid = 0.5 * (a + b);
        if ((excess(p, mid) <= 0.0) == a_in) a = mid;
        else b = mid;
    }
    return 0.5 * (a + b);
}

}  // namespace

double floquet_discriminant(double period, const PointInteraction& interaction, const PiecewisePotential& potential,
                            double lambda) {
    if (interaction.is_decoupled()) throw ContractError("floquet_discriminant: interaction must be finite");
    return detail::monodromy(cell_profile(period, interaction, potential), lambda).trace();
}

BandStructure normalise_bands(std::vector<Interval> bands, double lambda_max, double merge_tol) {
    std::sort(bands.begin(), bands.end(), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
    BandStructure out;
    out.lambda_max = lambda_max;
    for (Interval b : bands) {
        if (b.lo > lambda_max) continue;
        b.hi = std::min(b.hi, lambda_max);
        if (!out.bands.empty()) {
            Interval& last = out.bands.back();
            if (b.lo - last.hi <= merge_tol * std::max(1.0, std::abs(b.lo))) {
                last.hi = std::max(last.hi, b.hi);
                continue;
            }
        }
        out.bands.push_back(b);
    }
    for (std::size_t i = 0; i + 1 < out.bands.size(); ++i) {
        out.gaps.push_back({out.bands[i].hi, out.bands[i + 1].lo});
    }
    if (!out.bands.empty() && out.bands.back().hi < lambda_max) {
        out.gaps.push_back({out.bands.back().hi, lambda_max});
    }
    return out;
}

BandStructure kp_bands(double period, const PointInteraction& interaction, const PiecewisePotential& potential,
                       double lambda_max) {
    if (!(lambda_max > 0.0)) throw ContractError("kp_bands: lambda_max must be positive");

    if (interaction.is_decoupled()) {
        // Neumann cell (0, a): right half of the cell followed by the left half
        potential.validate();
        const double h = 0.5 * period;
        detail::Profile right = detail::make_profile(0.0, h, potential, nullptr);
        const detail::Profile left = detail::make_profile(-h, 0.0, potential, nullptr);
        right.ops.insert(right.ops.end(), left.ops.begin(), left.ops.end());
        right.length = period;
        right.v_min = std::min(right.v_min, left.v_min);
        std::vector<Interval> bands;
        for (double v : detail::eigenvalues_below(right, lambda_max)) bands.push_back({v, v});
        return normalise_bands(std::move(bands), lambda_max, 0.0);
    }

    const detail::Profile p = cell_profile(period, interaction, potential);
    double lo = p.v_min;
    if (interaction.kind == PointInteraction::Kind::delta && interaction.strength < 0.0) {
        lo -= interaction.strength * interaction.strength + 2.0 * std::abs(interaction.strength) / period + 1.0;
    }
    if (lo >= lambda_max) return normalise_bands({}, lambda_max);

    // uniform in t = sqrt(lambda - lo): D oscillates with period ~2 pi / a in t
    const double t_max = std::sqrt(lambda_max - lo);
    const double dt = std::numbers::pi / (40.0 * period);
    const int n = std::max(200, static_cast<int>(std::ceil(t_max / dt)) + 1);
    std::vector<Sample> s(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double t = t_max * i / (n - 1);
        const double lam = i == n - 1 ? lambda_max : lo + t * t;
        s[i] = {lam, excess(p, lam)};
    }

    // narrow bands or gaps hidden between samples show up as local extrema
    std::vector<Sample> extra;
    for (int i = 1; i + 1 < n; ++i) {
        const bool in = s[i].f <= 0.0;
        if (!in && s[i].f < s[i - 1].f && s[i].f <= s[i + 1].f) {
            const Sample m = golden(p, s[i - 1].lambda, s[i + 1].lambda, 1.0);
            if (m.f <= 0.0) extra.push_back(m);
        } else if (in && s[i].f > s[i - 1].f && s[i].f >= s[i + 1].f) {
            const Sample m = golden(p, s[i - 1].lambda, s[i + 1].lambda, -1.0);
            if (m.f > 0.0) extra.push_back(m);
        }
    }
    s.insert(s.end(), extra.begin(), extra.end());
    std::sort(s.begin(), s.end(), [](const Sample& x, const Sample& y) { return x.lambda < y.lambda; });

    std::vector<Interval> bands;
    bool open = s[0].f <= 0.0;
    double start = s[0].lambda;
    for (std::size_t i = 1; i < s.size(); ++i) {
        const bool in = s[i].f <= 0.0;
        if (in == open) continue;
        const double e = edge(p, s[i - 1].lambda, s[i].lambda);
        if (open) bands.push_back({start, e});
        else start = e;
        open = in;
    }
    if (open) bands.push_back({start, lambda_max});
    return normalise_bands(std::move(bands), lambda_max);
}

int count_gaps(const BandStructure& bands) {
    int n = 0;
    for (const Interval& g : bands.gaps) {
        if (g.hi > g.lo && g.lo < bands.lambda_max) ++n;
    }
    return n;
}

}  // namespace dpw::solvable1d
