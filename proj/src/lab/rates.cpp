#include "dpw/lab/rates.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>

#include "dpw/error.hpp"

namespace dpw::lab {

double rate_delta(double eps, int n, GammaMode mode, double gamma_eps_val, double v_term) {
    if (!(eps > 0 && eps < 1)) throw ContractError("rate_delta: eps must lie in (0, 1)");
    if (n < 2) throw ContractError("rate_delta: dimension must be at least 2");
    if (mode == GammaMode::infinite) {
        if (!(gamma_eps_val > 0)) throw ContractError("rate_delta: gamma_eps must be positive");
        return v_term + std::sqrt(eps) + 1 / std::sqrt(gamma_eps_val);
    }
    if (n == 2) return v_term + std::sqrt(eps) * std::abs(std::log(eps));
    return v_term + std::sqrt(eps);
}

std::vector<double> resolvent_map(std::span<const double> values, double cutoff) {
    std::vector<double> out;
    for (double v : values) {
        const double r = 1 / (v + 1);
        if (r >= cutoff) out.push_back(r);
    }
    out.push_back(0.0);
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

std::vector<double> resolvent_map(const linalg::Spectrum& spec, double cutoff) {
    return resolvent_map(std::span<const double>(spec.values), cutoff);
}

double dist_out(std::span<const double> x, std::span<const double> y) {
    if (x.empty() || y.empty()) throw ContractError("dist_out: sets must be nonempty");
    double worst = 0.0;
    for (double a : x) {
        double best = std::abs(a - y.front());
        for (double b : y) best = std::min(best, std::abs(a - b));
        worst = std::max(worst, best);
    }
    return worst;
}

double dist_in(std::span<const double> x, std::span<const double> y) { return dist_out(y, x); }

double dist_hausdorff(std::span<const double> x, std::span<const double> y) {
    return std::max(dist_out(x, y), dist_in(x, y));
}

RateFit fit_rate(std::span<const double> eps, std::span<const double> err) {
    if (eps.size() != err.size()) throw ContractError("fit_rate: eps and err differ in length");
    std::vector<double> lx, ly;
    RateFit fit;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0)) throw ContractError("fit_rate: eps must be positive");
        if (!(err[i] > 0)) {
            ++fit.dropped;
            continue;
        }
        lx.push_back(std::log(eps[i]));
        ly.push_back(std::log(err[i]));
    }
    if (fit.dropped > 0)
        std::cerr << "warning: fit_rate dropped " << fit.dropped << " non-positive error value(s)\n";
    if (lx.size() < 3) throw ContractError("fit_rate: fewer than 3 positive errors");

    const double n = static_cast<double>(lx.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (!(sxx > 0)) throw ContractError("fit_rate: eps values coincide");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
    return fit;
}

ConstantFit fit_constant(std::span<const double> err, std::span<const double> rate) {
    if (err.size() != rate.size()) throw ContractError("fit_constant: err and rate differ in length");
    std::vector<double> q;
    for (std::size_t i = 0; i < err.size(); ++i) {
        if (!(rate[i] > 0)) throw ContractError("fit_constant: rate must be positive");
        if (err[i] > 0) q.push_back(err[i] / rate[i]);
    }
    if (q.empty()) throw ContractError("fit_constant: no positive errors");
    double mean_log = 0;
    for (double v : q) mean_log += std::log(v);
    ConstantFit fit;
    fit.c = std::exp(mean_log / static_cast<double>(q.size()));
    for (double v : q) fit.residual_factor = std::max({fit.residual_factor, v / fit.c, fit.c / v});
    return fit;
}

}  // namespace dpw::lab
