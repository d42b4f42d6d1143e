#include <algorithm>
#include <cmath>

#include "dpw/error.hpp"
#include "dpw/solvable1d/model.hpp"

namespace dpw::solvable1d {

PiecewisePotential PiecewisePotential::constant(double v) { return {{}, {v}}; }

PiecewisePotential PiecewisePotential::step(double at, double left, double right) {
    return {{at}, {left, right}};
}

void PiecewisePotential::validate() const {
    if (values.size() != breakpoints.size() + 1) {
        throw ContractError("potential: need exactly one value per interval (breakpoints + 1)");
    }
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
        if (!std::isfinite(breakpoints[i])) throw ContractError("potential: non-finite breakpoint");
        if (i > 0 && !(breakpoints[i] > breakpoints[i - 1])) {
            throw ContractError("potential: breakpoints must be strictly increasing");
        }
    }
    for (double v : values) {
        if (!std::isfinite(v)) throw ContractError("potential: values must be finite");
        if (v < 0.0) throw ContractError("potential: values must be non-negative");
    }
}

double PiecewisePotential::operator()(double z) const {
    const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), z);
    return values[static_cast<std::size_t>(it - breakpoints.begin())];
}

double PiecewisePotential::min_value() const { return *std::min_element(values.begin(), values.end()); }

double PiecewisePotential::max_value() const { return *std::max_element(values.begin(), values.end()); }

bool PiecewisePotential::is_zero() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
}

std::vector<double> PiecewisePotential::breakpoints_in(double a, double b) const {
    std::vector<double> out;
    for (double z : breakpoints) {
        if (z > a && z < b) out.push_back(z);
    }
    return out;
}

bool PointInteraction::is_decoupled() const {
    return kind == Kind::neumann_decoupled || (kind == Kind::delta_prime && std::isinf(strength));
}

void PointInteraction::validate() const {
    switch (kind) {
        case Kind::delta_prime:
            if (std::isnan(strength) || strength < 0.0) {
                throw ContractError("delta' strength beta must lie in [0, inf]");
            }
            break;
        case Kind::delta:
            if (!std::isfinite(strength)) throw ContractError("delta strength alpha must be finite");
            break;
        case Kind::none:
        case Kind::neumann_decoupled:
            break;
    }
}

void PointModel1d::validate() const {
    if (!(L_minus < 0.0) || !(L_plus > 0.0) || !std::isfinite(L_minus) || !std::isfinite(L_plus)) {
        throw ContractError("model: need finite L_minus < 0 < L_plus");
    }
    interaction.validate();
    potential.validate();
}

double beta_from_gamma(double gamma) {
    if (!(gamma > 0.0)) throw ContractError("gamma must be positive");
    return std::isinf(gamma) ? 0.0 : 4.0 / gamma;
}

}  // namespace dpw::solvable1d
