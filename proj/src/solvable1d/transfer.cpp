#include "dpw/solvable1d/transfer.hpp"

#include <cmath>

#include "dpw/error.hpp"

namespace dpw::solvable1d {

TransferMatrix transfer_matrix_free(double lambda, double length, double v_const) {
    const double k2 = lambda - v_const;
    const double a = length;
    if (std::abs(k2) < 1e-12) {
        // second-order Taylor about k2 = 0; det = 1 + O(k2^2 a^4)
        const double x = k2 * a * a;
        return {1.0 - 0.5 * x, a * (1.0 - x / 6.0), -k2 * a, 1.0 - 0.5 * x};
    }
    if (k2 > 0.0) {
        const double k = std::sqrt(k2);
        const double cs = std::cos(k * a), sn = std::sin(k * a);
        return {cs, sn / k, -k * sn, cs};
    }
    const double kappa = std::sqrt(-k2);
    const double ch = std::cosh(kappa * a), sh = std::sinh(kappa * a);
    return {ch, sh / kappa, kappa * sh, ch};
}

TransferMatrix transfer_matrix_point(const PointInteraction& interaction) {
    interaction.validate();
    if (interaction.is_decoupled()) {
        throw ContractError("decoupled model must not be propagated");
    }
    switch (interaction.kind) {
        case PointInteraction::Kind::delta_prime:
            return {1.0, interaction.strength, 0.0, 1.0};
        case PointInteraction::Kind::delta:
            return {1.0, 0.0, interaction.strength, 1.0};
        default:
            return {};
    }
}

}  // namespace dpw::solvable1d
