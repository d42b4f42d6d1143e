#pragma once

#include <array>

#include "dpw/solvable1d/model.hpp"

namespace dpw::solvable1d {

/// 2x2 propagator acting on the state (u, u').
struct TransferMatrix {
    double a = 1.0, b = 0.0;
    double c = 0.0, d = 1.0;

    double det() const { return a * d - b * c; }
    double trace() const { return a + d; }
    std::array<double, 2> apply(std::array<double, 2> s) const {
        return {a * s[0] + b * s[1], c * s[0] + d * s[1]};
    }
    /// (*this) * rhs: first rhs, then *this.
    TransferMatrix operator*(const TransferMatrix& r) const {
        return {a * r.a + b * r.c, a * r.b + b * r.d, c * r.a + d * r.c, c * r.b + d * r.d};
    }
};

/// Propagator of -u'' + v u = lambda u over a slab of the given length.
TransferMatrix transfer_matrix_free(double lambda, double length, double v_const);

/// Jump matrix of a point interaction; ContractError for decoupled kinds.
TransferMatrix transfer_matrix_point(const PointInteraction& interaction);

}  // namespace dpw::solvable1d
