#include "dpw/waveguide/modes.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "dpw/error.hpp"
#include "dpw/linalg/eigen.hpp"

namespace dpw::waveguide {

ModeResult solve_modes(const AssembledPair& pair, int m, double tol, std::uint64_t seed) {
    linalg::EigenOptions opt;
    if (pair.potential.is_zero()) {
        for (int c = 0; c < pair.components; ++c) {
            std::vector<double> v(pair.component.size(), 0.0);
            for (std::size_t a = 0; a < v.size(); ++a) v[a] = pair.component[a] == c ? 1.0 : 0.0;
            opt.deflation.push_back(std::move(v));
        }
    }
    auto r = linalg::smallest_eigenpairs(pair.K, pair.M, m, tol, seed, opt);
    return {std::move(r.spectrum), std::move(r.vectors)};
}

std::vector<ProfilePoint> cross_section_average(const Mesh2d& mesh, std::span<const double> u,
                                                const WaveguideGeometry& geom) {
    if (static_cast<Index>(u.size()) != mesh.node_count()) {
        throw ContractError("cross_section_average: vector length differs from the node count");
    }
    const double scale = 1.0 / std::sqrt(geom.mu_cross());
    auto line_integral = [&](std::size_t j, bool upper) {
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < mesh.nx(); ++i) {
            s += 0.5 * (u[mesh.node(j, i, upper)] + u[mesh.node(j, i + 1, upper)]) * (mesh.x[i + 1] - mesh.x[i]);
        }
        return s * scale;
    };
    std::vector<ProfilePoint> out;
    out.reserve(mesh.nz() + 1);
    for (std::size_t j = 0; j < mesh.nz(); ++j) {
        if (mesh.slit_line && j == *mesh.slit_line) {
            out.push_back({mesh.z[j], line_integral(j, false), Side::lower});
            out.push_back({mesh.z[j], line_integral(j, true), Side::upper});
        } else {
            out.push_back({mesh.z[j], line_integral(j, false), Side::shared});
        }
    }
    return out;
}

void write_profile_csv(std::ostream& os, const std::vector<ProfilePoint>& profile) {
    os << "z,value,side\n";
    char buf[96];
    for (const auto& p : profile) {
        const char* tag = p.side == Side::lower ? "lower" : p.side == Side::upper ? "upper" : "";
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%s\n", p.z, p.value, tag);
        os << buf;
    }
}

}  // namespace dpw::waveguide
