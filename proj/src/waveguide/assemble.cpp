#include "dpw/waveguide/assemble.hpp"

#include <numeric>

#include "dpw/error.hpp"

namespace dpw::waveguide {

namespace {

int find_root(std::vector<Index>& parent, Index a) {
    while (parent[a] != a) {
        parent[a] = parent[parent[a]];
        a = parent[a];
    }
    return static_cast<int>(a);
}

}  // namespace

std::array<ElementMatrix, 2> q1_element(double hx, double hz, double v) {
    // corner -> (x index, z index) in the 1D factors
    constexpr int ax[4] = {0, 1, 1, 0};
    constexpr int az[4] = {0, 0, 1, 1};
    auto k1 = [](int a, int b, double h) { return (a == b ? 1.0 : -1.0) / h; };
    auto m1 = [](int a, int b, double h) { return h * (a == b ? 2.0 : 1.0) / 6.0; };
    std::array<ElementMatrix, 2> out{};
    for (int a = 0; a < 4; ++a) {
        for (int b = a; b < 4; ++b) {
            const double mx = m1(ax[a], ax[b], hx), mz = m1(az[a], az[b], hz);
            const double mass = mx * mz;
            out[0][a][b] = out[0][b][a] = k1(ax[a], ax[b], hx) * mz + mx * k1(az[a], az[b], hz) + v * mass;
            out[1][a][b] = out[1][b][a] = mass;
        }
    }
    return out;
}

AssembledPair assemble(const Mesh2d& mesh, const solvable1d::PiecewisePotential& potential) {
    potential.validate();
    const Index n = mesh.node_count();
    const std::size_t nx = mesh.nx();
    std::vector<linalg::Triplet> kt, mt;
    kt.reserve(mesh.elements.size() * 16);
    mt.reserve(mesh.elements.size() * 16);
    std::vector<Index> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), Index{0});

    for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
        const std::size_t j = e / (nx - 1), i = e % (nx - 1);
        const double hx = mesh.x[i + 1] - mesh.x[i], hz = mesh.z[j + 1] - mesh.z[j];
        const double v = potential(0.5 * (mesh.z[j] + mesh.z[j + 1]));
        const auto [ke, me] = q1_element(hx, hz, v);
        const auto& q = mesh.elements[e];
        for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) {
                kt.push_back({q[a], q[b], ke[a][b]});
                mt.push_back({q[a], q[b], me[a][b]});
            }
            const int ra = find_root(parent, q[a]), r0 = find_root(parent, q[0]);
            if (ra != r0) parent[ra] = r0;
        }
    }

    AssembledPair out;
    out.K = linalg::csr_from_triplets(n, n, kt, true);
    out.M = linalg::csr_from_triplets(n, n, mt, true);
    out.potential = potential;
    out.component.resize(static_cast<std::size_t>(n));
    std::vector<int> label(static_cast<std::size_t>(n), -1);
    int count = 0;
    for (Index a = 0; a < n; ++a) {
        const int root = find_root(parent, a);
        if (label[root] < 0) label[root] = count++;
        out.component[a] = label[root];
    }
    out.components = count;
    return out;
}

}  // namespace dpw::waveguide
