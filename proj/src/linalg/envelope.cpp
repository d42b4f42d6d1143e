#include "dpw/linalg/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dpw/error.hpp"

namespace dpw::linalg {

namespace {

struct Graph {
    std::vector<Index> offsets;
    std::vector<Index> adj;
    Index degree(Index v) const { return offsets[v + 1] - offsets[v]; }
};

Graph symmetric_graph(const CsrMatrix& a) {
    const Index n = a.rows();
    const auto ro = a.row_offsets();
    const auto ci = a.col_indices();
    std::vector<Index> count(static_cast<std::size_t>(n) + 1, 0);
    for (Index i = 0; i < n; ++i) {
        for (Index p = ro[i]; p < ro[i + 1]; ++p) {
            const Index j = ci[p];
            if (j == i) continue;
            ++count[i + 1];
            ++count[j + 1];
        }
    }
    for (Index i = 0; i < n; ++i) count[i + 1] += count[i];
    std::vector<Index> adj(static_cast<std::size_t>(count[n]));
    std::vector<Index> next(count.begin(), count.end() - 1);
    for (Index i = 0; i < n; ++i) {
        for (Index p = ro[i]; p < ro[i + 1]; ++p) {
            const Index j = ci[p];
            if (j == i) continue;
            adj[next[i]++] = j;
            adj[next[j]++] = i;
        }
    }
    Graph g{std::move(count), {}};
    // sort and deduplicate each list
    std::vector<Index> offsets(static_cast<std::size_t>(n) + 1, 0);
    std::vector<Index> out;
    out.reserve(adj.size());
    for (Index i = 0; i < n; ++i) {
        auto b = adj.begin() + g.offsets[i];
        auto e = adj.begin() + g.offsets[i + 1];
        std::sort(b, e);
        e = std::unique(b, e);
        out.insert(out.end(), b, e);
        offsets[i + 1] = static_cast<Index>(out.size());
    }
    g.offsets = std::move(offsets);
    g.adj = std::move(out);
    return g;
}

// Level structure rooted at `root` restricted to unvisited nodes; returns
// the nodes of the last level and the depth.
std::pair<std::vector<Index>, int> last_level(const Graph& g, Index root, const std::vector<char>& done,
                                             std::vector<int>& level) {
    std::vector<Index> frontier{root};
    std::vector<Index> touched{root};
    level[root] = 0;
    int depth = 0;
    std::vector<Index> last = frontier;
    while (!frontier.empty()) {
        std::vector<Index> next;
        for (Index v : frontier) {
            for (Index p = g.offsets[v]; p < g.offsets[v + 1]; ++p) {
                const Index w = g.adj[p];
                if (done[w] || level[w] >= 0) continue;
                level[w] = depth + 1;
                next.push_back(w);
                touched.push_back(w);
            }
        }
        if (next.empty()) break;
        last = next;
        frontier = std::move(next);
        ++depth;
    }
    for (Index v : touched) level[v] = -1;
    return {last, depth};
}

Index pseudo_peripheral(const Graph& g, Index start, const std::vector<char>& done, std::vector<int>& level) {
    Index root = start;
    auto [last, depth] = last_level(g, root, done, level);
    for (int guard = 0; guard < 32; ++guard) {
        Index best = last.front();
        for (Index v : last) {
            if (g.degree(v) < g.degree(best)) best = v;
        }
        auto [last2, depth2] = last_level(g, best, done, level);
        if (depth2 <= depth) break;
        root = best;
        last = std::move(last2);
        depth = depth2;
    }
    return root;
}

}  // namespace

std::vector<Index> reverse_cuthill_mckee(const CsrMatrix& a) {
    if (a.rows() != a.cols()) throw ContractError("reverse_cuthill_mckee: matrix is not square");
    const Index n = a.rows();
    const Graph g = symmetric_graph(a);
    std::vector<char> done(static_cast<std::size_t>(n), 0);
    std::vector<int> level(static_cast<std::size_t>(n), -1);
    std::vector<Index> order;
    order.reserve(static_cast<std::size_t>(n));

    // components are started from their lowest-degree unvisited node
    std::vector<Index> by_degree(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) by_degree[i] = i;
    std::stable_sort(by_degree.begin(), by_degree.end(),
                     [&](Index x, Index y) { return g.degree(x) < g.degree(y); });

    std::vector<Index> nbrs;
    for (Index s : by_degree) {
        if (done[s]) continue;
        const Index root = pseudo_peripheral(g, s, done, level);
        std::size_t head = order.size();
        order.push_back(root);
        done[root] = 1;
        while (head < order.size()) {
            const Index v = order[head++];
            nbrs.clear();
            for (Index p = g.offsets[v]; p < g.offsets[v + 1]; ++p) {
                const Index w = g.adj[p];
                if (!done[w]) nbrs.push_back(w);
            }
            std::stable_sort(nbrs.begin(), nbrs.end(),
                             [&](Index x, Index y) { return g.degree(x) < g.degree(y); });
            for (Index w : nbrs) {
                done[w] = 1;
                order.push_back(w);
            }
        }
    }
    std::reverse(order.begin(), order.end());
    return order;
}

Index envelope_size(const CsrMatrix& a, std::span<const Index> perm) {
    const Index n = a.rows();
    std::vector<Index> inv(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) inv[perm[i]] = i;
    std::vector<Index> first(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) first[i] = i;
    const auto ro = a.row_offsets();
    const auto ci = a.col_indices();
    for (Index r = 0; r < n; ++r) {
        for (Index p = ro[r]; p < ro[r + 1]; ++p) {
            const Index i = inv[r], j = inv[ci[p]];
            const Index hi = std::max(i, j), lo = std::min(i, j);
            first[hi] = std::min(first[hi], lo);
        }
    }
    Index total = 0;
    for (Index i = 0; i < n; ++i) total += i - first[i] + 1;
    return total;
}

EnvelopeCholesky::EnvelopeCholesky(const CsrMatrix& a, Index max_entries) {
    if (a.rows() != a.cols()) throw ContractError("EnvelopeCholesky: matrix is not square");
    n_ = a.rows();
    perm_ = reverse_cuthill_mckee(a);
    std::vector<Index> inv(static_cast<std::size_t>(n_));
    for (Index i = 0; i < n_; ++i) inv[perm_[i]] = i;

    const auto ro = a.row_offsets();
    const auto ci = a.col_indices();
    const auto va = a.values();
    first_.resize(static_cast<std::size_t>(n_));
    for (Index i = 0; i < n_; ++i) first_[i] = i;
    for (Index r = 0; r < n_; ++r) {
        for (Index p = ro[r]; p < ro[r + 1]; ++p) {
            const Index i = inv[r], j = inv[ci[p]];
            const Index hi = std::max(i, j), lo = std::min(i, j);
            first_[hi] = std::min(first_[hi], lo);
        }
    }
    row_start_.resize(static_cast<std::size_t>(n_) + 1);
    row_start_[0] = 0;
    for (Index i = 0; i < n_; ++i) row_start_[i + 1] = row_start_[i] + (i - first_[i] + 1);
    if (row_start_[n_] > max_entries) {
        throw BudgetError("EnvelopeCholesky: profile of " + std::to_string(row_start_[n_]) +
                          " entries exceeds budget " + std::to_string(max_entries));
    }
    values_.assign(static_cast<std::size_t>(row_start_[n_]), 0.0);
    // lower triangle of the permuted matrix; the upper mirror is skipped
    for (Index r = 0; r < n_; ++r) {
        for (Index p = ro[r]; p < ro[r + 1]; ++p) {
            const Index i = inv[r], j = inv[ci[p]];
            if (j > i) continue;
            values_[row_start_[i] + (j - first_[i])] += va[p];
        }
    }

    for (Index i = 0; i < n_; ++i) {
        double* li = values_.data() + row_start_[i] - first_[i];  // li[k] = L(i, k)
        const Index fi = first_[i];
        for (Index j = fi; j < i; ++j) {
            const double* lj = values_.data() + row_start_[j] - first_[j];
            const Index k0 = std::max(fi, first_[j]);
            li[j] = (li[j] - dot(li + k0, lj + k0, j - k0)) / lj[j];
        }
        const double s = li[i] - dot(li + fi, li + fi, i - fi);
        if (!(s > 0.0)) {
            throw ContractError("EnvelopeCholesky: matrix not positive definite (pivot " + std::to_string(i) +
                                " = " + std::to_string(s) + ")");
        }
        li[i] = std::sqrt(s);
    }
}

void EnvelopeCholesky::solve(std::span<const double> b, std::span<double> x) const {
    if (static_cast<Index>(b.size()) != n_ || static_cast<Index>(x.size()) != n_) {
        throw ContractError("EnvelopeCholesky::solve: dimension mismatch");
    }
    std::vector<double> y(static_cast<std::size_t>(n_));
    for (Index i = 0; i < n_; ++i) y[i] = b[perm_[i]];
    for (Index i = 0; i < n_; ++i) {
        const double* li = values_.data() + row_start_[i] - first_[i];
        y[i] = (y[i] - dot(li + first_[i], y.data() + first_[i], i - first_[i])) / li[i];
    }
    for (Index i = n_ - 1; i >= 0; --i) {
        const double* li = values_.data() + row_start_[i] - first_[i];
        y[i] /= li[i];
        const double yi = y[i];
        for (Index k = first_[i]; k < i; ++k) y[k] -= li[k] * yi;
    }
    for (Index i = 0; i < n_; ++i) x[perm_[i]] = y[i];
}

std::vector<double> EnvelopeCholesky::solve(std::span<const double> b) const {
    std::vector<double> x(static_cast<std::size_t>(n_));
    solve(b, x);
    return x;
}

}  // namespace dpw::linalg
