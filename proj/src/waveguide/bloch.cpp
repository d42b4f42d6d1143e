#include "dpw/waveguide/bloch.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "dpw/error.hpp"
#include "dpw/linalg/eigen.hpp"
#include "dpw/waveguide/assemble.hpp"

namespace dpw::waveguide {

namespace {

// Real form of P^* A P, where P folds the top z line onto the bottom one
// with the factor e^{i theta}. Unknown 2p is Re u_p, 2p + 1 is Im u_p.
linalg::CsrMatrix embed(const linalg::CsrMatrix& a, std::size_t nx, double theta) {
    const Index n = a.rows();
    const Index first_top = n - static_cast<Index>(nx);
    const Index nr = n - static_cast<Index>(nx);
    auto fold = [&](Index v) { return v >= first_top ? v - first_top : v; };
    auto phase = [&](Index v) { return v >= first_top ? 1 : 0; };
    const double c1 = std::cos(theta), s1 = std::sin(theta);

    std::vector<linalg::Triplet> t;
    t.reserve(static_cast<std::size_t>(a.nnz()) * 4);
    auto block = [&](Index p, Index q, double v, int k) {
        // k = phase(q) - phase(p) in units of theta
        const double c = k == 0 ? 1.0 : c1, s = k == 0 ? 0.0 : k * s1;
        t.push_back({2 * p, 2 * q, v * c});
        t.push_back({2 * p + 1, 2 * q + 1, v * c});
        t.push_back({2 * p, 2 * q + 1, -v * s});
        t.push_back({2 * p + 1, 2 * q, v * s});
    };
    const auto ro = a.row_offsets();
    const auto ci = a.col_indices();
    const auto va = a.values();
    for (Index r = 0; r < n; ++r) {
        for (Index k = ro[r]; k < ro[r + 1]; ++k) {
            const Index c = ci[k];
            if (c < r) continue;
            const Index p = fold(r), q = fold(c);
            if (c == r) {
                t.push_back({2 * p, 2 * p, va[k]});
                t.push_back({2 * p + 1, 2 * p + 1, va[k]});
                continue;
            }
            const int dk = phase(c) - phase(r);
            block(p, q, va[k], dk);
            block(q, p, va[k], -dk);
        }
    }
    return linalg::csr_from_triplets(2 * nr, 2 * nr, t, true);
}

void check_cell(const Mesh2d& cell) {
    if (cell.nz() < 3) throw ContractError("bloch: the cell needs at least three z lines");
    if (cell.slit_line && *cell.slit_line + 1 >= cell.nz()) throw ContractError("bloch: slit on the cell boundary");
}

std::vector<double> solve_theta(const AssembledPair& pair, const Mesh2d& cell, double theta, int m,
                                const BlochOptions& options) {
    const auto k = embed(pair.K, cell.nx(), theta);
    const auto mm = embed(pair.M, cell.nx(), theta);
    const int count = std::min<Index>(2 * m, k.rows() - 1);
    linalg::EigenResult r;
    try {
        r = linalg::smallest_eigenpairs(k, mm, count, options.tol, options.seed);
    } catch (const ConvergenceError& e) {
        std::ostringstream os;
        os << "bloch at theta = " << theta << ": " << e.what();
        throw ConvergenceError(os.str(), e.residuals());
    }
    const auto& v = r.spectrum.values;
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < v.size(); i += 2) {
        if (std::abs(v[i + 1] - v[i]) > options.pair_tol * std::max(1.0, std::abs(v[i]))) {
            std::ostringstream os;
            os.precision(17);
            os << "bloch at theta = " << theta << ": eigenvalues " << v[i] << " and " << v[i + 1]
               << " of the real embedding do not pair";
            throw ConvergenceError(os.str(), r.spectrum.residuals);
        }
        out.push_back(0.5 * (v[i] + v[i + 1]));
    }
    return out;
}

}  // namespace

std::vector<double> bloch_eigenvalues(const Mesh2d& cell, const solvable1d::PiecewisePotential& potential,
                                      double theta, int m, const BlochOptions& options) {
    check_cell(cell);
    return solve_theta(assemble(cell, potential), cell, theta, m, options);
}

solvable1d::BandStructure bloch_bands(const Mesh2d& cell, const solvable1d::PiecewisePotential& potential,
                                      const std::vector<double>& thetas, double lambda_max,
                                      const BlochOptions& options) {
    check_cell(cell);
    if (thetas.empty()) throw ContractError("bloch_bands: thetas must not be empty");
    const double pi = std::numbers::pi;
    bool has0 = false, has_pi = false;
    for (double t : thetas) {
        if (t < -1e-12 || t > pi + 1e-12) throw ContractError("bloch_bands: thetas must lie in [0, pi]");
        has0 = has0 || std::abs(t) <= 1e-12;
        has_pi = has_pi || std::abs(t - pi) <= 1e-12;
    }
    if (!has0 || !has_pi) throw ContractError("bloch_bands: thetas must include 0 and pi");
    if (!(lambda_max > 0.0)) throw ContractError("bloch_bands: lambda_max must be positive");

    const AssembledPair pair = assemble(cell, potential);
    const Index max_m = (pair.K.rows() - static_cast<Index>(cell.nx())) - 1;
    int m = std::max(1, options.initial_count);
    std::vector<std::vector<double>> values(thetas.size());
    for (;;) {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto worker = [&] {
            for (std::size_t i = next++; i < thetas.size(); i = next++) {
                try {
                    values[i] = solve_theta(pair, cell, thetas[i], m, options);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        };
        const int nt = std::clamp(options.threads, 1, static_cast<int>(thetas.size()));
        std::vector<std::thread> pool;
        for (int w = 1; w < nt; ++w) pool.emplace_back(worker);
        worker();
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);

        const bool enough = std::all_of(values.begin(), values.end(),
                                        [&](const std::vector<double>& v) { return !v.empty() && v.back() > lambda_max; });
        if (enough) break;
        if (m >= max_m) throw BudgetError("bloch_bands: lambda_max exceeds the spectrum resolved by the cell mesh");
        m = static_cast<int>(std::min<Index>(2 * static_cast<Index>(m), max_m));
    }

    std::size_t count = values.front().size();
    for (const auto& v : values) count = std::min(count, v.size());
    std::vector<solvable1d::Interval> bands;
    for (std::size_t k = 0; k < count; ++k) {
        double lo = values.front()[k], hi = lo;
        for (const auto& v : values) {
            lo = std::min(lo, v[k]);
            hi = std::max(hi, v[k]);
        }
        if (lo <= lambda_max) bands.push_back({lo, hi});
    }
    return solvable1d::normalise_bands(std::move(bands), lambda_max);
}

std::vector<double> uniform_thetas(int n) {
    if (n < 2) throw ContractError("uniform_thetas: need at least two points");
    std::vector<double> t(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) t[i] = std::numbers::pi * i / (n - 1);
    t.back() = std::numbers::pi;
    return t;
}

}  // namespace dpw::waveguide
