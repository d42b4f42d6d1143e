#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "dpw/error.hpp"
#include "dpw/linalg/cg.hpp"
#include "dpw/linalg/csr.hpp"
#include "dpw/linalg/dense.hpp"
#include "dpw/linalg/eigen.hpp"
#include "dpw/linalg/envelope.hpp"
#include "dpw/linalg/matrix_market.hpp"
#include "oracles.hpp"

using namespace dpw::linalg;
using Catch::Approx;

namespace {

CsrMatrix from_dense(const oracle::Matrix& a, bool sym = true) {
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            if (a[i][j] != 0.0) t.push_back({Index(i), Index(j), a[i][j]});
    const auto n = static_cast<Index>(a.size());
    return csr_from_triplets(n, n, t, sym);
}

// P1 stiffness/mass on (0, 1) with a variable element length; Neumann ends.
std::pair<CsrMatrix, CsrMatrix> fem_pair_1d(int nodes, double pot = 0.0) {
    std::vector<Triplet> k, m;
    std::vector<double> x(nodes);
    for (int i = 0; i < nodes; ++i) {
        const double s = double(i) / (nodes - 1);
        x[i] = s * s * (3 - 2 * s);  // graded towards both ends
    }
    for (int e = 0; e + 1 < nodes; ++e) {
        const double h = x[e + 1] - x[e];
        const Index a = e, b = e + 1;
        k.push_back({a, a, 1 / h + pot * h / 3});
        k.push_back({b, b, 1 / h + pot * h / 3});
        k.push_back({a, b, -1 / h + pot * h / 6});
        k.push_back({b, a, -1 / h + pot * h / 6});
        m.push_back({a, a, h / 3});
        m.push_back({b, b, h / 3});
        m.push_back({a, b, h / 6});
        m.push_back({b, a, h / 6});
    }
    return {csr_from_triplets(nodes, nodes, k, true), csr_from_triplets(nodes, nodes, m, true)};
}

// 5-point Neumann Laplacian on an nx x ny grid with unit mass.
CsrMatrix grid_laplacian(int nx, int ny) {
    std::vector<Triplet> t;
    auto id = [&](int i, int j) { return Index(j * nx + i); };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            auto link = [&](int i2, int j2) {
                t.push_back({id(i, j), id(i, j), 1.0});
                t.push_back({id(i, j), id(i2, j2), -1.0});
            };
            if (i + 1 < nx) link(i + 1, j);
            if (i > 0) link(i - 1, j);
            if (j + 1 < ny) link(i, j + 1);
            if (j > 0) link(i, j - 1);
        }
    return csr_from_triplets(Index(nx) * ny, Index(nx) * ny, t, true);
}

CsrMatrix identity(Index n) {
    std::vector<Triplet> t;
    for (Index i = 0; i < n; ++i) t.push_back({i, i, 1.0});
    return csr_from_triplets(n, n, t, true);
}

}  // namespace

TEST_CASE("csr_from_triplets builds identity pattern") {
    std::vector<Triplet> t{{0, 0, 1}, {1, 1, 1}};
    const auto a = csr_from_triplets(2, 2, t);
    CHECK(a.nnz() == 2);
    CHECK(a.values()[0] == 1.0);
    CHECK(a.values()[1] == 1.0);
    CHECK(a.row_offsets()[2] == 2);
}

TEST_CASE("csr_from_triplets sums duplicates and keeps explicit zeros") {
    std::vector<Triplet> t{{0, 0, 1}, {0, 0, 2}};
    const auto a = csr_from_triplets(2, 2, t);
    REQUIRE(a.nnz() == 1);
    CHECK(a.at(0, 0) == 3.0);

    std::vector<Triplet> z{{1, 0, 0.0}, {0, 1, 5.0}, {1, 1, 2.0}};
    const auto b = csr_from_triplets(2, 2, z);
    CHECK(b.nnz() == 3);
    CHECK(b.col_indices()[1] == 0);
}

TEST_CASE("csr_from_triplets rejects out-of-range indices") {
    std::vector<Triplet> t{{0, 2, 1}};
    CHECK_THROWS_AS(csr_from_triplets(2, 2, t), dpw::StructuralError);
    std::vector<Triplet> asym{{0, 1, 1.0}};
    CHECK_THROWS_AS(csr_from_triplets(2, 2, asym, true), dpw::StructuralError);
}

TEST_CASE("csr rows are sorted and strictly increasing") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> idx(0, 29);
    std::vector<Triplet> t;
    for (int k = 0; k < 400; ++k) t.push_back({idx(rng), idx(rng), 1.0});
    const auto a = csr_from_triplets(30, 30, t);
    const auto ro = a.row_offsets();
    const auto ci = a.col_indices();
    CHECK(ro[0] == 0);
    CHECK(ro[30] == a.nnz());
    double total = 0;
    for (Index i = 0; i < 30; ++i) {
        CHECK(ro[i] <= ro[i + 1]);
        for (Index p = ro[i] + 1; p < ro[i + 1]; ++p) CHECK(ci[p - 1] < ci[p]);
    }
    for (double v : a.values()) total += v;
    CHECK(total == 400.0);
}

TEST_CASE("cg_solve small systems") {
    const auto id = identity(2);
    std::vector<double> b{3, 4};
    auto x = cg_solve(id, b, 1e-14, 10);
    CHECK(x[0] == Approx(3));
    CHECK(x[1] == Approx(4));

    std::vector<Triplet> t{{0, 0, 4}, {0, 1, 1}, {1, 0, 1}, {1, 1, 3}};
    const auto a = csr_from_triplets(2, 2, t, true);
    std::vector<double> b2{6, 7};
    x = cg_solve(a, b2, 1e-14, 10);
    CHECK(x[0] == Approx(1).margin(1e-12));
    CHECK(x[1] == Approx(2).margin(1e-12));
}

TEST_CASE("cg_solve agrees with Gaussian elimination on random SPD 50x50") {
    const auto dense = oracle::random_spd(50, 2024);
    const auto a = from_dense(dense);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<double> b(50);
    for (double& v : b) v = u(rng);
    const double tol = 1e-12;
    const auto x = cg_solve(a, b, tol, 500);
    const auto ref = oracle::gauss_solve(dense, b);
    // ||x - x*|| <= ||A^{-1}|| ||r|| and lambda_min(A) >= 50
    for (int i = 0; i < 50; ++i) CHECK(std::abs(x[i] - ref[i]) <= tol * norm2(b));
    const auto ax = a.multiply(x);
    double r = 0;
    for (int i = 0; i < 50; ++i) r += (ax[i] - b[i]) * (ax[i] - b[i]);
    CHECK(std::sqrt(r) <= tol * norm2(b));
}

TEST_CASE("cg error decreases monotonically in the energy norm") {
    const auto [k, m] = fem_pair_1d(200, 1.0);
    std::vector<double> b(200);
    for (int i = 0; i < 200; ++i) b[i] = std::sin(0.1 * i) + 0.3;
    const auto ref = cg_solve(k, b, 1e-14, 5000);
    std::vector<double> energy;
    CgOptions opt;
    opt.observer = [&](int, std::span<const double> x, double) {
        std::vector<double> e(200);
        for (int i = 0; i < 200; ++i) e[i] = x[i] - ref[i];
        energy.push_back(dot(e, k.multiply(e)));
    };
    CgReport rep;
    (void)cg_solve(k, b, 1e-10, 5000, opt, &rep);
    REQUIRE(energy.size() > 5);
    for (std::size_t i = 1; i < energy.size(); ++i) CHECK(energy[i] <= energy[i - 1] * (1 + 1e-12) + 1e-28);
    CHECK(rep.relative_residual <= 1e-10);
    CHECK(int(rep.residual_history.size()) == rep.iterations + 1);
}

TEST_CASE("cg_solve reports iteration limit with residual") {
    const auto [k, m] = fem_pair_1d(300, 0.01);
    std::vector<double> b(300, 1.0);
    try {
        (void)cg_solve(k, b, 1e-14, 3);
        FAIL("expected ConvergenceError");
    } catch (const dpw::ConvergenceError& e) {
        REQUIRE(e.residuals().size() == 1);
        CHECK(e.residuals()[0] > 1e-14);
    }
}

TEST_CASE("dense_eig_small analytic cases") {
    DenseMatrix a(2, 2, {2, 1, 1, 2});
    auto s = dense_eig_small(a);
    CHECK(s.values[0] == Approx(1.0));
    CHECK(s.values[1] == Approx(3.0));
    DenseMatrix b(1, 1, {5});
    CHECK(dense_eig_small(b).values == std::vector<double>{5});
    DenseMatrix c(2, 2, {1, 2, 0, 1});
    CHECK_THROWS_AS(dense_eig_small(c), dpw::ContractError);
}

TEST_CASE("dense_eig_small trace identity and Jacobi oracle on random 20x20") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    oracle::Matrix r(20, std::vector<double>(20));
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j <= i; ++j) r[i][j] = r[j][i] = u(rng);
    DenseMatrix a(20, 20);
    double trace = 0;
    for (int i = 0; i < 20; ++i) {
        trace += r[i][i];
        for (int j = 0; j < 20; ++j) a(i, j) = r[i][j];
    }
    const auto s = dense_eig_small(a);
    double sum = 0;
    for (double v : s.values) sum += v;
    CHECK(std::abs(sum - trace) <= 1e-10);
    const auto ref = oracle::jacobi_eigenvalues(r);
    for (int i = 0; i < 20; ++i) CHECK(s.values[i] == Approx(ref[i]).margin(1e-12));
    for (int i = 1; i < 20; ++i) CHECK(s.values[i - 1] <= s.values[i]);
}

TEST_CASE("dense eigenvectors are orthonormal") {
    const auto r = oracle::random_spd(15, 3);
    DenseMatrix a(15, 15);
    for (int i = 0; i < 15; ++i)
        for (int j = 0; j < 15; ++j) a(i, j) = r[i][j];
    const auto e = dense_symmetric_eigen(a);
    for (int p = 0; p < 15; ++p)
        for (int q = 0; q < 15; ++q) {
            double s = 0;
            for (int i = 0; i < 15; ++i) s += e.vectors(i, p) * e.vectors(i, q);
            CHECK(s == Approx(p == q ? 1.0 : 0.0).margin(1e-12));
        }
}

TEST_CASE("envelope Cholesky solves and RCM is a permutation") {
    const auto k = grid_laplacian(12, 9).combine(1.0, identity(108), 0.5);
    const auto perm = reverse_cuthill_mckee(k);
    std::vector<Index> sorted(perm.begin(), perm.end());
    std::sort(sorted.begin(), sorted.end());
    for (Index i = 0; i < 108; ++i) CHECK(sorted[i] == i);
    std::vector<Index> natural(108);
    for (Index i = 0; i < 108; ++i) natural[i] = i;
    CHECK(envelope_size(k, perm) <= envelope_size(k, natural));

    const EnvelopeCholesky chol(k);
    std::vector<double> b(108);
    for (int i = 0; i < 108; ++i) b[i] = std::cos(0.37 * i);
    const auto x = chol.solve(b);
    const auto ax = k.multiply(x);
    for (int i = 0; i < 108; ++i) CHECK(ax[i] == Approx(b[i]).margin(1e-12));
}

TEST_CASE("envelope Cholesky rejects indefinite matrices") {
    std::vector<Triplet> t{{0, 0, 1}, {0, 1, 2}, {1, 0, 2}, {1, 1, 1}};
    CHECK_THROWS_AS(EnvelopeCholesky(csr_from_triplets(2, 2, t, true)), dpw::ContractError);
}

TEST_CASE("smallest_eigenpairs diagonal case") {
    std::vector<Triplet> t{{0, 0, 1}, {1, 1, 2}, {2, 2, 3}};
    const auto k = csr_from_triplets(3, 3, t, true);
    const auto r = smallest_eigenpairs(k, identity(3), 2, 1e-10, 1);
    REQUIRE(r.spectrum.values.size() == 2);
    CHECK(r.spectrum.values[0] == Approx(1.0));
    CHECK(r.spectrum.values[1] == Approx(2.0));
    CHECK_THROWS_AS(smallest_eigenpairs(k, identity(3), 3, 1e-10, 1), dpw::ContractError);
}

TEST_CASE("smallest_eigenpairs Neumann FD kernel") {
    std::vector<Triplet> t;
    for (Index i = 0; i + 1 < 5; ++i) {
        t.push_back({i, i, 1});
        t.push_back({i + 1, i + 1, 1});
        t.push_back({i, i + 1, -1});
        t.push_back({i + 1, i, -1});
    }
    const auto k = csr_from_triplets(5, 5, t, true);
    const auto r = smallest_eigenpairs(k, identity(5), 1, 1e-10, 5);
    CHECK(std::abs(r.spectrum.values[0]) < 1e-12);
    const auto& u = r.vectors[0];
    for (double v : u) CHECK(std::abs(v) == Approx(1 / std::sqrt(5.0)));
}

TEST_CASE("smallest_eigenpairs matches dense oracle on 100-node FEM pair") {
    const auto [k, m] = fem_pair_1d(100, 0.5);
    EigenOptions opt;
    opt.allow_dense = false;
    for (auto pc : {Preconditioner::shift_invert, Preconditioner::jacobi}) {
        opt.preconditioner = pc;
        const auto r = smallest_eigenpairs(k, m, 6, 1e-10, 42, opt);
        const auto ref = dense_generalized_eigen(DenseMatrix::from_csr(k), DenseMatrix::from_csr(m));
        for (int j = 0; j < 6; ++j) {
            CHECK(std::abs(r.spectrum.values[j] - ref.values[j]) <= 1e-8 * (1 + std::abs(ref.values[j])));
            CHECK(r.spectrum.residuals[j] <= 1e-10);
        }
        // M-orthonormality
        for (int p = 0; p < 6; ++p)
            for (int q = 0; q < 6; ++q) {
                const double s = dot(r.vectors[p], m.multiply(r.vectors[q]));
                CHECK(std::abs(s - (p == q ? 1.0 : 0.0)) <= 1e-8);
            }
    }
}

TEST_CASE("smallest_eigenpairs with deflation reports the kernel") {
    const auto k = grid_laplacian(20, 15);
    const auto m = identity(300);
    EigenOptions opt;
    opt.deflation.push_back(std::vector<double>(300, 1.0));
    const auto r = smallest_eigenpairs(k, m, 5, 1e-10, 3, opt);
    const auto ref = oracle::jacobi_eigenvalues([&] {
        oracle::Matrix d(300, std::vector<double>(300, 0.0));
        const auto dd = k.to_dense();
        for (int i = 0; i < 300; ++i)
            for (int j = 0; j < 300; ++j) d[i][j] = dd[i * 300 + j];
        return d;
    }());
    CHECK(std::abs(r.spectrum.values[0]) < 1e-12);
    for (int j = 1; j < 5; ++j) CHECK(r.spectrum.values[j] == Approx(ref[j]).epsilon(1e-9));
    // analytic: 2 - 2cos(pi i / n)
    const double l1 = 2 - 2 * std::cos(std::numbers::pi / 20);
    CHECK(r.spectrum.values[1] == Approx(l1).epsilon(1e-10));
}

TEST_CASE("smallest_eigenpairs resolves exact multiplicities") {
    // two identical disconnected blocks: every eigenvalue doubled
    const auto one = grid_laplacian(15, 6);
    std::vector<Triplet> t;
    const auto ro = one.row_offsets();
    for (Index i = 0; i < one.rows(); ++i)
        for (Index p = ro[i]; p < ro[i + 1]; ++p) {
            t.push_back({i, one.col_indices()[p], one.values()[p]});
            t.push_back({i + 90, one.col_indices()[p] + 90, one.values()[p]});
        }
    const auto k = csr_from_triplets(180, 180, t, true);
    EigenOptions opt;
    opt.allow_dense = false;
    const auto r = smallest_eigenpairs(k, identity(180), 8, 1e-10, 9, opt);
    for (int j = 0; j < 8; j += 2) CHECK(r.spectrum.values[j] == Approx(r.spectrum.values[j + 1]).margin(1e-10));
}

TEST_CASE("smallest_eigenpairs is deterministic for a fixed seed") {
    const auto [k, m] = fem_pair_1d(150, 0.0);
    EigenOptions opt;
    opt.allow_dense = false;
    const auto a = smallest_eigenpairs(k, m, 4, 1e-10, 123, opt);
    const auto b = smallest_eigenpairs(k, m, 4, 1e-10, 123, opt);
    CHECK(a.spectrum.values == b.spectrum.values);
    CHECK(a.vectors == b.vectors);
}

TEST_CASE("matrix market dump layout") {
    std::vector<Triplet> t{{0, 0, 2}, {0, 1, -1}, {1, 0, -1}, {1, 1, 0.1}};
    std::ostringstream os;
    write_matrix_market(os, csr_from_triplets(2, 2, t, true));
    CHECK(os.str() ==
          "%%MatrixMarket matrix coordinate real symmetric\n"
          "2 2 3\n"
          "1 1 2\n"
          "2 1 -1\n"
          "2 2 0.10000000000000001\n");
}
