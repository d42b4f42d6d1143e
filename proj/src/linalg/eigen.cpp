#include "dpw/linalg/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "dpw/error.hpp"
#include "dpw/linalg/cg.hpp"
#include "dpw/linalg/dense.hpp"
#include "dpw/linalg/envelope.hpp"

namespace dpw::linalg {

namespace {

// Column-major n x k block of vectors.
struct Block {
    Index n = 0;
    Index k = 0;
    std::vector<double> a;

    Block() = default;
    Block(Index rows, Index cols) : n(rows), k(cols), a(static_cast<std::size_t>(rows * cols), 0.0) {}

    double* col(Index j) { return a.data() + j * n; }
    const double* col(Index j) const { return a.data() + j * n; }
    std::span<double> span(Index j) { return {col(j), static_cast<std::size_t>(n)}; }
    std::span<const double> span(Index j) const { return {col(j), static_cast<std::size_t>(n)}; }
};

Block apply(const CsrMatrix& a, const Block& x) {
    Block y(x.n, x.k);
    for (Index j = 0; j < x.k; ++j) a.multiply(x.span(j), y.span(j));
    return y;
}

// rows are processed in chunks so the columns of a chunk stay in cache
constexpr Index kChunk = 512;

// A^T B
DenseMatrix gram(const Block& a, const Block& b) {
    DenseMatrix g(a.k, b.k);
    for (Index r0 = 0; r0 < a.n; r0 += kChunk) {
        const Index len = std::min(kChunk, a.n - r0);
        for (Index i = 0; i < a.k; ++i) {
            for (Index j = 0; j < b.k; ++j) g(i, j) += dot(a.col(i) + r0, b.col(j) + r0, len);
        }
    }
    return g;
}

// A^T B for a symmetric product (B = S A with S symmetric); lower half only
DenseMatrix gram_symmetric(const Block& a, const Block& b) {
    DenseMatrix g(a.k, b.k);
    for (Index r0 = 0; r0 < a.n; r0 += kChunk) {
        const Index len = std::min(kChunk, a.n - r0);
        for (Index i = 0; i < a.k; ++i) {
            for (Index j = 0; j <= i; ++j) g(i, j) += dot(a.col(i) + r0, b.col(j) + r0, len);
        }
    }
    for (Index i = 0; i < a.k; ++i) {
        for (Index j = 0; j < i; ++j) g(j, i) = g(i, j);
    }
    return g;
}

// S C, using the first `cols` columns of C
Block combine(const Block& s, const DenseMatrix& c, Index cols) {
    Block out(s.n, cols);
    for (Index r0 = 0; r0 < s.n; r0 += kChunk) {
        const Index len = std::min(kChunk, s.n - r0);
        for (Index j = 0; j < cols; ++j) {
            double* o = out.col(j) + r0;
            for (Index i = 0; i < s.k; ++i) {
                const double w = c(i, j);
                if (w == 0.0) continue;
                const double* si = s.col(i) + r0;
                for (Index r = 0; r < len; ++r) o[r] += w * si[r];
            }
        }
    }
    return out;
}

Block concat(const Block& a, const Block& b) {
    Block out(std::max(a.n, b.n), a.k + b.k);
    std::copy(a.a.begin(), a.a.end(), out.a.begin());
    std::copy(b.a.begin(), b.a.end(), out.a.begin() + static_cast<std::ptrdiff_t>(a.a.size()));
    return out;
}

Block select(const Block& a, const std::vector<Index>& cols) {
    Block out(a.n, static_cast<Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        std::copy(a.col(cols[j]), a.col(cols[j]) + a.n, out.col(static_cast<Index>(j)));
    }
    return out;
}

// q <- q - x (x^T M q), x M-orthonormal, applied twice.
void project_out(Block& q, const Block& x, const Block& mx) {
    if (x.k == 0 || q.k == 0) return;
    for (int pass = 0; pass < 2; ++pass) {
        const DenseMatrix c = gram(mx, q);
        for (Index j = 0; j < q.k; ++j) {
            double* qj = q.col(j);
            for (Index i = 0; i < x.k; ++i) {
                const double w = c(i, j);
                const double* xi = x.col(i);
                for (Index r = 0; r < q.n; ++r) qj[r] -= w * xi[r];
            }
        }
    }
}

// M-orthonormalise the columns of q by SVQB, dropping near-dependent
// directions. Applied twice for accuracy.
Block svqb(const CsrMatrix& m, Block q) {
    for (int pass = 0; pass < 2 && q.k > 0; ++pass) {
        const Block mq = apply(m, q);
        DenseMatrix g = gram_symmetric(q, mq);
        std::vector<double> dscale(static_cast<std::size_t>(q.k));
        std::vector<Index> nonzero;
        for (Index j = 0; j < q.k; ++j) {
            if (g(j, j) > 0.0) nonzero.push_back(j);
        }
        if (static_cast<Index>(nonzero.size()) != q.k) {
            q = select(q, nonzero);
            if (q.k == 0) return q;
            const Block mq2 = apply(m, q);
            g = gram_symmetric(q, mq2);
            dscale.resize(static_cast<std::size_t>(q.k));
        }
        for (Index j = 0; j < q.k; ++j) dscale[j] = 1.0 / std::sqrt(g(j, j));
        for (Index i = 0; i < q.k; ++i) {
            for (Index j = 0; j < q.k; ++j) g(i, j) *= dscale[i] * dscale[j];
        }
        const DenseEigen e = dense_symmetric_eigen(g);
        const double theta_max = e.values.back();
        std::vector<Index> keep;
        for (Index j = 0; j < q.k; ++j) {
            if (e.values[j] > 1e-13 * theta_max) keep.push_back(j);
        }
        DenseMatrix c(q.k, static_cast<Index>(keep.size()));
        for (std::size_t jj = 0; jj < keep.size(); ++jj) {
            const Index j = keep[jj];
            const double s = 1.0 / std::sqrt(e.values[j]);
            for (Index i = 0; i < q.k; ++i) c(i, static_cast<Index>(jj)) = dscale[i] * e.vectors(i, j) * s;
        }
        q = combine(q, c, static_cast<Index>(keep.size()));
    }
    return q;
}

std::vector<double> inverse_diagonal_weights(const CsrMatrix& m) {
    auto d = m.diagonal();
    for (double& v : d) {
        if (!(v > 0.0)) throw ContractError("smallest_eigenpairs: M has a non-positive diagonal entry");
        v = 1.0 / v;
    }
    return d;
}

double weighted_residual(const double* ku, const double* mu, double lambda, const std::vector<double>& wdiag,
                         Index n) {
    double s = 0.0;
    for (Index r = 0; r < n; ++r) {
        const double t = ku[r] - lambda * mu[r];
        s += t * t * wdiag[r];
    }
    return std::sqrt(s) / std::max(1.0, std::abs(lambda));
}

class Preconditioning {
public:
    Preconditioning(const CsrMatrix& k, const CsrMatrix& m, const EigenOptions& opt) : shifted_(k.combine(1.0, m, opt.shift)) {
        bool factor = opt.preconditioner == Preconditioner::shift_invert;
        if (opt.preconditioner == Preconditioner::automatic) {
            const auto perm = reverse_cuthill_mckee(shifted_);
            factor = envelope_size(shifted_, perm) <= opt.profile_budget;
        }
        if (factor) {
            chol_ = std::make_unique<EnvelopeCholesky>(shifted_, opt.profile_budget);
        } else {
            inv_diag_ = shifted_.diagonal();
            for (double& v : inv_diag_) {
                if (!(v > 0.0)) throw ContractError("smallest_eigenpairs: K + sigma M has a non-positive diagonal");
                v = 1.0 / v;
            }
        }
    }

    bool exact() const { return chol_ != nullptr; }

    Block apply(const Block& r) const {
        Block w(r.n, r.k);
        for (Index j = 0; j < r.k; ++j) {
            if (chol_) {
                chol_->solve(r.span(j), w.span(j));
            } else {
                const double* rj = r.col(j);
                double* wj = w.col(j);
                for (Index i = 0; i < r.n; ++i) wj[i] = inv_diag_[i] * rj[i];
            }
        }
        return w;
    }

    // (K + sigma M)^{-1} b, exactly or by PCG
    Block solve(const Block& b) const {
        if (chol_) return apply(b);
        Block x(b.n, b.k);
        for (Index j = 0; j < b.k; ++j) {
            auto sol = cg_solve(shifted_, b.span(j), 1e-13, static_cast<int>(10 * b.n + 100));
            std::copy(sol.begin(), sol.end(), x.col(j));
        }
        return x;
    }

private:
    CsrMatrix shifted_;
    std::unique_ptr<EnvelopeCholesky> chol_;
    std::vector<double> inv_diag_;
};

struct RitzState {
    Block x, kx, mx;
    std::vector<double> lambda;
    std::vector<double> res;
};

// Rayleigh-Ritz on an M-orthonormal basis s with ks = K s; keeps the p
// lowest pairs. K x and M x are recomputed so residuals do not drift.
RitzState rayleigh_ritz(const CsrMatrix& k, const CsrMatrix& m, const Block& s, const Block& ks, Index p,
                        DenseMatrix* coeffs, const std::vector<double>& wdiag) {
    const DenseEigen e = dense_symmetric_eigen(gram_symmetric(s, ks));
    RitzState st;
    st.x = combine(s, e.vectors, p);
    st.kx = apply(k, st.x);
    st.mx = apply(m, st.x);
    st.lambda.assign(e.values.begin(), e.values.begin() + p);
    st.res.resize(static_cast<std::size_t>(p));
    for (Index j = 0; j < p; ++j) {
        st.res[j] = weighted_residual(st.kx.col(j), st.mx.col(j), st.lambda[j], wdiag, s.n);
    }
    if (coeffs) *coeffs = e.vectors;
    return st;
}

RitzState rayleigh_ritz(const CsrMatrix& k, const CsrMatrix& m, const Block& s, Index p,
                        const std::vector<double>& wdiag) {
    return rayleigh_ritz(k, m, s, apply(k, s), p, nullptr, wdiag);
}

Block residual_block(const RitzState& st, const std::vector<Index>& cols) {
    Block r(st.x.n, static_cast<Index>(cols.size()));
    for (std::size_t jj = 0; jj < cols.size(); ++jj) {
        const Index j = cols[jj];
        double* o = r.col(static_cast<Index>(jj));
        const double* kx = st.kx.col(j);
        const double* mx = st.mx.col(j);
        for (Index i = 0; i < r.n; ++i) o[i] = kx[i] - st.lambda[j] * mx[i];
    }
    return r;
}

bool leading_converged(const RitzState& st, Index wanted, double tol) {
    for (Index j = 0; j < wanted; ++j) {
        if (!(st.res[j] <= tol)) return false;
    }
    return true;
}

EigenResult dense_path(const CsrMatrix& k, const CsrMatrix& m, int count, double tol, const std::vector<double>& wdiag) {
    const DenseEigen e = dense_generalized_eigen(DenseMatrix::from_csr(k), DenseMatrix::from_csr(m));
    const Index n = k.rows();
    EigenResult out;
    out.method = "dense";
    out.spectrum.tol = tol;
    for (int j = 0; j < count; ++j) {
        std::vector<double> u(static_cast<std::size_t>(n));
        for (Index i = 0; i < n; ++i) u[i] = e.vectors(i, j);
        const auto ku = k.multiply(u);
        const auto mu = m.multiply(u);
        out.spectrum.values.push_back(e.values[j]);
        out.spectrum.residuals.push_back(weighted_residual(ku.data(), mu.data(), e.values[j], wdiag, n));
        out.vectors.push_back(std::move(u));
    }
    out.spectrum.converged = true;
    return out;
}

}  // namespace

double eigen_residual(const CsrMatrix& k, const CsrMatrix& m, std::span<const double> u, double lambda) {
    const auto wdiag = inverse_diagonal_weights(m);
    const auto ku = k.multiply(u);
    const auto mu = m.multiply(u);
    const double unorm = std::sqrt(dot(u, mu));
    if (unorm == 0.0) throw ContractError("eigen_residual: zero vector");
    return weighted_residual(ku.data(), mu.data(), lambda, wdiag, k.rows()) / unorm;
}

EigenResult smallest_eigenpairs(const CsrMatrix& k, const CsrMatrix& m, int count, double tol, std::uint64_t seed,
                                const EigenOptions& opt) {
    const Index n = k.rows();
    if (k.cols() != n || m.rows() != n || m.cols() != n) {
        throw ContractError("smallest_eigenpairs: K and M must be square of equal size");
    }
    if (count < 1) throw ContractError("smallest_eigenpairs: m must be at least 1");
    if (count >= n) {
        throw ContractError("smallest_eigenpairs: requested " + std::to_string(count) + " eigenpairs of a " +
                            std::to_string(n) + "-dimensional problem (need m < nrows)");
    }
    if (!(tol > 0.0)) throw ContractError("smallest_eigenpairs: tol must be positive");
    const auto wdiag = inverse_diagonal_weights(m);

    // deflation space
    Block y(n, 0);
    if (!opt.deflation.empty()) {
        Block raw(n, static_cast<Index>(opt.deflation.size()));
        for (std::size_t j = 0; j < opt.deflation.size(); ++j) {
            if (static_cast<Index>(opt.deflation[j].size()) != n) {
                throw ContractError("smallest_eigenpairs: deflation vector has wrong length");
            }
            std::copy(opt.deflation[j].begin(), opt.deflation[j].end(), raw.col(static_cast<Index>(j)));
        }
        y = svqb(m, std::move(raw));
    }
    const Block my = apply(m, y);
    const Index q = y.k;
    const Index wanted = std::max<Index>(0, count - q);

    const Index guard = opt.guard_vectors >= 0 ? opt.guard_vectors : std::max<Index>(4, count / 4);
    const Index p = std::min<Index>(wanted + guard, n - q);

    if (opt.allow_dense && (n <= 48 || 3 * (p + q) >= n)) return dense_path(k, m, count, tol, wdiag);

    EigenResult out;
    out.spectrum.tol = tol;
    std::vector<std::pair<double, std::vector<double>>> pairs;
    std::vector<double> residuals_all;
    {
        const Block ky = apply(k, y);
        for (Index j = 0; j < q; ++j) {
            const double lam = dot(y.span(j), ky.span(j));
            pairs.emplace_back(lam, std::vector<double>(y.col(j), y.col(j) + n));
        }
    }

    if (wanted > 0) {
        const Preconditioning prec(k, m, opt);

        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        Block x0(n, p);
        for (double& v : x0.a) v = uni(rng);
        project_out(x0, y, my);
        x0 = svqb(m, std::move(x0));
        if (x0.k < p) throw ConvergenceError("smallest_eigenpairs: degenerate initial block", {});

        RitzState st = rayleigh_ritz(k, m, x0, p, wdiag);
        Block pdir(n, 0);
        int it = 0;
        bool ok = leading_converged(st, wanted, tol);
        out.method = prec.exact() ? "lobpcg+shift-invert" : "lobpcg+jacobi";

        while (!ok && it < opt.max_iterations) {
            ++it;
            std::vector<Index> active;
            for (Index j = 0; j < p; ++j) {
                if (!(st.res[j] <= tol)) active.push_back(j);
            }
            Block w = prec.apply(residual_block(st, active));
            project_out(w, y, my);
            Block qblk = concat(w, pdir);
            project_out(qblk, st.x, st.mx);
            qblk = svqb(m, std::move(qblk));
            project_out(qblk, y, my);
            project_out(qblk, st.x, st.mx);
            qblk = svqb(m, std::move(qblk));

            DenseMatrix c;
            RitzState next = rayleigh_ritz(k, m, concat(st.x, qblk), concat(st.kx, apply(k, qblk)), p, &c, wdiag);

            // search directions: the part of the new Ritz vectors outside span(x)
            DenseMatrix cq(qblk.k, static_cast<Index>(active.size()));
            for (std::size_t jj = 0; jj < active.size(); ++jj) {
                for (Index i = 0; i < qblk.k; ++i) cq(i, static_cast<Index>(jj)) = c(p + i, active[jj]);
            }
            pdir = combine(qblk, cq, static_cast<Index>(active.size()));
            st = std::move(next);
            ok = leading_converged(st, wanted, tol);
        }

        if (!ok) {
            // shift-invert block subspace iteration
            out.method = "subspace-iteration";
            Block xs = st.x;
            for (int fit = 0; fit < opt.fallback_iterations && !ok; ++fit) {
                ++it;
                Block z = prec.solve(apply(m, xs));
                project_out(z, y, my);
                z = svqb(m, std::move(z));
                if (z.k < p) throw ConvergenceError("smallest_eigenpairs: subspace iteration lost rank", st.res);
                st = rayleigh_ritz(k, m, z, p, wdiag);
                xs = st.x;
                ok = leading_converged(st, wanted, tol);
            }
        }
        out.iterations = it;
        if (!ok) {
            std::vector<double> res(st.res.begin(), st.res.begin() + wanted);
            const auto failed = std::count_if(res.begin(), res.end(), [&](double r) { return !(r <= tol); });
            std::ostringstream msg;
            msg << "smallest_eigenpairs: " << failed << " of " << wanted << " pairs not converged to tol " << tol
                << " after " << it << " iterations";
            throw ConvergenceError(msg.str(), std::move(res));
        }
        for (Index j = 0; j < wanted; ++j) {
            pairs.emplace_back(st.lambda[j], std::vector<double>(st.x.col(j), st.x.col(j) + n));
        }
    } else {
        out.method = "deflation";
    }

    std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    pairs.resize(static_cast<std::size_t>(count));
    for (auto& [lam, u] : pairs) {
        const auto ku = k.multiply(u);
        const auto mu = m.multiply(u);
        out.spectrum.values.push_back(lam);
        out.spectrum.residuals.push_back(weighted_residual(ku.data(), mu.data(), lam, wdiag, n));
        out.vectors.push_back(std::move(u));
    }
    out.spectrum.converged = true;
    return out;
}

}  // namespace dpw::linalg
