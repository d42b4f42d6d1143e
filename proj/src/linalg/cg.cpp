#include "dpw/linalg/cg.hpp"

#include <cmath>
#include <string>

#include "dpw/error.hpp"

namespace dpw::linalg {

std::vector<double> cg_solve(const CsrMatrix& a, std::span<const double> b, double tol, int max_iter,
                             const CgOptions& options, CgReport* report) {
    const auto n = static_cast<std::size_t>(a.rows());
    if (a.rows() != a.cols() || b.size() != n) throw ContractError("cg_solve: dimension mismatch");
    if (!(tol > 0.0)) throw ContractError("cg_solve: tol must be positive");

    std::vector<double> inv_diag(n, 1.0);
    if (options.jacobi) {
        const auto d = a.diagonal();
        for (std::size_t i = 0; i < n; ++i) {
            if (!(d[i] > 0.0)) throw ContractError("cg_solve: non-positive diagonal entry");
            inv_diag[i] = 1.0 / d[i];
        }
    }

    std::vector<double> x(n, 0.0);
    if (!options.x0.empty()) {
        if (options.x0.size() != n) throw ContractError("cg_solve: x0 has wrong length");
        x.assign(options.x0.begin(), options.x0.end());
    }

    const double bnorm = norm2(b);
    CgReport local;
    CgReport& rep = report ? *report : local;
    rep = {};
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        rep.residual_history.push_back(0.0);
        return x;
    }

    std::vector<double> r(n), z(n), p(n), ap(n);
    a.multiply(x, ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = dot(r, z);
    double rnorm = norm2(r);
    rep.residual_history.push_back(rnorm / bnorm);
    if (options.observer) options.observer(0, x, rnorm);

    int k = 0;
    while (rnorm > tol * bnorm) {
        if (k >= max_iter) {
            rep.iterations = k;
            rep.relative_residual = rnorm / bnorm;
            throw ConvergenceError("cg_solve: no convergence after " + std::to_string(max_iter) +
                                       " iterations, relative residual " + std::to_string(rnorm / bnorm),
                                   {rnorm / bnorm});
        }
        a.multiply(p, ap);
        const double pap = dot(p, ap);
        if (!(pap > 0.0)) throw ContractError("cg_solve: matrix is not positive definite");
        const double alpha = rz / pap;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        rnorm = norm2(r);
        ++k;
        rep.residual_history.push_back(rnorm / bnorm);
        if (options.observer) options.observer(k, x, rnorm);
    }
    rep.iterations = k;
    rep.relative_residual = rnorm / bnorm;
    return x;
}

}  // namespace dpw::linalg
