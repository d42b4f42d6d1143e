#include "dpw/linalg/dense.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dpw/error.hpp"

namespace dpw::linalg {

DenseMatrix::DenseMatrix(Index rows, Index cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (static_cast<Index>(data_.size()) != rows * cols) {
        throw ContractError("DenseMatrix: data size does not match shape");
    }
}

DenseMatrix DenseMatrix::identity(Index n) {
    DenseMatrix a(n, n);
    for (Index i = 0; i < n; ++i) a(i, i) = 1.0;
    return a;
}

DenseMatrix DenseMatrix::from_csr(const CsrMatrix& a) { return {a.rows(), a.cols(), a.to_dense()}; }

bool DenseMatrix::is_symmetric(double tol) const {
    if (rows_ != cols_) return false;
    double scale = 0.0;
    for (double v : data_) scale = std::max(scale, std::abs(v));
    for (Index i = 0; i < rows_; ++i) {
        for (Index j = 0; j < i; ++j) {
            if (std::abs((*this)(i, j) - (*this)(j, i)) > tol * scale) return false;
        }
    }
    return true;
}

namespace {

// Householder reduction to tridiagonal form; v holds the accumulated
// transformation on exit, d the diagonal and e the subdiagonal (e[0] unused).
void tred2(DenseMatrix& v, std::vector<double>& d, std::vector<double>& e) {
    const Index n = v.rows();
    for (Index j = 0; j < n; ++j) d[j] = v(n - 1, j);

    for (Index i = n - 1; i > 0; --i) {
        double scale = 0.0;
        double h = 0.0;
        for (Index k = 0; k < i; ++k) scale += std::abs(d[k]);
        if (scale == 0.0) {
            e[i] = d[i - 1];
            for (Index j = 0; j < i; ++j) {
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
                v(j, i) = 0.0;
            }
        } else {
            for (Index k = 0; k < i; ++k) {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            double f = d[i - 1];
            double g = std::sqrt(h);
            if (f > 0) g = -g;
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for (Index j = 0; j < i; ++j) e[j] = 0.0;

            for (Index j = 0; j < i; ++j) {
                f = d[j];
                v(j, i) = f;
                g = e[j] + v(j, j) * f;
                for (Index k = j + 1; k <= i - 1; ++k) {
                    g += v(k, j) * d[k];
                    e[k] += v(k, j) * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for (Index j = 0; j < i; ++j) {
                e[j] /= h;
                f += e[j] * d[j];
            }
            const double hh = f / (h + h);
            for (Index j = 0; j < i; ++j) e[j] -= hh * d[j];
            for (Index j = 0; j < i; ++j) {
                f = d[j];
                g = e[j];
                for (Index k = j; k <= i - 1; ++k) v(k, j) -= (f * e[k] + g * d[k]);
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
            }
        }
        d[i] = h;
    }

    for (Index i = 0; i < n - 1; ++i) {
        v(n - 1, i) = v(i, i);
        v(i, i) = 1.0;
        const double h = d[i + 1];
        if (h != 0.0) {
            for (Index k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
            for (Index j = 0; j <= i; ++j) {
                double g = 0.0;
                for (Index k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
                for (Index k = 0; k <= i; ++k) v(k, j) -= g * d[k];
            }
        }
        for (Index k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
    }
    for (Index j = 0; j < n; ++j) {
        d[j] = v(n - 1, j);
        v(n - 1, j) = 0.0;
    }
    v(n - 1, n - 1) = 1.0;
    e[0] = 0.0;
}

// Implicit QL on the tridiagonal (d, e), rotating the columns of v.
void tql2(DenseMatrix& v, std::vector<double>& d, std::vector<double>& e) {
    const Index n = v.rows();
    for (Index i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    double f = 0.0;
    double tst1 = 0.0;
    const double eps = std::ldexp(1.0, -52);
    for (Index l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        Index m = l;
        while (m < n) {
            if (std::abs(e[m]) <= eps * tst1) break;
            ++m;
        }
        if (m > l) {
            int iter = 0;
            do {
                if (++iter > 60) {
                    throw ConvergenceError("dense_symmetric_eigen: QL iteration did not converge",
                                           {std::abs(e[l])});
                }
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (Index i = l + 2; i < n; ++i) d[i] -= h;
                f += h;

                p = d[m];
                double c = 1.0, c2 = 1.0, c3 = 1.0;
                const double el1 = e[l + 1];
                double s = 0.0, s2 = 0.0;
                for (Index i = m - 1; i >= l; --i) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = std::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for (Index k = 0; k < n; ++k) {
                        h = v(k, i + 1);
                        v(k, i + 1) = s * v(k, i) + c * h;
                        v(k, i) = c * v(k, i) - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > eps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

}  // namespace

DenseEigen dense_symmetric_eigen(const DenseMatrix& a) {
    if (a.rows() != a.cols()) throw ContractError("dense_symmetric_eigen: matrix is not square");
    if (!a.is_symmetric(1e-12)) throw ContractError("dense_symmetric_eigen: matrix is not symmetric");
    const Index n = a.rows();
    if (n > 2000) throw ContractError("dense_symmetric_eigen: dimension exceeds 2000");
    if (n == 0) return {};

    DenseMatrix v = a;
    std::vector<double> d(static_cast<std::size_t>(n)), e(static_cast<std::size_t>(n));
    tred2(v, d, e);
    tql2(v, d, e);

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) { return d[x] < d[y]; });

    DenseEigen out;
    out.values.resize(static_cast<std::size_t>(n));
    out.vectors = DenseMatrix(n, n);
    for (Index j = 0; j < n; ++j) {
        out.values[j] = d[order[j]];
        for (Index i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    return out;
}

Spectrum dense_eig_small(const DenseMatrix& a) {
    Spectrum s;
    s.values = dense_symmetric_eigen(a).values;
    s.residuals.assign(s.values.size(), 0.0);
    s.converged = true;
    return s;
}

DenseMatrix dense_cholesky(const DenseMatrix& a) {
    const Index n = a.rows();
    DenseMatrix l(n, n);
    for (Index j = 0; j < n; ++j) {
        double s = a(j, j);
        for (Index k = 0; k < j; ++k) s -= l(j, k) * l(j, k);
        if (!(s > 0.0)) {
            throw ContractError("dense_cholesky: matrix not positive definite at pivot " + std::to_string(j));
        }
        l(j, j) = std::sqrt(s);
        for (Index i = j + 1; i < n; ++i) {
            double t = a(i, j);
            for (Index k = 0; k < j; ++k) t -= l(i, k) * l(j, k);
            l(i, j) = t / l(j, j);
        }
    }
    return l;
}

DenseEigen dense_generalized_eigen(const DenseMatrix& k, const DenseMatrix& m) {
    const Index n = k.rows();
    if (k.cols() != n || m.rows() != n || m.cols() != n) {
        throw ContractError("dense_generalized_eigen: dimension mismatch");
    }
    const DenseMatrix l = dense_cholesky(m);

    // c = L^{-1} K L^{-T}: solve L Y = K column-wise, then L C^T = Y^T.
    DenseMatrix y = k;
    for (Index col = 0; col < n; ++col) {
        for (Index i = 0; i < n; ++i) {
            double t = y(i, col);
            for (Index p = 0; p < i; ++p) t -= l(i, p) * y(p, col);
            y(i, col) = t / l(i, i);
        }
    }
    DenseMatrix c(n, n);
    for (Index row = 0; row < n; ++row) {
        for (Index i = 0; i < n; ++i) {
            double t = y(row, i);
            for (Index p = 0; p < i; ++p) t -= l(i, p) * c(row, p);
            c(row, i) = t / l(i, i);
        }
    }
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < i; ++j) {
            const double avg = 0.5 * (c(i, j) + c(j, i));
            c(i, j) = avg;
            c(j, i) = avg;
        }
    }

    DenseEigen e = dense_symmetric_eigen(c);
    // u = L^{-T} v
    for (Index col = 0; col < n; ++col) {
        for (Index i = n - 1; i >= 0; --i) {
            double t = e.vectors(i, col);
            for (Index p = i + 1; p < n; ++p) t -= l(p, i) * e.vectors(p, col);
            e.vectors(i, col) = t / l(i, i);
        }
    }
    return e;
}

}  // namespace dpw::linalg
