#include "dpw/linalg/csr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dpw/error.hpp"

namespace dpw::linalg {

CsrMatrix CsrMatrix::from_triplets(Index nrows, Index ncols, std::span<const Triplet> triplets,
                                   bool symmetric) {
    if (nrows < 0 || ncols < 0) throw StructuralError("negative matrix dimension");
    if (symmetric && nrows != ncols) throw StructuralError("symmetric matrix must be square");

    std::vector<Index> counts(static_cast<std::size_t>(nrows) + 1, 0);
    for (const auto& t : triplets) {
        if (t.row < 0 || t.row >= nrows || t.col < 0 || t.col >= ncols) {
            throw StructuralError("triplet (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                                  ") outside " + std::to_string(nrows) + "x" + std::to_string(ncols));
        }
        ++counts[static_cast<std::size_t>(t.row) + 1];
    }
    std::partial_sum(counts.begin(), counts.end(), counts.begin());

    // bucket by row, then sort and merge within each row
    std::vector<Index> cols(triplets.size());
    std::vector<double> vals(triplets.size());
    {
        std::vector<Index> next(counts.begin(), counts.end() - 1);
        for (const auto& t : triplets) {
            auto pos = static_cast<std::size_t>(next[static_cast<std::size_t>(t.row)]++);
            cols[pos] = t.col;
            vals[pos] = t.value;
        }
    }

    CsrMatrix m;
    m.nrows_ = nrows;
    m.ncols_ = ncols;
    m.symmetric_ = symmetric;
    m.row_offsets_.assign(static_cast<std::size_t>(nrows) + 1, 0);
    m.col_indices_.reserve(triplets.size());
    m.values_.reserve(triplets.size());

    std::vector<std::pair<Index, double>> row;
    for (Index i = 0; i < nrows; ++i) {
        const auto b = static_cast<std::size_t>(counts[static_cast<std::size_t>(i)]);
        const auto e = static_cast<std::size_t>(counts[static_cast<std::size_t>(i) + 1]);
        row.clear();
        for (std::size_t p = b; p < e; ++p) row.emplace_back(cols[p], vals[p]);
        // stable sort keeps summation order of duplicates deterministic
        std::stable_sort(row.begin(), row.end(),
                         [](const auto& a, const auto& c) { return a.first < c.first; });
        for (std::size_t p = 0; p < row.size();) {
            Index c = row[p].first;
            double s = 0.0;
            while (p < row.size() && row[p].first == c) s += row[p++].second;
            m.col_indices_.push_back(c);
            m.values_.push_back(s);
        }
        m.row_offsets_[static_cast<std::size_t>(i) + 1] = static_cast<Index>(m.values_.size());
    }

    if (symmetric) {
        for (Index i = 0; i < nrows; ++i) {
            for (Index p = m.row_offsets_[i]; p < m.row_offsets_[i + 1]; ++p) {
                const Index j = m.col_indices_[p];
                if (j == i) continue;
                auto rb = m.col_indices_.begin() + m.row_offsets_[j];
                auto re = m.col_indices_.begin() + m.row_offsets_[j + 1];
                auto it = std::lower_bound(rb, re, i);
                if (it == re || *it != i ||
                    m.values_[static_cast<std::size_t>(it - m.col_indices_.begin())] != m.values_[p]) {
                    throw StructuralError("matrix flagged symmetric but entry (" + std::to_string(i) +
                                          ", " + std::to_string(j) + ") has no exact mirror");
                }
            }
        }
    }
    return m;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    if (static_cast<Index>(x.size()) != ncols_ || static_cast<Index>(y.size()) != nrows_) {
        throw ContractError("CsrMatrix::multiply: dimension mismatch");
    }
    for (Index i = 0; i < nrows_; ++i) {
        double s = 0.0;
        for (Index p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
            s += values_[p] * x[static_cast<std::size_t>(col_indices_[p])];
        }
        y[static_cast<std::size_t>(i)] = s;
    }
}

std::vector<double> CsrMatrix::multiply(std::span<const double> x) const {
    std::vector<double> y(static_cast<std::size_t>(nrows_));
    multiply(x, y);
    return y;
}

double CsrMatrix::at(Index i, Index j) const {
    auto rb = col_indices_.begin() + row_offsets_[i];
    auto re = col_indices_.begin() + row_offsets_[i + 1];
    auto it = std::lower_bound(rb, re, j);
    if (it == re || *it != j) return 0.0;
    return values_[static_cast<std::size_t>(it - col_indices_.begin())];
}

std::vector<double> CsrMatrix::diagonal() const {
    std::vector<double> d(static_cast<std::size_t>(std::min(nrows_, ncols_)), 0.0);
    for (Index i = 0; i < static_cast<Index>(d.size()); ++i) d[static_cast<std::size_t>(i)] = at(i, i);
    return d;
}

double CsrMatrix::norm_inf() const {
    double best = 0.0;
    for (Index i = 0; i < nrows_; ++i) {
        double s = 0.0;
        for (Index p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) s += std::abs(values_[p]);
        best = std::max(best, s);
    }
    return best;
}

double CsrMatrix::max_abs() const {
    double best = 0.0;
    for (double v : values_) best = std::max(best, std::abs(v));
    return best;
}

CsrMatrix CsrMatrix::combine(double alpha, const CsrMatrix& other, double beta) const {
    if (nrows_ != other.nrows_ || ncols_ != other.ncols_) {
        throw ContractError("CsrMatrix::combine: dimension mismatch");
    }
    std::vector<Triplet> t;
    t.reserve(values_.size() + other.values_.size());
    for (Index i = 0; i < nrows_; ++i) {
        for (Index p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
            t.push_back({i, col_indices_[p], alpha * values_[p]});
        }
        for (Index p = other.row_offsets_[i]; p < other.row_offsets_[i + 1]; ++p) {
            t.push_back({i, other.col_indices_[p], beta * other.values_[p]});
        }
    }
    return from_triplets(nrows_, ncols_, t, symmetric_ && other.symmetric_);
}

std::vector<double> CsrMatrix::to_dense() const {
    std::vector<double> a(static_cast<std::size_t>(nrows_ * ncols_), 0.0);
    for (Index i = 0; i < nrows_; ++i) {
        for (Index p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
            a[static_cast<std::size_t>(i * ncols_ + col_indices_[p])] = values_[p];
        }
    }
    return a;
}

double dot(const double* a, const double* b, Index n) noexcept {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    Index i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

double dot(std::span<const double> a, std::span<const double> b) {
    return dot(a.data(), b.data(), static_cast<Index>(std::min(a.size(), b.size())));
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace dpw::linalg
