#include "dpw/linalg/matrix_market.hpp"

#include <cstdio>

namespace dpw::linalg {

void write_matrix_market(std::ostream& os, const CsrMatrix& a) {
    const bool sym = a.symmetric();
    os << (sym ? "%%MatrixMarket matrix coordinate real symmetric\n"
               : "%%MatrixMarket matrix coordinate real general\n");
    const auto ro = a.row_offsets();
    const auto ci = a.col_indices();
    const auto va = a.values();
    Index entries = 0;
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index p = ro[i]; p < ro[i + 1]; ++p) {
            if (!sym || ci[p] <= i) ++entries;
        }
    }
    os << a.rows() << ' ' << a.cols() << ' ' << entries << '\n';
    char buf[64];
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index p = ro[i]; p < ro[i + 1]; ++p) {
            if (sym && ci[p] > i) continue;
            std::snprintf(buf, sizeof buf, "%.17g", va[p]);
            os << (i + 1) << ' ' << (ci[p] + 1) << ' ' << buf << '\n';
        }
    }
}

}  // namespace dpw::linalg
