#pragma once

#include <ostream>

#include "dpw/linalg/csr.hpp"

namespace dpw::linalg {

/// Coordinate Matrix Market dump. Symmetric matrices write the lower
/// triangle under a "real symmetric" header, others "real general".
/// Indices are 1-based, values printed with 17 significant digits.
void write_matrix_market(std::ostream& os, const CsrMatrix& a);

}  // namespace dpw::linalg
