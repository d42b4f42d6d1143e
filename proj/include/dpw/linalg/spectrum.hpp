#pragma once

#include <vector>

namespace dpw::linalg {

/// Ascending eigenvalues (multiplicities repeated) with one residual per value.
struct Spectrum {
    std::vector<double> values;
    std::vector<double> residuals;
    double tol = 0.0;
    bool converged = true;
};

}  // namespace dpw::linalg
