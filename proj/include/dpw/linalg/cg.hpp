#pragma once

#include <functional>
#include <span>
#include <vector>

#include "dpw/linalg/csr.hpp"

namespace dpw::linalg {

struct CgReport {
    int iterations = 0;
    double relative_residual = 0.0;
    std::vector<double> residual_history;  // ||r_k||_2 / ||b||_2, k = 0..iterations
};

/// Called after every accepted iterate with (iteration, x_k, ||r_k||_2).
using CgObserver = std::function<void(int, std::span<const double>, double)>;

struct CgOptions {
    bool jacobi = true;
    std::span<const double> x0{};
    CgObserver observer{};
};

/// Preconditioned conjugate gradients for SPD `a`. Stops when
/// ||A x - b||_2 <= tol ||b||_2; throws ConvergenceError after max_iter.
std::vector<double> cg_solve(const CsrMatrix& a, std::span<const double> b, double tol, int max_iter,
                             const CgOptions& options = {}, CgReport* report = nullptr);

}  // namespace dpw::linalg
