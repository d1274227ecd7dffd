#pragma once

#include <Eigen/Dense>

#include <vector>

namespace mcube {

/// Chebyshev-Gauss-Lobatto nodes on [-L/2, L/2] (increasing) and the
/// collocation derivative matrix, including the 2/L chain-rule factor.
struct SpectralMesh1D {
    int N = 0;
    double L = 1.0;
    std::vector<double> unit;   // nodes on [-1, 1], exactly antisymmetric
    std::vector<double> nodes;  // L/2 * unit
    Eigen::MatrixXd D;
};

/// Throws UsageError for N < 6.
SpectralMesh1D build_mesh(int N, double L);

}  // namespace mcube
