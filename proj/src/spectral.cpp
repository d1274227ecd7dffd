#include "mcube/spectral.hpp"

#include "mcube/errors.hpp"

#include <cmath>
#include <numbers>

namespace mcube {

SpectralMesh1D build_mesh(int N, double L)
{
    if (N < 6) throw UsageError("resolution N=" + std::to_string(N) + " is below the minimum of 6");
    if (!(L > 0)) throw UsageError("mesh length must be positive");
    SpectralMesh1D m;
    m.N = N;
    m.L = L;
    const int n = N - 1;
    const double pi = std::numbers::pi;
    m.unit.assign(N, 0.0);
    for (int j = 0; 2 * j < n; ++j) {
        m.unit[j] = -std::cos(pi * j / n);
        m.unit[n - j] = -m.unit[j];
    }
    m.unit[0] = -1.0;
    m.unit[n] = 1.0;
    m.nodes.resize(N);
    for (int j = 0; j < N; ++j) m.nodes[j] = 0.5 * L * m.unit[j];

    // D_ij = (c_i/c_j) (-1)^(i+j) / (x_i - x_j); differences via the product formula
    // x_i - x_j = 2 sin(pi (i+j) / 2n) sin(pi (i-j) / 2n) for x_j = -cos(pi j / n).
    m.D = Eigen::MatrixXd::Zero(N, N);
    auto c = [n](int i) { return (i == 0 || i == n) ? 2.0 : 1.0; };
    for (int i = 0; i < N; ++i) {
        double row = 0;
        for (int j = 0; j < N; ++j) {
            if (i == j) continue;
            const double diff = 2.0 * std::sin(pi * (i + j) / (2.0 * n)) * std::sin(pi * (i - j) / (2.0 * n));
            const double v = (c(i) / c(j)) * (((i + j) % 2) ? -1.0 : 1.0) / diff;
            m.D(i, j) = v;
            row += v;
        }
        m.D(i, i) = -row;
    }
    m.D *= 2.0 / L;
    return m;
}

}  // namespace mcube
