#include "mcube/field.hpp"

namespace mcube {

void differentiate(const Grid& g, const std::vector<double>& f, int axis, std::vector<double>& out)
{
    const int N = g.N();
    const Eigen::MatrixXd& D = g.mesh.D;
    out.assign(f.size(), 0.0);
    const int stride = axis == 0 ? 1 : (axis == 1 ? N : N * N);
    for (int node = 0; node < g.size(); ++node) {
        const int i = g.ijk(node)[axis];
        const int base = node - i * stride;
        double s = 0;
        for (int m = 0; m < N; ++m) s += D(i, m) * f[base + m * stride];
        out[node] = s;
    }
}

FieldDerivatives differentiate(const Grid& g, const MetricField& f)
{
    FieldDerivatives d;
    for (int axis = 0; axis < 3; ++axis)
        for (int c = 0; c < 6; ++c) differentiate(g, f.c[c], axis, d.d[axis][c]);
    return d;
}

void differentiate_face(const Grid& g, const std::vector<double>& f, int dir, std::vector<double>& out)
{
    const int N = g.N();
    const Eigen::MatrixXd& D = g.mesh.D;
    out.assign(f.size(), 0.0);
    for (int q = 0; q < N; ++q) {
        for (int p = 0; p < N; ++p) {
            double s = 0;
            for (int m = 0; m < N; ++m) s += dir == 0 ? D(p, m) * f[m + N * q] : D(q, m) * f[p + N * m];
            out[p + N * q] = s;
        }
    }
}

int map_grid_node(const Grid& g, const FaceMap& m, int node)
{
    const int N = g.N();
    const IVec3 p = g.ijk(node);
    const IVec3 u{2 * p[0] - (N - 1), 2 * p[1] - (N - 1), 2 * p[2] - (N - 1)};
    const IVec3 v = map_offset(m, u, N - 1);
    return g.index((v[0] + N - 1) / 2, (v[1] + N - 1) / 2, (v[2] + N - 1) / 2);
}

}  // namespace mcube
