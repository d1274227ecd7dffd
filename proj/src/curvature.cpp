#include "mcube/curvature.hpp"

#include "mcube/c0_metric.hpp"
#include "mcube/errors.hpp"

#include <cmath>

namespace mcube {

double ExtrinsicCurvatureField::annihilation_residual() const
{
    double r = 0;
    for (std::size_t i = 0; i < K.size(); ++i) r = std::max(r, (K[i] * n_up[i]).cwiseAbs().maxCoeff());
    return r;
}

Eigen::Matrix3d extrinsic_curvature_at(const Eigen::Matrix3d& g, const std::array<Eigen::Matrix3d, 3>& dg, FaceLabel face,
                                       double* lapse, Eigen::Vector3d* n_up)
{
    const double det = g.determinant();
    if (!(det > 0) || !(g(0, 0) > 0) || !(g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0) > 0))
        throw NumericalError("extrinsic_curvature", "metric is not positive definite");
    const Eigen::Matrix3d gi = inverse3(g);
    const int a = face.axis;
    const double N = face.sign / std::sqrt(gi(a, a));
    Eigen::Vector3d nd = Eigen::Vector3d::Zero();
    nd(a) = N;
    const Eigen::Vector3d nu = N * gi.col(a);
    // P(c, a) = P^c_a = delta^c_a - n_a n^c
    const Eigen::Matrix3d P = Eigen::Matrix3d::Identity() - nu * nd.transpose();
    Eigen::Matrix3d Kp;
    for (int c = 0; c < 3; ++c) {
        for (int d = 0; d < 3; ++d) {
            double s = 0;
            for (int e = 0; e < 3; ++e) s += nu(e) * (dg[e](c, d) - dg[c](e, d) - dg[d](e, c));
            Kp(c, d) = 0.5 * s;
        }
    }
    Eigen::Matrix3d K = P.transpose() * Kp * P;
    K = 0.5 * (K + K.transpose());
    if (lapse) *lapse = N;
    if (n_up) *n_up = nu;
    return K;
}

ExtrinsicCurvatureField extrinsic_curvature(const Grid& grid, const MetricField& g, const FieldDerivatives& dg, FaceLabel face)
{
    const int N = grid.N();
    ExtrinsicCurvatureField out;
    out.region = g.region;
    out.face = face;
    out.N = N;
    out.K.resize(N * N);
    out.lapse.resize(N * N);
    out.n_up.resize(N * N);
    out.n_down.resize(N * N);
    for (int q = 0; q < N; ++q) {
        for (int p = 0; p < N; ++p) {
            const int node = grid.face_node(face, p, q);
            const int i = p + N * q;
            std::array<Eigen::Matrix3d, 3> d{dg.at(0, node), dg.at(1, node), dg.at(2, node)};
            out.K[i] = extrinsic_curvature_at(g.at(node), d, face, &out.lapse[i], &out.n_up[i]);
            out.n_down[i] = Eigen::Vector3d::Zero();
            out.n_down[i](face.axis) = out.lapse[i];
        }
    }
    return out;
}

ExtrinsicCurvatureField extrinsic_curvature(const Grid& grid, const MetricField& g, FaceLabel face)
{
    return extrinsic_curvature(grid, g, differentiate(grid, g), face);
}

}  // namespace mcube
