#include "mcube/c0_metric.hpp"

#include "mcube/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace mcube {

double h(double s, const PartitionParams& p)
{
    const double a = std::abs(s);
    if (a > 1) return 0.0;
    const double t1 = std::pow(1 - std::pow(a, 2 * p.k), p.l);
    const double t2 = std::pow(1 - std::pow(1 - a, 2 * p.k), p.l);
    return 0.5 * (1 + t1 - t2);
}

double dh(double s, const PartitionParams& p)
{
    const double a = std::abs(s);
    if (a > 1) return 0.0;
    const int k2 = 2 * p.k;
    const double d1 = p.l * std::pow(1 - std::pow(a, k2), p.l - 1) * (-k2 * std::pow(a, k2 - 1));
    const double d2 = p.l * std::pow(1 - std::pow(1 - a, k2), p.l - 1) * (k2 * std::pow(1 - a, k2 - 1));
    const double v = 0.5 * (d1 - d2);
    return s < 0 ? -v : v;
}

Eigen::Matrix3d corner_flat_metric(const std::array<double, 3>& psi, const IVec3& sg)
{
    Eigen::Matrix3d e = Eigen::Matrix3d::Identity();
    e(0, 1) = e(1, 0) = -sg[0] * sg[1] * std::cos(psi[0]);
    e(0, 2) = e(2, 0) = -sg[0] * sg[2] * std::cos(psi[1]);
    e(1, 2) = e(2, 1) = -sg[1] * sg[2] * std::cos(psi[2]);
    const double det = e.determinant();
    if (!(det > 0) || !(e(0, 0) * e(1, 1) - e(0, 1) * e(0, 1) > 0))
        throw ValidationError("corner flat metric is not positive definite (det=" + std::to_string(det) + ")");
    return e;
}

namespace {

// Weights from unit coordinates u in [-1,1]^3 (offset = L/2 * u).
std::array<double, 8> weights_unit(const Vec3& u, const PartitionParams& p)
{
    std::array<double, 8> w{};
    std::array<std::array<double, 2>, 3> hv{};
    for (int a = 0; a < 3; ++a) {
        hv[a][0] = h(0.5 * (u[a] + 1), p);  // corner at -L/2
        hv[a][1] = h(0.5 * (u[a] - 1), p);  // corner at +L/2
    }
    for (int c = 0; c < 8; ++c) w[c] = hv[0][c & 1] * hv[1][(c >> 1) & 1] * hv[2][(c >> 2) & 1];
    return w;
}

void require_inside(const Vec3& u)
{
    for (double v : u)
        if (!(std::abs(v) <= 1 + 1e-12)) throw std::invalid_argument("point lies outside the region");
}

}  // namespace

std::array<double, 8> partition_of_unity(const Vec3& offset, double L, const PartitionParams& p)
{
    const Vec3 u{2 * offset[0] / L, 2 * offset[1] / L, 2 * offset[2] / L};
    require_inside(u);
    return weights_unit(u, p);
}

Eigen::Matrix3d inverse3(const Eigen::Matrix3d& m)
{
    Eigen::Matrix3d adj;
    adj(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    adj(0, 1) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
    adj(0, 2) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
    adj(1, 0) = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
    adj(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
    adj(1, 2) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
    adj(2, 0) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
    adj(2, 1) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
    adj(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const double det = m(0, 0) * adj(0, 0) + m(0, 1) * adj(1, 0) + m(0, 2) * adj(2, 0);
    if (det == 0 || !std::isfinite(det)) throw NumericalError("inverse3", "singular 3x3 matrix");
    Eigen::Matrix3d inv = adj / det;
    // Symmetric input: keep the result exactly symmetric.
    return 0.5 * (inv + inv.transpose());
}

C0Metric::C0Metric(const MulticubeStructure& s, const PartitionParams& p) : s_(&s), p_(p)
{
    if (p.k < 1 || p.l < 1) throw UsageError("partition parameters k and l must be >= 1");
    require_valid(s);
    orbits_ = enumerate_edge_orbits(s);
    const CompatibilityReport rep = check_compatibility(s, orbits_);
    if (!rep.ok())
        throw ValidationError("structure '" + s.name + "' fails the compatibility identities" +
                              std::string(rep.theta_ok ? "" : " (theta mismatch)") +
                              std::string(rep.det_ok ? "" : " (determinant)") +
                              std::string(rep.sum_ok ? "" : " (angle sum)"));
    const DihedralAssignment psi = DihedralAssignment::from_orbits(orbits_);
    corner_inv_.resize(s.region_count());
    for (int r = 0; r < s.region_count(); ++r)
        for (int c = 0; c < 8; ++c) corner_inv_[r][c] = corner_flat_metric(psi.at_corner(r, c), corner_signs(c));
}

Eigen::Matrix3d C0Metric::inverse_metric(int region, const Vec3& offset) const
{
    const auto u = partition_of_unity(offset, s_->L, p_);
    Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
    for (int c = 0; c < 8; ++c) g += u[c] * corner_inv_[region][c];
    return g;
}

Eigen::Matrix3d C0Metric::metric(int region, const Vec3& offset) const
{
    return inverse3(inverse_metric(region, offset));
}

std::vector<MetricField> C0Metric::sample(const Grid& g) const
{
    std::vector<MetricField> out;
    const int N = g.N();
    for (int r = 0; r < s_->region_count(); ++r) {
        MetricField f(r, N);
        for (int node = 0; node < g.size(); ++node) {
            const IVec3 p = g.ijk(node);
            const Vec3 u{g.mesh.unit[p[0]], g.mesh.unit[p[1]], g.mesh.unit[p[2]]};
            const auto w = weights_unit(u, p_);
            Eigen::Matrix3d ginv = Eigen::Matrix3d::Zero();
            for (int c = 0; c < 8; ++c)
                if (w[c] != 0) ginv += w[c] * corner_inv_[r][c];
            f.set(node, inverse3(ginv));
        }
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace mcube
