#pragma once

#include "mcube/compatibility.hpp"
#include "mcube/field.hpp"

#include <Eigen/Dense>

#include <array>

namespace mcube {

struct PartitionParams {
    int k = 2;
    int l = 3;
};

/// h(s) = 1/2 {1 + (1 - s^2k)^l - [1 - (1-|s|)^2k]^l}; 0 for |s| > 1.
double h(double s, const PartitionParams& p);
/// dh/ds on [-1, 1].
double dh(double s, const PartitionParams& p);

/// Flat inverse metric at a corner: unit diagonal, e^{ab} = -c_a c_b cos psi_ab.
/// Throws ValidationError when it is not positive definite.
Eigen::Matrix3d corner_flat_metric(const std::array<double, 3>& psi_xy_xz_yz, const IVec3& corner_signs);

/// Weights u of the 8 corners at `offset` (position relative to the region
/// center). Throws std::invalid_argument if the point is outside the cube.
std::array<double, 8> partition_of_unity(const Vec3& offset, double L, const PartitionParams& p);

/// Global C0 metric: partition-of-unity blend of corner flat metrics.
class C0Metric {
public:
    /// Runs edge-orbit enumeration and the compatibility checks; throws
    /// ValidationError if they fail.
    C0Metric(const MulticubeStructure& s, const PartitionParams& p);

    const MulticubeStructure& structure() const { return *s_; }
    const PartitionParams& params() const { return p_; }
    const EdgeOrbitTable& orbits() const { return orbits_; }
    const Eigen::Matrix3d& corner_inverse(int region, int corner) const { return corner_inv_[region][corner]; }

    Eigen::Matrix3d inverse_metric(int region, const Vec3& offset) const;
    Eigen::Matrix3d metric(int region, const Vec3& offset) const;

    /// ghat on the N^3 collocation grid of every region.
    std::vector<MetricField> sample(const Grid& g) const;

private:
    const MulticubeStructure* s_;
    PartitionParams p_;
    EdgeOrbitTable orbits_;
    std::vector<std::array<Eigen::Matrix3d, 8>> corner_inv_;
};

/// Closed-form 3x3 inverse of a symmetric matrix (adjugate / determinant).
Eigen::Matrix3d inverse3(const Eigen::Matrix3d& m);

}  // namespace mcube
