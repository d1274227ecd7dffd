#pragma once

#include "mcube/orbits.hpp"

#include <json.hpp>

namespace mcube {

/// Dihedral angle psi = 2 pi / K for every (region, edge).
struct DihedralAssignment {
    std::vector<std::array<double, 12>> psi;

    static DihedralAssignment from_orbits(const EdgeOrbitTable& t);
    double operator()(int region, int edge) const { return psi[region][edge]; }
    /// (psi_xy, psi_xz, psi_yz) at a corner.
    std::array<double, 3> at_corner(int region, int corner) const;
};

/// Angle between the two cube edges of face `axis` meeting at a corner.
double face_angle(int axis, const std::array<double, 3>& psi_xy_xz_yz);

/// Closed form of det e^{ab} at a corner: 1 - 2 prod(cos) - sum(cos^2).
double corner_determinant(const std::array<double, 3>& psi_xy_xz_yz);

struct CornerCheck {
    int region = 0;
    int corner = 0;
    std::array<double, 3> psi{};    // xy, xz, yz
    std::array<double, 3> theta{};  // on the x, y, z faces through the corner
    double det = 0;
    double angle_sum = 0;
    bool det_ok = false;
    bool sum_ok = false;
};

struct ThetaComparison {
    int region = 0;
    FaceLabel face;
    int corner = 0;
    int partner_region = 0;
    FaceLabel partner_face;
    int partner_corner = 0;
    double theta = 0;
    double partner_theta = 0;
    bool match = false;
};

struct CompatibilityReport {
    std::vector<CornerCheck> corners;
    std::vector<ThetaComparison> theta;
    bool theta_ok = true;
    bool det_ok = true;
    bool sum_ok = true;

    bool ok() const { return theta_ok && det_ok && sum_ok; }
    nlohmann::json to_json(const MulticubeStructure& s) const;
};

constexpr double kThetaTolerance = 1e-12;

CompatibilityReport check_compatibility(const MulticubeStructure& s, const EdgeOrbitTable& orbits);
CompatibilityReport check_compatibility(const MulticubeStructure& s);

}  // namespace mcube
