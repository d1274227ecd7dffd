#include "mcube/compatibility.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mcube {

DihedralAssignment DihedralAssignment::from_orbits(const EdgeOrbitTable& t)
{
    DihedralAssignment d;
    d.psi.resize(t.orbit_of.size());
    for (std::size_t r = 0; r < t.orbit_of.size(); ++r)
        for (int e = 0; e < 12; ++e) d.psi[r][e] = 2 * std::numbers::pi / t.K(static_cast<int>(r), e);
    return d;
}

std::array<double, 3> DihedralAssignment::at_corner(int region, int corner) const
{
    const IVec3 sg = corner_signs(corner);
    const FaceLabel fx{0, sg[0]}, fy{1, sg[1]}, fz{2, sg[2]};
    return {psi[region][edge_index(fx, fy)], psi[region][edge_index(fx, fz)],
            psi[region][edge_index(fy, fz)]};
}

namespace {

// psi between faces a and b, from the (xy, xz, yz) triple.
double psi_pair(const std::array<double, 3>& p, int a, int b)
{
    if (a > b) std::swap(a, b);
    return p[a + b - 1];
}

}  // namespace

double face_angle(int axis, const std::array<double, 3>& p)
{
    const int b = (axis + 1) % 3, c = (axis + 2) % 3;
    const double pab = psi_pair(p, axis, b), pac = psi_pair(p, axis, c), pbc = psi_pair(p, b, c);
    double ct = (std::cos(pbc) + std::cos(pab) * std::cos(pac)) / (std::sin(pab) * std::sin(pac));
    ct = std::clamp(ct, -1.0, 1.0);
    return std::acos(ct);
}

double corner_determinant(const std::array<double, 3>& p)
{
    const double a = std::cos(p[0]), b = std::cos(p[1]), c = std::cos(p[2]);
    return 1 - 2 * a * b * c - a * a - b * b - c * c;
}

CompatibilityReport check_compatibility(const MulticubeStructure& s, const EdgeOrbitTable& orbits)
{
    CompatibilityReport rep;
    const DihedralAssignment psi = DihedralAssignment::from_orbits(orbits);
    const int R = s.region_count();
    for (int r = 0; r < R; ++r) {
        for (int c = 0; c < 8; ++c) {
            CornerCheck cc;
            cc.region = r;
            cc.corner = c;
            cc.psi = psi.at_corner(r, c);
            for (int a = 0; a < 3; ++a) cc.theta[a] = face_angle(a, cc.psi);
            cc.det = corner_determinant(cc.psi);
            cc.angle_sum = cc.psi[0] + cc.psi[1] + cc.psi[2];
            cc.det_ok = cc.det > 0;
            cc.sum_ok = cc.angle_sum > std::numbers::pi;
            rep.det_ok = rep.det_ok && cc.det_ok;
            rep.sum_ok = rep.sum_ok && cc.sum_ok;
            rep.corners.push_back(cc);
        }
    }
    for (int r = 0; r < R; ++r) {
        for (int c = 0; c < 8; ++c) {
            const IVec3 sg = corner_signs(c);
            for (int a = 0; a < 3; ++a) {
                const FaceMap& m = s.face_map(r, FaceLabel{a, sg[a]});
                const int c2 = corner_index(map_offset(m, sg, 1));
                ThetaComparison t;
                t.region = r;
                t.face = m.from.face;
                t.corner = c;
                t.partner_region = m.to.region;
                t.partner_face = m.to.face;
                t.partner_corner = c2;
                t.theta = rep.corners[8 * r + c].theta[a];
                t.partner_theta = rep.corners[8 * m.to.region + c2].theta[m.to.face.axis];
                t.match = std::abs(t.theta - t.partner_theta) <= kThetaTolerance;
                rep.theta_ok = rep.theta_ok && t.match;
                rep.theta.push_back(t);
            }
        }
    }
    return rep;
}

CompatibilityReport check_compatibility(const MulticubeStructure& s)
{
    return check_compatibility(s, enumerate_edge_orbits(s));
}

nlohmann::json CompatibilityReport::to_json(const MulticubeStructure& s) const
{
    nlohmann::json j;
    j["pass"] = ok();
    j["theta_match"] = theta_ok;
    j["determinant_positive"] = det_ok;
    j["angle_sum_above_pi"] = sum_ok;
    nlohmann::json corners_j = nlohmann::json::array();
    for (const auto& c : corners) {
        corners_j.push_back({{"region", s.regions[c.region].id},
                             {"corner", c.corner},
                             {"psi", c.psi},
                             {"theta", c.theta},
                             {"det", c.det},
                             {"angle_sum", c.angle_sum},
                             {"det_ok", c.det_ok},
                             {"sum_ok", c.sum_ok}});
    }
    j["corners"] = corners_j;
    nlohmann::json bad = nlohmann::json::array();
    for (const auto& t : theta) {
        if (t.match) continue;
        bad.push_back({{"region", s.regions[t.region].id},
                       {"face", t.face.str()},
                       {"corner", t.corner},
                       {"theta", t.theta},
                       {"partner", s.regions[t.partner_region].id + t.partner_face.str()},
                       {"partner_corner", t.partner_corner},
                       {"partner_theta", t.partner_theta}});
    }
    j["theta_mismatches"] = bad;
    return j;
}

}  // namespace mcube
