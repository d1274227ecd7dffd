#include "mcube/structure.hpp"

#include "mcube/errors.hpp"

#include <cmath>
#include <utility>
#include <fstream>
#include <sstream>

namespace mcube {

int MulticubeStructure::region_index(const std::string& id) const
{
    for (std::size_t i = 0; i < regions.size(); ++i)
        if (regions[i].id == id) return static_cast<int>(i);
    return -1;
}

void MulticubeStructure::reindex()
{
    index_.assign(regions.size(), std::array<int, 6>{-1, -1, -1, -1, -1, -1});
    for (std::size_t k = 0; k < faces.size(); ++k) {
        const FaceRef& f = faces[k].from;
        if (f.region < 0 || f.region >= region_count()) continue;
        int& slot = index_[f.region][f.face.index()];
        if (slot < 0) slot = static_cast<int>(k);
    }
}

const FaceMap* MulticubeStructure::find(int region, FaceLabel face) const
{
    if (region < 0 || region >= region_count()) return nullptr;
    if (index_.size() != regions.size()) {
        for (const FaceMap& m : faces)
            if (m.from.region == region && m.from.face == face) return &m;
        return nullptr;
    }
    const int k = index_[region][face.index()];
    return k < 0 ? nullptr : &faces[k];
}

const FaceMap& MulticubeStructure::face_map(int region, FaceLabel face) const
{
    const FaceMap* m = find(region, face);
    if (!m) {
        const std::string id = region >= 0 && region < region_count() ? regions[region].id : "?";
        throw ValidationError("no face map for region " + id + " face " + face.str());
    }
    return *m;
}

std::string finding_kind_name(Finding::Kind k)
{
    switch (k) {
    case Finding::Kind::Missing: return "missing";
    case Finding::Kind::Duplicate: return "duplicate";
    case Finding::Kind::BadRegion: return "bad-region";
    case Finding::Kind::NotSignedPermutation: return "not-signed-permutation";
    case Finding::Kind::NormalRule: return "normal-rule";
    case Finding::Kind::NotInvolutive: return "not-involutive";
    }
    return "unknown";
}

nlohmann::json ValidationReport::to_json() const
{
    nlohmann::json j;
    j["valid"] = ok();
    j["findings"] = nlohmann::json::array();
    for (const auto& f : findings)
        j["findings"].push_back({{"kind", finding_kind_name(f.kind)}, {"detail", f.detail}});
    return j;
}

namespace {

std::string ref_str(const MulticubeStructure& s, const FaceRef& r)
{
    const std::string id =
        r.region >= 0 && r.region < s.region_count() ? s.regions[r.region].id : "?";
    return id + r.face.str();
}

}  // namespace

ValidationReport validate_structure(const MulticubeStructure& s)
{
    ValidationReport rep;
    auto add = [&](Finding::Kind k, std::string d) { rep.findings.push_back({k, std::move(d)}); };

    std::vector<std::array<int, 6>> as_source(s.regions.size(), std::array<int, 6>{});
    std::vector<std::array<int, 6>> as_target(s.regions.size(), std::array<int, 6>{});
    for (const FaceMap& m : s.faces) {
        const bool src_ok = m.from.region >= 0 && m.from.region < s.region_count();
        const bool dst_ok = m.to.region >= 0 && m.to.region < s.region_count();
        if (!src_ok || !dst_ok) {
            add(Finding::Kind::BadRegion, ref_str(s, m.from) + " -> " + ref_str(s, m.to));
            continue;
        }
        ++as_source[m.from.region][m.from.face.index()];
        ++as_target[m.to.region][m.to.face.index()];
    }
    for (int r = 0; r < s.region_count(); ++r) {
        for (int f = 0; f < 6; ++f) {
            const std::string where = s.regions[r].id + FaceLabel::from_index(f).str();
            if (as_source[r][f] == 0) add(Finding::Kind::Missing, "no map from " + where);
            if (as_source[r][f] > 1) add(Finding::Kind::Duplicate, "several maps from " + where);
            if (as_target[r][f] == 0) add(Finding::Kind::Missing, "no map onto " + where);
            if (as_target[r][f] > 1) add(Finding::Kind::Duplicate, "several maps onto " + where);
        }
    }
    for (const FaceMap& m : s.faces) {
        if (m.from.region < 0 || m.from.region >= s.region_count() || m.to.region < 0 ||
            m.to.region >= s.region_count())
            continue;
        const std::string what = ref_str(s, m.from) + " -> " + ref_str(s, m.to);
        if (!m.rot.valid()) {
            add(Finding::Kind::NotSignedPermutation, what + " rot " + m.rot.str());
            continue;
        }
        const IVec3 n = m.rot.apply(m.from.face.normal());
        const IVec3 want = m.to.face.normal();
        if (n[0] != -want[0] || n[1] != -want[1] || n[2] != -want[2])
            add(Finding::Kind::NormalRule, what + " rot " + m.rot.str() +
                                               " does not send the outward normal to the inward normal");
        const FaceMap* back = s.find(m.to.region, m.to.face);
        if (!back) continue;
        if (!(back->to == m.from) || !(back->rot * m.rot == SignedPermutation()))
            add(Finding::Kind::NotInvolutive,
                what + " but " + ref_str(s, back->from) + " -> " + ref_str(s, back->to) + " rot " +
                    back->rot.str());
    }
    return rep;
}

void require_valid(const MulticubeStructure& s)
{
    const ValidationReport rep = validate_structure(s);
    if (rep.ok()) return;
    std::ostringstream os;
    os << "structure '" << s.name << "' is invalid:";
    for (const auto& f : rep.findings) os << "\n  " << finding_kind_name(f.kind) << ": " << f.detail;
    throw ValidationError(os.str());
}

std::vector<const FaceMap*> unique_interfaces(const MulticubeStructure& s)
{
    std::vector<const FaceMap*> out;
    for (const auto& m : s.faces) {
        const auto a = std::make_pair(m.from.region, m.from.face.index());
        const auto b = std::make_pair(m.to.region, m.to.face.index());
        if (a < b) out.push_back(&m);
    }
    return out;
}

IVec3 map_offset(const FaceMap& m, const IVec3& offset, int h)
{
    const IVec3 nf = m.from.face.normal();
    const IVec3 nt = m.to.face.normal();
    const IVec3 rel{offset[0] - h * nf[0], offset[1] - h * nf[1], offset[2] - h * nf[2]};
    const IVec3 r = m.rot.apply(rel);
    return {r[0] + h * nt[0], r[1] + h * nt[1], r[2] + h * nt[2]};
}

Vec3 apply_face_map(const MulticubeStructure& s, const FaceMap& m, const Vec3& point)
{
    const double L = s.L;
    const Vec3& ca = s.regions.at(m.from.region).center;
    const Vec3& cb = s.regions.at(m.to.region).center;
    const int a = m.from.face.axis;
    const double on_face = ca[a] * L + 0.5 * L * m.from.face.sign;
    if (std::abs(point[a] - on_face) > 1e-12 * L)
        throw std::invalid_argument("apply_face_map: point is not on the source face");
    const IVec3 nf = m.from.face.normal();
    const IVec3 nt = m.to.face.normal();
    Vec3 rel{};
    for (int i = 0; i < 3; ++i) rel[i] = point[i] - ca[i] * L - 0.5 * L * nf[i];
    const Vec3 r = m.rot.apply(rel);
    Vec3 out{};
    for (int i = 0; i < 3; ++i) out[i] = cb[i] * L + 0.5 * L * nt[i] + r[i];
    return out;
}

namespace {

SignedPermutation rot_from_json(const nlohmann::json& j)
{
    if (j.is_string()) return SignedPermutation::parse(j.get<std::string>());
    if (!j.is_array() || j.size() != 3) throw ValidationError("rot must be a string or a 3x3 matrix");
    IMat3 m{};
    for (int r = 0; r < 3; ++r) {
        if (!j[r].is_array() || j[r].size() != 3) throw ValidationError("rot must be 3x3");
        for (int c = 0; c < 3; ++c) {
            if (!j[r][c].is_number_integer()) throw ValidationError("rot entries must be integers");
            m[r][c] = j[r][c].get<int>();
        }
    }
    return SignedPermutation(m);
}

}  // namespace

MulticubeStructure structure_from_json(const nlohmann::json& j)
{
    try {
        MulticubeStructure s;
        s.name = j.value("name", std::string());
        s.L = j.value("L", 1.0);
        if (!(s.L > 0)) throw ValidationError("L must be positive");
        for (const auto& r : j.at("regions")) {
            Region reg;
            const auto& id = r.at("id");
            reg.id = id.is_string() ? id.get<std::string>() : id.dump();
            const auto& c = r.at("center");
            if (!c.is_array() || c.size() != 3) throw ValidationError("center must have 3 entries");
            for (int k = 0; k < 3; ++k) reg.center[k] = c[k].get<double>();
            if (s.region_index(reg.id) >= 0) throw ValidationError("duplicate region id " + reg.id);
            s.regions.push_back(reg);
        }
        auto ref = [&](const nlohmann::json& a) {
            if (!a.is_array() || a.size() != 2) throw ValidationError("face reference must be [id, label]");
            const std::string id = a[0].is_string() ? a[0].get<std::string>() : a[0].dump();
            FaceRef fr;
            fr.region = s.region_index(id);
            if (fr.region < 0) throw ValidationError("unknown region id " + id);
            fr.face = FaceLabel::parse(a[1].get<std::string>());
            return fr;
        };
        for (const auto& f : j.at("faces")) {
            FaceMap m;
            m.from = ref(f.at("from"));
            m.to = ref(f.at("to"));
            m.rot = rot_from_json(f.at("rot"));
            s.faces.push_back(m);
        }
        s.reindex();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed structure JSON: ") + e.what());
    }
}

nlohmann::json structure_to_json(const MulticubeStructure& s)
{
    nlohmann::json j;
    j["name"] = s.name;
    j["L"] = s.L;
    j["regions"] = nlohmann::json::array();
    for (const auto& r : s.regions) {
        nlohmann::json c = nlohmann::json::array();
        for (double v : r.center) {
            if (v == std::floor(v)) c.push_back(static_cast<long long>(v));
            else c.push_back(v);
        }
        j["regions"].push_back({{"id", r.id}, {"center", c}});
    }
    j["faces"] = nlohmann::json::array();
    for (const auto& m : s.faces) {
        nlohmann::json rot = nlohmann::json::array();
        for (int r = 0; r < 3; ++r) rot.push_back({m.rot(r, 0), m.rot(r, 1), m.rot(r, 2)});
        j["faces"].push_back({{"from", {s.regions.at(m.from.region).id, m.from.face.str()}},
                              {"to", {s.regions.at(m.to.region).id, m.to.face.str()}},
                              {"rot", rot}});
    }
    return j;
}

MulticubeStructure load_structure(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path + ": " + e.what());
    }
    return structure_from_json(j);
}

void save_structure(const MulticubeStructure& s, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write " + path);
    out << structure_to_json(s).dump(1) << '\n';
}

}  // namespace mcube
