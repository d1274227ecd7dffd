#pragma once

#include "mcube/signed_permutation.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace mcube {

struct Region {
    std::string id;
    Vec3 center{0, 0, 0};  // units of L
};

struct FaceRef {
    int region = -1;
    FaceLabel face;
    bool operator==(const FaceRef& o) const { return region == o.region && face == o.face; }
};

/// Identifies face `from` with face `to`; `rot` maps offsets of the source
/// region into offsets of the target region:
///   x_to = c_to + f_to + rot (x_from - c_from - f_from).
struct FaceMap {
    FaceRef from;
    FaceRef to;
    SignedPermutation rot;
};

class MulticubeStructure {
public:
    std::string name;
    double L = 1.0;
    std::vector<Region> regions;
    std::vector<FaceMap> faces;

    int region_count() const { return static_cast<int>(regions.size()); }
    int region_index(const std::string& id) const;  // -1 when absent

    /// Recomputes the (region, face) -> map lookup. Call after editing `faces`.
    void reindex();
    /// First map whose source is (region, face); nullptr when there is none.
    const FaceMap* find(int region, FaceLabel face) const;
    /// As find(), but throws ValidationError when absent.
    const FaceMap& face_map(int region, FaceLabel face) const;

private:
    std::vector<std::array<int, 6>> index_;
};

struct Finding {
    enum class Kind { Missing, Duplicate, BadRegion, NotSignedPermutation, NormalRule, NotInvolutive };
    Kind kind;
    std::string detail;
};

struct ValidationReport {
    std::vector<Finding> findings;
    bool ok() const { return findings.empty(); }
    nlohmann::json to_json() const;
};

ValidationReport validate_structure(const MulticubeStructure& s);

/// Throws ValidationError listing the findings when the structure is invalid.
void require_valid(const MulticubeStructure& s);

/// Maps a point on the source face of `m` to the target face (absolute
/// coordinates). Throws std::invalid_argument if the point is off the face.
Vec3 apply_face_map(const MulticubeStructure& s, const FaceMap& m, const Vec3& point);

/// Same map on integer "half-node" coordinates: offsets from the region
/// center measured in units where the face sits at +-h.
IVec3 map_offset(const FaceMap& m, const IVec3& offset, int h);

/// Each identified face pair once: the map whose source (region, face index)
/// orders before its target.
std::vector<const FaceMap*> unique_interfaces(const MulticubeStructure& s);

std::string finding_kind_name(Finding::Kind k);

MulticubeStructure structure_from_json(const nlohmann::json& j);
nlohmann::json structure_to_json(const MulticubeStructure& s);
MulticubeStructure load_structure(const std::string& path);
void save_structure(const MulticubeStructure& s, const std::string& path);

}  // namespace mcube
