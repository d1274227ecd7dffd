#include "mcube/catalog.hpp"
#include "mcube/errors.hpp"
#include "mcube/orbits.hpp"
#include "mcube/structure.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace mcube;

namespace {

MulticubeStructure torus()
{
    return catalog_get("three-torus").structure;
}

bool has(const ValidationReport& r, Finding::Kind k)
{
    return std::any_of(r.findings.begin(), r.findings.end(), [k](const Finding& f) { return f.kind == k; });
}

}  // namespace

TEST_CASE("face maps are involutions on every catalog entry")
{
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-0.5, 0.5);
    for (const auto& name : catalog_names()) {
        const auto s = catalog_get(name).structure;
        double worst = 0;
        for (const auto& m : s.faces) {
            const FaceMap* back = s.find(m.to.region, m.to.face);
            REQUIRE(back != nullptr);
            const auto& c = s.regions[m.from.region].center;
            for (int trial = 0; trial < 20; ++trial) {
                Vec3 p{};
                for (int a = 0; a < 3; ++a) p[a] = (c[a] + U(rng)) * s.L;
                p[m.from.face.axis] = (c[m.from.face.axis] + 0.5 * m.from.face.sign) * s.L;
                const Vec3 q = apply_face_map(s, *back, apply_face_map(s, m, p));
                for (int a = 0; a < 3; ++a) worst = std::max(worst, std::abs(q[a] - p[a]));
            }
        }
        INFO(name);
        CHECK(worst < 1e-13 * s.L);
    }
}

TEST_CASE("json round trip")
{
    const auto s = catalog_get("poincare").structure;
    const auto t = structure_from_json(structure_to_json(s));
    REQUIRE(t.region_count() == s.region_count());
    REQUIRE(t.faces.size() == s.faces.size());
    for (std::size_t i = 0; i < s.faces.size(); ++i) {
        CHECK(t.faces[i].from == s.faces[i].from);
        CHECK(t.faces[i].to == s.faces[i].to);
        CHECK(t.faces[i].rot == s.faces[i].rot);
    }
    CHECK(structure_to_json(t) == structure_to_json(s));
}

TEST_CASE("validation findings")
{
    CHECK(validate_structure(torus()).ok());

    auto s = torus();
    s.faces.pop_back();
    s.reindex();
    CHECK(has(validate_structure(s), Finding::Kind::Missing));
    CHECK_THROWS_AS(require_valid(s), ValidationError);

    s = torus();
    s.faces[0].rot = SignedPermutation::parse("R+x") * s.faces[0].rot;
    s.reindex();
    const auto r = validate_structure(s);
    CHECK((has(r, Finding::Kind::NormalRule) || has(r, Finding::Kind::NotInvolutive)));

    s = torus();
    s.faces[0].rot = SignedPermutation(IMat3{{{2, 0, 0}, {0, 1, 0}, {0, 0, 1}}});
    s.reindex();
    CHECK(has(validate_structure(s), Finding::Kind::NotSignedPermutation));

    s = torus();
    s.faces[0].to.region = 5;
    s.reindex();
    CHECK(has(validate_structure(s), Finding::Kind::BadRegion));
}

TEST_CASE("malformed structure json")
{
    CHECK_THROWS_AS(structure_from_json(nlohmann::json::parse(R"({"regions": 3})")), ValidationError);
    CHECK_THROWS_AS(structure_from_json(nlohmann::json::parse(
                        R"({"name":"x","regions":[{"id":"a","center":[0,0,0]}],
                            "faces":[{"from":["a","+q"],"to":["a","-x"],"rot":"I"}]})")),
                    ValidationError);
}

TEST_CASE("map_offset and unique interfaces")
{
    const auto s = torus();
    // three-torus: +x of the only region glued to its -x by the identity
    const FaceMap& m = s.face_map(0, FaceLabel{0, 1});
    CHECK(m.to.face == FaceLabel{0, -1});
    CHECK(map_offset(m, IVec3{3, 1, -2}, 3) == IVec3{-3, 1, -2});
    CHECK(unique_interfaces(s).size() == 3);
    for (const auto& name : catalog_names()) {
        const auto t = catalog_get(name).structure;
        CHECK(unique_interfaces(t).size() == static_cast<std::size_t>(3 * t.region_count()));
    }
}

TEST_CASE("edge orbits and vertex stars")
{
    const auto t = enumerate_edge_orbits(torus());
    CHECK(t.orbits.size() == 3);
    CHECK(t.K_multiset() == std::vector<int>{4, 4, 4});
    for (const auto& name : catalog_names()) {
        const auto s = catalog_get(name).structure;
        const auto orbits = enumerate_edge_orbits(s);
        int total = 0;
        for (int k : orbits.K_multiset()) total += k;
        INFO(name);
        CHECK(total == 12 * s.region_count());
        for (const auto& v : enumerate_vertex_stars(s)) CHECK(v.euler() == 2);
    }
}
