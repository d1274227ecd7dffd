#include "mcube/catalog.hpp"
#include "mcube/compatibility.hpp"
#include "mcube/errors.hpp"
#include "mcube/orbits.hpp"
#include "mcube/triangulation.hpp"

#include <doctest.h>

using namespace mcube;

namespace {

std::string data(const std::string& f)
{
    return std::string(MCUBE_TEST_DATA) + "/" + f;
}

}  // namespace

TEST_CASE("one-tetrahedron L(5,2)")
{
    const auto tri = load_triangulation(data("l52-1tet.json"));
    CHECK(tri.size() == 1);
    const auto s = subdivide_to_multicube(tri, "l52");
    CHECK(s.region_count() == 4);
    CHECK(validate_structure(s).ok());
    CHECK(check_compatibility(s).ok());
    const auto K = enumerate_edge_orbits(s).K_multiset();
    CHECK(K == std::vector<int>{3, 3, 3, 3, 3, 3, 3, 3, 4, 4, 4, 4, 4, 4});
    CHECK(K == enumerate_edge_orbits(catalog_get("l52").structure).K_multiset());
}

TEST_CASE("two-tetrahedron manifold failing theta matching")
{
    const auto s = subdivide_to_multicube(load_triangulation(data("two-tet-theta-mismatch.json")), "x");
    CHECK(s.region_count() == 8);
    CHECK(validate_structure(s).ok());
    const auto r = check_compatibility(s);
    CHECK_FALSE(r.theta_ok);
    CHECK(r.det_ok);
    CHECK(r.sum_ok);
    CHECK_FALSE(r.ok());
}

TEST_CASE("L(4,1) fails the corner determinant")
{
    const auto s = subdivide_to_multicube(load_triangulation(data("l41-1tet.json")), "l41");
    const auto r = check_compatibility(s);
    CHECK(r.theta_ok);
    CHECK_FALSE(r.det_ok);
}

TEST_CASE("parser rejects defects")
{
    CHECK_THROWS_AS(parse_triangulation("{"), ValidationError);
    CHECK_THROWS_AS(parse_triangulation(R"({"tetrahedra":0,"gluings":[]})"), ValidationError);
    CHECK_THROWS_AS(parse_triangulation(R"({"tetrahedra":1,"gluings":[[null,null,null,null]]})"), ValidationError);
    // perm not a permutation
    CHECK_THROWS_AS(parse_triangulation(R"({"tetrahedra":1,"gluings":[[
        {"tet":0,"perm":[1,1,3,0]},{"tet":0,"perm":[3,0,1,2]},
        {"tet":0,"perm":[2,0,3,1]},{"tet":0,"perm":[1,3,0,2]}]]})"),
                    ValidationError);
    // face 1 does not glue back to face 0
    CHECK_THROWS_AS(parse_triangulation(R"({"tetrahedra":1,"gluings":[[
        {"tet":0,"perm":[1,2,3,0]},{"tet":0,"perm":[1,2,3,0]},
        {"tet":0,"perm":[2,0,3,1]},{"tet":0,"perm":[1,3,0,2]}]]})"),
                    ValidationError);
    // neighbour out of range
    CHECK_THROWS_AS(parse_triangulation(R"({"tetrahedra":1,"gluings":[[
        {"tet":1,"perm":[1,2,3,0]},{"tet":0,"perm":[3,0,1,2]},
        {"tet":0,"perm":[2,0,3,1]},{"tet":0,"perm":[1,3,0,2]}]]})"),
                    ValidationError);
}

TEST_CASE("json round trip")
{
    const auto tri = load_triangulation(data("two-tet-theta-mismatch.json"));
    const auto back = triangulation_from_json(triangulation_to_json(tri));
    CHECK(triangulation_to_json(back) == triangulation_to_json(tri));
}
