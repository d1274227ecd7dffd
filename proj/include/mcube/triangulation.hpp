#pragma once

#include "mcube/structure.hpp"

#include <json.hpp>

#include <array>
#include <string>
#include <vector>

namespace mcube {

/// Face i of a tetrahedron is the face opposite vertex i. perm sends vertex j
/// of this tetrahedron to vertex perm[j] of the neighbour; face i is glued to
/// the neighbour's face perm[i].
struct TetGluing {
    int tet = 0;
    std::array<int, 4> perm{0, 1, 2, 3};
};

struct Triangulation {
    std::vector<std::array<TetGluing, 4>> gluings;
    int size() const { return static_cast<int>(gluings.size()); }
};

/// Throws ValidationError naming the tetrahedron/face on any defect.
Triangulation triangulation_from_json(const nlohmann::json& j);
Triangulation parse_triangulation(const std::string& text);
Triangulation load_triangulation(const std::string& path);
nlohmann::json triangulation_to_json(const Triangulation& t);

/// Four cubes per tetrahedron, region ids "t.v". Centers follow layout_regions().
MulticubeStructure subdivide_to_multicube(const Triangulation& t, const std::string& name = "");

/// Places the cubes of tetrahedron t in a block at lattice slot t. Needs ids of
/// the form "t.v"; other regions are left untouched.
void layout_regions(MulticubeStructure& s);

}  // namespace mcube
