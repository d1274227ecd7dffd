#pragma once

#include "mcube/structure.hpp"

#include <utility>
#include <vector>

namespace mcube {

/// Cube edge where faces f1 and f2 meet (f1.axis < f2.axis); runs along `tangent`.
struct CubeEdge {
    FaceLabel f1;
    FaceLabel f2;
    int tangent = 0;
};

/// 12 edges per cube, indexed 0..11.
int edge_index(FaceLabel a, FaceLabel b);
CubeEdge cube_edge(int index);

/// 8 corners per cube; bit k of the index is set when the corner sits at +L/2 on axis k.
int corner_index(const IVec3& signs);
IVec3 corner_signs(int index);

/// Cycle of (region, edge) incidences around one edge of the manifold.
struct EdgeOrbit {
    std::vector<std::pair<int, int>> cycle;
    int K = 0;
};

struct EdgeOrbitTable {
    std::vector<EdgeOrbit> orbits;
    std::vector<std::array<int, 12>> orbit_of;  // per region and edge

    int K(int region, int edge) const { return orbits[orbit_of[region][edge]].K; }
    std::vector<int> K_multiset() const;  // sorted
};

/// Throws ValidationError when a walk fails to close or visits an incidence twice.
EdgeOrbitTable enumerate_edge_orbits(const MulticubeStructure& s);

/// Corner orbit with its link (triangles = corner incidences).
struct VertexStar {
    std::vector<std::pair<int, int>> incidences;  // (region, corner)
    int V = 0, E = 0, F = 0;
    int euler() const { return V - E + F; }
};

/// Throws ValidationError when some link is not a 2-sphere.
std::vector<VertexStar> enumerate_vertex_stars(const MulticubeStructure& s);

}  // namespace mcube
