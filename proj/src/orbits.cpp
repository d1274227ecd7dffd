#include "mcube/orbits.hpp"

#include "mcube/errors.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace mcube {

namespace {

int pair_index(int a, int b)
{
    // (0,1) -> 0, (0,2) -> 1, (1,2) -> 2
    return a + b - 1;
}

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    std::size_t find(std::size_t x)
    {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b)
    {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace

int edge_index(FaceLabel a, FaceLabel b)
{
    if (a.axis == b.axis) throw std::invalid_argument("edge_index: faces are parallel");
    if (a.axis > b.axis) std::swap(a, b);
    return 4 * pair_index(a.axis, b.axis) + 2 * (a.sign > 0) + (b.sign > 0);
}

CubeEdge cube_edge(int index)
{
    static const int axes[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    const int p = index / 4;
    CubeEdge e;
    e.f1 = {axes[p][0], (index & 2) ? 1 : -1};
    e.f2 = {axes[p][1], (index & 1) ? 1 : -1};
    e.tangent = 3 - axes[p][0] - axes[p][1];
    return e;
}

int corner_index(const IVec3& s)
{
    return (s[0] > 0) | ((s[1] > 0) << 1) | ((s[2] > 0) << 2);
}

IVec3 corner_signs(int c)
{
    return {(c & 1) ? 1 : -1, (c & 2) ? 1 : -1, (c & 4) ? 1 : -1};
}

std::vector<int> EdgeOrbitTable::K_multiset() const
{
    std::vector<int> ks;
    for (const auto& o : orbits) ks.push_back(o.K);
    std::sort(ks.begin(), ks.end());
    return ks;
}

EdgeOrbitTable enumerate_edge_orbits(const MulticubeStructure& s)
{
    EdgeOrbitTable t;
    const int R = s.region_count();
    t.orbit_of.assign(R, std::array<int, 12>{-1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1});
    for (int r0 = 0; r0 < R; ++r0) {
        for (int e0 = 0; e0 < 12; ++e0) {
            if (t.orbit_of[r0][e0] >= 0) continue;
            const int id = static_cast<int>(t.orbits.size());
            EdgeOrbit orbit;
            const CubeEdge ce = cube_edge(e0);
            int r = r0;
            FaceLabel exit = ce.f1, other = ce.f2;
            for (int step = 0;; ++step) {
                if (step > 12 * R)
                    throw ValidationError("edge orbit starting at region " + s.regions[r0].id +
                                          " does not close");
                const int e = edge_index(exit, other);
                if (t.orbit_of[r][e] >= 0)
                    throw ValidationError("edge orbit revisits region " + s.regions[r].id + " edge {" +
                                          exit.str() + other.str() + "}");
                t.orbit_of[r][e] = id;
                orbit.cycle.emplace_back(r, e);
                const FaceMap& m = s.face_map(r, exit);
                const FaceLabel entered = m.to.face;
                const FaceLabel next_exit = FaceLabel::from_normal(m.rot.apply(other.normal()));
                if (next_exit.axis == entered.axis)
                    throw ValidationError("face map from " + s.regions[r].id + exit.str() +
                                          " folds an edge onto the entry face");
                r = m.to.region;
                exit = next_exit;
                other = entered;
                if (r == r0 && exit == ce.f1 && other == ce.f2) break;
                if (r == r0 && edge_index(exit, other) == e0)
                    throw ValidationError("edge orbit at region " + s.regions[r0].id +
                                          " returns with reversed orientation");
            }
            orbit.K = static_cast<int>(orbit.cycle.size());
            t.orbits.push_back(std::move(orbit));
        }
    }
    return t;
}

std::vector<VertexStar> enumerate_vertex_stars(const MulticubeStructure& s)
{
    const int R = s.region_count();
    DisjointSets corners(8 * R);
    DisjointSets link_vertices(24 * R);  // (region, corner, edge axis at the corner)
    DisjointSets link_edges(24 * R);     // (region, corner, face axis at the corner)
    for (int r = 0; r < R; ++r) {
        for (int c = 0; c < 8; ++c) {
            const IVec3 sg = corner_signs(c);
            for (int a = 0; a < 3; ++a) {
                const FaceMap& m = s.face_map(r, FaceLabel{a, sg[a]});
                const int c2 = corner_index(map_offset(m, sg, 1));
                const int r2 = m.to.region;
                corners.unite(8 * r + c, 8 * r2 + c2);
                link_edges.unite(24 * r + 3 * c + a, 24 * r2 + 3 * c2 + m.to.face.axis);
                for (int b = 0; b < 3; ++b) {
                    if (b == a) continue;
                    IVec3 eb{0, 0, 0};
                    eb[b] = 1;
                    const int b2 = FaceLabel::from_normal(m.rot.apply(eb)).axis;
                    link_vertices.unite(24 * r + 3 * c + b, 24 * r2 + 3 * c2 + b2);
                }
            }
        }
    }
    std::map<std::size_t, int> star_of_root;
    std::vector<VertexStar> stars;
    for (int r = 0; r < R; ++r) {
        for (int c = 0; c < 8; ++c) {
            const std::size_t root = corners.find(8 * r + c);
            auto it = star_of_root.find(root);
            if (it == star_of_root.end()) {
                it = star_of_root.emplace(root, static_cast<int>(stars.size())).first;
                stars.emplace_back();
            }
            stars[it->second].incidences.emplace_back(r, c);
        }
    }
    for (auto& st : stars) {
        std::vector<std::size_t> vs, es;
        for (auto [r, c] : st.incidences) {
            for (int a = 0; a < 3; ++a) {
                vs.push_back(link_vertices.find(24 * r + 3 * c + a));
                es.push_back(link_edges.find(24 * r + 3 * c + a));
            }
        }
        std::sort(vs.begin(), vs.end());
        std::sort(es.begin(), es.end());
        st.V = static_cast<int>(std::unique(vs.begin(), vs.end()) - vs.begin());
        st.E = static_cast<int>(std::unique(es.begin(), es.end()) - es.begin());
        st.F = static_cast<int>(st.incidences.size());
        if (st.euler() != 2) {
            const auto [r, c] = st.incidences.front();
            throw ValidationError("vertex link through region " + s.regions[r].id + " corner " +
                                  std::to_string(c) + " is not a 2-sphere (V-E+F=" +
                                  std::to_string(st.euler()) + ")");
        }
    }
    return stars;
}

}  // namespace mcube
