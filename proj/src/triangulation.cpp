#include "mcube/triangulation.hpp"

#include "mcube/errors.hpp"
#include "mcube/orbits.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace mcube {

namespace {

std::string where(int t, int f)
{
    return "tetrahedron " + std::to_string(t) + " face " + std::to_string(f);
}

bool is_permutation4(const std::array<int, 4>& p)
{
    std::array<int, 4> q = p;
    std::sort(q.begin(), q.end());
    return q == std::array<int, 4>{0, 1, 2, 3};
}

std::array<int, 4> inverse4(const std::array<int, 4>& p)
{
    std::array<int, 4> q{};
    for (int i = 0; i < 4; ++i) q[p[i]] = i;
    return q;
}

// The three vertices other than v, increasing.
std::array<int, 3> others(int v)
{
    std::array<int, 3> o{};
    int k = 0;
    for (int w = 0; w < 4; ++w)
        if (w != v) o[k++] = w;
    return o;
}

// Corner of cube v labelled by the vertex set `mask` (must contain v), as a +-1 offset.
IVec3 corner_offset(int v, unsigned mask)
{
    const auto o = others(v);
    IVec3 off{};
    for (int k = 0; k < 3; ++k) off[k] = (mask >> o[k]) & 1u ? 1 : -1;
    return off;
}

unsigned corner_mask(int v, const IVec3& off)
{
    const auto o = others(v);
    unsigned mask = 1u << v;
    for (int k = 0; k < 3; ++k)
        if (off[k] > 0) mask |= 1u << o[k];
    return mask;
}

unsigned permute_mask(unsigned mask, const std::array<int, 4>& p)
{
    unsigned out = 0;
    for (int j = 0; j < 4; ++j)
        if ((mask >> j) & 1u) out |= 1u << p[j];
    return out;
}

int axis_of(int v, int w)
{
    const auto o = others(v);
    for (int k = 0; k < 3; ++k)
        if (o[k] == w) return k;
    throw std::logic_error("axis_of: w == v");
}

// Unique signed permutation carrying every corner of face `fa` (cube va) to the
// corner of face `fb` (cube vb) with the image vertex set.
SignedPermutation solve_rotation(int va, FaceLabel fa, int vb, FaceLabel fb,
                                 const std::array<int, 4>& vertex_map)
{
    std::vector<std::pair<IVec3, IVec3>> pairs;
    for (int c = 0; c < 8; ++c) {
        IVec3 off = corner_signs(c);
        if (off[fa.axis] != fa.sign) continue;
        const unsigned img = permute_mask(corner_mask(va, off), vertex_map);
        pairs.emplace_back(off, corner_offset(vb, img));
    }
    const IVec3 na = fa.normal(), nb = fb.normal();
    const IVec3 inward{-nb[0], -nb[1], -nb[2]};
    const SignedPermutation* found = nullptr;
    for (const auto& cand : SignedPermutation::all()) {
        FaceMap m{{0, fa}, {0, fb}, cand};
        bool ok = cand.apply(na) == inward;
        for (const auto& [a, b] : pairs) ok = ok && map_offset(m, a, 1) == b;
        if (!ok) continue;
        if (found) throw std::logic_error("face rotation is not unique");
        found = &cand;
    }
    if (!found)
        throw std::logic_error("no signed permutation matches the face-corner correspondence");
    return *found;
}

}  // namespace

Triangulation triangulation_from_json(const nlohmann::json& j)
{
    Triangulation tri;
    try {
        const int T = j.at("tetrahedra").get<int>();
        const auto& g = j.at("gluings");
        if (T < 1) throw ValidationError("triangulation needs at least one tetrahedron");
        if (!g.is_array() || static_cast<int>(g.size()) != T)
            throw ValidationError("gluings must list exactly " + std::to_string(T) + " tetrahedra");
        tri.gluings.resize(T);
        for (int t = 0; t < T; ++t) {
            if (!g[t].is_array() || g[t].size() != 4)
                throw ValidationError("tetrahedron " + std::to_string(t) + " must have 4 face entries");
            for (int f = 0; f < 4; ++f) {
                const auto& e = g[t][f];
                if (e.is_null()) throw ValidationError(where(t, f) + " is unglued");
                TetGluing tg;
                tg.tet = e.at("tet").get<int>();
                const auto& p = e.at("perm");
                if (!p.is_array() || p.size() != 4)
                    throw ValidationError(where(t, f) + ": perm needs 4 entries");
                for (int k = 0; k < 4; ++k) tg.perm[k] = p[k].get<int>();
                if (tg.tet < 0 || tg.tet >= T)
                    throw ValidationError(where(t, f) + ": neighbour out of range");
                if (!is_permutation4(tg.perm))
                    throw ValidationError(where(t, f) + ": perm is not a permutation of 0..3");
                tri.gluings[t][f] = tg;
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed triangulation JSON: ") + e.what());
    }
    const int T = tri.size();
    for (int t = 0; t < T; ++t) {
        for (int f = 0; f < 4; ++f) {
            const TetGluing& g = tri.gluings[t][f];
            const int f2 = g.perm[f];
            if (g.tet == t && f2 == f && g.perm == std::array<int, 4>{0, 1, 2, 3})
                throw ValidationError(where(t, f) + " is glued to itself by the identity");
            const TetGluing& back = tri.gluings[g.tet][f2];
            if (back.tet != t || back.perm != inverse4(g.perm))
                throw ValidationError(where(t, f) + ": gluing is not involutive");
        }
    }
    return tri;
}

Triangulation parse_triangulation(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed triangulation JSON: ") + e.what());
    }
    return triangulation_from_json(j);
}

Triangulation load_triangulation(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_triangulation(ss.str());
}

nlohmann::json triangulation_to_json(const Triangulation& t)
{
    nlohmann::json g = nlohmann::json::array();
    for (const auto& tet : t.gluings) {
        nlohmann::json faces = nlohmann::json::array();
        for (const auto& e : tet) faces.push_back({{"tet", e.tet}, {"perm", e.perm}});
        g.push_back(faces);
    }
    return {{"tetrahedra", t.size()}, {"gluings", g}};
}

MulticubeStructure subdivide_to_multicube(const Triangulation& tri, const std::string& name)
{
    MulticubeStructure s;
    s.name = name;
    s.L = 1.0;
    const int T = tri.size();
    for (int t = 0; t < T; ++t)
        for (int v = 0; v < 4; ++v) s.regions.push_back({std::to_string(t) + "." + std::to_string(v), {}});
    auto region = [](int t, int v) { return 4 * t + v; };
    const std::array<int, 4> identity{0, 1, 2, 3};
    for (int t = 0; t < T; ++t) {
        for (int v = 0; v < 4; ++v) {
            const auto o = others(v);
            for (int k = 0; k < 3; ++k) {
                // +k: internal face shared with the cube at vertex o[k].
                {
                    const int w = o[k];
                    const FaceLabel fa{k, 1}, fb{axis_of(w, v), 1};
                    FaceMap m{{region(t, v), fa}, {region(t, w), fb}, solve_rotation(v, fa, w, fb, identity)};
                    s.faces.push_back(m);
                }
                // -k: part of the tetrahedron face opposite o[k].
                {
                    const int i = o[k];
                    const TetGluing& g = tri.gluings[t][i];
                    const int v2 = g.perm[v];
                    const FaceLabel fa{k, -1}, fb{axis_of(v2, g.perm[i]), -1};
                    FaceMap m{{region(t, v), fa}, {region(g.tet, v2), fb}, solve_rotation(v, fa, v2, fb, g.perm)};
                    s.faces.push_back(m);
                }
            }
        }
    }
    layout_regions(s);
    s.reindex();
    return s;
}

void layout_regions(MulticubeStructure& s)
{
    static const int offsets[4][3] = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (auto& r : s.regions) {
        const auto dot = r.id.find('.');
        if (dot == std::string::npos) continue;
        int t = 0, v = 0;
        try {
            t = std::stoi(r.id.substr(0, dot));
            v = std::stoi(r.id.substr(dot + 1));
        } catch (const std::exception&) {
            continue;
        }
        if (t < 0 || v < 0 || v > 3) continue;
        r.center = {3.0 * (t / 2) + offsets[v][0], 3.0 * (t % 2) + offsets[v][1], 0.0 + offsets[v][2]};
    }
}

}  // namespace mcube
