#pragma once

#include "mcube/signed_permutation.hpp"
#include "mcube/spectral.hpp"
#include "mcube/structure.hpp"

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace mcube {

/// Component slot of a symmetric tensor: xx,xy,xz,yy,yz,zz -> 0..5.
constexpr int sym(int a, int b)
{
    if (a > b) std::swap(a, b);
    return a == 0 ? b : (a == 1 ? 2 + b : 5);
}

/// Tangential axes of a face with normal `axis`, increasing.
constexpr std::array<int, 2> in_face_axes(int axis)
{
    return axis == 0 ? std::array<int, 2>{1, 2} : (axis == 1 ? std::array<int, 2>{0, 2} : std::array<int, 2>{0, 1});
}

/// N^3 tensor-product collocation grid of one region; x index fastest.
struct Grid {
    SpectralMesh1D mesh;

    Grid(int N, double L) : mesh(build_mesh(N, L)) {}
    int N() const { return mesh.N; }
    double L() const { return mesh.L; }
    int size() const { return mesh.N * mesh.N * mesh.N; }
    int index(int i, int j, int k) const { return i + mesh.N * (j + mesh.N * k); }
    int index(const IVec3& ijk) const { return index(ijk[0], ijk[1], ijk[2]); }
    IVec3 ijk(int node) const { return {node % mesh.N, (node / mesh.N) % mesh.N, node / (mesh.N * mesh.N)}; }
    Vec3 offset(int node) const
    {
        const IVec3 p = ijk(node);
        return {mesh.nodes[p[0]], mesh.nodes[p[1]], mesh.nodes[p[2]]};
    }
    /// Node of face f at in-face indices (p along the lower tangential axis, q along the higher).
    int face_node(FaceLabel f, int p, int q) const
    {
        IVec3 v{};
        const auto t = in_face_axes(f.axis);
        v[f.axis] = f.sign > 0 ? mesh.N - 1 : 0;
        v[t[0]] = p;
        v[t[1]] = q;
        return index(v);
    }
};

/// Samples of a symmetric 3x3 tensor on a region grid.
struct MetricField {
    int region = 0;
    int N = 0;
    std::array<std::vector<double>, 6> c;

    MetricField() = default;
    MetricField(int region_, int N_) : region(region_), N(N_)
    {
        for (auto& v : c) v.assign(static_cast<std::size_t>(N_) * N_ * N_, 0.0);
    }
    Eigen::Matrix3d at(int node) const
    {
        Eigen::Matrix3d m;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) m(a, b) = c[sym(a, b)][node];
        return m;
    }
    void set(int node, const Eigen::Matrix3d& m)
    {
        for (int a = 0; a < 3; ++a)
            for (int b = a; b < 3; ++b) c[sym(a, b)][node] = m(a, b);
    }
};

/// out = d f / d x^axis on the grid (spectral).
void differentiate(const Grid& g, const std::vector<double>& f, int axis, std::vector<double>& out);

/// All first derivatives of a tensor field: d[axis][component].
struct FieldDerivatives {
    std::array<std::array<std::vector<double>, 6>, 3> d;
    Eigen::Matrix3d at(int axis, int node) const
    {
        Eigen::Matrix3d m;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) m(a, b) = d[axis][sym(a, b)][node];
        return m;
    }
};

FieldDerivatives differentiate(const Grid& g, const MetricField& f);

/// 1D derivative of face data (N x N, p fastest) along in-face direction 0 or 1.
void differentiate_face(const Grid& g, const std::vector<double>& f, int dir, std::vector<double>& out);

/// Grid node of region m.to matching `node` on face m.from of region m.from.
int map_grid_node(const Grid& g, const FaceMap& m, int node);

}  // namespace mcube
