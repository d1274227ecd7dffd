#pragma once

#include "mcube/field.hpp"

#include <Eigen/Dense>

#include <vector>

namespace mcube {

/// Scalar samples on the N x N grid of one region face (p fastest, see Grid::face_node).
struct FaceField {
    int region = 0;
    FaceLabel face;
    int N = 0;
    std::vector<double> v;

    FaceField() = default;
    FaceField(int region_, FaceLabel face_, int N_) : region(region_), face(face_), N(N_), v(static_cast<std::size_t>(N_) * N_, 0.0) {}
};

/// Extrinsic curvature of the constant-x^axis surfaces at the nodes of one face,
/// with the outward unit normal.
struct ExtrinsicCurvatureField {
    int region = 0;
    FaceLabel face;
    int N = 0;
    std::vector<Eigen::Matrix3d> K;      // K_ab, projected and symmetric
    std::vector<double> lapse;           // N = eps / sqrt(g^{aa}), eps the outward sign
    std::vector<Eigen::Vector3d> n_up;   // n^a
    std::vector<Eigen::Vector3d> n_down; // n_a = N delta^axis_a

    /// max |K_ab n^b| over nodes.
    double annihilation_residual() const;
};

/// K at a single point from g and its first derivatives (dg[e] = d_e g).
/// Throws NumericalError when g is not positive definite.
Eigen::Matrix3d extrinsic_curvature_at(const Eigen::Matrix3d& g, const std::array<Eigen::Matrix3d, 3>& dg, FaceLabel face,
                                       double* lapse = nullptr, Eigen::Vector3d* n_up = nullptr);

ExtrinsicCurvatureField extrinsic_curvature(const Grid& grid, const MetricField& g, const FieldDerivatives& dg, FaceLabel face);
ExtrinsicCurvatureField extrinsic_curvature(const Grid& grid, const MetricField& g, FaceLabel face);

}  // namespace mcube
