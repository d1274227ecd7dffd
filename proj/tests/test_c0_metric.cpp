#include "mcube/c0_metric.hpp"
#include "mcube/catalog.hpp"
#include "mcube/compatibility.hpp"
#include "mcube/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace mcube;

TEST_CASE("blend function values")
{
    const PartitionParams p;  // k = 2, l = 3
    CHECK(h(0.0, p) == 1.0);
    CHECK(h(1.0, p) == 0.0);
    CHECK(h(0.5, p) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(h(0.25, p) == doctest::Approx(1749951.0 / 2097152.0).epsilon(1e-15));
    CHECK(h(0.75, p) == doctest::Approx(347201.0 / 2097152.0).epsilon(1e-15));
    CHECK(h(-0.25, p) == h(0.25, p));
    CHECK(h(1.5, p) == 0.0);
    double worst = 0;
    for (int i = 0; i <= 1000; ++i) {
        const double s = i / 1000.0;
        worst = std::max(worst, std::abs(h(s, p) + h(1 - s, p) - 1));
    }
    CHECK(worst < 1e-14);
    // derivative against central differences
    for (double s : {0.1, 0.3, 0.6, 0.9}) {
        const double fd = (h(s + 1e-6, p) - h(s - 1e-6, p)) / 2e-6;
        CHECK(dh(s, p) == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("partition of unity")
{
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> U(-0.5, 0.5);
    const PartitionParams p;
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto w = partition_of_unity({U(rng), U(rng), U(rng)}, 1.0, p);
        double s = 0;
        for (double x : w) s += x;
        worst = std::max(worst, std::abs(s - 1));
    }
    CHECK(worst < 1e-14);
    const auto w = partition_of_unity({0.25, 0, 0}, 1.0, p);
    CHECK(w[1] == doctest::Approx(0.25 * 1749951.0 / 2097152.0).epsilon(1e-14));
    CHECK(w[0] == doctest::Approx(0.25 * 347201.0 / 2097152.0).epsilon(1e-14));
    const auto c = partition_of_unity({0.5, 0.5, 0.5}, 1.0, p);
    CHECK(c[7] == 1.0);
    CHECK_THROWS_AS(partition_of_unity({0.6, 0, 0}, 1.0, p), std::invalid_argument);
}

TEST_CASE("corner flat metric")
{
    const double pi = std::numbers::pi;
    const auto e = corner_flat_metric({2 * pi / 5, pi / 2, pi / 2}, {1, 1, 1});
    CHECK(e(0, 1) == doctest::Approx(-std::cos(2 * pi / 5)).epsilon(1e-15));
    CHECK(e(0, 1) == doctest::Approx(-0.30901699437494745).epsilon(1e-14));
    CHECK(std::abs(e(0, 2)) < 1e-16);
    CHECK(e(0, 0) == 1.0);
    // corner signs flip the sign of mixed entries
    const auto f = corner_flat_metric({2 * pi / 5, pi / 2, pi / 2}, {-1, 1, 1});
    CHECK(f(0, 1) == doctest::Approx(std::cos(2 * pi / 5)).epsilon(1e-15));
    // psi = pi/4 on all three edges is not positive definite
    CHECK_THROWS_AS(corner_flat_metric({pi / 4, pi / 4, pi / 4}, {1, 1, 1}), ValidationError);
}

TEST_CASE("corner determinant")
{
    const double pi = std::numbers::pi;
    CHECK(corner_determinant({2 * pi / 3, 2 * pi / 3, 2 * pi / 3}) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(corner_determinant({pi / 2, pi / 2, pi / 2}) == doctest::Approx(1.0));
    for (const auto& psi : {std::array<double, 3>{2 * pi / 5, pi / 2, 2 * pi / 3},
                            std::array<double, 3>{pi / 3, pi / 2, pi / 2},
                            std::array<double, 3>{2 * pi / 5, 2 * pi / 5, 2 * pi / 5}}) {
        const auto e = corner_flat_metric(psi, {1, 1, 1});
        CHECK(corner_determinant(psi) == doctest::Approx(e.determinant()).epsilon(1e-14));
    }
}

TEST_CASE("face angle")
{
    const double pi = std::numbers::pi;
    CHECK(face_angle(2, {pi / 2, pi / 2, pi / 2}) == doctest::Approx(pi / 2));
    // z face spans x and y; with psi_xz = psi_yz = pi/2 its angle is psi_xy
    CHECK(face_angle(2, {2 * pi / 5, pi / 2, pi / 2}) == doctest::Approx(2 * pi / 5));
}

TEST_CASE("sampled metric")
{
    const auto s = catalog_get("three-torus").structure;
    const C0Metric c0(s, {});
    const Grid g(8, s.L);
    const auto fields = c0.sample(g);
    REQUIRE(fields.size() == 1);
    double worst = 0;
    for (int n = 0; n < g.size(); ++n)
        worst = std::max(worst, (fields[0].at(n) - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff());
    CHECK(worst < 1e-15);

    // at a corner the blend reduces to that corner's flat metric
    const auto p = catalog_get("poincare").structure;
    const C0Metric cp(p, {});
    for (int c = 0; c < 8; ++c) {
        const auto sg = corner_signs(c);
        const Vec3 off{0.5 * sg[0], 0.5 * sg[1], 0.5 * sg[2]};
        const Eigen::Matrix3d ginv = cp.inverse_metric(3, off);
        CHECK((ginv - cp.corner_inverse(3, c)).cwiseAbs().maxCoeff() < 1e-15);
        CHECK((cp.metric(3, off) * ginv - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("intrinsic continuity of the blended metric")
{
    for (const char* name : {"poincare", "kb-n2xs1", "e5"}) {
        const auto s = catalog_get(name).structure;
        const C0Metric c0(s, {});
        const Grid g(8, s.L);
        const auto f = c0.sample(g);
        double worst = 0;
        for (const FaceMap* m : unique_interfaces(s)) {
            Eigen::Matrix3d C;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) C(a, b) = m->rot(a, b);
            for (int p = 0; p < g.N(); ++p)
                for (int q = 0; q < g.N(); ++q) {
                    const int na = g.face_node(m->from.face, p, q);
                    const int nb = map_grid_node(g, *m, na);
                    // offsets map as x_B = C x_A, so g_B = C g_A C^T
                    const Eigen::Matrix3d ga = C * f[m->from.region].at(na) * C.transpose();
                    const Eigen::Matrix3d gb = f[m->to.region].at(nb);
                    const auto tb = in_face_axes(m->to.face.axis);
                    for (int i : tb)
                        for (int j : tb) worst = std::max(worst, std::abs(ga(i, j) - gb(i, j)));
                }
        }
        INFO(name);
        CHECK(worst < 1e-13);
    }
}
