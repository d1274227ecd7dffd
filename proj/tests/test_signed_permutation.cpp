#include "mcube/errors.hpp"
#include "mcube/signed_permutation.hpp"

#include <doctest.h>

#include <set>

using namespace mcube;

TEST_CASE("group has 48 elements and is closed")
{
    const auto& all = SignedPermutation::all();
    CHECK(all.size() == 48);
    std::set<SignedPermutation> s(all.begin(), all.end());
    CHECK(s.size() == 48);
    for (const auto& a : all) {
        CHECK(a.valid());
        CHECK(std::abs(a.det()) == 1);
        CHECK(a * a.inverse() == SignedPermutation());
        for (const auto& b : all) CHECK(s.count(a * b) == 1);
    }
    int proper = 0;
    for (const auto& a : all) proper += a.det() == 1;
    CHECK(proper == 24);
}

TEST_CASE("generators")
{
    const auto rz = SignedPermutation::parse("R+z");
    CHECK(rz.apply(IVec3{1, 0, 0}) == IVec3{0, 1, 0});
    CHECK(rz.apply(IVec3{0, 1, 0}) == IVec3{-1, 0, 0});
    CHECK(rz.apply(IVec3{0, 0, 1}) == IVec3{0, 0, 1});
    CHECK(SignedPermutation::parse("R-z") == rz.inverse());
    CHECK(SignedPermutation::parse("R+x") == SignedPermutation::generator(0, 1));
    CHECK(SignedPermutation::parse("R+x R-x") == SignedPermutation());
    CHECK(SignedPermutation::parse("R+y^2") == SignedPermutation::parse("R-y R-y"));
    CHECK(SignedPermutation::parse("R^2+y") == SignedPermutation::parse("R+y^2"));
    CHECK(SignedPermutation::parse("R+x^4") == SignedPermutation());
    // product acts on column vectors: (Ra Rb) v = Ra (Rb v)
    const auto rx = SignedPermutation::parse("R+x");
    const IVec3 v{1, 2, 3};
    CHECK(SignedPermutation::parse("R+x R+z").apply(v) == rx.apply(rz.apply(v)));
    CHECK_THROWS_AS(SignedPermutation::parse("R+w"), ValidationError);
    CHECK_THROWS_AS(SignedPermutation::parse("Q"), ValidationError);
}

TEST_CASE("face labels")
{
    for (int i = 0; i < 6; ++i) {
        const auto f = FaceLabel::from_index(i);
        CHECK(f.index() == i);
        CHECK(FaceLabel::parse(f.str()) == f);
        CHECK(FaceLabel::from_normal(f.normal()) == f);
    }
    CHECK(FaceLabel::parse("+y") == FaceLabel{1, 1});
    CHECK_THROWS_AS(FaceLabel::parse("y"), ValidationError);
}
