#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace mcube {

using IVec3 = std::array<int, 3>;
using Vec3 = std::array<double, 3>;
using IMat3 = std::array<std::array<int, 3>, 3>;

/// 3x3 integer matrix used for face identifications. Normally one of the 48
/// signed permutations; arbitrary matrices can be held so that validation can
/// report them.
class SignedPermutation {
public:
    SignedPermutation();  // identity
    explicit SignedPermutation(const IMat3& m) : m_(m) {}

    /// +pi/2 rotation about the outward normal of face (axis, sign).
    static SignedPermutation generator(int axis, int sign);

    /// Parses "I", "R+z", "R-x^2", "R+y R+z", "R^2+x" (product left to right,
    /// acting on column vectors). Throws ValidationError on unknown tokens.
    static SignedPermutation parse(std::string_view text);

    /// All 48 signed permutations, in a fixed order.
    static const std::vector<SignedPermutation>& all();

    bool valid() const;
    int det() const;
    int operator()(int r, int c) const { return m_[r][c]; }
    const IMat3& matrix() const { return m_; }

    SignedPermutation operator*(const SignedPermutation& o) const;
    SignedPermutation inverse() const;  // transpose
    bool operator==(const SignedPermutation& o) const { return m_ == o.m_; }
    bool operator<(const SignedPermutation& o) const { return m_ < o.m_; }

    IVec3 apply(const IVec3& v) const;
    Vec3 apply(const Vec3& v) const;

    /// Row-major "[[a,b,c],[d,e,f],[g,h,i]]".
    std::string str() const;

private:
    IMat3 m_;
};

/// One of "-x","+x","-y","+y","-z","+z".
struct FaceLabel {
    int axis = 0;
    int sign = -1;

    int index() const { return 2 * axis + (sign > 0 ? 1 : 0); }
    static FaceLabel from_index(int i) { return {i / 2, (i % 2) ? 1 : -1}; }
    static FaceLabel parse(std::string_view s);  // throws ValidationError
    static FaceLabel from_normal(const IVec3& n);  // n must be a signed unit vector
    std::string str() const;
    IVec3 normal() const;
    bool operator==(const FaceLabel& o) const { return axis == o.axis && sign == o.sign; }
};

}  // namespace mcube
