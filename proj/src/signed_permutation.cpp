#include "mcube/signed_permutation.hpp"

#include "mcube/errors.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace mcube {

SignedPermutation::SignedPermutation() : m_{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}} {}

SignedPermutation SignedPermutation::generator(int axis, int sign)
{
    // Right-handed quarter turn about +axis: e_b -> e_c, e_c -> -e_b.
    IMat3 m{};
    const int b = (axis + 1) % 3, c = (axis + 2) % 3;
    m[axis][axis] = 1;
    m[c][b] = 1;
    m[b][c] = -1;
    SignedPermutation r(m);
    return sign > 0 ? r : r.inverse();
}

SignedPermutation SignedPermutation::parse(std::string_view text)
{
    std::string s;
    for (char ch : text) {
        if (ch == '_' || ch == '{' || ch == '}' || ch == '*') continue;
        s.push_back(ch);
    }
    SignedPermutation result;
    std::size_t i = 0;
    auto fail = [&]() -> SignedPermutation {
        throw ValidationError("cannot parse rotation '" + std::string(text) + "'");
    };
    auto skip_ws = [&] {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    };
    auto power = [&]() {
        if (i + 1 < s.size() && s[i] == '^') {
            const char p = s[i + 1];
            if (p < '1' || p > '4') fail();
            i += 2;
            return p - '0';
        }
        return 1;
    };
    skip_ws();
    if (i == s.size()) fail();
    while (i < s.size()) {
        if (s[i] == 'I') {
            ++i;
        } else if (s[i] == 'R') {
            ++i;
            int pw = power();
            if (i + 1 >= s.size() || (s[i] != '+' && s[i] != '-')) fail();
            const int sign = s[i] == '+' ? 1 : -1;
            const char a = s[i + 1];
            if (a < 'x' || a > 'z') fail();
            i += 2;
            pw *= power();
            const SignedPermutation g = generator(a - 'x', sign);
            for (int k = 0; k < pw; ++k) result = result * g;
        } else {
            fail();
        }
        skip_ws();
    }
    return result;
}

const std::vector<SignedPermutation>& SignedPermutation::all()
{
    static const std::vector<SignedPermutation> group = [] {
        std::vector<SignedPermutation> out;
        std::array<int, 3> p{0, 1, 2};
        do {
            for (int signs = 0; signs < 8; ++signs) {
                IMat3 m{};
                for (int r = 0; r < 3; ++r) m[r][p[r]] = (signs >> r) & 1 ? -1 : 1;
                out.emplace_back(m);
            }
        } while (std::next_permutation(p.begin(), p.end()));
        return out;
    }();
    return group;
}

bool SignedPermutation::valid() const
{
    for (int r = 0; r < 3; ++r) {
        int nz_row = 0, nz_col = 0;
        for (int c = 0; c < 3; ++c) {
            if (m_[r][c] < -1 || m_[r][c] > 1) return false;
            nz_row += m_[r][c] != 0;
            nz_col += m_[c][r] != 0;
        }
        if (nz_row != 1 || nz_col != 1) return false;
    }
    return true;
}

int SignedPermutation::det() const
{
    const auto& a = m_;
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
           a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

SignedPermutation SignedPermutation::operator*(const SignedPermutation& o) const
{
    IMat3 r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) r[i][j] += m_[i][k] * o.m_[k][j];
    return SignedPermutation(r);
}

SignedPermutation SignedPermutation::inverse() const
{
    IMat3 r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r[i][j] = m_[j][i];
    return SignedPermutation(r);
}

IVec3 SignedPermutation::apply(const IVec3& v) const
{
    IVec3 r{};
    for (int i = 0; i < 3; ++i) r[i] = m_[i][0] * v[0] + m_[i][1] * v[1] + m_[i][2] * v[2];
    return r;
}

Vec3 SignedPermutation::apply(const Vec3& v) const
{
    Vec3 r{};
    for (int i = 0; i < 3; ++i) r[i] = m_[i][0] * v[0] + m_[i][1] * v[1] + m_[i][2] * v[2];
    return r;
}

std::string SignedPermutation::str() const
{
    std::ostringstream os;
    os << '[';
    for (int r = 0; r < 3; ++r) {
        os << (r ? ",[" : "[") << m_[r][0] << ',' << m_[r][1] << ',' << m_[r][2] << ']';
    }
    os << ']';
    return os.str();
}

FaceLabel FaceLabel::parse(std::string_view s)
{
    if (s.size() == 2 && (s[0] == '+' || s[0] == '-') && s[1] >= 'x' && s[1] <= 'z')
        return {s[1] - 'x', s[0] == '+' ? 1 : -1};
    throw ValidationError("bad face label '" + std::string(s) + "'");
}

FaceLabel FaceLabel::from_normal(const IVec3& n)
{
    for (int a = 0; a < 3; ++a)
        if (n[a] != 0) return {a, n[a] > 0 ? 1 : -1};
    throw ValidationError("zero normal vector");
}

std::string FaceLabel::str() const
{
    return std::string(1, sign > 0 ? '+' : '-') + static_cast<char>('x' + axis);
}

IVec3 FaceLabel::normal() const
{
    IVec3 n{0, 0, 0};
    n[axis] = sign;
    return n;
}

}  // namespace mcube
