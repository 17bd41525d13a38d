#include "helixlab/minkowski.hpp"

#include <cmath>

namespace helixlab {

const char* to_string(CausalClass c) {
    switch (c) {
        case CausalClass::Spacelike: return "Spacelike";
        case CausalClass::Timelike: return "Timelike";
        case CausalClass::Lightlike: return "Lightlike";
    }
    return "?";
}

double det3(const Vec3& u, const Vec3& v, const Vec3& w) {
    return u.x * (v.y * w.z - v.z * w.y) - u.y * (v.x * w.z - v.z * w.x) +
           u.z * (v.x * w.y - v.y * w.x);
}

CausalClass causal_class(const Vec3& v, double tol) {
    const double q = minkowski_inner(v, v);
    if (v == Vec3{}) return CausalClass::Spacelike;
    const double threshold = tol * (1.0 + euclidean_norm2(v));
    if (std::fabs(q) <= threshold) return CausalClass::Lightlike;
    return q > 0.0 ? CausalClass::Spacelike : CausalClass::Timelike;
}

Vec3 lorentz_cross(const Vec3& u, const Vec3& v) {
    return {u.y * v.z - u.z * v.y, u.z * v.x - u.x * v.z, -(u.x * v.y - u.y * v.x)};
}

Mat3 Mat3::identity() {
    Mat3 r;
    r.m[0][0] = r.m[1][1] = r.m[2][2] = 1.0;
    return r;
}

Vec3 Mat3::apply(const Vec3& v) const {
    return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
}

Mat3 Mat3::mul(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double acc = 0.0;
            for (int k = 0; k < 3; ++k) acc += m[i][k] * o.m[k][j];
            r.m[i][j] = acc;
        }
    return r;
}

Mat3 frame_gram(const Vec3& T, const Vec3& N, const Vec3& B) {
    const Vec3 f[3] = {T, N, B};
    Mat3 g;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) g.m[i][j] = minkowski_inner(f[i], f[j]);
    return g;
}

double max_abs_diff(const Mat3& a, const Mat3& b) {
    double d = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) d = std::max(d, std::fabs(a.m[i][j] - b.m[i][j]));
    return d;
}

Mat3 lorentz_boost_xz(double phi) {
    Mat3 r = Mat3::identity();
    r.m[0][0] = std::cosh(phi);
    r.m[0][2] = std::sinh(phi);
    r.m[2][0] = std::sinh(phi);
    r.m[2][2] = std::cosh(phi);
    return r;
}

Mat3 rotation_xy(double angle) {
    Mat3 r = Mat3::identity();
    r.m[0][0] = std::cos(angle);
    r.m[0][1] = -std::sin(angle);
    r.m[1][0] = std::sin(angle);
    r.m[1][1] = std::cos(angle);
    return r;
}

Mat3 reflection_y() {
    Mat3 r = Mat3::identity();
    r.m[1][1] = -1.0;
    return r;
}

bool preserves_metric(const Mat3& L, double tol) {
    // columns of L are the images of the basis vectors
    const Vec3 c0{L(0, 0), L(1, 0), L(2, 0)};
    const Vec3 c1{L(0, 1), L(1, 1), L(2, 1)};
    const Vec3 c2{L(0, 2), L(1, 2), L(2, 2)};
    const Mat3 g = frame_gram(c0, c1, c2);
    Mat3 eta;
    eta.m[0][0] = 1.0;
    eta.m[1][1] = 1.0;
    eta.m[2][2] = -1.0;
    return max_abs_diff(g, eta) <= tol;
}

}  // namespace helixlab
