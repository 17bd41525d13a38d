#pragma once

#include <array>
#include <cmath>

namespace helixlab {

/// Vector of Minkowski 3-space with signature (+,+,-); z is the timelike
/// coordinate.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3 operator*(double k) const { return {k * x, k * y, k * z}; }
    Vec3 operator/(double k) const { return {x / k, y / k, z / k}; }
    Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    bool operator==(const Vec3& o) const = default;
};

inline Vec3 operator*(double k, const Vec3& v) { return v * k; }

enum class CausalClass { Spacelike, Timelike, Lightlike };

const char* to_string(CausalClass c);

/// <u,v> = u.x v.x + u.y v.y - u.z v.z
inline double minkowski_inner(const Vec3& u, const Vec3& v) {
    return u.x * v.x + u.y * v.y - u.z * v.z;
}

/// sqrt(|<v,v>|)
inline double minkowski_norm(const Vec3& v) {
    return std::sqrt(std::fabs(minkowski_inner(v, v)));
}

inline double euclidean_norm2(const Vec3& v) {
    return v.x * v.x + v.y * v.y + v.z * v.z;
}

inline double euclidean_norm(const Vec3& v) { return std::sqrt(euclidean_norm2(v)); }

inline bool is_finite(const Vec3& v) {
    return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

/// det of the 3x3 matrix with rows u, v, w.
double det3(const Vec3& u, const Vec3& v, const Vec3& w);

/// Causal character of v. Lightlike when |<v,v>| <= tol*(1 + |v|_e^2) and
/// v != 0; the zero vector is spacelike. The tolerance is relative to the
/// squared Euclidean magnitude because <v,v> of a nearly null vector scales
/// quadratically with its size.
CausalClass causal_class(const Vec3& v, double tol);

/// The unique w with <w, z> = det(u, v, z) for every z. This is the
/// convention under which the timelike Frenet frame closes with B = T x N.
Vec3 lorentz_cross(const Vec3& u, const Vec3& v);

/// Row-major 3x3 matrix.
struct Mat3 {
    std::array<std::array<double, 3>, 3> m{};

    static Mat3 identity();
    Vec3 apply(const Vec3& v) const;
    Mat3 mul(const Mat3& o) const;
    double operator()(int i, int j) const { return m[i][j]; }
    double& operator()(int i, int j) { return m[i][j]; }
};

/// Matrix of pairwise Minkowski inner products in the order (T, N, B).
Mat3 frame_gram(const Vec3& T, const Vec3& N, const Vec3& B);

/// Largest absolute entrywise difference.
double max_abs_diff(const Mat3& a, const Mat3& b);

/// Boost of rapidity phi in the x-z plane; preserves the metric, det = +1.
Mat3 lorentz_boost_xz(double phi);

/// Euclidean rotation in the x-y plane; preserves the metric, det = +1.
Mat3 rotation_xy(double angle);

/// diag(1, -1, 1): metric-preserving reflection with det = -1.
Mat3 reflection_y();

/// True when L^T G L = G entrywise within tol, G = diag(1, 1, -1).
bool preserves_metric(const Mat3& L, double tol);

}  // namespace helixlab
