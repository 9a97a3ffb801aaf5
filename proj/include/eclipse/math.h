#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>

namespace eclipse {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kInvPi = 1.0 / kPi;
constexpr double kFourPi = 4.0 * kPi;

struct Vec3 {
    double x = 0, y = 0, z = 0;

    Vec3() = default;
    Vec3(double x, double y, double z) : x(x), y(y), z(z) {}

    Vec3 operator+(const Vec3& v) const { return {x + v.x, y + v.y, z + v.z}; }
    Vec3 operator-(const Vec3& v) const { return {x - v.x, y - v.y, z - v.z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& v) { x += v.x; y += v.y; z += v.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double lengthSquared(const Vec3& v) { return dot(v, v); }
inline double length(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline Vec3 normalize(const Vec3& v) {
    double len = length(v);
    return v / len;
}

inline std::ostream& operator<<(std::ostream& os, const Vec3& v) {
    return os << "(" << v.x << ", " << v.y << ", " << v.z << ")";
}

// Orthonormal frame around a unit vector n. t1, t2, n form a right-handed basis.
struct Frame {
    Vec3 t1, t2, n;

    static Frame fromNormal(const Vec3& n) {
        Vec3 up = std::abs(n.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
        Vec3 t1 = normalize(cross(up, n));
        Vec3 t2 = cross(n, t1);
        return {t1, t2, n};
    }

    Vec3 toWorld(const Vec3& local) const { return t1 * local.x + t2 * local.y + n * local.z; }
    Vec3 toLocal(const Vec3& w) const { return {dot(w, t1), dot(w, t2), dot(w, n)}; }
};

// RGB triple over an arbitrary scalar type (double in the plain renderer,
// ad::Value when gradients are traced).
template <typename S>
struct Rgb {
    S r{}, g{}, b{};

    Rgb() = default;
    Rgb(S r, S g, S b) : r(std::move(r)), g(std::move(g)), b(std::move(b)) {}
    explicit Rgb(S s) : r(s), g(s), b(s) {}

    S& operator[](int i) { return i == 0 ? r : (i == 1 ? g : b); }
    const S& operator[](int i) const { return i == 0 ? r : (i == 1 ? g : b); }
};

using Rgbd = Rgb<double>;

inline Rgbd operator+(const Rgbd& a, const Rgbd& b) { return {a.r + b.r, a.g + b.g, a.b + b.b}; }
inline Rgbd operator-(const Rgbd& a, const Rgbd& b) { return {a.r - b.r, a.g - b.g, a.b - b.b}; }
inline Rgbd operator*(const Rgbd& a, double s) { return {a.r * s, a.g * s, a.b * s}; }
inline Rgbd operator*(double s, const Rgbd& a) { return a * s; }
inline Rgbd operator*(const Rgbd& a, const Rgbd& b) { return {a.r * b.r, a.g * b.g, a.b * b.b}; }
inline Rgbd& operator+=(Rgbd& a, const Rgbd& b) { a.r += b.r; a.g += b.g; a.b += b.b; return a; }

// Rec. 709 luma of linear RGB.
inline double luminance(const Rgbd& c) { return 0.2126 * c.r + 0.7152 * c.g + 0.0722 * c.b; }

inline double clampPositive(double x) { return x > 0 ? x : 0.0; }
inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double degToRad(double d) { return d * kPi / 180.0; }

// Direction <-> equirectangular angles. theta is elevation from +z in [0, pi],
// phi is azimuth from +x in [0, 2pi).
inline Vec3 sphericalDir(double theta, double phi) {
    double st = std::sin(theta);
    return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}

inline void dirToSpherical(const Vec3& w, double* theta, double* phi) {
    *theta = std::acos(std::clamp(w.z, -1.0, 1.0));
    double p = std::atan2(w.y, w.x);
    if (p < 0) p += kTwoPi;
    *phi = p;
}

}  // namespace eclipse
