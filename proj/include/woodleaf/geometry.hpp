#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace woodleaf {

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

inline Point3 operator+(const Point3& a, const Point3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Point3 operator-(const Point3& a, const Point3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Point3 operator*(double s, const Point3& p) { return {s * p.x, s * p.y, s * p.z}; }
inline Point3 operator/(const Point3& p, double s) { return {p.x / s, p.y / s, p.z / s}; }

inline Point3& operator+=(Point3& a, const Point3& b) {
    a.x += b.x;
    a.y += b.y;
    a.z += b.z;
    return a;
}

inline bool operator==(const Point3& a, const Point3& b) { return a.x == b.x && a.y == b.y && a.z == b.z; }

inline double dot(const Point3& a, const Point3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Point3 cross(const Point3& a, const Point3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double squared_norm(const Point3& p) { return dot(p, p); }
inline double norm(const Point3& p) { return std::sqrt(squared_norm(p)); }

inline double squared_distance(const Point3& a, const Point3& b) { return squared_norm(a - b); }
inline double distance(const Point3& a, const Point3& b) { return std::sqrt(squared_distance(a, b)); }

inline bool is_finite(const Point3& p) {
    return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

/// Ordered set of 3D points. Point order is stable and serves as the identity
/// for every index-based reference in the library.
struct PointCloud {
    std::vector<Point3> points;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    const Point3& operator[](std::size_t i) const { return points[i]; }
    Point3& operator[](std::size_t i) { return points[i]; }
};

/// Per-point class. On disk the encoding is 1 = leaf, 0 = wood.
enum class Label : std::uint8_t { Wood = 0, Leaf = 1 };

using LabelVector = std::vector<Label>;

inline int label_to_int(Label l) { return l == Label::Leaf ? 1 : 0; }

} // namespace woodleaf
