#pragma once

#include <array>
#include <cmath>

namespace grazing {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm2(const Vec3& v) { return dot(v, v); }
inline double norm(const Vec3& v) { return std::sqrt(norm2(v)); }

inline Vec3 normalized(const Vec3& v) {
  double n = norm(v);
  return {v.x / n, v.y / n, v.z / n};
}

// Orthonormal frame {e1, e2} completing k. The pivot axis depends only on
// |k_i|, so frame(-k) = {-e1, e2}: sigma node sets built from it mirror
// exactly under k -> -k.
inline void orthonormal_frame(const Vec3& k, Vec3& e1, Vec3& e2) {
  Vec3 a{0, 0, 0};
  double ax = std::fabs(k.x), ay = std::fabs(k.y), az = std::fabs(k.z);
  if (ax <= ay && ax <= az)
    a.x = 1;
  else if (ay <= az)
    a.y = 1;
  else
    a.z = 1;
  e1 = normalized(cross(k, a));
  e2 = cross(normalized(k), e1);
}

}  // namespace grazing
