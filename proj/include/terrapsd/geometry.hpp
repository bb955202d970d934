#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace terrapsd {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }

struct Mat3 {
  // row-major
  std::array<std::array<double, 3>, 3> m{};

  Vec3 operator*(const Vec3& p) const {
    return {m[0][0] * p.x + m[0][1] * p.y + m[0][2] * p.z,
            m[1][0] * p.x + m[1][1] * p.y + m[1][2] * p.z,
            m[2][0] * p.x + m[2][1] * p.y + m[2][2] * p.z};
  }

  Mat3 transposed() const {
    Mat3 t;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t.m[i][j] = m[j][i];
    return t;
  }
};

enum class Frame { vehicle, world };

using Rgb = std::array<std::uint8_t, 3>;

struct PointCloud {
  std::vector<Vec3> points;
  Frame frame = Frame::vehicle;
  std::vector<Rgb> colors;  // empty, or one entry per point

  bool has_colors() const { return !colors.empty(); }
  std::size_t size() const { return points.size(); }
};

// Roll and pitch in radians. Yaw is never part of tilt compensation.
struct Attitude {
  double roll = 0.0;
  double pitch = 0.0;
};

}  // namespace terrapsd
