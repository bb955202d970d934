#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "terrapsd/geometry.hpp"

namespace terrapsd {

// Region of interest ahead of the vehicle, gridded into longitudinal profiles.
// origin is the corner with minimal x (along travel) and minimal y (lateral).
struct PatchSpec {
  double origin_x = 1.0;
  double origin_y = -0.45;
  double length = 0.9;   // along travel axis, meters
  double width = 0.9;    // lateral, meters
  double step = 0.008;   // grid step B, meters

  // Samples per profile: round(L/B), truncated to even. Throws on invalid spec.
  int cols() const;
  // Profile count: floor(W/B).
  int rows() const;
  double truncated_length() const { return cols() * step; }
  double truncated_width() const { return rows() * step; }

  void validate() const;  // throws std::invalid_argument
};

// Uniform elevation grid; each row is one longitudinal profile sampled at step B.
// mask marks cells backed by measurements or short-gap interpolation; cells that
// needed long-range fill stay masked invalid but carry a usable value.
struct ElevationPatch {
  int rows = 0;
  int cols = 0;
  double step = 0.0;
  double origin_x = 0.0;  // world coordinates of the grid corner
  double origin_y = 0.0;
  int patch_index = 0;
  std::vector<double> grid;         // rows*cols, row-major
  std::vector<std::uint8_t> mask;   // 1 = valid

  double& at(int r, int c) { return grid[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return grid[static_cast<std::size_t>(r) * cols + c]; }
  bool valid(int r, int c) const { return mask[static_cast<std::size_t>(r) * cols + c] != 0; }

  std::span<const double> row(int r) const {
    return {grid.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)};
  }
  // Fraction of mask-invalid cells in a row.
  double row_invalid_fraction(int r) const;
};

// Vehicle-to-world tilt rotation (roll theta, pitch phi):
//   [ cos(phi)  sin(phi)sin(theta)  sin(phi)cos(theta) ]
//   [   0            cos(theta)        -sin(theta)     ]
//   [-sin(phi)  cos(phi)sin(theta)  cos(phi)cos(theta) ]
Mat3 tilt_rotation(const Attitude& att);

// Rotates a vehicle-frame cloud into the world frame. Yaw is not compensated.
PointCloud compensate_tilt(const PointCloud& cloud, const Attitude& att);

// Returns the points whose (x, y) fall inside the spec rectangle
// [origin_x, origin_x + n*B) x [origin_y, origin_y + m*B). Cloud must be world-frame.
PointCloud extract_patch(const PointCloud& cloud, const PatchSpec& spec);

struct OutlierFilterResult {
  PointCloud kept;
  std::size_t removed = 0;
};

// Statistical moving-window filter: a point is removed when its z deviates from
// the mean of its (window x window) x-y neighborhood by more than k_sigma local
// standard deviations. Removal is clamped to max_removal of the input.
OutlierFilterResult filter_outliers(const PointCloud& cloud, double window, double k_sigma,
                                    double max_removal = 0.10);

// Bins points into the spec grid (cell mean), fills interior gaps of up to
// max_gap cells by linear interpolation along the profile direction, and marks
// everything else invalid (with a best-effort fill value for downstream use).
// Throws DegeneratePatch when more than half of all cells are invalid.
ElevationPatch rasterize(const PointCloud& points, const PatchSpec& spec, int patch_index = 0,
                         int max_gap = 3);

// Removes the ordinary-least-squares line from a profile; the result has zero
// mean and zero linear trend.
std::vector<double> detrend(std::span<const double> profile, double step);

}  // namespace terrapsd
