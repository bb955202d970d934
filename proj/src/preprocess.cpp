#include "terrapsd/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "terrapsd/errors.hpp"

namespace terrapsd {

void PatchSpec::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw std::invalid_argument("PatchSpec: step must be positive");
  }
  if (!(length > 2.0 * step)) {
    throw std::invalid_argument("PatchSpec: length must exceed 2*step");
  }
  if (!(width >= step)) {
    throw std::invalid_argument("PatchSpec: width must be at least one step");
  }
  if (!std::isfinite(origin_x) || !std::isfinite(origin_y)) {
    throw std::invalid_argument("PatchSpec: origin must be finite");
  }
  if (cols() < 8) {
    throw std::invalid_argument("PatchSpec: fewer than 8 samples per profile");
  }
}

int PatchSpec::cols() const {
  long n = std::lround(length / step);
  if (n % 2 != 0) --n;  // truncate rather than pad
  if (n < 0) n = 0;
  return static_cast<int>(n);
}

int PatchSpec::rows() const {
  // tolerant floor so an exact multiple of step is not lost to representation
  return static_cast<int>(std::floor(width / step + 1e-9));
}

double ElevationPatch::row_invalid_fraction(int r) const {
  int bad = 0;
  for (int c = 0; c < cols; ++c) {
    if (!valid(r, c)) ++bad;
  }
  return static_cast<double>(bad) / static_cast<double>(cols);
}

Mat3 tilt_rotation(const Attitude& att) {
  const double st = std::sin(att.roll), ct = std::cos(att.roll);
  const double sp = std::sin(att.pitch), cp = std::cos(att.pitch);
  Mat3 r;
  r.m = {{{cp, sp * st, sp * ct},
          {0.0, ct, -st},
          {-sp, cp * st, cp * ct}}};
  return r;
}

PointCloud compensate_tilt(const PointCloud& cloud, const Attitude& att) {
  if (cloud.frame != Frame::vehicle) {
    throw std::invalid_argument("compensate_tilt: cloud must be in the vehicle frame");
  }
  if (!std::isfinite(att.roll) || !std::isfinite(att.pitch) ||
      std::abs(att.roll) >= std::numbers::pi / 2 || std::abs(att.pitch) >= std::numbers::pi / 2) {
    throw std::invalid_argument("compensate_tilt: attitude out of range");
  }
  const Mat3 r = tilt_rotation(att);
  PointCloud out;
  out.frame = Frame::world;
  out.colors = cloud.colors;
  out.points.reserve(cloud.points.size());
  for (const Vec3& p : cloud.points) {
    out.points.push_back(r * p);
  }
  return out;
}

PointCloud extract_patch(const PointCloud& cloud, const PatchSpec& spec) {
  if (cloud.frame != Frame::world) {
    throw std::invalid_argument("extract_patch: cloud must be in the world frame");
  }
  spec.validate();
  const double x1 = spec.origin_x + spec.truncated_length();
  const double y1 = spec.origin_y + spec.truncated_width();
  PointCloud out;
  out.frame = Frame::world;
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const Vec3& p = cloud.points[i];
    if (p.x >= spec.origin_x && p.x < x1 && p.y >= spec.origin_y && p.y < y1) {
      out.points.push_back(p);
      if (cloud.has_colors()) out.colors.push_back(cloud.colors[i]);
    }
  }
  return out;
}

namespace {

std::uint64_t bucket_key(int ix, int iy) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(ix)) << 32) |
         static_cast<std::uint32_t>(iy);
}

}  // namespace

struct BucketStats {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::uint32_t count = 0;
};

OutlierFilterResult filter_outliers(const PointCloud& cloud, double window, double k_sigma,
                                    double max_removal) {
  if (!(window > 0.0) || !(k_sigma > 0.0)) {
    throw std::invalid_argument("filter_outliers: window and k_sigma must be positive");
  }
  const std::size_t n = cloud.points.size();
  if (n < 10) {
    throw InsufficientData("filter_outliers: need at least 10 points, got " + std::to_string(n));
  }

  // Grid approximation of the moving window: per-bucket aggregates at half the
  // window size, each point judged against its 3x3 bucket neighborhood with
  // itself excluded. Keeps the filter linear in the cloud size.
  const double edge = window / 2.0;
  std::unordered_map<std::uint64_t, BucketStats> buckets;
  buckets.reserve(n / 2 + 1);
  std::vector<int> bx(n), by(n);
  for (std::size_t i = 0; i < n; ++i) {
    bx[i] = static_cast<int>(std::floor(cloud.points[i].x / edge));
    by[i] = static_cast<int>(std::floor(cloud.points[i].y / edge));
    BucketStats& b = buckets[bucket_key(bx[i], by[i])];
    const double z = cloud.points[i].z;
    b.sum += z;
    b.sum_sq += z * z;
    ++b.count;
  }

  constexpr std::uint32_t kMinNeighbors = 5;
  std::vector<double> score(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = cloud.points[i].z;
    double sum = -z, sum_sq = -z * z;
    std::uint32_t count = static_cast<std::uint32_t>(-1);
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -1; dy <= 1; ++dy) {
        auto it = buckets.find(bucket_key(bx[i] + dx, by[i] + dy));
        if (it == buckets.end()) continue;
        sum += it->second.sum;
        sum_sq += it->second.sum_sq;
        count += it->second.count;
      }
    }
    if (count < kMinNeighbors) continue;  // too sparse to judge; keep
    const double mean = sum / count;
    const double var = std::max(0.0, (sum_sq - sum * mean) / (count - 1));
    const double dev = std::abs(z - mean);
    if (var > 0.0) {
      score[i] = dev / std::sqrt(var);
    } else {
      score[i] = dev > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
  }

  std::vector<std::uint32_t> flagged;
  for (std::size_t i = 0; i < n; ++i) {
    if (score[i] > k_sigma) flagged.push_back(static_cast<std::uint32_t>(i));
  }
  const std::size_t cap = static_cast<std::size_t>(std::floor(max_removal * n));
  if (flagged.size() > cap) {
    std::sort(flagged.begin(), flagged.end(),
              [&](std::uint32_t a, std::uint32_t b) { return score[a] > score[b]; });
    flagged.resize(cap);
  }

  std::vector<std::uint8_t> remove(n, 0);
  for (std::uint32_t i : flagged) remove[i] = 1;

  OutlierFilterResult result;
  result.kept.frame = cloud.frame;
  result.kept.points.reserve(n - flagged.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (remove[i]) continue;
    result.kept.points.push_back(cloud.points[i]);
    if (cloud.has_colors()) result.kept.colors.push_back(cloud.colors[i]);
  }
  result.removed = flagged.size();
  return result;
}

ElevationPatch rasterize(const PointCloud& points, const PatchSpec& spec, int patch_index,
                         int max_gap) {
  spec.validate();
  if (points.points.empty()) {
    throw std::invalid_argument("rasterize: empty point set");
  }
  const int m = spec.rows();
  const int n = spec.cols();

  ElevationPatch patch;
  patch.rows = m;
  patch.cols = n;
  patch.step = spec.step;
  patch.origin_x = spec.origin_x;
  patch.origin_y = spec.origin_y;
  patch.patch_index = patch_index;
  patch.grid.assign(static_cast<std::size_t>(m) * n, 0.0);
  patch.mask.assign(static_cast<std::size_t>(m) * n, 0);

  std::vector<double> sum(static_cast<std::size_t>(m) * n, 0.0);
  std::vector<std::uint32_t> count(static_cast<std::size_t>(m) * n, 0);
  for (const Vec3& p : points.points) {
    const int c = static_cast<int>(std::floor((p.x - spec.origin_x) / spec.step));
    const int r = static_cast<int>(std::floor((p.y - spec.origin_y) / spec.step));
    if (c < 0 || c >= n || r < 0 || r >= m) continue;
    const std::size_t idx = static_cast<std::size_t>(r) * n + c;
    sum[idx] += p.z;
    ++count[idx];
  }

  for (std::size_t idx = 0; idx < sum.size(); ++idx) {
    if (count[idx] > 0) {
      patch.grid[idx] = sum[idx] / count[idx];
      patch.mask[idx] = 1;
    }
  }

  // Interior gaps of up to max_gap cells: linear interpolation along the row,
  // and the filled cells count as valid. Everything else keeps a best-effort
  // value but stays masked invalid.
  std::size_t invalid = 0;
  for (int r = 0; r < m; ++r) {
    int c = 0;
    while (c < n) {
      if (patch.valid(r, c)) {
        ++c;
        continue;
      }
      int end = c;
      while (end < n && !patch.valid(r, end)) ++end;
      const int gap = end - c;
      const bool interior = c > 0 && end < n;
      if (interior) {
        const double z0 = patch.at(r, c - 1);
        const double z1 = patch.at(r, end);
        for (int j = c; j < end; ++j) {
          const double t = static_cast<double>(j - c + 1) / static_cast<double>(gap + 1);
          patch.at(r, j) = z0 + t * (z1 - z0);
          if (gap <= max_gap) patch.mask[static_cast<std::size_t>(r) * n + j] = 1;
        }
        if (gap > max_gap) invalid += static_cast<std::size_t>(gap);
      } else {
        // Row-edge run: extend the nearest valid value (no bracketing pair).
        double fill = 0.0;
        if (end < n) {
          fill = patch.at(r, end);
        } else if (c > 0) {
          fill = patch.at(r, c - 1);
        }
        for (int j = c; j < end; ++j) patch.at(r, j) = fill;
        invalid += static_cast<std::size_t>(gap);
      }
      c = end;
    }
  }

  const std::size_t total = static_cast<std::size_t>(m) * n;
  if (invalid * 2 > total) {
    throw DegeneratePatch("rasterize: " + std::to_string(invalid) + " of " +
                          std::to_string(total) + " cells invalid");
  }
  return patch;
}

std::vector<double> detrend(std::span<const double> profile, double step) {
  const std::size_t n = profile.size();
  if (n < 8) {
    throw InsufficientData("detrend: need at least 8 samples, got " + std::to_string(n));
  }
  if (!(step > 0.0)) throw std::invalid_argument("detrend: step must be positive");

  const double xc = 0.5 * static_cast<double>(n - 1) * step;
  double sum = 0.0;
  for (double v : profile) sum += v;
  const double mean = sum / static_cast<double>(n);
  double sxx = 0.0, sxz = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = static_cast<double>(i) * step - xc;
    sxx += dx * dx;
    sxz += dx * (profile[i] - mean);
  }
  const double slope = sxz / sxx;

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = static_cast<double>(i) * step - xc;
    out[i] = profile[i] - mean - slope * dx;
  }
  return out;
}

}  // namespace terrapsd
