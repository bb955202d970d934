#include "terrapsd/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "terrapsd/errors.hpp"
#include "terrapsd/spectrum.hpp"

namespace terrapsd {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

// Deterministic across standard libraries (uniform_real_distribution is not).
double next_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Band-integrated cosine amplitudes: bin k (1-based, k < l) carries the target
// power over [Omega_k - d/2, Omega_k + d/2] clamped to [Omega_1, Omega_l], with
// the last interior interval extended to the upper band edge. The Nyquist bin
// gets no cosine; its half-interval is folded into bin l-1. Total power is then
// exactly the band integral of phi, so each realization's rms matches it.
std::vector<double> band_amplitudes(const SurfaceModel& model, const Waveband& band) {
  const int l = band.size();
  const double d = band.delta;
  const double w = model.waviness;
  std::vector<double> amps(static_cast<std::size_t>(l), 0.0);
  for (int k = 1; k < l; ++k) {
    const double lo = std::max(band.omega[k - 1] - d / 2.0, band.lower());
    const double hi = (k == l - 1) ? band.upper() : band.omega[k - 1] + d / 2.0;
    double power;
    if (w == -1.0) {
      power = model.phi0 * std::log(hi / lo);
    } else {
      power = model.phi0 * (std::pow(hi, w + 1.0) - std::pow(lo, w + 1.0)) / (w + 1.0);
    }
    amps[k - 1] = std::sqrt(2.0 * power);
  }
  return amps;
}

// Evaluates the synthetic surface anywhere. Independent mode keeps one random
// phase vector per lateral strip of width B; correlated mode drifts a shared
// phase vector across the width with random per-wavenumber slopes.
class SurfaceSampler {
 public:
  SurfaceSampler(const SurfaceModel& model, int n, double step, int strips, double strip0_y,
                 std::uint64_t seed)
      : band_(make_waveband(n, step)),
        amps_(band_amplitudes(model, band_)),
        strips_(strips),
        strip0_y_(strip0_y),
        step_(step) {
    const int l = band_.size();
    if (model.lateral_cycles) {
      phases_.resize(1);
      phases_[0].resize(static_cast<std::size_t>(l));
      slopes_.resize(static_cast<std::size_t>(l));
      std::mt19937_64 rng(mix_seed(seed, 0));
      for (int k = 0; k < l; ++k) phases_[0][k] = kTwoPi * next_unit(rng);
      const double width = strips * step;
      const double cap = *model.lateral_cycles > 0.0 ? kTwoPi * *model.lateral_cycles / width : 0.0;
      for (int k = 0; k < l; ++k) slopes_[k] = cap * (2.0 * next_unit(rng) - 1.0);
    } else {
      phases_.resize(static_cast<std::size_t>(strips));
      for (int s = 0; s < strips; ++s) {
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(s) + 1));
        phases_[s].resize(static_cast<std::size_t>(l));
        for (int k = 0; k < l; ++k) phases_[s][k] = kTwoPi * next_unit(rng);
      }
    }
  }

  double operator()(double x, double y) const {
    const int l = band_.size();
    double z = 0.0;
    if (slopes_.empty()) {
      int s = static_cast<int>(std::floor((y - strip0_y_) / step_));
      s = std::clamp(s, 0, strips_ - 1);
      const std::vector<double>& ph = phases_[s];
      for (int k = 0; k < l - 1; ++k) {
        z += amps_[k] * std::cos(band_.omega[k] * x + ph[k]);
      }
    } else {
      const std::vector<double>& ph = phases_[0];
      for (int k = 0; k < l - 1; ++k) {
        z += amps_[k] * std::cos(band_.omega[k] * x + slopes_[k] * y + ph[k]);
      }
    }
    return z;
  }

 private:
  Waveband band_;
  std::vector<double> amps_;
  std::vector<std::vector<double>> phases_;
  std::vector<double> slopes_;
  int strips_;
  double strip0_y_;
  double step_;
};

double bump_height(const DefectSpec& defect, double dx, double dy) {
  const double r = std::sqrt(dx * dx + dy * dy);
  const double half = defect.extent / 2.0;
  if (r >= half) return 0.0;
  return 0.5 * defect.height * (1.0 + std::cos(std::numbers::pi * r / half));
}

}  // namespace

void SurfaceModel::validate() const {
  if (phi0 < 0.0 || !std::isfinite(phi0)) {
    throw std::invalid_argument("SurfaceModel: phi0 must be non-negative");
  }
  if (waviness > 0.0 || !std::isfinite(waviness)) {
    throw std::invalid_argument("SurfaceModel: waviness must be <= 0");
  }
  if (lateral_cycles && *lateral_cycles < 0.0) {
    throw std::invalid_argument("SurfaceModel: lateral_cycles must be >= 0");
  }
}

std::vector<double> generate_profile(const SurfaceModel& model, int n, double step,
                                     std::uint64_t seed) {
  model.validate();
  const Waveband band = make_waveband(n, step);
  const std::vector<double> amps = band_amplitudes(model, band);
  const int l = band.size();

  std::mt19937_64 rng(seed);
  std::vector<double> phase(static_cast<std::size_t>(l));
  for (int k = 0; k < l; ++k) phase[k] = kTwoPi * next_unit(rng);

  std::vector<double> z(static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < l - 1; ++k) {
    if (amps[k] == 0.0) continue;
    const double om = band.omega[k];
    for (int i = 0; i < n; ++i) {
      z[i] += amps[k] * std::cos(om * (i * step) + phase[k]);
    }
  }
  return z;
}

ElevationPatch generate_patch(const SurfaceModel& model, const PatchSpec& spec,
                              std::uint64_t seed) {
  model.validate();
  spec.validate();
  const int m = spec.rows();
  const int n = spec.cols();
  SurfaceSampler sampler(model, n, spec.step, m, spec.origin_y, seed);

  ElevationPatch patch;
  patch.rows = m;
  patch.cols = n;
  patch.step = spec.step;
  patch.origin_x = spec.origin_x;
  patch.origin_y = spec.origin_y;
  patch.grid.resize(static_cast<std::size_t>(m) * n);
  patch.mask.assign(static_cast<std::size_t>(m) * n, 1);
  for (int r = 0; r < m; ++r) {
    const double y = spec.origin_y + (r + 0.5) * spec.step;
    for (int c = 0; c < n; ++c) {
      const double x = spec.origin_x + (c + 0.5) * spec.step;
      patch.at(r, c) = sampler(x, y);
    }
  }
  return patch;
}

int TraverseScript::total_patches() const {
  int total = 0;
  for (const TraverseSegment& s : segments) total += s.patches;
  return total;
}

void TraverseScript::validate() const {
  patch.validate();
  if (segments.empty()) throw std::invalid_argument("TraverseScript: no segments");
  for (const TraverseSegment& s : segments) {
    s.surface.validate();
    if (s.patches < 1) throw std::invalid_argument("TraverseScript: segment length must be >= 1");
    if (s.roll.lo_deg > s.roll.hi_deg || s.pitch.lo_deg > s.pitch.hi_deg) {
      throw std::invalid_argument("TraverseScript: angle range inverted");
    }
  }
  if (noise_sigma < 0.0) throw std::invalid_argument("TraverseScript: noise_sigma must be >= 0");
  if (points_per_cell < 1) {
    throw std::invalid_argument("TraverseScript: points_per_cell must be >= 1");
  }
  if (margin_cells < 0) throw std::invalid_argument("TraverseScript: margin_cells must be >= 0");
  const int total = total_patches();
  for (const DefectSpec& d : defects) {
    if (d.index < 0 || d.index >= total) {
      throw std::invalid_argument("TraverseScript: defect index out of range");
    }
    if (d.height == 0.0 || d.extent <= 0.0) {
      throw std::invalid_argument("TraverseScript: defect needs nonzero height and extent");
    }
  }
}

std::vector<TraversePatch> generate_traverse(const TraverseScript& script) {
  script.validate();
  const PatchSpec& spec = script.patch;
  const int m = spec.rows();
  const int n = spec.cols();
  const int mg = script.margin_cells;
  const double stride = script.stride > 0.0 ? script.stride : spec.truncated_length();

  std::vector<TraversePatch> out;
  out.reserve(static_cast<std::size_t>(script.total_patches()));

  int index = 0;
  for (const TraverseSegment& segment : script.segments) {
    for (int p = 0; p < segment.patches; ++p, ++index) {
      const std::uint64_t patch_seed = mix_seed(script.seed, static_cast<std::uint64_t>(index));
      std::mt19937_64 rng(mix_seed(patch_seed, 0xa77d));

      TraversePatch tp;
      tp.surface = segment.surface;
      tp.course_x = index * stride + spec.origin_x + spec.truncated_length() / 2.0;
      tp.attitude.roll = (segment.roll.lo_deg +
                          (segment.roll.hi_deg - segment.roll.lo_deg) * next_unit(rng)) *
                         std::numbers::pi / 180.0;
      tp.attitude.pitch = (segment.pitch.lo_deg +
                           (segment.pitch.hi_deg - segment.pitch.lo_deg) * next_unit(rng)) *
                          std::numbers::pi / 180.0;

      const DefectSpec* defect = nullptr;
      for (const DefectSpec& d : script.defects) {
        if (d.index == index) defect = &d;
      }
      tp.has_defect = defect != nullptr;
      const double cx = spec.origin_x + spec.truncated_length() / 2.0;
      const double cy = spec.origin_y + spec.truncated_width() / 2.0;

      SurfaceSampler sampler(segment.surface, n, spec.step, m + 2 * mg,
                             spec.origin_y - mg * spec.step, patch_seed);
      auto surface = [&](double x, double y) {
        double z = sampler(x, y);
        if (defect) z += bump_height(*defect, x - cx, y - cy);
        return z;
      };

      // Noiseless reference truth at the analysis-grid centers.
      tp.truth.rows = m;
      tp.truth.cols = n;
      tp.truth.step = spec.step;
      tp.truth.origin_x = spec.origin_x;
      tp.truth.origin_y = spec.origin_y;
      tp.truth.patch_index = index;
      tp.truth.grid.resize(static_cast<std::size_t>(m) * n);
      tp.truth.mask.assign(static_cast<std::size_t>(m) * n, 1);
      for (int r = 0; r < m; ++r) {
        for (int c = 0; c < n; ++c) {
          tp.truth.at(r, c) =
              surface(spec.origin_x + (c + 0.5) * spec.step, spec.origin_y + (r + 0.5) * spec.step);
        }
      }

      // World-frame cloud over the extended footprint.
      PointCloud world;
      world.frame = Frame::world;
      const double x_lo = spec.origin_x - mg * spec.step;
      const double y_lo = spec.origin_y - mg * spec.step;
      const int ext_cols = n + 2 * mg;
      const int ext_rows = m + 2 * mg;
      if (script.points_per_cell == 1) {
        world.points.reserve(static_cast<std::size_t>(ext_rows) * ext_cols);
        for (int r = 0; r < ext_rows; ++r) {
          const double y = y_lo + (r + 0.5) * spec.step;
          for (int c = 0; c < ext_cols; ++c) {
            const double x = x_lo + (c + 0.5) * spec.step;
            world.points.push_back({x, y, surface(x, y)});
          }
        }
      } else {
        const std::size_t count = static_cast<std::size_t>(ext_rows) * ext_cols *
                                  static_cast<std::size_t>(script.points_per_cell);
        const double x_span = ext_cols * spec.step;
        const double y_span = ext_rows * spec.step;
        world.points.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
          const double x = x_lo + x_span * next_unit(rng);
          const double y = y_lo + y_span * next_unit(rng);
          world.points.push_back({x, y, surface(x, y)});
        }
      }

      // Into the vehicle frame (inverse of the tilt rotation), then sensor noise.
      const Mat3 to_vehicle = tilt_rotation(tp.attitude).transposed();
      tp.cloud.frame = Frame::vehicle;
      tp.cloud.points.reserve(world.points.size());
      for (const Vec3& pw : world.points) {
        tp.cloud.points.push_back(to_vehicle * pw);
      }
      if (script.noise_sigma > 0.0) {
        std::mt19937_64 noise_rng(mix_seed(patch_seed, 0x4e01));
        std::normal_distribution<double> gauss(0.0, script.noise_sigma);
        for (Vec3& p : tp.cloud.points) p.z += gauss(noise_rng);
      }
      out.push_back(std::move(tp));
    }
  }
  return out;
}

}  // namespace terrapsd
