#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "terrapsd/geometry.hpp"
#include "terrapsd/preprocess.hpp"

namespace terrapsd {

// Target spectrum phi(Omega) = phi0 * Omega^w over the waveband fixed by (n, B).
struct SurfaceModel {
  double phi0 = 16e-6;   // m^3/rad at Omega_0 = 1 rad/m
  double waviness = -2.0;
  // Lateral structure of generated patches/clouds:
  //   unset -> profiles laterally independent (default)
  //   set   -> smooth surface; phases drift across the width by at most
  //            2*pi*lateral_cycles (0 = identical rows / ridged)
  std::optional<double> lateral_cycles;

  void validate() const;  // phi0 >= 0, waviness <= 0
};

// Sum of cosines at the exact band bins with independent uniform phases.
// Amplitudes carry the band-integrated power of the target spectrum, so every
// realization's rms equals sqrt of the band integral of phi.
std::vector<double> generate_profile(const SurfaceModel& model, int n, double step,
                                     std::uint64_t seed);

ElevationPatch generate_patch(const SurfaceModel& model, const PatchSpec& spec,
                              std::uint64_t seed);

// Attitude schedule entry, degrees; constant when lo == hi, otherwise sampled
// uniformly per patch.
struct AngleRange {
  double lo_deg = 0.0;
  double hi_deg = 0.0;
};

struct TraverseSegment {
  SurfaceModel surface;
  int patches = 1;
  AngleRange roll;
  AngleRange pitch;
};

struct DefectSpec {
  int index = 0;      // patch index within the traverse
  double height = 0.03;  // bump height, meters
  double extent = 0.1;   // bump diameter, meters
};

struct TraverseScript {
  PatchSpec patch;
  std::vector<TraverseSegment> segments;
  std::vector<DefectSpec> defects;
  double noise_sigma = 0.004;  // per-point sensor noise, meters
  int points_per_cell = 1;     // 1 = exact cell centers; >1 = uniform scatter
  int margin_cells = 8;        // generated border beyond the extraction window
  double stride = 0.0;         // patch advance along the course; 0 = patch length
  std::uint64_t seed = 1;

  int total_patches() const;
  void validate() const;
};

struct TraversePatch {
  PointCloud cloud;          // vehicle frame, noise applied
  Attitude attitude;
  ElevationPatch truth;      // noiseless surface sampled at the grid centers
  SurfaceModel surface;      // generator target
  bool has_defect = false;
  double course_x = 0.0;     // patch center position along the course
};

std::vector<TraversePatch> generate_traverse(const TraverseScript& script);

}  // namespace terrapsd
