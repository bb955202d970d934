#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "terrapsd/classify.hpp"
#include "terrapsd/geometry.hpp"
#include "terrapsd/io.hpp"
#include "terrapsd/preprocess.hpp"
#include "terrapsd/roughness.hpp"
#include "terrapsd/spectrum.hpp"

namespace terrapsd {

struct FilterConfig {
  bool enabled = true;
  double window = 0.05;      // meters
  double k_sigma = 3.0;
  double max_removal = 0.10;
};

struct PipelineConfig {
  PatchSpec patch;
  WelchConfig welch{.segments = 3, .overlap = 0.5, .window = Window::hann};
  FitConfig fit{.skip_low_bins = 0, .band_fraction = 0.75};
  FilterConfig filter;
  SemanticThresholds labels;
  DefectConfig defects;
  double row_invalid_max = 0.20;  // rows above this invalid fraction are dropped
  double stride = 0.0;            // course advance per patch; 0 = patch length
  int threads = 0;                // 0 = hardware concurrency

  double effective_stride() const;
  void validate() const;  // throws std::invalid_argument
};

// Reason-coded record of anything dropped along the way; nothing is silent.
struct DropEvent {
  int patch_index = 0;
  int row = -1;  // -1 when the whole patch is affected
  std::string code;
  std::string detail;
};

struct PatchResult {
  int patch_index = 0;
  std::optional<RoughnessMapCell> cell;  // defect flag filled at traverse level
  std::vector<DropEvent> drops;
  std::vector<ProfileRoughness> scatter;  // per-profile (w, b) diagnostics
};

// Full per-patch chain: optional tilt compensation, extraction, outlier filter,
// rasterization, per-row detrend + Welch + power-law fit, aggregation.
PatchResult analyze_cloud(const PointCloud& cloud, const std::optional<Attitude>& attitude,
                          const PipelineConfig& config, int patch_index);

struct TraverseSummary {
  int patches_in = 0;
  int patches_ok = 0;
  double mean_overall_energy = 0.0;   // across patches
  double std_overall_energy = 0.0;
  double mean_waviness = 0.0;
  double std_waviness = 0.0;
  double mean_sigma_overall = 0.0;    // mean within-patch sigma_R
  double mean_sigma_waviness = 0.0;
  std::vector<int> label_counts = std::vector<int>(3, 0);
};

struct ProcessResult {
  std::vector<RoughnessMapCell> cells;
  std::vector<DropEvent> drops;
  std::vector<std::vector<ProfileRoughness>> scatter;  // parallel to cells
  TraverseSummary summary;
};

// Processes an ordered sequence of per-patch clouds (concurrently; results in
// input order), then runs defect detection over the successful patches.
ProcessResult process_traverse(const std::vector<PointCloud>& clouds,
                               const std::vector<std::optional<Attitude>>& attitudes,
                               const PipelineConfig& config);

TraverseSummary summarize(const std::vector<RoughnessMapCell>& cells, int patches_in);

void write_summary(std::ostream& out, const TraverseSummary& summary);
void write_drops(std::ostream& out, const std::vector<DropEvent>& drops);

}  // namespace terrapsd
