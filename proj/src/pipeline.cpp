#include "terrapsd/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "terrapsd/errors.hpp"

namespace terrapsd {

double PipelineConfig::effective_stride() const {
  return stride > 0.0 ? stride : patch.truncated_length();
}

void PipelineConfig::validate() const {
  patch.validate();
  if (welch.segments < 1) throw std::invalid_argument("config: welch segments must be >= 1");
  if (welch.segments > 1 && (welch.overlap < 0.0 || welch.overlap >= 1.0)) {
    throw std::invalid_argument("config: welch overlap must be in [0, 1)");
  }
  if (fit.skip_low_bins < 0) throw std::invalid_argument("config: fit skip_low_bins must be >= 0");
  if (!(fit.band_fraction > 0.0) || fit.band_fraction > 1.0) {
    throw std::invalid_argument("config: fit band_fraction must be in (0, 1]");
  }
  if (filter.enabled && (!(filter.window > 0.0) || !(filter.k_sigma > 0.0) ||
                         filter.max_removal < 0.0 || filter.max_removal > 1.0)) {
    throw std::invalid_argument("config: bad outlier filter parameters");
  }
  if (!(labels.low_max > 0.0) || labels.high_min < labels.low_max) {
    throw std::invalid_argument("config: bad label thresholds");
  }
  if (defects.window < 2 || !(defects.factor > 0.0)) {
    throw std::invalid_argument("config: bad defect detector parameters");
  }
  if (!(row_invalid_max >= 0.0) || row_invalid_max > 1.0) {
    throw std::invalid_argument("config: row_invalid_max must be in [0, 1]");
  }
  if (threads < 0) throw std::invalid_argument("config: threads must be >= 0");
}

PatchResult analyze_cloud(const PointCloud& cloud, const std::optional<Attitude>& attitude,
                          const PipelineConfig& config, int patch_index) {
  PatchResult result;
  result.patch_index = patch_index;

  PointCloud world;
  if (attitude) {
    world = compensate_tilt(cloud, *attitude);
  } else {
    world = cloud;
    world.frame = Frame::world;  // uncompensated mode: vehicle frame taken as-is
  }

  PointCloud pts = extract_patch(world, config.patch);
  if (pts.size() < 10) {
    result.drops.push_back({patch_index, -1, "too_few_points",
                            std::to_string(pts.size()) + " points in window"});
    return result;
  }
  if (config.filter.enabled) {
    pts = filter_outliers(pts, config.filter.window, config.filter.k_sigma,
                          config.filter.max_removal)
              .kept;
  }

  ElevationPatch patch;
  try {
    patch = rasterize(pts, config.patch, patch_index);
  } catch (const DegeneratePatch& e) {
    result.drops.push_back({patch_index, -1, "degenerate_patch", e.what()});
    return result;
  }

  std::vector<ProfileRoughness> profiles;
  profiles.reserve(static_cast<std::size_t>(patch.rows));
  for (int r = 0; r < patch.rows; ++r) {
    const double invalid = patch.row_invalid_fraction(r);
    if (invalid > config.row_invalid_max) {
      result.drops.push_back({patch_index, r, "row_invalid_fraction", format_number(invalid)});
      continue;
    }
    const std::vector<double> profile = detrend(patch.row(r), patch.step);
    const SpectrumEstimate spec = welch_psd(profile, patch.step, config.welch);
    try {
      profiles.push_back(fit_power_law(spec, config.fit));
    } catch (const UnfittableSpectrum& e) {
      result.drops.push_back({patch_index, r, "row_unfittable", e.what()});
    }
  }

  if (profiles.size() < 2) {
    result.drops.push_back({patch_index, -1, "too_few_profiles",
                            std::to_string(profiles.size()) + " usable profiles"});
    return result;
  }

  const Waveband band =
      welch_psd(std::vector<double>(static_cast<std::size_t>(patch.cols), 0.0), patch.step,
                config.welch)
          .band;
  const PatchRoughness rough = aggregate_patch(profiles, band);

  RoughnessMapCell cell;
  cell.patch_index = patch_index;
  cell.x = patch_index * config.effective_stride() + config.patch.origin_x +
           config.patch.truncated_length() / 2.0;
  cell.y = config.patch.origin_y + config.patch.truncated_width() / 2.0;
  cell.roughness = rough;
  cell.iso = iso_classify(rough.overall_energy);
  cell.label = semantic_label(rough.overall_energy, config.labels);
  result.cell = cell;
  result.scatter = std::move(profiles);
  return result;
}

ProcessResult process_traverse(const std::vector<PointCloud>& clouds,
                               const std::vector<std::optional<Attitude>>& attitudes,
                               const PipelineConfig& config) {
  config.validate();
  if (!attitudes.empty() && attitudes.size() != clouds.size()) {
    throw std::invalid_argument("process_traverse: attitude count does not match cloud count");
  }

  const int n = static_cast<int>(clouds.size());
  std::vector<PatchResult> results(static_cast<std::size_t>(n));

  unsigned workers = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                        : std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max(n, 1)));

  std::atomic<int> next{0};
  auto work = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      const std::optional<Attitude> att = attitudes.empty() ? std::nullopt : attitudes[i];
      results[i] = analyze_cloud(clouds[i], att, config, i);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }

  ProcessResult out;
  for (PatchResult& r : results) {
    for (DropEvent& d : r.drops) out.drops.push_back(std::move(d));
    if (r.cell) {
      out.cells.push_back(*r.cell);
      out.scatter.push_back(std::move(r.scatter));
    }
  }

  // Defect pass over the successful patches, in traverse order.
  if (static_cast<int>(out.cells.size()) >= config.defects.window) {
    std::vector<double> energy;
    energy.reserve(out.cells.size());
    for (const RoughnessMapCell& c : out.cells) energy.push_back(c.roughness.overall_energy);
    const std::vector<bool> flags = detect_defects(energy, config.defects);
    for (std::size_t i = 0; i < out.cells.size(); ++i) out.cells[i].defect = flags[i];
  } else if (!out.cells.empty()) {
    out.drops.push_back({-1, -1, "defect_window_short",
                         std::to_string(out.cells.size()) + " patches < window " +
                             std::to_string(config.defects.window)});
  }

  out.summary = summarize(out.cells, n);
  return out;
}

TraverseSummary summarize(const std::vector<RoughnessMapCell>& cells, int patches_in) {
  TraverseSummary s;
  s.patches_in = patches_in;
  s.patches_ok = static_cast<int>(cells.size());
  if (cells.empty()) return s;
  const double m = static_cast<double>(cells.size());
  for (const RoughnessMapCell& c : cells) {
    s.mean_overall_energy += c.roughness.overall_energy;
    s.mean_waviness += c.roughness.waviness;
    s.mean_sigma_overall += c.roughness.overall_energy_sigma;
    s.mean_sigma_waviness += c.roughness.waviness_sigma;
    ++s.label_counts[static_cast<int>(c.label)];
  }
  s.mean_overall_energy /= m;
  s.mean_waviness /= m;
  s.mean_sigma_overall /= m;
  s.mean_sigma_waviness /= m;
  if (cells.size() > 1) {
    double vr = 0.0, vw = 0.0;
    for (const RoughnessMapCell& c : cells) {
      vr += (c.roughness.overall_energy - s.mean_overall_energy) *
            (c.roughness.overall_energy - s.mean_overall_energy);
      vw += (c.roughness.waviness - s.mean_waviness) * (c.roughness.waviness - s.mean_waviness);
    }
    s.std_overall_energy = std::sqrt(vr / (m - 1.0));
    s.std_waviness = std::sqrt(vw / (m - 1.0));
  }
  return s;
}

void write_summary(std::ostream& out, const TraverseSummary& s) {
  out << "patches: " << s.patches_ok << " of " << s.patches_in << " analyzed\n";
  if (s.patches_ok == 0) return;
  out << "overall energy R: mean " << format_number(s.mean_overall_energy) << " m^3/rad, std "
      << format_number(s.std_overall_energy) << " across patches (mean within-patch sigma "
      << format_number(s.mean_sigma_overall) << ")\n";
  out << "waviness w: mean " << format_number(s.mean_waviness) << ", std "
      << format_number(s.std_waviness) << " across patches (mean within-patch sigma "
      << format_number(s.mean_sigma_waviness) << ")\n";
  out << "labels: low " << s.label_counts[0] << ", medium " << s.label_counts[1] << ", high "
      << s.label_counts[2] << '\n';
}

void write_drops(std::ostream& out, const std::vector<DropEvent>& drops) {
  for (const DropEvent& d : drops) {
    out << "[patch " << d.patch_index;
    if (d.row >= 0) out << " row " << d.row;
    out << "] " << d.code << ": " << d.detail << '\n';
  }
}

}  // namespace terrapsd
