#include "terrapsd/classify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "terrapsd/errors.hpp"

namespace terrapsd {

char iso_letter(IsoBand band) { return static_cast<char>('A' + static_cast<int>(band)); }

std::string IsoClassification::to_string() const {
  if (below_band) return std::string("<") + iso_letter(nearest);
  if (above_band) return std::string(">") + iso_letter(nearest);
  if (bracket) {
    return std::string(1, iso_letter(bracket->first)) + "-" + iso_letter(bracket->second);
  }
  return std::string(1, iso_letter(nearest));
}

IsoClassification iso_classify(double overall_energy) {
  if (!(overall_energy > 0.0) || !std::isfinite(overall_energy)) {
    throw std::invalid_argument("iso_classify: overall energy must be positive");
  }
  IsoClassification out;
  const double lr = std::log(overall_energy);
  int best = 0;
  double best_dist = std::abs(lr - std::log(kIsoPhi0[0]));
  for (int i = 1; i < 8; ++i) {
    const double d = std::abs(lr - std::log(kIsoPhi0[i]));
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  out.nearest = static_cast<IsoBand>(best);

  constexpr double kRowTol = 1e-12;
  if (overall_energy < kIsoPhi0[0] * (1.0 - kRowTol)) {
    out.below_band = true;
    return out;
  }
  if (overall_energy > kIsoPhi0[7] * (1.0 + kRowTol)) {
    out.above_band = true;
    return out;
  }
  for (int i = 0; i < 8; ++i) {
    if (std::abs(overall_energy - kIsoPhi0[i]) <= kRowTol * kIsoPhi0[i]) {
      return out;  // exactly on a row
    }
  }
  for (int i = 0; i + 1 < 8; ++i) {
    if (overall_energy > kIsoPhi0[i] && overall_energy < kIsoPhi0[i + 1]) {
      out.bracket = {static_cast<IsoBand>(i), static_cast<IsoBand>(i + 1)};
      break;
    }
  }
  return out;
}

double band_rms(double phi0, double omega1, double omega_l, double omega0) {
  if (!(omega1 > 0.0) || !(omega_l > omega1)) {
    throw std::invalid_argument("band_rms: need 0 < omega1 < omega_l");
  }
  if (phi0 < 0.0 || !std::isfinite(phi0)) {
    throw std::invalid_argument("band_rms: phi0 must be non-negative");
  }
  return std::sqrt(phi0 * omega0 * omega0 * (1.0 / omega1 - 1.0 / omega_l));
}

double sensitivity_floor(double rms, double omega1, double omega_l, double omega0) {
  if (!(omega1 > 0.0) || !(omega_l > omega1)) {
    throw std::invalid_argument("sensitivity_floor: need 0 < omega1 < omega_l");
  }
  if (rms < 0.0 || !std::isfinite(rms)) {
    throw std::invalid_argument("sensitivity_floor: rms must be non-negative");
  }
  return rms * rms / (1.0 / omega1 - 1.0 / omega_l) / (omega0 * omega0);
}

const char* label_name(RoughnessLabel label) {
  switch (label) {
    case RoughnessLabel::low: return "low";
    case RoughnessLabel::medium: return "medium";
    case RoughnessLabel::high: return "high";
  }
  return "?";
}

RoughnessLabel semantic_label(double overall_energy, const SemanticThresholds& thresholds) {
  if (!(overall_energy > 0.0)) {
    throw std::invalid_argument("semantic_label: overall energy must be positive");
  }
  if (!(thresholds.low_max > 0.0) || !(thresholds.high_min >= thresholds.low_max)) {
    throw std::invalid_argument("semantic_label: thresholds must satisfy 0 < low_max <= high_min");
  }
  if (overall_energy < thresholds.low_max) return RoughnessLabel::low;
  if (overall_energy > thresholds.high_min) return RoughnessLabel::high;
  return RoughnessLabel::medium;
}

std::vector<bool> detect_defects(std::span<const double> overall_energy,
                                 const DefectConfig& config) {
  const int n = static_cast<int>(overall_energy.size());
  if (config.window < 2 || config.factor <= 0.0) {
    throw std::invalid_argument("detect_defects: window must be >= 2 and factor positive");
  }
  if (n < config.window) {
    throw InsufficientData("detect_defects: sequence of " + std::to_string(n) +
                           " shorter than window " + std::to_string(config.window));
  }
  std::vector<bool> flags(static_cast<std::size_t>(n), false);
  std::vector<double> buf(static_cast<std::size_t>(config.window));
  for (int i = 0; i < n; ++i) {
    int lo = i - config.window / 2;
    lo = std::clamp(lo, 0, n - config.window);
    for (int j = 0; j < config.window; ++j) buf[j] = overall_energy[lo + j];
    std::nth_element(buf.begin(), buf.begin() + config.window / 2, buf.end());
    double median = buf[config.window / 2];
    if (config.window % 2 == 0) {
      std::nth_element(buf.begin(), buf.begin() + config.window / 2 - 1, buf.end());
      median = 0.5 * (median + buf[config.window / 2 - 1]);
    }
    if (median > 0.0 && overall_energy[i] > config.factor * median) {
      flags[i] = true;
    }
  }
  return flags;
}

std::vector<bool> detect_defects(std::span<const PatchRoughness> sequence,
                                 const DefectConfig& config) {
  std::vector<double> energy;
  energy.reserve(sequence.size());
  for (const PatchRoughness& p : sequence) energy.push_back(p.overall_energy);
  return detect_defects(energy, config);
}

}  // namespace terrapsd
