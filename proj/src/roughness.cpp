#include "terrapsd/roughness.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "terrapsd/errors.hpp"

namespace terrapsd {

ProfileRoughness fit_power_law(const SpectrumEstimate& spec, const FitConfig& config) {
  if (config.skip_low_bins < 0) {
    throw std::invalid_argument("fit_power_law: skip_low_bins must be >= 0");
  }
  if (!(config.band_fraction > 0.0) || config.band_fraction > 1.0) {
    throw std::invalid_argument("fit_power_law: band_fraction must be in (0, 1]");
  }
  const int l = spec.band.size();
  const int k_max = static_cast<int>(std::floor(l * config.band_fraction));

  double sx = 0.0, sy = 0.0;
  int used = 0;
  std::vector<std::pair<double, double>> pts;
  pts.reserve(static_cast<std::size_t>(l));
  for (int k = config.skip_low_bins; k < k_max; ++k) {
    if (!(spec.phi[k] > 0.0)) continue;
    const double x = std::log(spec.band.omega[k]);
    const double y = std::log(spec.phi[k]);
    pts.emplace_back(x, y);
    sx += x;
    sy += y;
    ++used;
  }
  if (used < 3) {
    throw UnfittableSpectrum("fit_power_law: only " + std::to_string(used) +
                             " positive bins available, need 3");
  }
  const double mx = sx / used, my = sy / used;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;

  double ss = 0.0;
  for (const auto& [x, y] : pts) {
    const double resid = y - (intercept + slope * x);
    ss += resid * resid;
  }

  ProfileRoughness out;
  out.waviness = slope;
  out.log_energy = intercept;  // ln Omega_0 = 0, so the intercept is ln R
  out.overall_energy = std::exp(intercept);
  out.residual_rms = std::sqrt(ss / used);
  out.bins_used = used;
  return out;
}

PatchRoughness aggregate_patch(std::span<const ProfileRoughness> profiles, const Waveband& band) {
  const std::size_t m = profiles.size();
  if (m < 2) {
    throw DegeneratePatch("aggregate_patch: need at least 2 profiles, got " + std::to_string(m));
  }
  double sb = 0.0, sw = 0.0;
  for (const ProfileRoughness& p : profiles) {
    sb += p.log_energy;
    sw += p.waviness;
  }
  const double mb = sb / static_cast<double>(m);
  const double mw = sw / static_cast<double>(m);
  double vb = 0.0, vw = 0.0;
  for (const ProfileRoughness& p : profiles) {
    vb += (p.log_energy - mb) * (p.log_energy - mb);
    vw += (p.waviness - mw) * (p.waviness - mw);
  }
  vb /= static_cast<double>(m - 1);
  vw /= static_cast<double>(m - 1);

  const DeltaResult r = delta_method(mb, vb, DeltaTransform::exp);

  PatchRoughness out;
  out.overall_energy = r.mean;
  out.overall_energy_sigma = std::sqrt(r.variance);
  out.waviness = mw;
  out.waviness_sigma = std::sqrt(vw);
  out.profiles_used = static_cast<int>(m);
  out.band = band;
  return out;
}

DeltaResult delta_method(double mean, double variance, DeltaTransform g) {
  if (variance < 0.0 || !std::isfinite(variance) || !std::isfinite(mean)) {
    throw std::invalid_argument("delta_method: variance must be finite and non-negative");
  }
  DeltaResult out;
  switch (g) {
    case DeltaTransform::identity:
      out.mean = mean;
      out.variance = variance;
      break;
    case DeltaTransform::exp: {
      const double e = std::exp(mean);
      out.mean = e;
      out.variance = e * e * variance;  // g' = g
      break;
    }
  }
  return out;
}

}  // namespace terrapsd
