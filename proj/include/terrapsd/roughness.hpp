#pragma once

#include <span>
#include <vector>

#include "terrapsd/spectrum.hpp"

namespace terrapsd {

// Straight-line fit of ln(phi) on ln(Omega): phi_hat(Omega) = R * Omega^w.
// R is the fit evaluated at the reference wavenumber Omega_0 = 1 rad/m, an
// extrapolation below the band's lower edge.
struct ProfileRoughness {
  double overall_energy = 0.0;  // R, m^3/rad
  double waviness = 0.0;        // w, dimensionless
  double log_energy = 0.0;      // b = ln R
  double residual_rms = 0.0;    // fit residual in log space
  int bins_used = 0;
};

struct FitConfig {
  // Lowest band bins excluded from the fit (detrending corrupts wavelengths
  // near the scan length).
  int skip_low_bins = 0;
  // Upper fit limit as a fraction of the band; bins with k > floor(l*fraction)
  // are excluded (near the sampling resolution limit).
  double band_fraction = 1.0;
};

ProfileRoughness fit_power_law(const SpectrumEstimate& spec, const FitConfig& config = {});

// Patch-level roughness: R_hat = exp(mean b), sigma_R by the delta method,
// w_hat/sigma_w as mean and sample standard deviation of per-profile waviness.
struct PatchRoughness {
  double overall_energy = 0.0;        // R_hat, m^3/rad
  double overall_energy_sigma = 0.0;  // sigma_R
  double waviness = 0.0;              // w_hat
  double waviness_sigma = 0.0;        // sigma_w
  int profiles_used = 0;
  Waveband band;                      // always reported alongside the estimates
};

PatchRoughness aggregate_patch(std::span<const ProfileRoughness> profiles, const Waveband& band);

enum class DeltaTransform { identity, exp };

struct DeltaResult {
  double mean = 0.0;
  double variance = 0.0;
};

// First-order propagation of (mean, variance) through g:
// mu_Y = g(mu_X), var_Y = g'(mu_X)^2 * var_X.
DeltaResult delta_method(double mean, double variance, DeltaTransform g);

}  // namespace terrapsd
