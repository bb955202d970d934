#pragma once

#include <span>
#include <vector>

namespace terrapsd {

// Discrete waveband Omega_k = 2*pi*k/(n*B), k = 1..n/2, in rad/m.
struct Waveband {
  std::vector<double> omega;  // ascending, size l = n/2
  double delta = 0.0;         // bin width 2*pi/(n*B), equal to omega[0]
  double step = 0.0;          // grid step B

  int size() const { return static_cast<int>(omega.size()); }
  double lower() const { return omega.front(); }   // Omega_1 = 2*pi/L
  double upper() const { return omega.back(); }    // Omega_l = pi/B
};

Waveband make_waveband(int n, double step);

enum class Window { rectangular, hann };

struct WelchConfig {
  int segments = 1;          // number of averaged segments
  double overlap = 0.5;      // fraction, used when segments > 1
  Window window = Window::rectangular;
};

struct SpectrumEstimate {
  Waveband band;
  std::vector<double> phi;   // one-sided PSD, m^3/rad, size band.size()
  int n_segments = 1;
  Window window = Window::rectangular;
  double overlap = 0.0;

  // Sum of phi_k * delta; equals the profile variance for the single-segment
  // rectangular configuration.
  double total_power() const;
};

// One-sided Welch PSD of a detrended profile. Normalization satisfies the
// discrete Parseval relation in wavenumber units (m^3/rad vs rad/m); window
// power compensation keeps it window-independent in expectation. Refuses
// profiles that still carry a mean or linear trend (ContractViolation).
SpectrumEstimate welch_psd(std::span<const double> profile, double step,
                           const WelchConfig& config = {});

}  // namespace terrapsd
