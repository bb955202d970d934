#include "terrapsd/spectrum.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "terrapsd/errors.hpp"

namespace terrapsd {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct LineFit {
  double mean = 0.0;
  double slope = 0.0;
};

LineFit ols_line(std::span<const double> z, double step) {
  const std::size_t n = z.size();
  const double xc = 0.5 * static_cast<double>(n - 1) * step;
  double sum = 0.0;
  for (double v : z) sum += v;
  const double mean = sum / static_cast<double>(n);
  double sxx = 0.0, sxz = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = static_cast<double>(i) * step - xc;
    sxx += dx * dx;
    sxz += dx * (z[i] - mean);
  }
  return {mean, sxz / sxx};
}

std::vector<double> make_window(Window kind, int n) {
  std::vector<double> w(static_cast<std::size_t>(n), 1.0);
  if (kind == Window::hann && n > 1) {
    for (int i = 0; i < n; ++i) {
      w[i] = 0.5 - 0.5 * std::cos(kTwoPi * i / (n - 1));
    }
  }
  return w;
}

}  // namespace

Waveband make_waveband(int n, double step) {
  if (n < 4 || n % 2 != 0) {
    throw std::invalid_argument("make_waveband: n must be even and >= 4, got " +
                                std::to_string(n));
  }
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw std::invalid_argument("make_waveband: step must be positive");
  }
  Waveband band;
  band.step = step;
  band.delta = kTwoPi / (n * step);
  band.omega.resize(static_cast<std::size_t>(n / 2));
  for (int k = 1; k <= n / 2; ++k) {
    band.omega[k - 1] = band.delta * k;
  }
  return band;
}

double SpectrumEstimate::total_power() const {
  double sum = 0.0;
  for (double v : phi) sum += v;
  return sum * band.delta;
}

SpectrumEstimate welch_psd(std::span<const double> profile, double step,
                           const WelchConfig& config) {
  const int n = static_cast<int>(profile.size());
  if (n < 8 || n % 2 != 0) {
    throw std::invalid_argument("welch_psd: profile length must be even and >= 8");
  }
  if (!(step > 0.0)) throw std::invalid_argument("welch_psd: step must be positive");
  if (config.segments < 1) throw std::invalid_argument("welch_psd: segments must be >= 1");
  if (config.segments > 1 && (config.overlap < 0.0 || config.overlap >= 1.0)) {
    throw std::invalid_argument("welch_psd: overlap must be in [0, 1)");
  }

  double scale = 0.0;
  for (double v : profile) scale = std::max(scale, std::abs(v));

  if (scale > 0.0) {
    const LineFit line = ols_line(profile, step);
    const double span = static_cast<double>(n - 1) * step;
    if (std::abs(line.mean) > 1e-9 * scale ||
        std::abs(line.slope) * span * 0.5 > 1e-9 * scale) {
      throw ContractViolation("welch_psd: profile is not detrended");
    }
  }

  // Segment length: even truncation of n / (1 + (K-1)*(1-overlap)); start
  // offsets spread evenly so the first segment begins at 0 and the last ends
  // at n.
  int n_seg = n;
  std::vector<int> starts{0};
  if (config.segments > 1) {
    const double denom = 1.0 + (config.segments - 1) * (1.0 - config.overlap);
    n_seg = static_cast<int>(std::floor(n / denom));
    if (n_seg % 2 != 0) --n_seg;
    if (n_seg < 8) {
      throw std::invalid_argument("welch_psd: segment configuration leaves fewer than 8 samples");
    }
    starts.clear();
    for (int j = 0; j < config.segments; ++j) {
      starts.push_back(static_cast<int>(
          std::lround(static_cast<double>(j) * (n - n_seg) / (config.segments - 1))));
    }
  }

  SpectrumEstimate out;
  out.band = make_waveband(n_seg, step);
  out.n_segments = static_cast<int>(starts.size());
  out.window = config.window;
  out.overlap = config.segments > 1 ? config.overlap : 0.0;

  const int l = n_seg / 2;
  out.phi.assign(static_cast<std::size_t>(l), 0.0);

  const std::vector<double> win = make_window(config.window, n_seg);
  double win_power = 0.0;
  for (double w : win) win_power += w * w;

  // Exact twiddle table: index (k*i) mod n_seg.
  std::vector<double> cos_tab(static_cast<std::size_t>(n_seg));
  std::vector<double> sin_tab(static_cast<std::size_t>(n_seg));
  for (int j = 0; j < n_seg; ++j) {
    cos_tab[j] = std::cos(kTwoPi * j / n_seg);
    sin_tab[j] = std::sin(kTwoPi * j / n_seg);
  }

  std::vector<double> seg(static_cast<std::size_t>(n_seg));
  for (int s : starts) {
    double seg_mean = 0.0;
    for (int i = 0; i < n_seg; ++i) seg_mean += profile[s + i];
    seg_mean /= n_seg;
    for (int i = 0; i < n_seg; ++i) {
      seg[i] = (profile[s + i] - seg_mean) * win[i];
    }
    for (int k = 1; k <= l; ++k) {
      double re = 0.0, im = 0.0;
      std::size_t idx = 0;
      for (int i = 0; i < n_seg; ++i) {
        re += seg[i] * cos_tab[idx];
        im += seg[i] * sin_tab[idx];
        idx += k;
        if (idx >= static_cast<std::size_t>(n_seg)) idx -= n_seg;
      }
      const double one_sided = (k == l) ? 1.0 : 2.0;
      out.phi[k - 1] += one_sided * (re * re + im * im) / (n_seg * win_power * out.band.delta);
    }
  }

  const double inv_segments = 1.0 / static_cast<double>(starts.size());
  for (double& v : out.phi) v *= inv_segments;
  return out;
}

}  // namespace terrapsd
