#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <doctest.h>

#include "terrapsd/errors.hpp"
#include "terrapsd/preprocess.hpp"
#include "terrapsd/spectrum.hpp"

using namespace terrapsd;

namespace {

constexpr double kPi = std::numbers::pi;

double variance(const std::vector<double>& z) {
  double mean = 0.0;
  for (double v : z) mean += v;
  mean /= static_cast<double>(z.size());
  double s = 0.0;
  for (double v : z) s += (v - mean) * (v - mean);
  return s / static_cast<double>(z.size());
}

std::vector<double> gaussian_profile(int n, double sigma, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sigma);
  std::vector<double> z(static_cast<std::size_t>(n));
  for (double& v : z) v = g(rng);
  return z;
}

}  // namespace

TEST_CASE("waveband bins follow 2*pi*k/(n*B)") {
  const Waveband band = make_waveband(4, 0.5);
  REQUIRE(band.size() == 2);
  CHECK(band.omega[0] == doctest::Approx(kPi).epsilon(1e-14));
  CHECK(band.omega[1] == doctest::Approx(2.0 * kPi).epsilon(1e-14));
  CHECK(band.lower() == doctest::Approx(kPi));
  CHECK(band.upper() == doctest::Approx(2.0 * kPi));
}

TEST_CASE("waveband bounds for the default patch") {
  const Waveband band = make_waveband(112, 0.008);
  REQUIRE(band.size() == 56);
  CHECK(band.lower() == doctest::Approx(7.0124).epsilon(1e-4));   // 2*pi/0.896
  CHECK(band.upper() == doctest::Approx(392.699).epsilon(1e-5));  // pi/0.008
  // upper/lower ratio is n/2 by construction
  CHECK(band.upper() / band.lower() == doctest::Approx(56.0).epsilon(1e-12));
  // strictly increasing, uniform spacing
  for (int k = 1; k < band.size(); ++k) {
    CHECK(band.omega[k] - band.omega[k - 1] == doctest::Approx(band.delta).epsilon(1e-12));
  }
}

TEST_CASE("waveband rejects odd or tiny n") {
  CHECK_THROWS_AS(make_waveband(7, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(make_waveband(2, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(make_waveband(112, 0.0), std::invalid_argument);
}

TEST_CASE("zero profile gives zero spectrum") {
  const std::vector<double> z(112, 0.0);
  const SpectrumEstimate spec = welch_psd(z, 0.008);
  for (double phi : spec.phi) CHECK(phi == 0.0);
}

TEST_CASE("exact-bin cosine carries a^2/2 of band power") {
  const int n = 112;
  const double B = 0.008;
  const double a = 0.01;
  const Waveband band = make_waveband(n, B);
  const double om = band.omega[11];  // an exact bin
  // centered so the cosine is exactly orthogonal to the [1, x] basis
  const double xc = 0.5 * (n - 1) * B;
  std::vector<double> z(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) z[i] = a * std::cos(om * (i * B - xc));
  const std::vector<double> flat = detrend(z, B);
  const SpectrumEstimate spec = welch_psd(flat, B);
  CHECK(spec.total_power() == doctest::Approx(a * a / 2.0).epsilon(1e-10));
  // energy is concentrated in that bin
  CHECK(spec.phi[11] * band.delta == doctest::Approx(a * a / 2.0).epsilon(1e-9));
}

TEST_CASE("Parseval is exact for the single-segment rectangular configuration") {
  const int n = 112;
  const double B = 0.008;
  for (unsigned seed = 0; seed < 20; ++seed) {
    const std::vector<double> z = detrend(gaussian_profile(n, 0.003, 100 + seed), B);
    const SpectrumEstimate spec = welch_psd(z, B);
    CHECK(spec.total_power() == doctest::Approx(variance(z)).epsilon(1e-9));
  }
}

TEST_CASE("white noise: flat interior mean and 5% total power over 100 seeds") {
  const int n = 112;
  const double B = 0.008;
  const double sigma = 0.003;
  const Waveband band = make_waveband(n, B);
  std::vector<double> mean_phi(static_cast<std::size_t>(band.size()), 0.0);
  double mean_total = 0.0;
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    const std::vector<double> z = detrend(gaussian_profile(n, sigma, 2000 + s), B);
    const SpectrumEstimate spec = welch_psd(z, B);
    for (int k = 0; k < band.size(); ++k) mean_phi[k] += spec.phi[k];
    mean_total += spec.total_power();
  }
  for (double& v : mean_phi) v /= seeds;
  mean_total /= seeds;

  CHECK(mean_total == doctest::Approx(sigma * sigma).epsilon(0.05));

  // Interior bins only: bin 1 sits at the scan-length wavelength that
  // detrending suppresses, and the Nyquist bin carries one-sided weight 1.
  double grand = 0.0;
  int count = 0;
  for (int k = 1; k + 1 < band.size(); ++k) {
    grand += mean_phi[k];
    ++count;
  }
  grand /= count;
  for (int k = 1; k + 1 < band.size(); ++k) {
    CHECK(mean_phi[k] == doctest::Approx(grand).epsilon(0.10));
  }
}

TEST_CASE("scaling: welch(c*z) = c^2 * welch(z) exactly") {
  const int n = 112;
  const double B = 0.008;
  const std::vector<double> z = detrend(gaussian_profile(n, 0.004, 7), B);
  std::vector<double> scaled(z);
  const double c = -3.7;
  for (double& v : scaled) v *= c;
  const SpectrumEstimate a = welch_psd(z, B);
  const SpectrumEstimate b = welch_psd(scaled, B);
  for (int k = 0; k < a.band.size(); ++k) {
    CHECK(b.phi[k] == doctest::Approx(c * c * a.phi[k]).epsilon(1e-12));
  }
}

TEST_CASE("spectrum is invariant under profile reversal") {
  const int n = 112;
  const double B = 0.008;
  const std::vector<double> z = detrend(gaussian_profile(n, 0.004, 11), B);
  std::vector<double> rev(z.rbegin(), z.rend());
  const SpectrumEstimate a = welch_psd(z, B);
  const SpectrumEstimate b = welch_psd(rev, B);
  for (int k = 0; k < a.band.size(); ++k) {
    CHECK(b.phi[k] == doctest::Approx(a.phi[k]).epsilon(1e-10));
  }
}

TEST_CASE("segment averaging reduces per-bin estimator variance") {
  const int n = 112;
  const double B = 0.008;
  const WelchConfig two{.segments = 2, .overlap = 0.5, .window = Window::rectangular};
  std::vector<std::vector<double>> one_runs, two_runs;
  for (int s = 0; s < 100; ++s) {
    const std::vector<double> z = detrend(gaussian_profile(n, 0.003, 5000 + s), B);
    one_runs.push_back(welch_psd(z, B).phi);
    two_runs.push_back(welch_psd(z, B, two).phi);
  }
  auto median_bin_variance = [](const std::vector<std::vector<double>>& runs) {
    const std::size_t bins = runs.front().size();
    std::vector<double> vars(bins);
    for (std::size_t k = 0; k < bins; ++k) {
      double mean = 0.0;
      for (const auto& r : runs) mean += r[k];
      mean /= static_cast<double>(runs.size());
      double v = 0.0;
      for (const auto& r : runs) v += (r[k] - mean) * (r[k] - mean);
      vars[k] = v / static_cast<double>(runs.size() - 1);
    }
    std::nth_element(vars.begin(), vars.begin() + bins / 2, vars.end());
    return vars[bins / 2];
  };
  CHECK(median_bin_variance(two_runs) < median_bin_variance(one_runs));
}

TEST_CASE("welch_psd refuses profiles that are not detrended") {
  const int n = 112;
  const double B = 0.008;
  std::vector<double> z(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) z[i] = 0.01 + 0.005 * i * B;
  CHECK_THROWS_AS(welch_psd(z, B), ContractViolation);
}

TEST_CASE("hann window keeps total power in expectation") {
  const int n = 112;
  const double B = 0.008;
  const WelchConfig hann{.segments = 1, .overlap = 0.5, .window = Window::hann};
  double total = 0.0, var_total = 0.0;
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    const std::vector<double> z = detrend(gaussian_profile(n, 0.003, 9000 + s), B);
    total += welch_psd(z, B, hann).total_power();
    var_total += variance(z);
  }
  CHECK(total / var_total == doctest::Approx(1.0).epsilon(0.05));
}
