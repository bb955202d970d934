#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "terrapsd/errors.hpp"
#include "terrapsd/preprocess.hpp"
#include "terrapsd/roughness.hpp"
#include "terrapsd/spectrum.hpp"
#include "terrapsd/synth.hpp"

using namespace terrapsd;

namespace {

SpectrumEstimate power_law_spectrum(double phi0, double w, int n = 112, double B = 0.008) {
  SpectrumEstimate spec;
  spec.band = make_waveband(n, B);
  spec.phi.resize(static_cast<std::size_t>(spec.band.size()));
  for (int k = 0; k < spec.band.size(); ++k) {
    spec.phi[k] = phi0 * std::pow(spec.band.omega[k], w);
  }
  return spec;
}

}  // namespace

TEST_CASE("exact power law is recovered with zero residual") {
  const SpectrumEstimate spec = power_law_spectrum(16e-6, -2.0);
  const ProfileRoughness fit = fit_power_law(spec);
  CHECK(fit.overall_energy == doctest::Approx(16e-6).epsilon(1e-12));
  CHECK(fit.waviness == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(fit.residual_rms < 1e-12);
  CHECK(fit.bins_used == 56);
  CHECK(fit.log_energy == doctest::Approx(std::log(16e-6)).epsilon(1e-12));
}

TEST_CASE("exact fit holds on any sub-band") {
  const SpectrumEstimate spec = power_law_spectrum(3e-4, -2.4);
  const ProfileRoughness fit = fit_power_law(spec, {.skip_low_bins = 1, .band_fraction = 0.75});
  CHECK(fit.overall_energy == doctest::Approx(3e-4).epsilon(1e-11));
  CHECK(fit.waviness == doctest::Approx(-2.4).epsilon(1e-12));
  CHECK(fit.bins_used == 41);
}

TEST_CASE("flat spectrum fits w = 0, R = level") {
  const SpectrumEstimate spec = power_law_spectrum(2.5e-5, 0.0);
  const ProfileRoughness fit = fit_power_law(spec);
  CHECK(fit.overall_energy == doctest::Approx(2.5e-5).epsilon(1e-12));
  CHECK(fit.waviness == doctest::Approx(0.0));
}

TEST_CASE("zero bins are dropped; fewer than 3 positive bins is unfittable") {
  SpectrumEstimate spec = power_law_spectrum(1e-5, -2.0);
  spec.phi[10] = 0.0;
  spec.phi[20] = 0.0;
  const ProfileRoughness fit = fit_power_law(spec);
  CHECK(fit.bins_used == 54);
  CHECK(fit.overall_energy == doctest::Approx(1e-5).epsilon(1e-10));

  for (std::size_t k = 2; k < spec.phi.size(); ++k) spec.phi[k] = 0.0;
  CHECK_THROWS_AS(fit_power_law(spec), UnfittableSpectrum);
}

TEST_CASE("amplitude scaling shifts b by 2 ln c and leaves w unchanged") {
  const int n = 112;
  const double B = 0.008;
  const SurfaceModel model{.phi0 = 16e-6, .waviness = -2.0};
  const std::vector<double> z = generate_profile(model, n, B, 99);
  std::vector<double> scaled = z;
  const double c = 2.5;
  for (double& v : scaled) v *= c;

  const ProfileRoughness a = fit_power_law(welch_psd(detrend(z, B), B));
  const ProfileRoughness b = fit_power_law(welch_psd(detrend(scaled, B), B));
  CHECK(b.waviness == doctest::Approx(a.waviness).epsilon(1e-12));
  CHECK(b.log_energy - a.log_energy == doctest::Approx(2.0 * std::log(c)).epsilon(1e-10));
}

TEST_CASE("aggregate_patch: two-profile arithmetic") {
  std::vector<ProfileRoughness> profiles(2);
  profiles[0].log_energy = -6.0;
  profiles[0].overall_energy = std::exp(-6.0);
  profiles[0].waviness = -2.0;
  profiles[1].log_energy = -8.0;
  profiles[1].overall_energy = std::exp(-8.0);
  profiles[1].waviness = -2.4;
  const Waveband band = make_waveband(112, 0.008);
  const PatchRoughness agg = aggregate_patch(profiles, band);
  CHECK(agg.overall_energy == doctest::Approx(9.1188e-4).epsilon(1e-4));
  CHECK(agg.waviness == doctest::Approx(-2.2).epsilon(1e-12));
  CHECK(agg.waviness_sigma == doctest::Approx(0.2828).epsilon(1e-3));
  CHECK(agg.overall_energy_sigma == doctest::Approx(1.2896e-3).epsilon(1e-4));
  CHECK(agg.profiles_used == 2);
  CHECK(agg.band.lower() == doctest::Approx(band.lower()));
}

TEST_CASE("aggregate of identical profiles has zero spread") {
  std::vector<ProfileRoughness> profiles(5);
  for (ProfileRoughness& p : profiles) {
    p.log_energy = -7.0;
    p.overall_energy = std::exp(-7.0);
    p.waviness = -2.1;
  }
  const PatchRoughness agg = aggregate_patch(profiles, make_waveband(112, 0.008));
  CHECK(agg.overall_energy == doctest::Approx(std::exp(-7.0)).epsilon(1e-12));
  CHECK(agg.overall_energy_sigma == doctest::Approx(0.0));
  CHECK(agg.waviness_sigma == doctest::Approx(0.0));
}

TEST_CASE("aggregate is permutation-invariant") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g(-7.0, 0.4);
  std::vector<ProfileRoughness> profiles(20);
  for (ProfileRoughness& p : profiles) {
    p.log_energy = g(rng);
    p.overall_energy = std::exp(p.log_energy);
    p.waviness = -2.0 + 0.1 * g(rng);
  }
  std::vector<ProfileRoughness> shuffled = profiles;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const Waveband band = make_waveband(112, 0.008);
  const PatchRoughness a = aggregate_patch(profiles, band);
  const PatchRoughness b = aggregate_patch(shuffled, band);
  CHECK(a.overall_energy == doctest::Approx(b.overall_energy).epsilon(1e-12));
  CHECK(a.overall_energy_sigma == doctest::Approx(b.overall_energy_sigma).epsilon(1e-12));
  CHECK(a.waviness == doctest::Approx(b.waviness).epsilon(1e-12));
  CHECK(a.waviness_sigma == doctest::Approx(b.waviness_sigma).epsilon(1e-12));
}

TEST_CASE("aggregate_patch needs at least two profiles") {
  std::vector<ProfileRoughness> one(1);
  CHECK_THROWS_AS(aggregate_patch(one, make_waveband(112, 0.008)), DegeneratePatch);
}

TEST_CASE("delta method: exp at mu=0, var=0.04") {
  const DeltaResult r = delta_method(0.0, 0.04, DeltaTransform::exp);
  CHECK(r.mean == doctest::Approx(1.0));
  CHECK(std::sqrt(r.variance) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("delta method: identity is a passthrough") {
  const DeltaResult r = delta_method(-3.2, 0.7, DeltaTransform::identity);
  CHECK(r.mean == -3.2);
  CHECK(r.variance == 0.7);
}

TEST_CASE("delta method: var_Y = mu_Y^2 var_X exactly for exp") {
  const DeltaResult r = delta_method(-7.0, 0.01, DeltaTransform::exp);
  CHECK(r.variance == doctest::Approx(r.mean * r.mean * 0.01).epsilon(1e-14));
}

TEST_CASE("delta method matches Monte-Carlo for small sigma") {
  const double mu = -7.0, sigma = 0.05;
  const DeltaResult d = delta_method(mu, sigma * sigma, DeltaTransform::exp);

  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g(mu, sigma);
  const int draws = 100000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double y = std::exp(g(rng));
    sum += y;
    sum2 += y * y;
  }
  const double mc_mean = sum / draws;
  const double mc_std = std::sqrt((sum2 - sum * mc_mean) / (draws - 1));
  CHECK(std::sqrt(d.variance) == doctest::Approx(mc_std).epsilon(0.01));
}

TEST_CASE("delta method rejects negative variance") {
  CHECK_THROWS_AS(delta_method(0.0, -1.0, DeltaTransform::exp), std::invalid_argument);
}

TEST_CASE("synthetic ISO-C profiles: 200-profile aggregate recovers the target") {
  const int n = 112;
  const double B = 0.008;
  const SurfaceModel model{.phi0 = 16e-6, .waviness = -2.0};
  const WelchConfig welch{.segments = 1, .overlap = 0.5, .window = Window::hann};
  const FitConfig fit{.skip_low_bins = 1, .band_fraction = 0.75};

  std::vector<ProfileRoughness> profiles;
  for (int p = 0; p < 200; ++p) {
    const std::vector<double> z = generate_profile(model, n, B, 7000 + p);
    profiles.push_back(fit_power_law(welch_psd(detrend(z, B), B, welch), fit));
  }
  const PatchRoughness agg = aggregate_patch(profiles, make_waveband(n, B));
  CHECK(agg.overall_energy == doctest::Approx(16e-6).epsilon(0.30));
  CHECK(std::abs(agg.waviness - (-2.0)) <= 0.15);
}
