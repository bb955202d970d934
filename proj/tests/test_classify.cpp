#include <cmath>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "terrapsd/classify.hpp"
#include "terrapsd/errors.hpp"

using namespace terrapsd;

namespace {
constexpr double kOmega1 = 2.0 * std::numbers::pi / 0.9;
constexpr double kOmegaL = std::numbers::pi / 0.008;
}  // namespace

TEST_CASE("iso_classify: exact rows") {
  const IsoClassification c = iso_classify(16e-6);
  CHECK(c.nearest == IsoBand::C);
  CHECK_FALSE(c.bracket.has_value());
  CHECK_FALSE(c.below_band);
  CHECK(c.to_string() == "C");
}

TEST_CASE("iso_classify: ploughed-terrain mean lies between F and G") {
  const IsoClassification c = iso_classify(1734e-6);
  CHECK(c.nearest == IsoBand::F);
  REQUIRE(c.bracket.has_value());
  CHECK(c.bracket->first == IsoBand::F);
  CHECK(c.bracket->second == IsoBand::G);
  CHECK(c.to_string() == "F-G");
}

TEST_CASE("iso_classify: clamps below the ladder") {
  const IsoClassification c = iso_classify(1e-9);
  CHECK(c.nearest == IsoBand::A);
  CHECK(c.below_band);
  CHECK(c.to_string() == "<A");

  const IsoClassification hi = iso_classify(1.0);
  CHECK(hi.nearest == IsoBand::H);
  CHECK(hi.above_band);
}

TEST_CASE("iso_classify is monotone in R") {
  IsoBand prev = IsoBand::A;
  for (double r = 0.5e-6; r < 0.05; r *= 1.3) {
    const IsoBand band = iso_classify(r).nearest;
    CHECK(static_cast<int>(band) >= static_cast<int>(prev));
    prev = band;
  }
  CHECK_THROWS_AS(iso_classify(0.0), std::invalid_argument);
  CHECK_THROWS_AS(iso_classify(-1e-6), std::invalid_argument);
}

TEST_CASE("band_rms reproduces Table 1 rows A and E within 2%") {
  CHECK(band_rms(1e-6, kOmega1, kOmegaL) == doctest::Approx(0.37e-3).epsilon(0.02));
  CHECK(band_rms(1e-6, kOmega1, kOmegaL) == doctest::Approx(0.3751e-3).epsilon(1e-3));
  CHECK(band_rms(256e-6, kOmega1, kOmegaL) == doctest::Approx(5.99e-3).epsilon(0.02));
  CHECK(band_rms(0.0, kOmega1, kOmegaL) == 0.0);
  CHECK_THROWS_AS(band_rms(1e-6, -1.0, kOmegaL), std::invalid_argument);
  CHECK_THROWS_AS(band_rms(1e-6, kOmegaL, kOmega1), std::invalid_argument);
}

TEST_CASE("band_rms doubles between consecutive ISO rows") {
  for (int i = 0; i + 1 < 8; ++i) {
    const double a = band_rms(kIsoPhi0[i], kOmega1, kOmegaL);
    const double b = band_rms(kIsoPhi0[i + 1], kOmega1, kOmegaL);
    CHECK(b / a == doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("sensitivity floor: 2.22 mm flat rms falls between ISO C and D") {
  const double phi0 = sensitivity_floor(2.22e-3, kOmega1, kOmegaL);
  CHECK(phi0 == doctest::Approx(35.0e-6).epsilon(0.01));
  CHECK(phi0 > 16e-6);
  CHECK(phi0 < 64e-6);
  const IsoClassification c = iso_classify(phi0);
  REQUIRE(c.bracket.has_value());
  CHECK(c.bracket->first == IsoBand::C);
  CHECK(c.bracket->second == IsoBand::D);
}

TEST_CASE("sensitivity floor: zero rms and quadratic scaling") {
  CHECK(sensitivity_floor(0.0, kOmega1, kOmegaL) == 0.0);
  const double a = sensitivity_floor(1e-3, kOmega1, kOmegaL);
  const double b = sensitivity_floor(2e-3, kOmega1, kOmegaL);
  CHECK(b / a == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("round trip: each row's rms maps back to its own row") {
  for (int i = 0; i < 8; ++i) {
    const double rms = band_rms(kIsoPhi0[i], kOmega1, kOmegaL);
    const double phi0 = sensitivity_floor(rms, kOmega1, kOmegaL);
    CHECK(phi0 == doctest::Approx(kIsoPhi0[i]).epsilon(1e-12));
    CHECK(iso_classify(phi0).nearest == static_cast<IsoBand>(i));
  }
}

TEST_CASE("semantic labels with default thresholds") {
  CHECK(semantic_label(1e-6) == RoughnessLabel::low);
  CHECK(semantic_label(393e-6) == RoughnessLabel::medium);
  CHECK(semantic_label(1734e-6) == RoughnessLabel::high);
}

TEST_CASE("semantic label is monotone in R") {
  int prev = 0;
  for (double r = 1e-6; r < 0.01; r *= 1.5) {
    const int label = static_cast<int>(semantic_label(r));
    CHECK(label >= prev);
    prev = label;
  }
}

TEST_CASE("defect detection: constant sequence has no flags") {
  const std::vector<double> seq(20, 16e-6);
  for (bool f : detect_defects(seq)) CHECK_FALSE(f);
}

TEST_CASE("defect detection: single spike is the unique flag") {
  std::vector<double> seq(20, 16e-6);
  seq[8] = 200e-6;
  const std::vector<bool> flags = detect_defects(seq);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    CHECK(flags[i] == (i == 8));
  }
}

TEST_CASE("defect flags are invariant under uniform scaling") {
  std::vector<double> seq = {16e-6, 17e-6, 15e-6, 80e-6, 16e-6, 18e-6, 15e-6, 16e-6, 17e-6, 14e-6};
  std::vector<double> scaled = seq;
  for (double& v : scaled) v *= 1000.0;
  CHECK(detect_defects(seq) == detect_defects(scaled));
}

TEST_CASE("defect detection needs a full window") {
  const std::vector<double> seq(5, 1e-5);
  CHECK_THROWS_AS(detect_defects(seq), InsufficientData);
}
