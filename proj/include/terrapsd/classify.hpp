#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "terrapsd/roughness.hpp"

namespace terrapsd {

enum class IsoBand { A, B, C, D, E, F, G, H };

// phi(Omega_0) of the eight ISO 8608 reference rows, m^3/rad.
constexpr std::array<double, 8> kIsoPhi0 = {1e-6,   4e-6,    16e-6,   64e-6,
                                            256e-6, 1024e-6, 4096e-6, 16384e-6};

inline double iso_phi0(IsoBand band) { return kIsoPhi0[static_cast<int>(band)]; }
char iso_letter(IsoBand band);

struct IsoClassification {
  IsoBand nearest = IsoBand::A;  // nearest row in log space
  // Bracketing rows when R lies strictly between two rows.
  std::optional<std::pair<IsoBand, IsoBand>> bracket;
  bool below_band = false;  // R below row A (clamped)
  bool above_band = false;  // R above row H (clamped)

  std::string to_string() const;
};

IsoClassification iso_classify(double overall_energy);

// Band-limited rms of the w = -2 reference profile:
// rms = sqrt(phi0 * Omega_0^2 * (1/Omega_1 - 1/Omega_l)).
double band_rms(double phi0, double omega1, double omega_l, double omega0 = 1.0);

// Inverse relation: the overall energy a flat-surface rms corresponds to.
double sensitivity_floor(double rms, double omega1, double omega_l, double omega0 = 1.0);

enum class RoughnessLabel { low, medium, high };

const char* label_name(RoughnessLabel label);

struct SemanticThresholds {
  double low_max = 64e-6;    // low when R < low_max
  double high_min = 1024e-6; // high when R > high_min
};

RoughnessLabel semantic_label(double overall_energy, const SemanticThresholds& thresholds = {});

struct DefectConfig {
  int window = 7;      // rolling median window, patches
  double factor = 4.0; // flag when R exceeds factor * rolling median
};

// Flags isolated spikes in an ordered R_hat sequence against the rolling median.
std::vector<bool> detect_defects(std::span<const double> overall_energy,
                                 const DefectConfig& config = {});
std::vector<bool> detect_defects(std::span<const PatchRoughness> sequence,
                                 const DefectConfig& config = {});

// Geo-positioned patch result for the roughness map.
struct RoughnessMapCell {
  int patch_index = 0;
  double x = 0.0;  // world coordinates of the patch center
  double y = 0.0;
  PatchRoughness roughness;
  IsoClassification iso;
  RoughnessLabel label = RoughnessLabel::low;
  bool defect = false;
};

}  // namespace terrapsd
