#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "terrapsd/classify.hpp"
#include "terrapsd/geometry.hpp"
#include "terrapsd/synth.hpp"

namespace terrapsd {

// Whitespace- or comma-separated "x y z [r g b]" lines; '#' starts a comment.
PointCloud read_xyz(std::istream& in, Frame frame);
PointCloud read_xyz_file(const std::string& path, Frame frame);
void write_xyz(std::ostream& out, const PointCloud& cloud);

// ASCII PLY with float/double x, y, z vertex properties (binary rejected).
PointCloud read_ply(std::istream& in, Frame frame);
PointCloud read_ply_file(const std::string& path, Frame frame);
void write_ply(std::ostream& out, const PointCloud& cloud);

// Dispatches on extension: .ply, else XYZ text.
PointCloud read_cloud_file(const std::string& path, Frame frame);
void write_cloud_file(const std::string& path, const PointCloud& cloud);

struct PoseSample {
  double t = 0.0;
  double roll_deg = 0.0;
  double pitch_deg = 0.0;

  Attitude attitude() const;
};

// CSV with columns t, roll_deg, pitch_deg (header optional).
std::vector<PoseSample> read_pose_log(std::istream& in);
std::vector<PoseSample> read_pose_log_file(const std::string& path);

// Matches poses to patch indices: by index when counts agree, otherwise by
// nearest timestamp assuming patches span the log uniformly.
std::vector<Attitude> match_poses(const std::vector<PoseSample>& poses, int patch_count);

// Roughness map CSV:
// patch_index,x,y,R,sigma_R,w,sigma_w,omega1,omegaL,iso_band,label,defect
void write_map_csv(std::ostream& out, const std::vector<RoughnessMapCell>& cells);
std::vector<RoughnessMapCell> read_map_csv(std::istream& in);

// GeoJSON-like FeatureCollection of labeled patch centers.
void write_map_geojson(std::ostream& out, const std::vector<RoughnessMapCell>& cells);

// Plain-text traverse script: global key = value lines, then [segment] and
// [defect] sections.
TraverseScript parse_script(std::istream& in);
TraverseScript load_script(const std::string& path);

// Ground-truth sidecar rows for a generated traverse.
struct TruthRow {
  int patch_index = 0;
  double x = 0.0;
  double phi0 = 0.0;
  double waviness = 0.0;
  double roll_deg = 0.0;
  double pitch_deg = 0.0;
  bool defect = false;
};

void write_truth_csv(std::ostream& out, const std::vector<TruthRow>& rows);
std::vector<TruthRow> read_truth_csv(std::istream& in);

// One elevation value per line (meters); '#' comments allowed.
std::vector<double> read_profile(std::istream& in);
std::vector<double> read_profile_file(const std::string& path);

// Fixed-precision number formatting used for all CSV output (determinism).
std::string format_number(double v);

}  // namespace terrapsd
