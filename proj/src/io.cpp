#include "terrapsd/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "terrapsd/errors.hpp"

namespace terrapsd {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!cur.empty()) {
        out.push_back(cur);
        cur.clear();
      }
      // commas also delimit empty fields; treat runs as one separator
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

bool parse_double(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  if (s.size() < suffix.size()) return false;
  std::string tail = s.substr(s.size() - suffix.size());
  std::transform(tail.begin(), tail.end(), tail.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return tail == suffix;
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

PointCloud read_xyz(std::istream& in, Frame frame) {
  PointCloud cloud;
  cloud.frame = frame;
  std::string line;
  std::size_t lineno = 0;
  bool any_color = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::vector<std::string> f = split_fields(t);
    if (f.size() != 3 && f.size() != 6) {
      throw IoError("xyz line " + std::to_string(lineno) + ": expected 3 or 6 fields");
    }
    Vec3 p;
    if (!parse_double(f[0], p.x) || !parse_double(f[1], p.y) || !parse_double(f[2], p.z) ||
        !std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
      throw IoError("xyz line " + std::to_string(lineno) + ": bad coordinate");
    }
    cloud.points.push_back(p);
    if (f.size() == 6) {
      double r, g, b;
      if (!parse_double(f[3], r) || !parse_double(f[4], g) || !parse_double(f[5], b)) {
        throw IoError("xyz line " + std::to_string(lineno) + ": bad color");
      }
      cloud.colors.push_back({static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0)),
                              static_cast<std::uint8_t>(std::clamp(g, 0.0, 255.0)),
                              static_cast<std::uint8_t>(std::clamp(b, 0.0, 255.0))});
      any_color = true;
    } else if (any_color) {
      throw IoError("xyz line " + std::to_string(lineno) + ": inconsistent color columns");
    }
  }
  return cloud;
}

void write_xyz(std::ostream& out, const PointCloud& cloud) {
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const Vec3& p = cloud.points[i];
    out << format_number(p.x) << ' ' << format_number(p.y) << ' ' << format_number(p.z);
    if (cloud.has_colors()) {
      const Rgb& c = cloud.colors[i];
      out << ' ' << static_cast<int>(c[0]) << ' ' << static_cast<int>(c[1]) << ' '
          << static_cast<int>(c[2]);
    }
    out << '\n';
  }
}

PointCloud read_ply(std::istream& in, Frame frame) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "ply") {
    throw IoError("ply: missing magic line");
  }
  std::size_t vertex_count = 0;
  int x_idx = -1, y_idx = -1, z_idx = -1;
  int r_idx = -1, g_idx = -1, b_idx = -1;
  int prop_idx = 0;
  bool in_vertex = false;
  bool header_done = false;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t == "end_header") {
      header_done = true;
      break;
    }
    std::istringstream ss(t);
    std::string tok;
    ss >> tok;
    if (tok == "format") {
      std::string fmt;
      ss >> fmt;
      if (fmt != "ascii") throw IoError("ply: only ascii format supported");
    } else if (tok == "element") {
      std::string name;
      std::size_t count;
      ss >> name >> count;
      in_vertex = (name == "vertex");
      if (in_vertex) vertex_count = count;
      prop_idx = 0;
    } else if (tok == "property" && in_vertex) {
      std::string type, name;
      ss >> type >> name;
      if (type == "list") throw IoError("ply: list property in vertex element unsupported");
      if (name == "x") x_idx = prop_idx;
      if (name == "y") y_idx = prop_idx;
      if (name == "z") z_idx = prop_idx;
      if (name == "red") r_idx = prop_idx;
      if (name == "green") g_idx = prop_idx;
      if (name == "blue") b_idx = prop_idx;
      ++prop_idx;
    }
  }
  if (!header_done) throw IoError("ply: truncated header");
  if (x_idx < 0 || y_idx < 0 || z_idx < 0) throw IoError("ply: vertex needs x, y, z properties");

  PointCloud cloud;
  cloud.frame = frame;
  cloud.points.reserve(vertex_count);
  const bool with_color = r_idx >= 0 && g_idx >= 0 && b_idx >= 0;
  for (std::size_t i = 0; i < vertex_count; ++i) {
    if (!std::getline(in, line)) throw IoError("ply: truncated vertex data");
    const std::vector<std::string> f = split_fields(trim(line));
    if (static_cast<int>(f.size()) < prop_idx) {
      throw IoError("ply: vertex row " + std::to_string(i) + " too short");
    }
    Vec3 p;
    if (!parse_double(f[x_idx], p.x) || !parse_double(f[y_idx], p.y) ||
        !parse_double(f[z_idx], p.z)) {
      throw IoError("ply: bad vertex row " + std::to_string(i));
    }
    cloud.points.push_back(p);
    if (with_color) {
      double r, g, b;
      if (parse_double(f[r_idx], r) && parse_double(f[g_idx], g) && parse_double(f[b_idx], b)) {
        cloud.colors.push_back({static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0)),
                                static_cast<std::uint8_t>(std::clamp(g, 0.0, 255.0)),
                                static_cast<std::uint8_t>(std::clamp(b, 0.0, 255.0))});
      }
    }
  }
  if (cloud.colors.size() != cloud.points.size()) cloud.colors.clear();
  return cloud;
}

void write_ply(std::ostream& out, const PointCloud& cloud) {
  out << "ply\nformat ascii 1.0\n";
  out << "element vertex " << cloud.points.size() << '\n';
  out << "property float x\nproperty float y\nproperty float z\n";
  if (cloud.has_colors()) {
    out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  }
  out << "end_header\n";
  write_xyz(out, cloud);
}

PointCloud read_xyz_file(const std::string& path, Frame frame) {
  auto in = open_input(path);
  return read_xyz(in, frame);
}

PointCloud read_ply_file(const std::string& path, Frame frame) {
  auto in = open_input(path);
  return read_ply(in, frame);
}

PointCloud read_cloud_file(const std::string& path, Frame frame) {
  return ends_with(path, ".ply") ? read_ply_file(path, frame) : read_xyz_file(path, frame);
}

void write_cloud_file(const std::string& path, const PointCloud& cloud) {
  auto out = open_output(path);
  if (ends_with(path, ".ply")) {
    write_ply(out, cloud);
  } else {
    write_xyz(out, cloud);
  }
}

Attitude PoseSample::attitude() const {
  return {roll_deg * std::numbers::pi / 180.0, pitch_deg * std::numbers::pi / 180.0};
}

std::vector<PoseSample> read_pose_log(std::istream& in) {
  std::vector<PoseSample> poses;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::vector<std::string> f = split_fields(t);
    double v;
    if (!f.empty() && !parse_double(f[0], v)) continue;  // header row
    if (f.size() < 3) throw IoError("pose log line " + std::to_string(lineno) + ": need t, roll_deg, pitch_deg");
    PoseSample p;
    if (!parse_double(f[0], p.t) || !parse_double(f[1], p.roll_deg) ||
        !parse_double(f[2], p.pitch_deg)) {
      throw IoError("pose log line " + std::to_string(lineno) + ": bad value");
    }
    poses.push_back(p);
  }
  return poses;
}

std::vector<PoseSample> read_pose_log_file(const std::string& path) {
  auto in = open_input(path);
  return read_pose_log(in);
}

std::vector<Attitude> match_poses(const std::vector<PoseSample>& poses, int patch_count) {
  std::vector<Attitude> out(static_cast<std::size_t>(patch_count));
  if (poses.empty() || patch_count == 0) return out;
  if (static_cast<int>(poses.size()) == patch_count) {
    for (int i = 0; i < patch_count; ++i) out[i] = poses[i].attitude();
    return out;
  }
  // Nearest timestamp, assuming patches span the log uniformly.
  const double t0 = poses.front().t;
  const double t1 = poses.back().t;
  for (int i = 0; i < patch_count; ++i) {
    const double t = patch_count > 1 ? t0 + (t1 - t0) * i / (patch_count - 1) : t0;
    std::size_t best = 0;
    double best_dt = std::abs(poses[0].t - t);
    for (std::size_t j = 1; j < poses.size(); ++j) {
      const double dt = std::abs(poses[j].t - t);
      if (dt < best_dt) {
        best_dt = dt;
        best = j;
      }
    }
    out[i] = poses[best].attitude();
  }
  return out;
}

void write_map_csv(std::ostream& out, const std::vector<RoughnessMapCell>& cells) {
  out << "patch_index,x,y,R,sigma_R,w,sigma_w,omega1,omegaL,iso_band,label,defect\n";
  for (const RoughnessMapCell& c : cells) {
    out << c.patch_index << ',' << format_number(c.x) << ',' << format_number(c.y) << ','
        << format_number(c.roughness.overall_energy) << ','
        << format_number(c.roughness.overall_energy_sigma) << ','
        << format_number(c.roughness.waviness) << ','
        << format_number(c.roughness.waviness_sigma) << ','
        << format_number(c.roughness.band.lower()) << ','
        << format_number(c.roughness.band.upper()) << ',' << c.iso.to_string() << ','
        << label_name(c.label) << ',' << (c.defect ? 1 : 0) << '\n';
  }
}

std::vector<RoughnessMapCell> read_map_csv(std::istream& in) {
  std::vector<RoughnessMapCell> cells;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (first) {
      first = false;
      if (t.rfind("patch_index", 0) == 0) continue;
    }
    std::vector<std::string> f;
    std::string cur;
    for (char ch : t) {
      if (ch == ',') {
        f.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
    f.push_back(cur);
    if (f.size() != 12) throw IoError("map csv: expected 12 fields, got " + std::to_string(f.size()));
    RoughnessMapCell c;
    c.patch_index = std::stoi(f[0]);
    parse_double(f[1], c.x);
    parse_double(f[2], c.y);
    parse_double(f[3], c.roughness.overall_energy);
    parse_double(f[4], c.roughness.overall_energy_sigma);
    parse_double(f[5], c.roughness.waviness);
    parse_double(f[6], c.roughness.waviness_sigma);
    double om1 = 0.0, oml = 0.0;
    parse_double(f[7], om1);
    parse_double(f[8], oml);
    c.roughness.band.omega = {om1, oml};
    c.roughness.band.delta = om1;
    c.iso = iso_classify(c.roughness.overall_energy);
    c.label = f[10] == "high" ? RoughnessLabel::high
                              : (f[10] == "medium" ? RoughnessLabel::medium : RoughnessLabel::low);
    c.defect = f[11] == "1";
    cells.push_back(c);
  }
  return cells;
}

void write_map_geojson(std::ostream& out, const std::vector<RoughnessMapCell>& cells) {
  nlohmann::json features = nlohmann::json::array();
  for (const RoughnessMapCell& c : cells) {
    nlohmann::json f;
    f["type"] = "Feature";
    f["geometry"] = {{"type", "Point"}, {"coordinates", {c.x, c.y}}};
    f["properties"] = {{"patch_index", c.patch_index},
                       {"R", c.roughness.overall_energy},
                       {"sigma_R", c.roughness.overall_energy_sigma},
                       {"w", c.roughness.waviness},
                       {"sigma_w", c.roughness.waviness_sigma},
                       {"iso_band", c.iso.to_string()},
                       {"label", label_name(c.label)},
                       {"defect", c.defect}};
    features.push_back(std::move(f));
  }
  nlohmann::json doc;
  doc["type"] = "FeatureCollection";
  doc["features"] = std::move(features);
  out << doc.dump(2) << '\n';
}

namespace {

double require_double(const std::string& key, const std::string& value) {
  double v;
  if (!parse_double(value, v)) throw IoError("script: bad numeric value for " + key);
  return v;
}

void apply_angle(AngleRange& range, const std::string& key, const std::string& value) {
  // "x" for a constant, or "lo:hi" for a per-patch uniform draw
  const std::size_t colon = value.find(':');
  if (colon == std::string::npos) {
    range.lo_deg = range.hi_deg = require_double(key, value);
  } else {
    range.lo_deg = require_double(key, value.substr(0, colon));
    range.hi_deg = require_double(key, value.substr(colon + 1));
  }
}

}  // namespace

TraverseScript parse_script(std::istream& in) {
  TraverseScript script;
  script.noise_sigma = 0.004;
  std::string line;
  std::size_t lineno = 0;
  enum class Section { global, segment, defect };
  Section section = Section::global;

  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    const std::size_t hash = t.find('#');
    if (hash != std::string::npos) t = trim(t.substr(0, hash));
    if (t.empty()) continue;
    if (t == "[segment]") {
      script.segments.emplace_back();
      section = Section::segment;
      continue;
    }
    if (t == "[defect]") {
      script.defects.emplace_back();
      section = Section::defect;
      continue;
    }
    if (t.front() == '[') throw IoError("script line " + std::to_string(lineno) + ": unknown section " + t);

    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw IoError("script line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));

    if (section == Section::global) {
      if (key == "patch_length") script.patch.length = require_double(key, value);
      else if (key == "patch_width") script.patch.width = require_double(key, value);
      else if (key == "grid_step") script.patch.step = require_double(key, value);
      else if (key == "origin_x") script.patch.origin_x = require_double(key, value);
      else if (key == "origin_y") script.patch.origin_y = require_double(key, value);
      else if (key == "noise_sigma") script.noise_sigma = require_double(key, value);
      else if (key == "points_per_cell") script.points_per_cell = static_cast<int>(require_double(key, value));
      else if (key == "margin_cells") script.margin_cells = static_cast<int>(require_double(key, value));
      else if (key == "stride") script.stride = require_double(key, value);
      else if (key == "seed") script.seed = static_cast<std::uint64_t>(require_double(key, value));
      else throw IoError("script line " + std::to_string(lineno) + ": unknown key " + key);
    } else if (section == Section::segment) {
      TraverseSegment& seg = script.segments.back();
      if (key == "phi0") seg.surface.phi0 = require_double(key, value);
      else if (key == "waviness") seg.surface.waviness = require_double(key, value);
      else if (key == "lateral_cycles") seg.surface.lateral_cycles = require_double(key, value);
      else if (key == "patches") seg.patches = static_cast<int>(require_double(key, value));
      else if (key == "roll_deg") apply_angle(seg.roll, key, value);
      else if (key == "pitch_deg") apply_angle(seg.pitch, key, value);
      else throw IoError("script line " + std::to_string(lineno) + ": unknown segment key " + key);
    } else {
      DefectSpec& d = script.defects.back();
      if (key == "index") d.index = static_cast<int>(require_double(key, value));
      else if (key == "height") d.height = require_double(key, value);
      else if (key == "extent") d.extent = require_double(key, value);
      else throw IoError("script line " + std::to_string(lineno) + ": unknown defect key " + key);
    }
  }
  script.validate();
  return script;
}

TraverseScript load_script(const std::string& path) {
  auto in = open_input(path);
  try {
    return parse_script(in);
  } catch (const std::invalid_argument& e) {
    throw IoError(path + ": " + e.what());
  }
}

void write_truth_csv(std::ostream& out, const std::vector<TruthRow>& rows) {
  out << "patch_index,x,phi0,waviness,roll_deg,pitch_deg,defect\n";
  for (const TruthRow& r : rows) {
    out << r.patch_index << ',' << format_number(r.x) << ',' << format_number(r.phi0) << ','
        << format_number(r.waviness) << ',' << format_number(r.roll_deg) << ','
        << format_number(r.pitch_deg) << ',' << (r.defect ? 1 : 0) << '\n';
  }
}

std::vector<TruthRow> read_truth_csv(std::istream& in) {
  std::vector<TruthRow> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (first) {
      first = false;
      if (t.rfind("patch_index", 0) == 0) continue;
    }
    const std::vector<std::string> f = split_fields(t);
    if (f.size() != 7) throw IoError("truth csv: expected 7 fields");
    TruthRow r;
    r.patch_index = std::stoi(f[0]);
    parse_double(f[1], r.x);
    parse_double(f[2], r.phi0);
    parse_double(f[3], r.waviness);
    parse_double(f[4], r.roll_deg);
    parse_double(f[5], r.pitch_deg);
    r.defect = f[6] == "1";
    rows.push_back(r);
  }
  return rows;
}

std::vector<double> read_profile(std::istream& in) {
  std::vector<double> z;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    double v;
    if (!parse_double(t, v)) throw IoError("profile line " + std::to_string(lineno) + ": bad value");
    z.push_back(v);
  }
  return z;
}

std::vector<double> read_profile_file(const std::string& path) {
  auto in = open_input(path);
  return read_profile(in);
}

}  // namespace terrapsd
