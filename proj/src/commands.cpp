#include "terrapsd/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "terrapsd/errors.hpp"
#include "terrapsd/synth.hpp"

namespace terrapsd::cli {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<std::string> files;
  for (const std::string& input : inputs) {
    if (fs::is_directory(input)) {
      for (const auto& entry : fs::directory_iterator(input)) {
        if (!entry.is_regular_file()) continue;
        const std::string ext = entry.path().extension().string();
        if (ext == ".xyz" || ext == ".ply" || ext == ".txt") {
          files.push_back(entry.path().string());
        }
      }
    } else {
      files.push_back(input);
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

Window parse_window(const std::string& name) {
  if (name == "rect" || name == "rectangular") return Window::rectangular;
  if (name == "hann") return Window::hann;
  throw std::invalid_argument("unknown window: " + name);
}

}  // namespace

void apply_config_file(const std::string& path, PipelineConfig& config) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::string key, eq, value;
    std::istringstream ss(line);
    if (!(ss >> key)) continue;
    const std::size_t pos = key.find('=');
    if (pos != std::string::npos) {
      value = key.substr(pos + 1);
      key = key.substr(0, pos);
      if (value.empty()) ss >> value;
    } else {
      ss >> eq >> value;
      if (eq != "=") throw IoError(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    try {
      if (key == "length") config.patch.length = std::stod(value);
      else if (key == "width") config.patch.width = std::stod(value);
      else if (key == "step") config.patch.step = std::stod(value);
      else if (key == "origin_x") config.patch.origin_x = std::stod(value);
      else if (key == "origin_y") config.patch.origin_y = std::stod(value);
      else if (key == "segments") config.welch.segments = std::stoi(value);
      else if (key == "overlap") config.welch.overlap = std::stod(value);
      else if (key == "window") config.welch.window = parse_window(value);
      else if (key == "skip_low_bins") config.fit.skip_low_bins = std::stoi(value);
      else if (key == "band_fraction") config.fit.band_fraction = std::stod(value);
      else if (key == "filter_enabled") config.filter.enabled = value != "0" && value != "false";
      else if (key == "filter_window") config.filter.window = std::stod(value);
      else if (key == "filter_k_sigma") config.filter.k_sigma = std::stod(value);
      else if (key == "filter_max_removal") config.filter.max_removal = std::stod(value);
      else if (key == "label_low") config.labels.low_max = std::stod(value);
      else if (key == "label_high") config.labels.high_min = std::stod(value);
      else if (key == "defect_window") config.defects.window = std::stoi(value);
      else if (key == "defect_factor") config.defects.factor = std::stod(value);
      else if (key == "row_invalid_max") config.row_invalid_max = std::stod(value);
      else if (key == "stride") config.stride = std::stod(value);
      else if (key == "threads") config.threads = std::stoi(value);
      else throw IoError(path + ":" + std::to_string(lineno) + ": unknown key " + key);
    } catch (const std::invalid_argument&) {
      throw IoError(path + ":" + std::to_string(lineno) + ": bad value for " + key);
    }
  }
}

int run_process(const ProcessOptions& options, std::ostream& out, std::ostream& log) {
  PipelineConfig config = options.config;
  if (!options.config_file.empty()) apply_config_file(options.config_file, config);
  config.validate();

  const std::vector<std::string> files = expand_inputs(options.inputs);
  if (files.empty()) {
    log << "error: no input clouds found\n";
    return 1;
  }

  std::vector<std::optional<Attitude>> attitudes;
  if (!options.pose_log.empty()) {
    const std::vector<PoseSample> poses = read_pose_log_file(options.pose_log);
    if (poses.empty()) {
      log << "error: pose log " << options.pose_log << " is empty\n";
      return 1;
    }
    const std::vector<Attitude> matched = match_poses(poses, static_cast<int>(files.size()));
    attitudes.assign(matched.begin(), matched.end());
  } else {
    log << "warning: no pose log; processing uncompensated (vehicle frame taken as world)\n";
  }

  std::vector<PointCloud> clouds;
  clouds.reserve(files.size());
  for (const std::string& f : files) {
    clouds.push_back(read_cloud_file(f, attitudes.empty() ? Frame::world : Frame::vehicle));
  }

  const ProcessResult result = process_traverse(clouds, attitudes, config);

  write_drops(log, result.drops);

  {
    std::ofstream map(options.output);
    if (!map) throw IoError("cannot write " + options.output);
    write_map_csv(map, result.cells);
  }
  if (!options.geojson.empty()) {
    std::ofstream gj(options.geojson);
    if (!gj) throw IoError("cannot write " + options.geojson);
    write_map_geojson(gj, result.cells);
  }
  if (!options.scatter_dir.empty()) {
    fs::create_directories(options.scatter_dir);
    for (std::size_t i = 0; i < result.cells.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "scatter_%04d.csv", result.cells[i].patch_index);
      std::ofstream sc(fs::path(options.scatter_dir) / name);
      sc << "w,ln_R\n";
      for (const ProfileRoughness& p : result.scatter[i]) {
        sc << format_number(p.waviness) << ',' << format_number(p.log_energy) << '\n';
      }
      sc << "# aggregate," << format_number(result.cells[i].roughness.waviness) << ','
         << format_number(std::log(result.cells[i].roughness.overall_energy)) << '\n';
    }
  }

  write_summary(out, result.summary);
  return result.cells.empty() ? 1 : 0;
}

int run_synth(const SynthOptions& options, std::ostream& log) {
  TraverseScript script = load_script(options.script);
  if (options.seed) script.seed = *options.seed;
  fs::create_directories(options.out_dir);

  const std::vector<TraversePatch> patches = generate_traverse(script);

  std::vector<TruthRow> truth;
  std::vector<PoseSample> poses;
  truth.reserve(patches.size());
  for (std::size_t i = 0; i < patches.size(); ++i) {
    const TraversePatch& tp = patches[i];
    char name[32];
    std::snprintf(name, sizeof(name), "cloud_%04zu.%s", i, options.ply ? "ply" : "xyz");
    write_cloud_file((fs::path(options.out_dir) / name).string(), tp.cloud);

    TruthRow row;
    row.patch_index = static_cast<int>(i);
    row.x = tp.course_x;
    row.phi0 = tp.surface.phi0;
    row.waviness = tp.surface.waviness;
    row.roll_deg = tp.attitude.roll * 180.0 / std::numbers::pi;
    row.pitch_deg = tp.attitude.pitch * 180.0 / std::numbers::pi;
    row.defect = tp.has_defect;
    truth.push_back(row);
    poses.push_back({static_cast<double>(i), row.roll_deg, row.pitch_deg});
  }

  {
    std::ofstream tf(fs::path(options.out_dir) / "truth.csv");
    write_truth_csv(tf, truth);
  }
  {
    std::ofstream pf(fs::path(options.out_dir) / "poses.csv");
    pf << "t,roll_deg,pitch_deg\n";
    for (const PoseSample& p : poses) {
      pf << format_number(p.t) << ',' << format_number(p.roll_deg) << ','
         << format_number(p.pitch_deg) << '\n';
    }
  }
  log << "wrote " << patches.size() << " clouds + truth.csv + poses.csv to " << options.out_dir
      << '\n';
  return 0;
}

int run_table(double length, double step, std::ostream& out) {
  if (!(length > 2.0 * step) || !(step > 0.0)) {
    throw std::invalid_argument("table: need length > 2*step > 0");
  }
  // The discrete band of the gridded profile: L truncated to an even cell count.
  PatchSpec spec;
  spec.length = length;
  spec.width = length;
  spec.step = step;
  spec.validate();
  const double omega1 = 2.0 * std::numbers::pi / spec.truncated_length();
  const double omega_l = std::numbers::pi / step;
  out << "waveband: omega1 = " << format_number(omega1) << " rad/m, omegaL = "
      << format_number(omega_l) << " rad/m (L = " << format_number(spec.truncated_length())
      << " m = " << spec.cols() << " x " << format_number(step) << " m)\n";
  out << "ISO  phi(Omega0) [1e-6 m^3/rad]  rms [mm]\n";
  for (int i = 0; i < 8; ++i) {
    const IsoBand band = static_cast<IsoBand>(i);
    const double rms = band_rms(iso_phi0(band), omega1, omega_l);
    char line[80];
    std::snprintf(line, sizeof(line), "%c    %8.0f                  %7.2f\n", iso_letter(band),
                  iso_phi0(band) * 1e6, rms * 1e3);
    out << line;
  }
  return 0;
}

int run_psd_dump(const PsdDumpOptions& options, std::ostream& out, std::ostream& log) {
  const std::vector<double> raw = read_profile_file(options.input);
  std::vector<double> profile = raw;
  if (profile.size() % 2 != 0 && profile.size() > 8) profile.pop_back();
  const std::vector<double> flat = detrend(profile, options.step);
  const SpectrumEstimate spec = welch_psd(flat, options.step, options.welch);

  std::ostream* dst = &out;
  std::ofstream file;
  if (!options.output.empty()) {
    file.open(options.output);
    if (!file) throw IoError("cannot write " + options.output);
    dst = &file;
  }
  (*dst) << "omega,phi\n";
  for (int k = 0; k < spec.band.size(); ++k) {
    (*dst) << format_number(spec.band.omega[k]) << ',' << format_number(spec.phi[k]) << '\n';
  }

  const ProfileRoughness fit = fit_power_law(spec, options.fit);
  log << "fit: R = " << format_number(fit.overall_energy) << " m^3/rad, w = "
      << format_number(fit.waviness) << ", residual rms (log) = "
      << format_number(fit.residual_rms) << ", bins used = " << fit.bins_used << '\n';
  return 0;
}

}  // namespace terrapsd::cli
