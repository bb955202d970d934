#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "terrapsd/pipeline.hpp"

namespace terrapsd::cli {

struct ProcessOptions {
  std::vector<std::string> inputs;  // cloud files, or a single directory
  std::string pose_log;             // optional
  std::string config_file;          // optional key=value overrides
  std::string output = "roughness_map.csv";
  std::string geojson;              // optional export
  std::string scatter_dir;          // optional per-patch (w, ln R) dumps
  PipelineConfig config;
};

struct SynthOptions {
  std::string script;
  std::string out_dir;
  std::optional<std::uint64_t> seed;  // overrides the script seed
  bool ply = false;                   // write .ply instead of .xyz
};

struct PsdDumpOptions {
  std::string input;
  double step = 0.008;
  std::string output;  // (omega, phi) CSV; empty = stdout
  WelchConfig welch;
  FitConfig fit;
};

// Applies key = value overrides from a config file onto a PipelineConfig.
void apply_config_file(const std::string& path, PipelineConfig& config);

int run_process(const ProcessOptions& options, std::ostream& out, std::ostream& log);
int run_synth(const SynthOptions& options, std::ostream& log);
int run_table(double length, double step, std::ostream& out);
int run_psd_dump(const PsdDumpOptions& options, std::ostream& out, std::ostream& log);

}  // namespace terrapsd::cli
