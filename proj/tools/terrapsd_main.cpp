#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "terrapsd/commands.hpp"

namespace {

using terrapsd::Window;

void add_pipeline_flags(CLI::App* cmd, terrapsd::PipelineConfig& config, std::string& window) {
  cmd->add_option("--length", config.patch.length, "patch length along travel, m");
  cmd->add_option("--width", config.patch.width, "patch width, m");
  cmd->add_option("--step", config.patch.step, "grid step B, m");
  cmd->add_option("--origin-x", config.patch.origin_x, "patch window origin x, m");
  cmd->add_option("--origin-y", config.patch.origin_y, "patch window origin y, m");
  cmd->add_option("--segments", config.welch.segments, "Welch segments");
  cmd->add_option("--overlap", config.welch.overlap, "Welch segment overlap fraction");
  cmd->add_option("--window", window, "Welch window: rect | hann");
  cmd->add_option("--skip-low-bins", config.fit.skip_low_bins, "lowest band bins excluded from fit");
  cmd->add_option("--band-fraction", config.fit.band_fraction, "upper fit limit as band fraction");
  cmd->add_option("--filter-window", config.filter.window, "outlier filter window, m");
  cmd->add_option("--filter-k-sigma", config.filter.k_sigma, "outlier filter threshold, sigmas");
  cmd->add_flag("--no-filter", [&config](std::int64_t) { config.filter.enabled = false; },
                "disable the outlier filter");
  cmd->add_option("--label-low", config.labels.low_max, "low/medium threshold, m^3/rad");
  cmd->add_option("--label-high", config.labels.high_min, "medium/high threshold, m^3/rad");
  cmd->add_option("--defect-window", config.defects.window, "defect rolling-median window");
  cmd->add_option("--defect-factor", config.defects.factor, "defect spike factor");
  cmd->add_option("--stride", config.stride, "course advance per patch, m (0 = patch length)");
  cmd->add_option("--threads", config.threads, "worker threads (0 = hardware)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Terrain roughness estimation from point-cloud elevation spectra"};
  app.require_subcommand(1);

  terrapsd::cli::ProcessOptions process_opts;
  std::string process_window = "hann";
  CLI::App* process = app.add_subcommand("process", "estimate roughness for a traverse of clouds");
  process->add_option("inputs", process_opts.inputs, "cloud files or a directory")->required();
  process->add_option("--poses", process_opts.pose_log, "pose log CSV (t, roll_deg, pitch_deg)");
  process->add_option("--config", process_opts.config_file, "key = value config file");
  process->add_option("-o,--output", process_opts.output, "roughness map CSV path");
  process->add_option("--geojson", process_opts.geojson, "also write a GeoJSON map");
  process->add_option("--scatter-dir", process_opts.scatter_dir,
                      "dump per-patch (w, ln R) scatter CSVs here");
  add_pipeline_flags(process, process_opts.config, process_window);

  terrapsd::cli::SynthOptions synth_opts;
  std::uint64_t synth_seed = 0;
  bool has_seed = false;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic traverse from a script");
  synth->add_option("script", synth_opts.script, "traverse script file")->required();
  synth->add_option("-o,--out", synth_opts.out_dir, "output directory")->required();
  synth->add_option("--seed", synth_seed, "override the script seed")
      ->each([&has_seed](const std::string&) { has_seed = true; });
  synth->add_flag("--ply", synth_opts.ply, "write ASCII PLY instead of XYZ");

  double table_length = 0.9, table_step = 0.008;
  CLI::App* table = app.add_subcommand("table", "print the ISO 8608 rows with band-limited rms");
  table->add_option("--length", table_length, "profile length L, m");
  table->add_option("--step", table_step, "grid step B, m");

  terrapsd::cli::PsdDumpOptions dump_opts;
  std::string dump_window = "rect";
  CLI::App* dump = app.add_subcommand("psd-dump", "PSD of a single profile with its power-law fit");
  dump->add_option("input", dump_opts.input, "profile file, one elevation per line")->required();
  dump->add_option("--step", dump_opts.step, "sample spacing B, m");
  dump->add_option("-o,--output", dump_opts.output, "write (omega, phi) CSV here");
  dump->add_option("--segments", dump_opts.welch.segments, "Welch segments");
  dump->add_option("--window", dump_window, "Welch window: rect | hann");
  dump->add_option("--skip-low-bins", dump_opts.fit.skip_low_bins, "lowest bins excluded from fit");
  dump->add_option("--band-fraction", dump_opts.fit.band_fraction, "upper fit limit, band fraction");

  CLI11_PARSE(app, argc, argv);

  try {
    if (process->parsed()) {
      process_opts.config.welch.window =
          process_window == "rect" ? Window::rectangular : Window::hann;
      return terrapsd::cli::run_process(process_opts, std::cout, std::cerr);
    }
    if (synth->parsed()) {
      if (has_seed) synth_opts.seed = synth_seed;
      return terrapsd::cli::run_synth(synth_opts, std::cerr);
    }
    if (table->parsed()) {
      return terrapsd::cli::run_table(table_length, table_step, std::cout);
    }
    if (dump->parsed()) {
      dump_opts.welch.window = dump_window == "hann" ? Window::hann : Window::rectangular;
      return terrapsd::cli::run_psd_dump(dump_opts, std::cout, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
