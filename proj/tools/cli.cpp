#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "wavedetect/wavedetect.hpp"

namespace fs = std::filesystem;

namespace wavedetect::cli {
namespace {

/// Anything the environment refused: missing files, unwritable paths.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write " + path.string());
  os << content;
  os.flush();
  if (!os) throw IoError("write failed for " + path.string());
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

void refuse_overwrite(const fs::path& path, bool force) {
  if (!force && fs::exists(path)) {
    throw IoError(path.string() + " already exists (use --force to overwrite)");
  }
}

Waveform load_waveform(const fs::path& path) {
  const std::string text = read_file(path);
  try {
    return read_waveform_csv(text);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

DetectorConfig load_config(const fs::path& path) {
  std::istringstream in(read_file(path));
  try {
    return read_detector_config(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::vector<LabelRow> load_labels(const fs::path& dir) {
  const fs::path path = dir / "labels.csv";
  if (!fs::exists(path)) {
    throw Error(ErrorCode::MalformedInput, "no labels.csv in " + dir.string());
  }
  std::istringstream in(read_file(path));
  return read_labels_csv(in);
}

struct LabeledFile {
  std::string scenario;
  Waveform waveform;
  std::optional<EventKind> kind;
};

std::vector<LabeledFile> load_directory(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
  std::vector<LabeledFile> out;
  for (const auto& row : load_labels(dir)) {
    out.push_back({row.scenario, load_waveform(dir / (row.scenario + ".csv")), row.kind});
  }
  return out;
}

/// A lone CSV takes its label from a labels.csv next to it, when there is one.
LabeledFile load_single(const fs::path& file) {
  LabeledFile item{file.stem().string(), load_waveform(file), std::nullopt};
  const fs::path parent = file.has_parent_path() ? file.parent_path() : fs::path(".");
  if (fs::exists(parent / "labels.csv")) {
    for (const auto& row : load_labels(parent)) {
      if (row.scenario == item.scenario) item.kind = row.kind;
    }
  }
  return item;
}

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::string out;
  bool force = false;
};

int cmd_synth(const GlobalOptions& g, const std::string& spec_path, bool use_catalog,
              bool with_normal, std::ostream& out) {
  if (g.out.empty()) throw CLI::RequiredError("--out");
  std::vector<Scenario> scenarios;
  if (use_catalog) {
    scenarios = catalog();
  } else if (!spec_path.empty()) {
    std::istringstream in(read_file(spec_path));
    try {
      scenarios = read_scenario_spec(in);
    } catch (const Error& e) {
      throw Error(e.code(), spec_path + ": " + e.what());
    }
  } else {
    throw CLI::ValidationError("synth", "give a scenario spec file or --catalog");
  }
  if (with_normal) {
    for (auto& s : normal_cases()) scenarios.push_back(std::move(s));
  }
  if (g.seed) {
    for (std::size_t i = 0; i < scenarios.size(); ++i) scenarios[i].seed = *g.seed + i;
  }

  const fs::path dir(g.out);
  ensure_directory(dir);
  std::vector<LabelRow> labels;
  for (const auto& s : scenarios) {
    const Waveform w = synthesize(s);
    write_file(dir / (s.label + ".csv"), waveform_csv(w));
    labels.push_back({s.label, kind_of(s.disturbance), w.truth->onset_sample, s.seed});
  }
  std::ostringstream manifest;
  write_labels_csv(manifest, labels);
  write_file(dir / "labels.csv", manifest.str());
  out << "wrote " << scenarios.size() << " waveform(s) and labels.csv to " << dir.string() << '\n';
  return kOk;
}

int cmd_detect(const std::string& csv, const std::string& config_path, std::ostream& out) {
  const DetectorConfig cfg = load_config(config_path);
  const Waveform w = load_waveform(csv);
  const DetectionVerdict v = detect(w, cfg);
  out << to_string(v.kind) << ',' << format_double("%.6g", v.indices.std) << ','
      << format_double("%.6g", v.indices.energy) << ',';
  if (v.onset_sample) out << *v.onset_sample;
  out << '\n';
  return kOk;
}

int cmd_compare(const std::vector<std::string>& paths, const std::string& transforms_text,
                const std::string& format_text, bool show_rows, const std::string& config_path,
                std::ostream& out) {
  const std::vector<Transform> transforms = parse_transform_list(transforms_text);
  const ReportFormat format = parse_report_format(format_text);
  std::optional<DetectorConfig> cfg;
  if (!config_path.empty()) cfg = load_config(config_path);

  std::vector<ComparisonInput> inputs;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      for (auto& f : load_directory(p)) {
        inputs.push_back({std::move(f.scenario), std::move(f.waveform), f.kind});
      }
    } else {
      auto f = load_single(p);
      inputs.push_back({std::move(f.scenario), std::move(f.waveform), f.kind});
    }
  }
  const RunReport report = build_report(inputs, transforms, cfg, format);
  if (show_rows) {
    write_rows(out, report);
    out << '\n';
  }
  write_summary(out, report);
  return kOk;
}

int cmd_plot(const GlobalOptions& g, const std::string& csv, const std::string& config_path,
             std::ostream& out) {
  if (g.out.empty()) throw CLI::RequiredError("--out");
  refuse_overwrite(g.out, g.force);
  const DetectorConfig cfg = load_config(config_path);
  const Waveform w = load_waveform(csv);
  const PlotData data = plot_data(w, cfg, fs::path(csv).stem().string());
  write_file(g.out, plot_svg(data));
  out << "wrote " << g.out << '\n';
  return kOk;
}

int cmd_calibrate(const GlobalOptions& g, const std::string& dir, const std::string& filter,
                  const std::string& policy, std::ostream& out) {
  if (g.out.empty()) throw CLI::RequiredError("--out");
  refuse_overwrite(g.out, g.force);
  const WaveletName name = parse_wavelet_name(filter);
  const ChannelPolicy channel = parse_channel_policy(policy);
  std::vector<LabeledWaveform> labeled;
  for (auto& f : load_directory(dir)) labeled.push_back({std::move(f.waveform), *f.kind});
  const DetectorConfig cfg = calibrate(labeled, name, channel);
  std::ostringstream text;
  write_detector_config(text, cfg);
  write_file(g.out, text.str());
  out << text.str();
  return kOk;
}

int exit_code_for(ErrorCode code) {
  return code == ErrorCode::NotSeparable ? kCalibrationFailed : kMalformedInput;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wavelet-based islanding and fault detection for DG-connected feeders",
               "wavedetect"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Base seed; scenario i uses seed + i");
  app.add_option("--out", g.out, "Output directory (synth) or file (plot, calibrate)");
  app.add_flag("--force", g.force, "Overwrite existing output files");

  std::string spec_path;
  bool use_catalog = false, with_normal = false;
  auto* synth = app.add_subcommand("synth", "Synthesize scenario waveforms to CSV");
  synth->add_option("spec", spec_path, "INI scenario spec file");
  synth->add_flag("--catalog", use_catalog, "Synthesize the 12-scenario reference catalog");
  synth->add_flag("--with-normal", with_normal, "Also write the two disturbance-free records");

  std::string csv, config_path;
  auto* detect_cmd = app.add_subcommand("detect", "Classify one waveform CSV");
  detect_cmd->add_option("csv", csv, "Waveform CSV")->required();
  detect_cmd->add_option("--config", config_path, "Detector config file")->required();

  std::vector<std::string> paths;
  std::string transforms_text = "FT,STFT,WT_dB1,WT_Haar,WT_Coif,WT_Demey,WT_dB4";
  std::string format_text = "pretty";
  bool show_rows = false;
  auto* compare = app.add_subcommand("compare", "Compare transforms over a waveform set");
  compare->add_option("paths", paths, "Directories with labels.csv, or CSV files")->required();
  compare->add_option("--transforms", transforms_text, "Comma-separated transform list");
  compare->add_option("--format", format_text, "csv or pretty");
  compare->add_flag("--rows", show_rows, "Also print one row per scenario and transform");
  compare->add_option("--config", config_path, "Detector config for per-row verdicts");

  auto* plot = app.add_subcommand("plot", "Render signal, A1 and D1 panels as SVG");
  plot->add_option("csv", csv, "Waveform CSV")->required();
  plot->add_option("--config", config_path, "Detector config file")->required();

  std::string dir, filter = "Haar", policy = "WorstPhase";
  auto* calib = app.add_subcommand("calibrate", "Fit detector thresholds on a labeled directory");
  calib->add_option("dir", dir, "Directory with waveform CSVs and labels.csv")->required();
  calib->add_option("--filter", filter, "Wavelet filter");
  calib->add_option("--policy", policy, "WorstPhase, PhaseA or Mean");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (*seed_opt) g.seed = seed_value;

    if (synth->parsed()) return cmd_synth(g, spec_path, use_catalog, with_normal, out);
    if (detect_cmd->parsed()) return cmd_detect(csv, config_path, out);
    if (compare->parsed()) {
      return cmd_compare(paths, transforms_text, format_text, show_rows, config_path, out);
    }
    if (plot->parsed()) return cmd_plot(g, csv, config_path, out);
    if (calib->parsed()) return cmd_calibrate(g, dir, filter, policy, out);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << '\n';
    return kMalformedInput;
  } catch (const NotSeparableError& e) {
    err << "error: classes overlap: max fault energy "
        << format_double("%.6g", e.max_fault_energy()) << " >= min islanding energy "
        << format_double("%.6g", e.min_islanding_energy()) << '\n';
    return kCalibrationFailed;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kEnvironment;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kEnvironment;
  }
  err << app.help();
  return kMalformedInput;
}

}  // namespace wavedetect::cli
