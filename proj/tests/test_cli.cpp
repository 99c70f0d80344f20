#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "support.hpp"
#include "wavedetect/config.hpp"
#include "wavedetect/waveform_io.hpp"

namespace fs = std::filesystem;
using namespace wavedetect;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

// One synthesized and calibrated directory shared by the tests below.
struct Workspace {
  fs::path root = testing_support::scratch_dir("cli");
  fs::path data = root / "data";
  fs::path config = root / "detector.ini";

  Workspace() {
    const Result s = run({"synth", "--catalog", "--with-normal", "--out", data.string()});
    EXPECT_EQ(s.code, 0) << s.err;
    const Result c = run({"calibrate", data.string(), "--out", config.string()});
    EXPECT_EQ(c.code, 0) << c.err;
  }
};

const Workspace& workspace() {
  static const Workspace ws;
  return ws;
}

}  // namespace

TEST(CliSynth, CatalogWritesTwelveWaveformsAndLabels) {
  const fs::path dir = testing_support::scratch_dir("synth_catalog");
  const Result r = run({"synth", "--catalog", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::size_t csvs = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".csv" && e.path().filename() != "labels.csv") ++csvs;
  }
  EXPECT_EQ(csvs, 12u);
  std::ifstream labels(dir / "labels.csv");
  const auto rows = read_labels_csv(labels);
  ASSERT_EQ(rows.size(), 12u);
  EXPECT_EQ(rows[6].kind, EventKind::Islanding);
  EXPECT_EQ(rows[6].onset_sample, 1952u);
}

TEST(CliSynth, RerunIsByteIdentical) {
  const fs::path a = testing_support::scratch_dir("synth_a");
  const fs::path b = testing_support::scratch_dir("synth_b");
  ASSERT_EQ(run({"synth", "--catalog", "--out", a.string()}).code, 0);
  ASSERT_EQ(run({"--out", b.string(), "synth", "--catalog"}).code, 0);
  for (const auto& e : fs::directory_iterator(a)) {
    EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename())) << e.path();
  }
}

TEST(CliSynth, MatchesInMemorySynthesis) {
  const auto& ws = workspace();
  const auto scenarios = catalog();
  for (const auto& s : {scenarios[0], scenarios[9]}) {
    std::ifstream in(ws.data / (s.label + ".csv"));
    const Waveform parsed = read_waveform_csv(in);
    const Waveform direct = synthesize(s);
    ASSERT_EQ(parsed.size(), direct.size());
    EXPECT_EQ(waveform_csv(parsed), waveform_csv(direct));
  }
}

TEST(CliSynth, SpecFileAndSeed) {
  const fs::path dir = testing_support::scratch_dir("synth_spec");
  spit(dir / "spec.ini", "[scenario one]\nbus = 14\ndisturbance = Islanding\n"
                         "[scenario two]\nbus = 12\ndisturbance = FaultBC\nonset = 0.2\nduration = 0.1\n");
  const Result r = run({"synth", (dir / "spec.ini").string(), "--out", (dir / "out").string(),
                        "--seed", "500"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir / "out" / "labels.csv"),
            "scenario,kind,onset_sample,seed\none,Islanding,1952,500\ntwo,Fault,640,501\n");
}

TEST(CliSynth, ErrorsMapToExitCodes) {
  const fs::path dir = testing_support::scratch_dir("synth_errors");
  spit(dir / "empty.ini", "");
  EXPECT_EQ(run({"synth", (dir / "empty.ini").string(), "--out", (dir / "o").string()}).code, 3);
  spit(dir / "bad.ini", "[scenario x]\nbus = 14\nonset = soon\n");
  const Result bad = run({"synth", (dir / "bad.ini").string(), "--out", (dir / "o").string()});
  EXPECT_EQ(bad.code, 3);
  EXPECT_NE(bad.err.find("line 3"), std::string::npos);
  spit(dir / "blocker", "not a directory");
  EXPECT_EQ(run({"synth", "--catalog", "--out", (dir / "blocker" / "sub").string()}).code, 2);
  EXPECT_EQ(run({"synth", (dir / "missing.ini").string(), "--out", (dir / "o").string()}).code, 2);
  EXPECT_EQ(run({"synth", "--out", (dir / "o").string()}).code, 3);
}

TEST(CliDetect, VerdictLines) {
  const auto& ws = workspace();
  const Result island =
      run({"detect", (ws.data / "bus11_AG_islanding.csv").string(), "--config", ws.config.string()});
  ASSERT_EQ(island.code, 0) << island.err;
  EXPECT_EQ(island.out.rfind("Islanding,", 0), 0u);
  EXPECT_EQ(island.out.substr(island.out.rfind(',') + 1), "1952\n");

  const Result fault =
      run({"detect", (ws.data / "bus12_BG_fault.csv").string(), "--config", ws.config.string()});
  EXPECT_EQ(fault.out.rfind("Fault,", 0), 0u);

  const Result normal =
      run({"detect", (ws.data / "bus12_normal.csv").string(), "--config", ws.config.string()});
  ASSERT_EQ(normal.code, 0);
  EXPECT_EQ(normal.out.rfind("Normal,", 0), 0u);
  EXPECT_EQ(normal.out.substr(normal.out.size() - 2), ",\n");
}

TEST(CliDetect, Errors) {
  const auto& ws = workspace();
  const fs::path dir = testing_support::scratch_dir("detect_errors");
  spit(dir / "bad.csv", "t,va,vb,vc\n0,1,1,1\n0.0003125,1,oops,1\n");
  EXPECT_EQ(run({"detect", (dir / "bad.csv").string(), "--config", ws.config.string()}).code, 3);
  EXPECT_EQ(run({"detect", (ws.data / "bus12_normal.csv").string(), "--config",
                 (dir / "nope.ini").string()})
                .code,
            2);
  EXPECT_EQ(run({"detect", (ws.data / "bus12_normal.csv").string()}).code, 3);
}

TEST(CliCompare, FullCatalogTable) {
  const auto& ws = workspace();
  const Result r = run({"compare", ws.data.string(), "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "transform,fault_std,fault_energy,islanding_std,islanding_energy");
  std::size_t rows = 0;
  while (std::getline(lines, line)) {
    const auto cells = split_csv_line(line);
    ASSERT_EQ(cells.size(), 5u);
    EXPECT_GT(std::stod(cells[4]), std::stod(cells[2])) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 7u);
}

TEST(CliCompare, SingleWaveformSingleTransform) {
  const auto& ws = workspace();
  const Result r = run({"compare", (ws.data / "bus13_CG_fault.csv").string(), "--transforms",
                        "WT_Haar", "--format", "csv", "--rows"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("bus13_CG_fault,WT_Haar,"), std::string::npos);
  EXPECT_NE(r.out.find("WT_Haar,"), std::string::npos);
  EXPECT_NE(r.out.find("n/a"), std::string::npos);
}

TEST(CliCompare, TransformErrors) {
  const auto& ws = workspace();
  EXPECT_EQ(run({"compare", ws.data.string(), "--transforms", "FT,Wavelet"}).code, 3);
  EXPECT_EQ(run({"compare", ws.data.string(), "--transforms", ""}).code, 3);
}

TEST(CliPlot, WritesSvgAndRefusesToOverwrite) {
  const auto& ws = workspace();
  const fs::path svg = testing_support::scratch_dir("plot") / "island.svg";
  const std::vector<std::string> args = {"plot", (ws.data / "bus12_BG_islanding.csv").string(),
                                         "--config", ws.config.string(), "--out", svg.string()};
  ASSERT_EQ(run(args).code, 0);
  const std::string text = slurp(svg);
  EXPECT_NE(text.find("data-coefficient-index=\"976\""), std::string::npos);
  EXPECT_EQ(run(args).code, 2);
  auto forced = args;
  forced.push_back("--force");
  EXPECT_EQ(run(forced).code, 0);
}

TEST(CliPlot, ZeroWaveformHasNoMarker) {
  const auto& ws = workspace();
  const fs::path dir = testing_support::scratch_dir("plot_zero");
  std::string csv = "t,va,vb,vc\n";
  for (int k = 0; k < 256; ++k) csv += format_double("%.9f", k / 3200.0) + ",0,0,0\n";
  spit(dir / "zero.csv", csv);
  ASSERT_EQ(run({"plot", (dir / "zero.csv").string(), "--config", ws.config.string(), "--out",
                 (dir / "zero.svg").string()})
                .code,
            0);
  EXPECT_EQ(slurp(dir / "zero.svg").find("onset-marker"), std::string::npos);
  spit(dir / "junk.csv", "hello\n");
  EXPECT_EQ(run({"plot", (dir / "junk.csv").string(), "--config", ws.config.string(), "--out",
                 (dir / "junk.svg").string()})
                .code,
            3);
}

TEST(CliCalibrate, WritesReadableConfig) {
  const auto& ws = workspace();
  std::ifstream in(ws.config);
  const DetectorConfig cfg = read_detector_config(in);
  EXPECT_EQ(cfg.filter_name, WaveletName::Haar);
  EXPECT_GT(cfg.gate_threshold, 0.0);
  EXPECT_EQ(run({"calibrate", ws.data.string(), "--out", ws.config.string()}).code, 2);
}

TEST(CliCalibrate, MissingLabelsAndOverlap) {
  const auto& ws = workspace();
  const fs::path empty = testing_support::scratch_dir("calib_empty");
  EXPECT_EQ(run({"calibrate", empty.string(), "--out", (empty / "c.ini").string()}).code, 3);

  // swap the fault and islanding labels so the energies overlap
  const fs::path toy = testing_support::scratch_dir("calib_toy");
  for (const char* name : {"bus11_AG_fault", "bus11_AG_islanding", "bus12_normal"}) {
    fs::copy_file(ws.data / (std::string(name) + ".csv"), toy / (std::string(name) + ".csv"));
  }
  spit(toy / "labels.csv",
       "scenario,kind,onset_sample,seed\nbus11_AG_fault,Islanding,960,1100\n"
       "bus11_AG_islanding,Fault,1952,1200\nbus12_normal,Normal,,9001\n");
  const Result r = run({"calibrate", toy.string(), "--out", (toy / "c.ini").string()});
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.err.find("max fault energy"), std::string::npos);
  EXPECT_NE(r.err.find("min islanding energy"), std::string::npos);
  EXPECT_FALSE(fs::exists(toy / "c.ini"));
}

TEST(CliUsage, HelpAndUnknownCommands) {
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({}).code, 3);
  EXPECT_EQ(run({"transmogrify"}).code, 3);
}
