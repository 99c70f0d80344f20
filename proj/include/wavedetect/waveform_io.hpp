#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wavedetect/error.hpp"
#include "wavedetect/grid_synth.hpp"

namespace wavedetect {

/// printf-style formatting of one double.
inline std::string format_double(const char* spec, double value) {
  char buf[64];
  const int n = std::snprintf(buf, sizeof buf, spec, value);
  return std::string(buf, static_cast<std::size_t>(n > 0 ? n : 0));
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.emplace_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  for (auto& c : cells) {
    while (!c.empty() && (c.back() == '\r' || c.back() == ' ')) c.pop_back();
    while (!c.empty() && c.front() == ' ') c.erase(c.begin());
  }
  return cells;
}

/// Strict full-string parse; nullopt for anything that is not a finite number.
inline std::optional<double> parse_double(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    return std::nullopt;
  }
  if (used != text.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// --- waveform CSV: "t,va,vb,vc" -------------------------------------------

inline constexpr std::string_view kWaveformHeader = "t,va,vb,vc";

/// Time with 9 decimals, per-unit values with 9 significant digits.
inline void write_waveform_csv(std::ostream& os, const Waveform& w) {
  os << kWaveformHeader << '\n';
  for (std::size_t k = 0; k < w.size(); ++k) {
    os << format_double("%.9f", static_cast<double>(k) / w.sample_rate);
    for (const auto& ch : w.channels) os << ',' << format_double("%.9g", ch[k] / w.base_voltage);
    os << '\n';
  }
}

inline std::string waveform_csv(const Waveform& w) {
  std::ostringstream os;
  write_waveform_csv(os, w);
  return os.str();
}

/// Parses the CSV written above. The sample rate is recovered from the time
/// column and must be uniform.
inline Waveform read_waveform_csv(std::istream& is) {
  auto fail = [](std::size_t line, const std::string& why) -> Error {
    return Error(ErrorCode::MalformedInput, "line " + std::to_string(line) + ": " + why);
  };
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(is, line)) throw fail(1, "empty file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kWaveformHeader) throw fail(line_no, "expected header '" + std::string(kWaveformHeader) + "'");

  std::vector<double> times;
  Waveform w;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 4) throw fail(line_no, "expected 4 cells, got " + std::to_string(cells.size()));
    std::array<double, 4> values{};
    for (std::size_t i = 0; i < 4; ++i) {
      const auto v = parse_double(cells[i]);
      if (!v) throw fail(line_no, "non-numeric cell '" + cells[i] + "'");
      values[i] = *v;
    }
    times.push_back(values[0]);
    for (std::size_t p = 0; p < 3; ++p) w.channels[p].push_back(values[p + 1]);
  }
  if (times.size() < 2) throw fail(line_no, "need at least two samples");
  const double span = times.back() - times.front();
  if (!(span > 0.0)) throw fail(line_no, "time column does not increase");
  double fs = static_cast<double>(times.size() - 1) / span;
  if (std::abs(fs - std::round(fs)) < 1e-6 * fs) fs = std::round(fs);
  const double step = 1.0 / fs;
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (std::abs(times[k] - times[k - 1] - step) > 1e-3 * step + 2e-9) {
      throw fail(k + 2, "non-uniform time step");
    }
  }
  w.sample_rate = fs;
  return w;
}

inline Waveform read_waveform_csv(const std::string& text) {
  std::istringstream is(text);
  return read_waveform_csv(is);
}

// --- labels.csv: "scenario,kind,onset_sample,seed" ------------------------

inline constexpr std::string_view kLabelsHeader = "scenario,kind,onset_sample,seed";

struct LabelRow {
  std::string scenario;
  EventKind kind = EventKind::Normal;
  std::optional<std::size_t> onset_sample;
  std::uint64_t seed = 0;
};

inline void write_labels_csv(std::ostream& os, const std::vector<LabelRow>& rows) {
  os << kLabelsHeader << '\n';
  for (const auto& r : rows) {
    os << r.scenario << ',' << to_string(r.kind) << ',';
    if (r.onset_sample) os << *r.onset_sample;
    os << ',' << r.seed << '\n';
  }
}

inline std::vector<LabelRow> read_labels_csv(std::istream& is) {
  auto fail = [](std::size_t line, const std::string& why) -> Error {
    return Error(ErrorCode::MalformedInput, "labels.csv line " + std::to_string(line) + ": " + why);
  };
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(is, line)) throw fail(1, "empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kLabelsHeader) throw fail(1, "expected header '" + std::string(kLabelsHeader) + "'");
  std::vector<LabelRow> rows;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 4) throw fail(line_no, "expected 4 cells");
    LabelRow row;
    row.scenario = cells[0];
    if (row.scenario.empty()) throw fail(line_no, "empty scenario name");
    try {
      row.kind = parse_event_kind(cells[1]);
      if (!cells[2].empty()) row.onset_sample = std::stoull(cells[2]);
      row.seed = std::stoull(cells[3]);
    } catch (const std::exception& e) {
      throw fail(line_no, e.what());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace wavedetect
