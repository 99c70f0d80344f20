#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wavedetect/detector.hpp"
#include "wavedetect/error.hpp"
#include "wavedetect/filters.hpp"
#include "wavedetect/grid_synth.hpp"
#include "wavedetect/indices.hpp"
#include "wavedetect/spectral.hpp"
#include "wavedetect/waveform_io.hpp"

namespace wavedetect {

enum class Transform { FT, STFT, WT_dB1, WT_Haar, WT_Coif, WT_Demey, WT_dB4 };

inline constexpr std::array<Transform, 7> kAllTransforms = {
    Transform::FT,      Transform::STFT,     Transform::WT_dB1, Transform::WT_Haar,
    Transform::WT_Coif, Transform::WT_Demey, Transform::WT_dB4};

constexpr std::string_view to_string(Transform t) noexcept {
  switch (t) {
    case Transform::FT: return "FT";
    case Transform::STFT: return "STFT";
    case Transform::WT_dB1: return "WT_dB1";
    case Transform::WT_Haar: return "WT_Haar";
    case Transform::WT_Coif: return "WT_Coif";
    case Transform::WT_Demey: return "WT_Demey";
    case Transform::WT_dB4: return "WT_dB4";
  }
  return "FT";
}

inline Transform parse_transform(std::string_view text) {
  for (Transform t : kAllTransforms) {
    const std::string_view name = to_string(t);
    if (name.size() == text.size() &&
        std::equal(name.begin(), name.end(), text.begin(), [](char a, char b) {
          return std::tolower(static_cast<unsigned char>(a)) ==
                 std::tolower(static_cast<unsigned char>(b));
        })) {
      return t;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown transform '" + std::string(text) + "'");
}

/// Comma-separated list such as "FT,STFT,WT_Haar". Duplicates are dropped.
inline std::vector<Transform> parse_transform_list(std::string_view text) {
  std::vector<Transform> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    std::string item(text.substr(start, comma - start));
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    if (!item.empty()) {
      const Transform t = parse_transform(item);
      if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
    }
    start = comma + 1;
  }
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "empty transform list");
  return out;
}

inline std::optional<WaveletName> wavelet_of(Transform t) {
  switch (t) {
    case Transform::WT_dB1: return WaveletName::Db1;
    case Transform::WT_Haar: return WaveletName::Haar;
    case Transform::WT_Coif: return WaveletName::Coif;
    case Transform::WT_Demey: return WaveletName::Dmey;
    case Transform::WT_dB4: return WaveletName::Db4;
    default: return std::nullopt;
  }
}

/// STD and energy of one per-unit signal under transform `t`: the D1 band for
/// wavelets, the upper half of the spectrum for FT and STFT.
inline PerformanceIndices transform_indices(std::span<const double> signal, Transform t) {
  if (t == Transform::FT) return dft_indices(signal);
  if (t == Transform::STFT) return stft_indices(signal);
  return compute_indices(signal, filter_bank(*wavelet_of(t)));
}

/// The phase every transform is evaluated on: the one with the largest Haar
/// |d1|, so all transforms look at the same samples.
inline std::size_t comparison_phase(const Waveform& w) {
  const WaveletFilter haar = filter_bank(WaveletName::Haar);
  std::size_t best = 0;
  double best_peak = -1.0;
  for (std::size_t p = 0; p < 3; ++p) {
    const double peak = phase_detail(w, p, haar).max_abs;
    if (peak > best_peak) {
      best_peak = peak;
      best = p;
    }
  }
  return best;
}

inline std::vector<double> per_unit_channel(const Waveform& w, std::size_t phase) {
  std::vector<double> out = w.channels[phase];
  for (double& v : out) v /= w.base_voltage;
  return out;
}

struct ComparisonInput {
  std::string scenario;
  Waveform waveform;
  std::optional<EventKind> label;  // ground truth when known
};

struct ReportRow {
  std::string scenario;
  Transform transform = Transform::FT;
  double std = 0.0;
  double energy = 0.0;
  std::optional<EventKind> verdict;
  std::optional<std::size_t> onset_sample;
  std::optional<EventKind> label;
};

enum class ReportFormat { CsvTable, PrettyTable };

inline ReportFormat parse_report_format(std::string_view text) {
  if (text == "csv") return ReportFormat::CsvTable;
  if (text == "pretty") return ReportFormat::PrettyTable;
  throw Error(ErrorCode::InvalidArgument, "unknown format '" + std::string(text) + "'");
}

struct RunReport {
  std::vector<ReportRow> rows;
  ReportFormat format = ReportFormat::PrettyTable;
};

/// One row per (scenario, transform). Verdicts are filled in only when a
/// detector configuration is supplied.
inline RunReport build_report(std::span<const ComparisonInput> inputs,
                              std::span<const Transform> transforms,
                              const std::optional<DetectorConfig>& detector = std::nullopt,
                              ReportFormat format = ReportFormat::PrettyTable) {
  if (transforms.empty()) throw Error(ErrorCode::InvalidArgument, "empty transform list");
  RunReport report;
  report.format = format;
  for (const auto& in : inputs) {
    std::optional<DetectionVerdict> verdict;
    if (detector) verdict = detect(in.waveform, *detector);
    const auto signal = per_unit_channel(in.waveform, comparison_phase(in.waveform));
    for (Transform t : transforms) {
      const PerformanceIndices idx = transform_indices(signal, t);
      ReportRow row;
      row.scenario = in.scenario;
      row.transform = t;
      row.std = idx.std;
      row.energy = idx.energy;
      row.label = in.label;
      if (verdict) {
        row.verdict = verdict->kind;
        row.onset_sample = verdict->onset_sample;
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

struct ClassMeans {
  std::size_t count = 0;
  double std = 0.0;
  double energy = 0.0;
};

/// Per-transform mean STD and energy over the fault and islanding records.
struct SummaryRow {
  Transform transform = Transform::FT;
  ClassMeans fault;
  ClassMeans islanding;
};

inline std::vector<SummaryRow> summarize_report(const RunReport& report) {
  std::vector<SummaryRow> out;
  for (const auto& row : report.rows) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const SummaryRow& s) { return s.transform == row.transform; });
    if (it == out.end()) {
      out.push_back(SummaryRow{row.transform, {}, {}});
      it = std::prev(out.end());
    }
    if (!row.label || *row.label == EventKind::Normal) continue;
    ClassMeans& m = *row.label == EventKind::Fault ? it->fault : it->islanding;
    ++m.count;
    m.std += row.std;
    m.energy += row.energy;
  }
  for (auto& s : out) {
    for (ClassMeans* m : {&s.fault, &s.islanding}) {
      if (m->count > 0) {
        m->std /= static_cast<double>(m->count);
        m->energy /= static_cast<double>(m->count);
      }
    }
  }
  return out;
}

/// Islanding energy over fault energy.
inline double separation_ratio(double islanding_energy, double fault_energy) {
  if (!(fault_energy > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "fault energy must be > 0 for a separation ratio");
  }
  return islanding_energy / fault_energy;
}

inline std::string format4(double v) { return format_double("%.4g", v); }

namespace detail {

inline std::string mean_cell(const ClassMeans& m, bool energy) {
  if (m.count == 0) return "n/a";
  return format4(energy ? m.energy : m.std);
}

inline void write_table(std::ostream& os, const std::vector<std::vector<std::string>>& cells,
                        ReportFormat format) {
  if (format == ReportFormat::CsvTable) {
    for (const auto& row : cells) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
      os << '\n';
    }
    return;
  }
  std::vector<std::size_t> width;
  for (const auto& row : cells) {
    width.resize(std::max(width.size(), row.size()), 0);
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  for (std::size_t r = 0; r < cells.size(); ++r) {
    for (std::size_t i = 0; i < cells[r].size(); ++i) {
      if (i) os << "  ";
      os << cells[r][i];
      if (i + 1 < cells[r].size()) os << std::string(width[i] - cells[r][i].size(), ' ');
    }
    os << '\n';
    if (r == 0) {
      std::size_t total = 0;
      for (std::size_t w : width) total += w;
      os << std::string(total + 2 * (width.size() - 1), '-') << '\n';
    }
  }
}

}  // namespace detail

inline void write_rows(std::ostream& os, const RunReport& report) {
  std::vector<std::vector<std::string>> cells = {
      {"scenario", "transform", "std", "energy", "verdict", "onset_sample"}};
  for (const auto& r : report.rows) {
    cells.push_back({r.scenario, std::string(to_string(r.transform)), format4(r.std),
                     format4(r.energy), r.verdict ? std::string(to_string(*r.verdict)) : "",
                     r.onset_sample ? std::to_string(*r.onset_sample) : ""});
  }
  detail::write_table(os, cells, report.format);
}

inline void write_summary(std::ostream& os, const RunReport& report) {
  const auto summary = summarize_report(report);
  std::size_t faults = 0, islands = 0;
  if (!summary.empty()) {
    faults = summary.front().fault.count;
    islands = summary.front().islanding.count;
  }
  if (report.format == ReportFormat::PrettyTable) {
    os << "Mean over " << faults << " fault and " << islands << " islanding record(s)\n";
  }
  std::vector<std::vector<std::string>> cells = {{"transform", "fault_std", "fault_energy",
                                                  "islanding_std", "islanding_energy"}};
  for (const auto& s : summary) {
    cells.push_back({std::string(to_string(s.transform)), detail::mean_cell(s.fault, false),
                     detail::mean_cell(s.fault, true), detail::mean_cell(s.islanding, false),
                     detail::mean_cell(s.islanding, true)});
  }
  detail::write_table(os, cells, report.format);
}

}  // namespace wavedetect
