#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "wavedetect/detector.hpp"
#include "wavedetect/dwt.hpp"
#include "wavedetect/grid_synth.hpp"
#include "wavedetect/waveform_io.hpp"

namespace wavedetect {

struct PlotLayout {
  double width = 900.0;
  double panel_height = 200.0;
  double margin_left = 70.0;
  double margin_right = 20.0;
  double margin_top = 30.0;
  double gap = 50.0;
};

struct PlotData {
  std::string title;
  std::string channel;
  std::vector<double> signal;  // per-unit samples
  std::vector<double> approx;  // A1
  std::vector<double> detail;  // D1
  std::optional<std::size_t> onset_sample;
  std::optional<EventKind> verdict;
};

/// Runs the detector and gathers the panels for the channel it looked at.
inline PlotData plot_data(const Waveform& w, const DetectorConfig& cfg, std::string title) {
  const DetectionVerdict verdict = detect(w, cfg);
  std::size_t phase = 0;
  for (std::size_t p = 0; p < kPhaseLabels.size(); ++p) {
    if (verdict.channel_used == kPhaseLabels[p]) phase = p;
  }
  PlotData out;
  out.title = std::move(title);
  out.channel = verdict.channel_used;
  out.signal = w.channels[phase];
  for (double& v : out.signal) v /= w.base_voltage;
  const Subbands bands = dwt_single_level(out.signal, filter_bank(cfg.filter_name));
  out.approx = bands.approx;
  out.detail = bands.detail;
  out.verdict = verdict.kind;
  if (verdict.kind != EventKind::Normal) out.onset_sample = verdict.onset_sample;
  return out;
}

namespace detail {

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string num(double v) { return format_double("%.2f", v); }

struct Panel {
  double x0, y0, w, h;
  double axis_max;  // samples (or coefficients) covered by the x axis

  double x(double index) const { return x0 + w * index / std::max(axis_max, 1.0); }
};

inline void draw_panel(std::ostream& os, const Panel& panel, std::span<const double> values,
                       const std::string& label, const std::string& axis_label,
                       const std::string& css_class) {
  double lo = 0.0, hi = 0.0;
  if (!values.empty()) {
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    lo = *mn;
    hi = *mx;
  }
  if (hi - lo < 1e-12) {
    lo -= 1.0;
    hi += 1.0;
  }
  auto y = [&](double v) { return panel.y0 + panel.h * (hi - v) / (hi - lo); };

  os << "<g class=\"panel " << css_class << "\">\n";
  os << "<rect x=\"" << num(panel.x0) << "\" y=\"" << num(panel.y0) << "\" width=\""
     << num(panel.w) << "\" height=\"" << num(panel.h)
     << "\" fill=\"none\" stroke=\"#888\" stroke-width=\"0.5\"/>\n";
  os << "<text x=\"" << num(panel.x0) << "\" y=\"" << num(panel.y0 - 6) << "\" font-size=\"13\">"
     << xml_escape(label) << "</text>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double idx = panel.axis_max * tick / 4.0;
    os << "<text x=\"" << num(panel.x(idx)) << "\" y=\"" << num(panel.y0 + panel.h + 14)
       << "\" font-size=\"10\" text-anchor=\"middle\">" << static_cast<long long>(idx + 0.5)
       << "</text>\n";
  }
  os << "<text x=\"" << num(panel.x0 + panel.w) << "\" y=\"" << num(panel.y0 + panel.h + 28)
     << "\" font-size=\"10\" text-anchor=\"end\">" << xml_escape(axis_label) << "</text>\n";
  os << "<text x=\"" << num(panel.x0 - 6) << "\" y=\"" << num(y(hi) + 4)
     << "\" font-size=\"10\" text-anchor=\"end\">" << format_double("%.3g", hi) << "</text>\n";
  os << "<text x=\"" << num(panel.x0 - 6) << "\" y=\"" << num(y(lo))
     << "\" font-size=\"10\" text-anchor=\"end\">" << format_double("%.3g", lo) << "</text>\n";
  os << "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"0.8\" points=\"";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) os << ' ';
    os << num(panel.x(static_cast<double>(i))) << ',' << num(y(values[i]));
  }
  os << "\"/>\n</g>\n";
}

inline void draw_marker(std::ostream& os, const Panel& panel, double index,
                        const std::string& attributes) {
  const double x = panel.x(index);
  os << "<line class=\"onset-marker\" " << attributes << " x1=\"" << num(x) << "\" y1=\""
     << num(panel.y0) << "\" x2=\"" << num(x) << "\" y2=\"" << num(panel.y0 + panel.h)
     << "\" stroke=\"#c0392b\" stroke-width=\"1.2\" stroke-dasharray=\"4 3\"/>\n";
}

}  // namespace detail

/// Signal, A1 and D1 stacked top to bottom. The A1/D1 axes count coefficients,
/// so they span half as many positions as the signal axis.
inline void write_plot_svg(std::ostream& os, const PlotData& data, const PlotLayout& layout = {}) {
  const double inner_w = layout.width - layout.margin_left - layout.margin_right;
  const double height = layout.margin_top + 3 * layout.panel_height + 3 * layout.gap;
  const double n = static_cast<double>(data.signal.size());
  const double half = static_cast<double>(data.detail.size());

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::num(layout.width)
     << "\" height=\"" << detail::num(height) << "\" viewBox=\"0 0 " << detail::num(layout.width)
     << ' ' << detail::num(height) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << detail::num(layout.margin_left) << "\" y=\"18\" font-size=\"15\">"
     << detail::xml_escape(data.title);
  if (data.verdict) os << " (" << to_string(*data.verdict) << ", phase " << data.channel << ")";
  os << "</text>\n";

  std::vector<detail::Panel> panels;
  for (int i = 0; i < 3; ++i) {
    panels.push_back({layout.margin_left,
                      layout.margin_top + layout.gap / 2 + i * (layout.panel_height + layout.gap),
                      inner_w, layout.panel_height, i == 0 ? n : half});
  }
  detail::draw_panel(os, panels[0], data.signal, "Signal (p.u.)", "sample", "signal");
  detail::draw_panel(os, panels[1], data.approx, "Approximation A1", "coefficient", "approx");
  detail::draw_panel(os, panels[2], data.detail, "Detail D1", "coefficient", "detail");

  if (data.onset_sample) {
    const std::size_t coefficient = *data.onset_sample / 2;
    detail::draw_marker(os, panels[0], static_cast<double>(*data.onset_sample),
                        "data-sample=\"" + std::to_string(*data.onset_sample) + "\"");
    detail::draw_marker(os, panels[2], static_cast<double>(coefficient),
                        "data-coefficient-index=\"" + std::to_string(coefficient) + "\"");
  }
  os << "</svg>\n";
}

inline std::string plot_svg(const PlotData& data, const PlotLayout& layout = {}) {
  std::ostringstream os;
  write_plot_svg(os, data, layout);
  return os.str();
}

}  // namespace wavedetect
