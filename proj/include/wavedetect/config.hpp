#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "wavedetect/detector.hpp"
#include "wavedetect/error.hpp"
#include "wavedetect/grid_synth.hpp"
#include "wavedetect/waveform_io.hpp"

namespace wavedetect {

// --- INI -------------------------------------------------------------------
//
//   [section name]
//   key = value      ; or # starts a comment
//
// Keys before the first section header are an error. Line numbers are kept so
// value errors can point at the offending line.

struct IniEntry {
  std::string value;
  std::size_t line = 0;
};

struct IniSection {
  std::string name;
  std::size_t line = 0;
  std::vector<std::pair<std::string, IniEntry>> entries;

  const IniEntry* find(const std::string& key) const {
    for (const auto& [k, e] : entries) {
      if (k == key) return &e;
    }
    return nullptr;
  }
};

struct IniDocument {
  std::vector<IniSection> sections;

  const IniSection* find(const std::string& name) const {
    for (const auto& s : sections) {
      if (s.name == name) return &s;
    }
    return nullptr;
  }
};

inline std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline Error ini_error(std::size_t line, const std::string& why) {
  return Error(ErrorCode::MalformedInput, "line " + std::to_string(line) + ": " + why);
}

inline IniDocument parse_ini(std::istream& is) {
  IniDocument doc;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    const auto comment = raw.find_first_of(";#");
    std::string line = trim(comment == std::string::npos ? raw : raw.substr(0, comment));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ini_error(line_no, "unterminated section header");
      std::string name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) throw ini_error(line_no, "empty section name");
      if (doc.find(name)) throw ini_error(line_no, "duplicate section [" + name + "]");
      doc.sections.push_back(IniSection{std::move(name), line_no, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ini_error(line_no, "expected 'key = value'");
    if (doc.sections.empty()) throw ini_error(line_no, "key outside of any section");
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ini_error(line_no, "empty key");
    auto& section = doc.sections.back();
    if (section.find(key)) throw ini_error(line_no, "duplicate key '" + key + "'");
    section.entries.emplace_back(std::move(key), IniEntry{trim(line.substr(eq + 1)), line_no});
  }
  return doc;
}

inline IniDocument parse_ini(const std::string& text) {
  std::istringstream is(text);
  return parse_ini(is);
}

inline double ini_number(const IniEntry& e, const std::string& key) {
  const auto v = parse_double(e.value);
  if (!v) throw ini_error(e.line, key + " is not a number: '" + e.value + "'");
  return *v;
}

inline std::uint64_t ini_unsigned(const IniEntry& e, const std::string& key) {
  if (e.value.empty() || e.value.find_first_not_of("0123456789") != std::string::npos) {
    throw ini_error(e.line, key + " is not a non-negative integer: '" + e.value + "'");
  }
  try {
    return std::stoull(e.value);
  } catch (const std::exception&) {
    throw ini_error(e.line, key + " is out of range");
  }
}

// --- detector config -------------------------------------------------------

inline void write_detector_config(std::ostream& os, const DetectorConfig& cfg) {
  os << "[detector]\n"
     << "filter_name = " << to_string(cfg.filter_name) << '\n'
     << "gate_threshold = " << format_double("%.17g", cfg.gate_threshold) << '\n'
     << "class_threshold = " << format_double("%.17g", cfg.class_threshold) << '\n'
     << "channel_policy = " << to_string(cfg.channel_policy) << '\n';
}

inline DetectorConfig read_detector_config(const IniDocument& doc) {
  const IniSection* section = doc.find("detector");
  if (!section) throw Error(ErrorCode::MalformedInput, "missing [detector] section");
  DetectorConfig cfg;
  auto require = [&](const std::string& key) -> const IniEntry& {
    const IniEntry* e = section->find(key);
    if (!e) throw ini_error(section->line, "[detector] lacks '" + key + "'");
    return *e;
  };
  for (const auto& [key, entry] : section->entries) {
    try {
      if (key == "filter_name") {
        cfg.filter_name = parse_wavelet_name(entry.value);
      } else if (key == "gate_threshold") {
        cfg.gate_threshold = ini_number(entry, key);
      } else if (key == "class_threshold") {
        cfg.class_threshold = ini_number(entry, key);
      } else if (key == "channel_policy") {
        cfg.channel_policy = parse_channel_policy(entry.value);
      } else {
        throw ini_error(entry.line, "unknown key '" + key + "'");
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::MalformedInput) throw;
      throw ini_error(entry.line, e.what());
    }
  }
  require("filter_name");
  require("gate_threshold");
  require("class_threshold");
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw ini_error(section->line, e.what());
  }
  return cfg;
}

inline DetectorConfig read_detector_config(std::istream& is) {
  return read_detector_config(parse_ini(is));
}

// --- scenario spec files ---------------------------------------------------
//
//   [synthesis]                 ; optional defaults for every scenario
//   sample_rate = 3200
//   total_duration = 1.0
//   nominal_frequency = 50
//   noise_std = 0.001
//
//   [scenario bus14_island]
//   bus = 14
//   disturbance = Islanding     ; None, Islanding, FaultAG ... FaultABC
//   onset = 0.61
//   duration = 0.39
//   seed = 7
//   dg = pv:0.25, wind:0.3      ; optional, kind:penetration; default: the bus mix
//
// Any [synthesis] key may also be set inside a scenario.

inline std::vector<DgSource> parse_dg_list(const IniEntry& e) {
  std::vector<DgSource> out;
  std::string item;
  std::istringstream items(e.value);
  while (std::getline(items, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    const std::string kind = trim(item.substr(0, colon));
    double penetration = kind == "wind" ? WindSource{}.penetration : PvSource{}.penetration;
    if (colon != std::string::npos) {
      const auto v = parse_double(trim(item.substr(colon + 1)));
      if (!v) throw ini_error(e.line, "bad penetration in '" + item + "'");
      penetration = *v;
    }
    if (kind == "wind") {
      out.push_back(wind_at(penetration));
    } else if (kind == "pv") {
      out.push_back(pv_at(penetration));
    } else {
      throw ini_error(e.line, "unknown DG kind '" + kind + "' (expected wind or pv)");
    }
  }
  return out;
}

/// True if `key` is a shared synthesis setting and was applied.
inline bool apply_synthesis_key(Scenario& s, const std::string& key, const IniEntry& e) {
  if (key == "sample_rate") s.sample_rate = ini_number(e, key);
  else if (key == "total_duration") s.total_duration = ini_number(e, key);
  else if (key == "nominal_frequency") s.nominal_frequency = ini_number(e, key);
  else if (key == "noise_std") s.noise_std = ini_number(e, key);
  else return false;
  return true;
}

inline std::vector<Scenario> read_scenario_spec(const IniDocument& doc) {
  Scenario defaults;
  if (const IniSection* synth = doc.find("synthesis")) {
    for (const auto& [key, entry] : synth->entries) {
      if (!apply_synthesis_key(defaults, key, entry)) {
        throw ini_error(entry.line, "unknown [synthesis] key '" + key + "'");
      }
    }
  }
  std::vector<Scenario> out;
  for (const auto& section : doc.sections) {
    if (section.name == "synthesis") continue;
    if (section.name.rfind("scenario ", 0) != 0) {
      throw ini_error(section.line, "unexpected section [" + section.name + "]");
    }
    Scenario s = defaults;
    s.label = trim(section.name.substr(9));
    if (s.label.empty() || s.label.find_first_of(",/\\ ") != std::string::npos) {
      throw ini_error(section.line, "scenario name must be non-empty without spaces, commas or slashes");
    }
    bool has_bus = false, has_dg = false;
    for (const auto& [key, entry] : section.entries) {
      if (apply_synthesis_key(s, key, entry)) continue;
      if (key == "bus") {
        s.bus_id = static_cast<int>(ini_unsigned(entry, key));
        has_bus = true;
      } else if (key == "disturbance") {
        try {
          s.disturbance = parse_disturbance(entry.value);
        } catch (const Error& err) {
          throw ini_error(entry.line, err.what());
        }
      } else if (key == "onset") {
        s.onset = ini_number(entry, key);
      } else if (key == "duration") {
        s.duration = ini_number(entry, key);
      } else if (key == "seed") {
        s.seed = ini_unsigned(entry, key);
      } else if (key == "dg") {
        s.dg_mix = parse_dg_list(entry);
        has_dg = true;
      } else {
        throw ini_error(entry.line, "unknown scenario key '" + key + "'");
      }
    }
    if (!has_bus) throw ini_error(section.line, "scenario '" + s.label + "' lacks 'bus'");
    if (!has_dg) s.dg_mix = bus_dg_mix(s.bus_id);
    try {
      s.validate();
    } catch (const Error& err) {
      throw ini_error(section.line, err.what());
    }
    out.push_back(std::move(s));
  }
  if (out.empty()) throw Error(ErrorCode::MalformedInput, "line 0: no [scenario ...] sections");
  return out;
}

inline std::vector<Scenario> read_scenario_spec(std::istream& is) {
  return read_scenario_spec(parse_ini(is));
}

}  // namespace wavedetect
