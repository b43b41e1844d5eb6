#pragma once

// File formats.
//
// Grid CSV: optional "# key=value" manifest lines, then n rows of n
// comma-separated values; row index is x. Values are written with 17
// significant digits so they round-trip exactly.
//
// Parameter JSON: flat object {"A", "B", "phi", "f0", "f1"} plus optional
// "sigma", "n", "seed".

#include <nlohmann/json.hpp>

#include <climits>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sino2d/core.hpp"
#include "sino2d/estimator.hpp"
#include "sino2d/fisher.hpp"
#include "sino2d/montecarlo.hpp"

namespace sino2d {

inline constexpr const char* kVersion = "0.1.0";

using json = nlohmann::ordered_json;

/// "%.17g": exact round trip for every finite double.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct RunManifest {
  std::string command{};
  json config = json::object();
  std::string version = kVersion;
  std::optional<std::uint64_t> seed{};
  std::vector<std::string> outputs{};

  json to_json() const {
    json j;
    j["command"] = command;
    j["version"] = version;
    j["config"] = config;
    if (seed) j["seed"] = *seed;
    j["outputs"] = outputs;
    return j;
  }

  /// One "# key=value" line per field; config is embedded as compact JSON.
  std::vector<std::string> comment_lines() const {
    std::vector<std::string> lines{"# command=" + command, "# version=" + version, "# config=" + config.dump()};
    if (seed) lines.push_back("# seed=" + std::to_string(*seed));
    for (const auto& o : outputs) lines.push_back("# output=" + o);
    return lines;
  }
};

inline void write_grid_csv(std::ostream& os, const GridSignal& grid, const RunManifest* manifest = nullptr) {
  if (manifest) {
    for (const auto& line : manifest->comment_lines()) os << line << '\n';
  }
  const int n = grid.n();
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      if (y) os << ',';
      os << format_double(grid(x, y));
    }
    os << '\n';
  }
}

struct ParsedGrid {
  GridSignal grid;
  std::vector<std::pair<std::string, std::string>> header;  ///< "# key=value" lines
};

inline double parse_number(const std::string& token, std::size_t row) {
  std::size_t used = 0;
  double v = 0.0;
  const auto first = token.find_first_not_of(" \t\r");
  const auto last = token.find_last_not_of(" \t\r");
  if (first == std::string::npos) fail(ErrorKind::InvalidArgument, "empty value in grid row " + std::to_string(row));
  const std::string t = token.substr(first, last - first + 1);
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    fail(ErrorKind::InvalidArgument, "unparseable value '" + t + "' in grid row " + std::to_string(row));
  }
  if (used != t.size()) fail(ErrorKind::InvalidArgument, "unparseable value '" + t + "' in grid row " + std::to_string(row));
  return v;
}

/// Parses a grid CSV; every malformation is an InvalidArgument error.
inline ParsedGrid read_grid_csv(std::istream& is) {
  ParsedGrid out;
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t width = 0;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto start = line.find_first_not_of("# ");
      const std::string body = start == std::string::npos ? std::string() : line.substr(start);
      const auto eq = body.find('=');
      if (eq != std::string::npos) out.header.emplace_back(body.substr(0, eq), body.substr(eq + 1));
      continue;
    }
    std::size_t count = 0;
    std::stringstream ss(line);
    std::string token;
    while (std::getline(ss, token, ',')) {
      values.push_back(parse_number(token, rows));
      ++count;
    }
    if (line.back() == ',') fail(ErrorKind::InvalidArgument, "trailing comma in grid row " + std::to_string(rows));
    if (rows == 0) {
      width = count;
    } else if (count != width) {
      fail(ErrorKind::InvalidArgument, "grid row " + std::to_string(rows) + " has " + std::to_string(count) +
                                           " values, expected " + std::to_string(width));
    }
    ++rows;
  }
  if (rows == 0) fail(ErrorKind::InvalidArgument, "grid file has no data rows");
  if (rows != width) {
    fail(ErrorKind::InvalidArgument,
         "grid must be square: " + std::to_string(rows) + " rows x " + std::to_string(width) + " columns");
  }
  out.grid = GridSignal(static_cast<int>(rows), std::move(values));
  return out;
}

inline json params_to_json(const ParamVector& p) {
  return json{{"A", p.A}, {"B", p.B}, {"phi", p.phi}, {"f0", p.f0}, {"f1", p.f1}};
}

inline double require_number(const json& j, const char* key) {
  if (!j.contains(key)) fail(ErrorKind::InvalidArgument, std::string("missing key '") + key + "'");
  if (!j.at(key).is_number()) fail(ErrorKind::InvalidArgument, std::string("key '") + key + "' must be a number");
  return j.at(key).get<double>();
}

inline int require_integer(const json& j, const char* key) {
  if (!j.contains(key)) fail(ErrorKind::InvalidArgument, std::string("missing key '") + key + "'");
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < INT_MIN || v.get<long long>() > INT_MAX) {
    fail(ErrorKind::InvalidArgument, std::string("key '") + key + "' must be an integer");
  }
  return static_cast<int>(v.get<long long>());
}

/// Reads A, B, phi, f0, f1 from a flat JSON object (other keys are ignored).
inline ParamVector params_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorKind::InvalidArgument, "parameter file must hold a JSON object");
  return {require_number(j, "A"), require_number(j, "B"), require_number(j, "phi"), require_number(j, "f0"),
          require_number(j, "f1")};
}

inline json result_to_json(const EstimationResult& r) {
  json j = params_to_json(r.theta_hat);
  j["peak_power"] = r.peak_power;
  j["coarse_bin"] = {r.coarse_bin.first, r.coarse_bin.second};
  j["refine_iterations"] = r.refine_iterations;
  j["canonicalized"] = r.canonicalized;
  j["warnings"] = r.warnings;
  return j;
}

inline json bounds_to_json(const CrlbBounds& b) {
  return json{{"A", b.var_A}, {"B", b.var_B}, {"phi", b.var_phi}, {"f0", b.var_f0}, {"f1", b.var_f1}};
}

inline json matrix_to_json(const Matrix<5>& m) {
  json rows = json::array();
  for (const auto& r : m) rows.push_back(json(r));
  return rows;
}

/// NaN (undefined efficiency) becomes null.
inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json summary_to_json(const McSummary& s) {
  json params = json::object();
  for (std::size_t i = 0; i < kParamCount; ++i) {
    const ParamStats& p = s.params[i];
    params[kParamNames[i]] = {{"mean", p.mean},
                              {"bias", p.bias},
                              {"variance", p.variance},
                              {"crlb", p.crlb},
                              {"efficiency", number_or_null(p.efficiency)},
                              {"noiseless_error", s.noiseless_error[i]}};
  }
  return json{{"trials", s.trials},
              {"failures", s.failures},
              {"j_checks", s.j_checks},
              {"j_violations", s.j_violations},
              {"params", params}};
}

/// Reads an McConfig from {"A",...,"f1", "sigma", "n", "trials", "seed",
/// optional "pad", "dc_exclusion"}.
inline McConfig mc_config_from_json(const json& j) {
  McConfig cfg;
  cfg.theta_true = params_from_json(j);
  cfg.sigma = require_number(j, "sigma");
  cfg.n = require_integer(j, "n");
  cfg.trials = require_integer(j, "trials");
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) {
      fail(ErrorKind::InvalidArgument, "key 'seed' must be a non-negative integer");
    }
    cfg.base_seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("pad")) cfg.pad_factor = require_integer(j, "pad");
  if (j.contains("dc_exclusion")) cfg.dc_exclusion = require_number(j, "dc_exclusion");
  return cfg;
}

inline json mc_config_to_json(const McConfig& cfg) {
  json j = params_to_json(cfg.theta_true);
  j["sigma"] = cfg.sigma;
  j["n"] = cfg.n;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.base_seed;
  j["pad"] = cfg.pad_factor;
  j["dc_exclusion"] = cfg.dc_exclusion.value_or(default_dc_exclusion(cfg.n));
  return j;
}

/// Doubles are written in the shortest form that parses back to the same
/// value (never more than 17 significant digits).
inline std::string dump_json(const json& j) {
  return j.dump(2) + "\n";
}

}  // namespace sino2d
