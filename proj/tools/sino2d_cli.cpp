// sino2d: command-line front end.
//
//   sino2d gen      --params P.json --n N [--sigma S] [--seed K] [--out grid.csv]
//   sino2d estimate --grid grid.csv [--pad 4] [--dc-exclusion R] [--out result.json]
//   sino2d crlb     --A A --sigma S --n N [--out bounds.json]
//   sino2d fisher   --params P.json --sigma S --n N [--mode asymptotic|exact] [--out fisher.json]
//   sino2d mc       --config C.json [--seed K] [--out prefix]   -> prefix.json, prefix.csv
//   sino2d approx   --k-mult 1|2 --phi PHI --n N [--f-step 0.001] [--out curve.csv]
//
// Exit codes: 0 success, 2 input error, 3 computation failure.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sino2d/sino2d.hpp"

namespace {

using sino2d::Error;
using sino2d::ErrorKind;
using sino2d::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitCompute = 3;

int exit_code(ErrorKind kind) { return kind == ErrorKind::InvalidArgument ? kExitInput : kExitCompute; }

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) sino2d::fail(ErrorKind::InvalidArgument, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    sino2d::fail(ErrorKind::InvalidArgument, "malformed JSON in " + path + ": " + e.what());
  }
}

/// Writes `text` to `path`, or to stdout when `path` is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) sino2d::fail(ErrorKind::InvalidArgument, "cannot write " + path);
  out << text;
}

std::vector<std::string> outputs_of(const std::string& path) {
  return path.empty() ? std::vector<std::string>{} : std::vector<std::string>{path};
}

struct GenArgs {
  std::string params;
  int n = 0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

int run_gen(const GenArgs& a) {
  const json pj = read_json_file(a.params);
  const sino2d::ParamVector theta = sino2d::params_from_json(pj);
  sino2d::validate_params(theta);
  sino2d::validate_dimension(a.n);
  const auto clean = sino2d::synthesize(theta, a.n);
  const auto grid = sino2d::add_noise(clean, {a.sigma, a.seed});

  sino2d::RunManifest manifest{.command = "gen", .seed = a.seed, .outputs = outputs_of(a.out)};
  manifest.config = sino2d::params_to_json(theta);
  manifest.config["n"] = a.n;
  manifest.config["sigma"] = a.sigma;
  manifest.config["seed"] = a.seed;

  std::ostringstream os;
  sino2d::write_grid_csv(os, grid, &manifest);
  emit(a.out, os.str());
  return kExitOk;
}

struct EstimateArgs {
  std::string grid;
  int pad = sino2d::kDefaultPadFactor;
  std::optional<double> dc_exclusion;
  std::string out;
};

int run_estimate(const EstimateArgs& a) {
  std::ifstream in(a.grid);
  if (!in) sino2d::fail(ErrorKind::InvalidArgument, "cannot open " + a.grid);
  const sino2d::ParsedGrid parsed = sino2d::read_grid_csv(in);
  const int n = parsed.grid.n();
  const sino2d::EstimateOptions opt{.pad_factor = a.pad, .dc_exclusion = a.dc_exclusion};
  if (opt.pad_factor < 1) sino2d::fail(ErrorKind::InvalidArgument, "pad factor must be >= 1");
  if (opt.dc_exclusion && !(*opt.dc_exclusion > 0.0)) {
    sino2d::fail(ErrorKind::InvalidArgument, "dc exclusion radius must be > 0");
  }
  const sino2d::EstimationResult r = sino2d::estimate(parsed.grid, opt);
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';

  sino2d::RunManifest manifest{.command = "estimate", .outputs = outputs_of(a.out)};
  manifest.config = {{"grid", a.grid},
                     {"n", n},
                     {"pad", opt.pad_factor},
                     {"dc_exclusion", opt.dc_exclusion.value_or(sino2d::default_dc_exclusion(n))}};
  json j = sino2d::result_to_json(r);
  j["manifest"] = manifest.to_json();
  emit(a.out, sino2d::dump_json(j));
  return kExitOk;
}

struct CrlbArgs {
  double amplitude = 0.0;
  double sigma = 0.0;
  int n = 0;
  std::string out;
};

int run_crlb(const CrlbArgs& a) {
  const sino2d::CrlbBounds b = sino2d::crlb_closed_form({.A = a.amplitude}, a.sigma, a.n);
  sino2d::RunManifest manifest{.command = "crlb", .outputs = outputs_of(a.out)};
  manifest.config = {{"A", a.amplitude}, {"sigma", a.sigma}, {"n", a.n}};
  json j{{"crlb", sino2d::bounds_to_json(b)}, {"manifest", manifest.to_json()}};
  emit(a.out, sino2d::dump_json(j));
  return kExitOk;
}

struct FisherArgs {
  std::string params;
  double sigma = 0.0;
  int n = 0;
  std::string mode = "asymptotic";
  std::string out;
};

int run_fisher(const FisherArgs& a) {
  const sino2d::ParamVector theta = sino2d::params_from_json(read_json_file(a.params));
  sino2d::validate_params(theta);
  if (!(theta.A > 0.0)) sino2d::fail(ErrorKind::InvalidArgument, "amplitude A must be > 0");
  const bool exact = a.mode == "exact";
  const sino2d::FisherMatrix fm =
      exact ? sino2d::fisher_exact(theta, a.sigma, a.n) : sino2d::fisher_asymptotic(theta, a.sigma, a.n);
  const auto inv = sino2d::invert_fisher(fm);

  sino2d::RunManifest manifest{.command = "fisher", .outputs = outputs_of(a.out)};
  manifest.config = sino2d::params_to_json(theta);
  manifest.config["sigma"] = a.sigma;
  manifest.config["n"] = a.n;
  manifest.config["mode"] = a.mode;
  json j{{"mode", a.mode},
         {"order", {"A", "B", "phi", "f0", "f1"}},
         {"fisher", sino2d::matrix_to_json(fm.entries)},
         {"inverse", sino2d::matrix_to_json(inv)},
         {"determinant", sino2d::fisher_determinant(fm)},
         {"determinant_closed_form", sino2d::fisher_determinant_closed_form(theta.A, a.sigma, a.n)},
         {"crlb", sino2d::bounds_to_json(sino2d::crlb_from_inverse(inv))},
         {"crlb_closed_form", sino2d::bounds_to_json(sino2d::crlb_closed_form(theta, a.sigma, a.n))},
         {"manifest", manifest.to_json()}};
  emit(a.out, sino2d::dump_json(j));
  return kExitOk;
}

struct McArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

/// A config file is one McConfig object, optionally with
/// "sweep": {"sigma": [...]} or "sweep": {"n": [...]}.
std::vector<sino2d::McConfig> expand_mc_config(const json& j, std::optional<std::uint64_t> seed) {
  sino2d::McConfig base = sino2d::mc_config_from_json(j);
  if (seed) base.base_seed = *seed;
  if (!j.contains("sweep")) return {base};
  const json& sw = j.at("sweep");
  if (!sw.is_object() || sw.size() != 1) {
    sino2d::fail(ErrorKind::InvalidArgument, "sweep must be an object with exactly one of 'sigma' or 'n'");
  }
  std::vector<sino2d::McConfig> cfgs;
  for (const auto& [key, values] : sw.items()) {
    if (!values.is_array()) sino2d::fail(ErrorKind::InvalidArgument, "sweep values must be an array");
    for (const auto& v : values) {
      if (!v.is_number()) sino2d::fail(ErrorKind::InvalidArgument, "sweep values must be numbers");
      sino2d::McConfig c = base;
      if (key == "sigma") {
        c.sigma = v.get<double>();
      } else if (key == "n") {
        if (!v.is_number_integer()) sino2d::fail(ErrorKind::InvalidArgument, "sweep values for 'n' must be integers");
        c.n = v.get<int>();
      } else {
        sino2d::fail(ErrorKind::InvalidArgument, "unknown sweep key '" + key + "'");
      }
      cfgs.push_back(c);
    }
  }
  return cfgs;
}

int run_mc(const McArgs& a) {
  const json cj = read_json_file(a.config);
  const auto cfgs = expand_mc_config(cj, a.seed);
  const auto entries = sino2d::sweep(cfgs);

  std::vector<std::string> outputs;
  if (!a.out.empty()) outputs = {a.out + ".json", a.out + ".csv"};
  sino2d::RunManifest manifest{.command = "mc", .config = cj, .seed = cfgs.front().base_seed, .outputs = outputs};
  if (a.seed) manifest.config["seed"] = *a.seed;

  json runs = json::array();
  std::ostringstream csv;
  for (const auto& line : manifest.comment_lines()) csv << line << '\n';
  csv << "config,sigma,n,trials,failures,param,mean,bias,variance,crlb,efficiency\n";
  int code = kExitOk;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    json run{{"config", sino2d::mc_config_to_json(cfgs[i])}};
    if (e.summary) {
      run["summary"] = sino2d::summary_to_json(*e.summary);
      for (std::size_t p = 0; p < sino2d::kParamCount; ++p) {
        const auto& s = e.summary->params[p];
        csv << i << ',' << sino2d::format_double(cfgs[i].sigma) << ',' << cfgs[i].n << ',' << e.summary->trials << ','
            << e.summary->failures << ',' << sino2d::kParamNames[p] << ',' << sino2d::format_double(s.mean) << ','
            << sino2d::format_double(s.bias) << ',' << sino2d::format_double(s.variance) << ','
            << sino2d::format_double(s.crlb) << ',' << (std::isfinite(s.efficiency) ? sino2d::format_double(s.efficiency) : "nan")
            << '\n';
      }
    } else {
      run["error"] = e.error;
      std::cerr << "error: config " << i << ": " << e.error << '\n';
      code = std::max(code, exit_code(*e.error_kind));
    }
    runs.push_back(run);
  }
  json j{{"runs", runs}, {"manifest", manifest.to_json()}};
  if (a.out.empty()) {
    emit("", sino2d::dump_json(j));
  } else {
    emit(a.out + ".json", sino2d::dump_json(j));
    emit(a.out + ".csv", csv.str());
  }
  return code;
}

struct ApproxArgs {
  int k_mult = 0;
  double phi = 0.0;
  int n = 0;
  double f_step = 0.001;
  std::string out;
};

int run_approx(const ApproxArgs& a) {
  const auto grid = sino2d::frequency_grid(a.f_step);
  const auto curve = sino2d::approx_curve(a.k_mult, a.phi, a.n, grid);

  sino2d::RunManifest manifest{.command = "approx", .outputs = outputs_of(a.out)};
  manifest.config = {{"k_mult", a.k_mult}, {"phi", a.phi}, {"n", a.n}, {"f_step", a.f_step}};
  std::ostringstream os;
  for (const auto& line : manifest.comment_lines()) os << line << '\n';
  os << "f,y,envelope\n";
  for (const auto& pt : curve) {
    const double env = sino2d::lemma_envelope(2.0 * a.k_mult * sino2d::kPi * pt.f, a.n);
    os << sino2d::format_double(pt.f) << ',' << sino2d::format_double(pt.y) << ','
       << (std::isfinite(env) ? sino2d::format_double(env) : "inf") << '\n';
  }
  emit(a.out, os.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D sinusoid-with-offset estimation, Fisher information and CRLB tools"};
  app.set_version_flag("--version", sino2d::kVersion);
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "synthesize a (noisy) grid as CSV");
  gen_cmd->add_option("--params", gen.params, "parameter JSON file")->required();
  gen_cmd->add_option("--n", gen.n, "grid dimension")->required();
  gen_cmd->add_option("--sigma", gen.sigma, "noise standard deviation");
  gen_cmd->add_option("--seed", gen.seed, "noise seed");
  gen_cmd->add_option("--out", gen.out, "output CSV (default stdout)");

  EstimateArgs est;
  auto* est_cmd = app.add_subcommand("estimate", "estimate parameters from a grid CSV");
  est_cmd->add_option("--grid", est.grid, "grid CSV file")->required();
  est_cmd->add_option("--pad", est.pad, "zero-padding factor");
  est_cmd->add_option("--dc-exclusion", est.dc_exclusion, "DC exclusion radius (default max(2/n, 0.02))");
  est_cmd->add_option("--out", est.out, "output JSON (default stdout)");

  CrlbArgs crlb;
  auto* crlb_cmd = app.add_subcommand("crlb", "closed-form Cramer-Rao bounds");
  crlb_cmd->add_option("--A", crlb.amplitude, "amplitude")->required();
  crlb_cmd->add_option("--sigma", crlb.sigma, "noise standard deviation")->required();
  crlb_cmd->add_option("--n", crlb.n, "grid dimension")->required();
  crlb_cmd->add_option("--out", crlb.out, "output JSON (default stdout)");

  FisherArgs fisher;
  auto* fisher_cmd = app.add_subcommand("fisher", "Fisher information matrix, inverse and determinant");
  fisher_cmd->add_option("--params", fisher.params, "parameter JSON file")->required();
  fisher_cmd->add_option("--sigma", fisher.sigma, "noise standard deviation")->required();
  fisher_cmd->add_option("--n", fisher.n, "grid dimension")->required();
  fisher_cmd->add_option("--mode", fisher.mode, "asymptotic | exact")
      ->check(CLI::IsMember({"asymptotic", "exact"}));
  fisher_cmd->add_option("--out", fisher.out, "output JSON (default stdout)");

  McArgs mc;
  auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo efficiency study");
  mc_cmd->add_option("--config", mc.config, "config JSON file")->required();
  mc_cmd->add_option("--seed", mc.seed, "override the config's base seed");
  mc_cmd->add_option("--out", mc.out, "output prefix for .json and .csv (default: JSON to stdout)");

  ApproxArgs approx;
  auto* approx_cmd = app.add_subcommand("approx", "approximation-validity curves y(f)");
  approx_cmd->add_option("--k-mult", approx.k_mult, "1: sin(2 pi f x + phi), 2: sin(4 pi f x + phi)")->required();
  approx_cmd->add_option("--phi", approx.phi, "phase, radians");
  approx_cmd->add_option("--n", approx.n, "number of samples")->required();
  approx_cmd->add_option("--f-step", approx.f_step, "frequency step in (0, 1)");
  approx_cmd->add_option("--out", approx.out, "output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*est_cmd) return run_estimate(est);
    if (*crlb_cmd) return run_crlb(crlb);
    if (*fisher_cmd) return run_fisher(fisher);
    if (*mc_cmd) return run_mc(mc);
    if (*approx_cmd) return run_approx(approx);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  }
  return kExitInput;
}
