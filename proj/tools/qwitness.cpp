// qwitness: command-line front end for the quadrature witness analysis.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qwitness/analysis.hpp"
#include "qwitness/csv.hpp"
#include "qwitness/error.hpp"
#include "qwitness/rng.hpp"
#include "qwitness/sampler.hpp"
#include "qwitness/states.hpp"
#include "qwitness/version.hpp"

using namespace qwitness;
using nlohmann::json;

namespace {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
};

int exit_code(ErrorKind k) {
  // 3.. in declaration order of ErrorKind.
  return 3 + static_cast<int>(k);
}

struct StateFlags {
  std::string kind = "fock_mixture";
  std::optional<double> eta, nbar, alpha_sq;

  void attach(CLI::App* app) {
    app->add_option("--kind", kind, "fock_mixture | thermal | coherent_phase_averaged")
        ->capture_default_str();
    app->add_option("--eta", eta, "single-photon fraction (fock_mixture)");
    app->add_option("--nbar", nbar, "mean photon number (thermal)");
    app->add_option("--alpha-sq", alpha_sq, "|alpha|^2 (coherent_phase_averaged)");
  }

  bool any_parameter() const { return eta || nbar || alpha_sq; }

  StateSpec build() const {
    json j{{"kind", kind}};
    if (eta) j["eta"] = *eta;
    if (nbar) j["nbar"] = *nbar;
    if (alpha_sq) j["alpha_sq"] = *alpha_sq;
    return state_from_json(j);
  }
};

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

/// "start:stop:count" -> evenly spaced values, endpoints included.
std::vector<double> parse_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  require(parts.size() == 3, "grid must be start:stop:count, got '" + spec + "'");
  double a = 0, b = 0;
  long n = 0;
  try {
    a = std::stod(parts[0]);
    b = std::stod(parts[1]);
    n = std::stol(parts[2]);
  } catch (const std::exception&) {
    fail(ErrorKind::invalid_argument, "grid must be start:stop:count, got '" + spec + "'");
  }
  require(n >= 0, "grid count must be non-negative");
  std::vector<double> out;
  for (long i = 0; i < n; ++i) {
    const double d = static_cast<double>(n - 1);
    out.push_back(n == 1 ? a : (a * (d - static_cast<double>(i)) + b * static_cast<double>(i)) / d);
  }
  return out;
}

std::vector<double> parse_list(const std::string& spec) {
  std::vector<double> out;
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(p, &used));
      require(used == p.size(), "");
    } catch (const std::exception&) {
      fail(ErrorKind::invalid_argument, "cannot parse '" + p + "' as a number");
    }
  }
  return out;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    write_file_atomic(path, text);
}

// ---------------------------------------------------------------------------

struct AnalyzeArgs {
  std::string input, config_path, output = "-", tsv;
  int max_order = 16;
  std::string mode = "statistical", split = "half";
  double z_threshold = 5.0;
  std::uint64_t seed = 1;
  double convention_variance = kVacuumVariance;
  int bootstrap = 0;
  bool optimize_significance = false;
  unsigned threads = 1;
};

void setup_analyze(CLI::App& root, AnalyzeArgs& a, std::function<void()>& run) {
  auto* c = root.add_subcommand("analyze", "Witness analysis of a quadrature CSV file");
  c->add_option("input", a.input, "CSV with a 'quadrature' or 'quadrature,phase' header")
      ->required();
  c->add_option("--config", a.config_path, "JSON config; command-line flags take precedence");
  auto* mo = c->add_option("--max-order", a.max_order, "largest even polynomial order")
                 ->capture_default_str();
  auto* md = c->add_option("--mode", a.mode, "onset criterion: exact | statistical")
                 ->check(CLI::IsMember({"exact", "statistical"}))
                 ->capture_default_str();
  auto* sp = c->add_option("--split", a.split, "same | half")
                 ->check(CLI::IsMember({"same", "half"}))
                 ->capture_default_str();
  auto* zt = c->add_option("--z-threshold", a.z_threshold)->capture_default_str();
  auto* sd = c->add_option("--seed", a.seed)->capture_default_str();
  auto* cv = c->add_option("--convention-variance", a.convention_variance,
                           "vacuum quadrature variance of the input data")
                 ->capture_default_str();
  auto* bs = c->add_option("--bootstrap", a.bootstrap, "bootstrap resamples (0 = delta method)")
                 ->capture_default_str();
  auto* os = c->add_flag("--optimize-significance", a.optimize_significance,
                         "refine each witness by minimizing mean(f)/std(f)");
  auto* th = c->add_option("--threads", a.threads)->capture_default_str();
  c->add_option("-o,--output", a.output, "report path ('-' = stdout)")->capture_default_str();
  c->add_option("--tsv", a.tsv, "also write order, min_F, z_score, G_state as TSV");

  run = [&a, mo, md, sp, zt, sd, cv, bs, os, th] {
    AnalysisConfig cfg;
    if (!a.config_path.empty()) {
      std::ifstream in(a.config_path);
      if (!in) fail(ErrorKind::io_error, "cannot open config '" + a.config_path + "'");
      json j;
      try {
        j = json::parse(in);
      } catch (const json::exception& e) {
        fail(ErrorKind::parse_error, std::string("config is not valid JSON: ") + e.what());
      }
      cfg = config_from_json(j, cfg);
    }
    if (mo->count()) cfg.max_order = a.max_order;
    if (md->count()) cfg.mode = onset_mode_from_string(a.mode);
    if (sp->count()) cfg.split = split_mode_from_string(a.split);
    if (zt->count()) cfg.z_threshold = a.z_threshold;
    if (sd->count()) cfg.seed = a.seed;
    if (cv->count()) cfg.convention_variance = a.convention_variance;
    if (bs->count()) cfg.bootstrap = a.bootstrap;
    if (os->count()) cfg.optimize_significance = a.optimize_significance;
    if (th->count()) cfg.threads = a.threads;
    require(cfg.convention_variance > 0.0 && std::isfinite(cfg.convention_variance),
            "convention variance must be positive");

    const auto data = read_quadrature_csv(a.input, cfg.convention_variance);
    const auto report = analyze_dataset(data, cfg);
    emit(to_json(report).dump(2) + "\n", a.output);
    if (!a.tsv.empty()) {
      std::string t = "order\tmin_F\tz_score\tG_state\n";
      auto cell = [](const std::optional<double>& v) { return v ? format_double(*v) : "nan"; };
      for (const auto& o : report.orders) {
        t += std::to_string(o.order) + "\t" + cell(o.min_F) + "\t" +
             cell(o.significance ? std::optional(o.significance->z_score) : std::nullopt) + "\t" +
             cell(o.significance ? std::optional(o.significance->g_state) : std::nullopt) + "\n";
      }
      write_file_atomic(a.tsv, t);
    }
  };
}

struct SimulateArgs {
  StateFlags state;
  std::size_t n = 0;
  std::uint64_t seed = 1;
  std::string phase_mode = "randomized", output;
  unsigned threads = 1;
};

void setup_simulate(CLI::App& root, SimulateArgs& a, std::function<void()>& run) {
  auto* c = root.add_subcommand("simulate", "Write a synthetic homodyne record as CSV");
  a.state.attach(c);
  c->add_option("-n,--samples", a.n, "number of quadratures")->required();
  c->add_option("--seed", a.seed)->capture_default_str();
  c->add_option("--phase-mode", a.phase_mode, "randomized | tagged")
      ->check(CLI::IsMember({"randomized", "tagged"}))
      ->capture_default_str();
  c->add_option("--threads", a.threads)->capture_default_str();
  c->add_option("-o,--output", a.output, "CSV path ('-' = stdout)")->required();
  run = [&a] {
    const auto s = a.state.build();
    const auto mode = phase_mode_from_string(a.phase_mode);
    const auto data = sample(s, a.n, a.seed, mode, a.threads);
    const CsvComments comments{{"generator", "qwitness " + std::string(kVersion)},
                               {"state", to_json(s).dump()},
                               {"samples", std::to_string(a.n)},
                               {"seed", std::to_string(a.seed)},
                               {"phase_mode", a.phase_mode},
                               {"rng", std::string(kGeneratorName)},
                               {"vacuum_variance", format_double(kVacuumVariance)}};
    emit(format_quadrature_csv(data, comments), a.output);
  };
}

struct OracleArgs {
  StateFlags state;
  int k = 6;
  bool as_json = false;
};

void setup_oracle(CLI::App& root, OracleArgs& a, std::function<void()>& run) {
  auto* c = root.add_subcommand("oracle", "Print exact radial moments <r^{2k}> of a state");
  a.state.attach(c);
  c->add_option("-K,--max-k", a.k, "largest k")->capture_default_str();
  c->add_flag("--json", a.as_json, "emit JSON instead of TSV");
  run = [&a] {
    const auto s = a.state.build();
    const auto mu = oracle_radial_moments(s, a.k);
    if (a.as_json) {
      std::cout << json{{"state", to_json(s)},
                        {"vacuum_variance", kVacuumVariance},
                        {"mu", mu.values()}}
                       .dump(2)
                << "\n";
      return;
    }
    std::cout << "k\tmu\n";
    for (int k = 1; k <= a.k; ++k) std::cout << k << "\t" << format_double(mu.mu(k)) << "\n";
  };
}

struct SweepArgs {
  std::string etas, grid, output = "-";
  int max_order = 20;
  double tol_neg = 1e-9;
};

void setup_sweep(CLI::App& root, SweepArgs& a, std::function<void()>& run) {
  auto* c = root.add_subcommand(
      "sweep", "Exact onset order of the vacuum/single-photon mixture over eta");
  auto* list = c->add_option("--etas", a.etas, "comma-separated eta values");
  auto* grid = c->add_option("--eta-grid", a.grid, "start:stop:count");
  list->excludes(grid);
  c->add_option("--max-order", a.max_order)->capture_default_str();
  c->add_option("--tol-neg", a.tol_neg)->capture_default_str();
  c->add_option("-o,--output", a.output, "TSV path ('-' = stdout)")->capture_default_str();
  run = [&a] {
    const auto etas = !a.etas.empty() ? parse_list(a.etas)
                      : !a.grid.empty() ? parse_grid(a.grid)
                                        : parse_grid("0.5:1:11");
    const auto pts = sweep_onset(etas, a.max_order, a.tol_neg);
    std::string t = "eta\tonset_order\n";
    for (const auto& p : pts)
      t += format_double(p.eta) + "\t" + (p.onset ? std::to_string(*p.onset) : "none") + "\n";
    emit(t, a.output);
  };
}

struct ProfileArgs {
  StateFlags state;
  std::string moments, grid = "0:4:81", output = "-";
  int order = 4;
};

void setup_profile(CLI::App& root, ProfileArgs& a, std::function<void()>& run) {
  auto* c = root.add_subcommand("profile", "Tabulate F(r) of the optimal witness and W(r)");
  a.state.attach(c);
  c->add_option("--moments", a.moments, "comma-separated mu[1], mu[2], ... instead of a state");
  c->add_option("-N,--order", a.order, "witness order")->capture_default_str();
  c->add_option("--grid", a.grid, "radial grid start:stop:count")->capture_default_str();
  c->add_option("-o,--output", a.output, "TSV path ('-' = stdout)")->capture_default_str();
  run = [&a] {
    std::optional<StateSpec> state;
    std::optional<RadialMomentSet> mu;
    if (!a.moments.empty()) {
      require(!a.state.any_parameter(), "give either --moments or a state, not both");
      auto v = parse_list(a.moments);
      v.insert(v.begin(), 1.0);
      mu.emplace(std::move(v), MomentSource::empirical);
    } else {
      state = a.state.build();
      mu.emplace(oracle_radial_moments(*state, std::max(a.order, 1)));
    }
    const auto grid = parse_grid(a.grid);
    const auto table = witness_profile_table(*mu, a.order, grid, state);
    std::string t = state ? "r\tF\tW\n" : "r\tF\n";
    for (const auto& p : table) {
      t += format_double(p.r) + "\t" + format_double(p.test_function);
      if (p.wigner) t += "\t" + format_double(*p.wigner);
      t += "\n";
    }
    emit(t, a.output);
  };
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quadrature-moment nonclassicality witness"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  AnalyzeArgs analyze;
  SimulateArgs simulate;
  OracleArgs oracle;
  SweepArgs sweep;
  ProfileArgs profile;
  std::function<void()> run_analyze, run_simulate, run_oracle, run_sweep, run_profile;
  setup_analyze(app, analyze, run_analyze);
  setup_simulate(app, simulate, run_simulate);
  setup_oracle(app, oracle, run_oracle);
  setup_sweep(app, sweep, run_sweep);
  setup_profile(app, profile, run_profile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    const auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "analyze") run_analyze();
    else if (name == "simulate") run_simulate();
    else if (name == "oracle") run_oracle();
    else if (name == "sweep") run_sweep();
    else if (name == "profile") run_profile();
  } catch (const ParseError& e) {
    std::cerr << "qwitness: parse-error (line " << e.line() << "): " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const Error& e) {
    std::cerr << "qwitness: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "qwitness: internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kOk;
}
