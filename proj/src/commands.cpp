#include "gslond/commands.hpp"

#include "gslond/beta_schedule.hpp"
#include "gslond/boundaries.hpp"
#include "gslond/compensated_sum.hpp"
#include "gslond/errors.hpp"
#include "gslond/lond_engine.hpp"
#include "gslond/simulator.hpp"
#include "gslond/tables.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

namespace gslond {

namespace {

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) {
    return {};
  }
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

BetaSchedule make_schedule(BetaMode mode, double alpha, std::optional<std::size_t> n_bound,
                           BetaMode dependent_base) {
  auto make = [&](BetaMode m) {
    switch (m) {
      case BetaMode::Unbounded: return BetaSchedule::unbounded(alpha);
      case BetaMode::Bounded:
      case BetaMode::Equal:
        if (!n_bound) {
          throw ConfigError("n-bound", "beta mode '" + std::string(to_string(m)) +
                                           "' needs --n-bound");
        }
        return m == BetaMode::Bounded ? BetaSchedule::bounded(alpha, *n_bound)
                                      : BetaSchedule::equal(alpha, *n_bound);
      case BetaMode::Dependent: break;
    }
    throw ConfigError("dependent-base", "dependent schedules need a base mode");
  };
  return mode == BetaMode::Dependent ? BetaSchedule::dependent(make(dependent_base)) : make(mode);
}

std::vector<SpendingKind> parse_spending_list(const std::string& text) {
  std::vector<SpendingKind> kinds;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    kinds.push_back(parse_spending_kind(trim(item)));
  }
  if (kinds.empty()) {
    throw ConfigError("spending", "no spending function given");
  }
  return kinds;
}

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

// ---- boundaries ---------------------------------------------------------

struct BoundariesOptions {
  double alpha = 0.05;
  std::string spending = "po,obf";
  std::string beta_mode = "equal";
  std::string dependent_base = "unbounded";
  std::optional<std::size_t> n_bound;
  std::size_t hypotheses = 3;
  std::size_t hypothesis = 1;
  double t1 = 0.5;
  double alpha_futility = 0.5;
  std::size_t n = 50;
  std::size_t n_delta = 20;
  std::string format = "text";
  std::string table = "all";
  std::vector<std::size_t> targets;
  int digits = 4;
};

void print_row(std::ostream& out, const std::vector<std::string>& cells, bool csv,
               std::size_t width) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (csv) {
      out << (i ? "," : "") << cells[i];
    } else {
      std::string c = cells[i];
      if (i + 1 < cells.size() && c.size() < width) {
        c.resize(width, ' ');
      }
      out << c << (i + 1 < cells.size() ? " " : "");
    }
  }
  out << '\n';
}

int cmd_boundaries(const BoundariesOptions& o, std::ostream& out) {
  const bool csv = o.format == "csv";
  const auto kinds = parse_spending_list(o.spending);
  if (o.hypotheses == 0) {
    throw ConfigError("K", "must be positive");
  }
  if (o.hypothesis == 0 || o.hypothesis > o.hypotheses) {
    throw ConfigError("hypothesis", "must lie in 1..K");
  }
  const std::size_t n1 = static_cast<std::size_t>(std::llround(o.t1 * static_cast<double>(o.n)));
  const auto schedule = make_schedule(parse_beta_mode(o.beta_mode), o.alpha,
                                      o.n_bound ? o.n_bound : std::optional(o.hypotheses),
                                      parse_beta_mode(o.dependent_base));
  BoundaryCache cache;
  const std::size_t w = 16;
  bool first_table = true;
  auto separate = [&] {
    if (!first_table) {
      out << '\n';
    }
    first_table = false;
  };

  if (o.table == "all" || o.table == "levels") {
    const double beta = schedule(o.hypothesis);
    separate();
    if (!csv) {
      out << "Nominal levels of H" << o.hypothesis << " (beta = " << fixed(beta, 6)
          << ", alpha = " << o.alpha << ", t1 = " << o.t1 << ")\n";
    }
    std::vector<std::string> header{"prior_rejections", "LOND"};
    for (SpendingKind k : kinds) {
      header.push_back(upper(to_string(k)) + "_stage1");
      header.push_back(upper(to_string(k)) + "_stage2");
    }
    print_row(out, header, csv, w);
    for (const auto& row : level_table(beta, o.hypotheses - 1, kinds, o.t1, cache)) {
      std::vector<std::string> cells{std::to_string(row.prior_rejections),
                                     fixed(row.level, o.digits)};
      for (const auto& p : row.pairs) {
        cells.push_back(fixed(p.interim, o.digits));
        cells.push_back(fixed(p.final, o.digits));
      }
      print_row(out, cells, csv, w);
    }
  }

  if (o.table == "all" || o.table == "variants") {
    std::vector<std::size_t> targets = o.targets;
    if (targets.empty() && o.hypotheses <= 4) {
      for (std::size_t t = 2; t <= o.hypotheses; ++t) {
        targets.push_back(t);
      }
    }
    for (SpendingKind kind : kinds) {
      VariantDesign design;
      design.hypotheses = o.hypotheses;
      design.n = o.n;
      design.n1 = n1;
      design.n_delta = o.n_delta;
      design.alpha = o.alpha;
      design.alpha_futility = o.alpha_futility;
      design.spending = kind;
      for (std::size_t target : targets) {
        if (target == 0 || target > o.hypotheses) {
          throw ConfigError("target", "must lie in 1..K");
        }
        separate();
        if (!csv) {
          out << "Variant boundaries of H" << target << " (" << upper(to_string(kind))
              << ", alpha = " << o.alpha << ")\n";
        }
        std::vector<std::string> header;
        for (std::size_t j = 1; j <= o.hypotheses; ++j) {
          if (j != target) {
            header.push_back("H" + std::to_string(j));
          }
        }
        for (const char* c : {"gsLOND_stage1", "gsLOND_stage2", "gsLOND.II_stage2",
                              "gsLOND.III_stage1", "gsLOND.III_stage2", "gsLOND.II.III_stage2"}) {
          header.push_back(c);
        }
        print_row(out, header, csv, w + 3);
        for (const auto& row : variant_table(design, schedule, target, cache)) {
          std::vector<std::string> cells;
          for (auto f : row.others) {
            cells.emplace_back(to_string(f));
          }
          const auto& b = row.boundaries;
          for (double v : {b.gs_interim, b.gs_final, b.ii_final, b.iii_interim, b.iii_final,
                           b.ii_iii_final}) {
            cells.push_back(fixed(v, o.digits));
          }
          print_row(out, cells, csv, w + 3);
        }
      }
    }
  }
  return kExitOk;
}

// ---- betas --------------------------------------------------------------

struct BetasOptions {
  std::string beta_mode = "unbounded";
  std::string dependent_base = "unbounded";
  double alpha = 0.025;
  std::optional<std::size_t> n_bound;
  std::size_t count = 10;
};

int cmd_betas(const BetasOptions& o, std::ostream& out) {
  const auto schedule = make_schedule(parse_beta_mode(o.beta_mode), o.alpha, o.n_bound,
                                      parse_beta_mode(o.dependent_base));
  if (schedule.bound() && o.count > *schedule.bound()) {
    throw ConfigError("count", "count " + std::to_string(o.count) + " exceeds N = " +
                                   std::to_string(*schedule.bound()));
  }
  out << "index,beta,cumulative\n";
  CompensatedSum cumulative;
  for (std::size_t j = 1; j <= o.count; ++j) {
    const double b = schedule(j);
    cumulative.add(b);
    out << j << ',' << fixed(b, 8) << ',' << fixed(cumulative.value(), 8) << '\n';
  }
  return kExitOk;
}

// ---- decide -------------------------------------------------------------

struct DecideOptions {
  double alpha = 0.025;
  double alpha_futility = 0.5;
  std::string spending = "obf";
  std::string procedure = "gsLOND";
  double t1 = 0.5;
  std::size_t bonferroni_k = 0;
  std::string input;
  std::string log;
};

class LineError : public std::runtime_error {
 public:
  LineError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what) {}
};

int cmd_decide(const DecideOptions& o, std::istream& stdin_stream, std::ostream& out) {
  EngineConfig config;
  config.alpha = o.alpha;
  config.alpha_futility = o.alpha_futility;
  config.spending = parse_spending_kind(o.spending);
  config.procedure = parse_procedure(o.procedure);
  config.t1 = o.t1;
  config.bonferroni_k = o.bonferroni_k;
  LondEngine engine(config);

  std::ifstream file;
  if (!o.input.empty() && o.input != "-") {
    file.open(o.input);
    if (!file) {
      throw ConfigError("input", "cannot read '" + o.input + "'");
    }
  }
  std::istream& in = file.is_open() ? static_cast<std::istream&>(file) : stdin_stream;
  std::ofstream log;
  if (!o.log.empty()) {
    log.open(o.log);
    if (!log) {
      throw ConfigError("log", "cannot write '" + o.log + "'");
    }
  }

  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(raw.substr(0, raw.find('#')));
    if (text.empty()) {
      continue;
    }
    std::istringstream tokens(text);
    std::string verb;
    tokens >> verb;
    try {
      if (verb == "REGISTER") {
        double beta = 0.0;
        if (!(tokens >> beta) || !(tokens >> std::ws).eof()) {
          throw LineError(line, "expected 'REGISTER <beta>'");
        }
        const std::size_t i = engine.register_hypothesis(beta);
        out << i << " register " << fixed(beta, 6) << " - Registered\n";
      } else if (verb == "INTERIM" || verb == "FINAL") {
        std::size_t i = 0;
        double p = 0.0;
        double t = 0.0;
        if (!(tokens >> i >> p >> t) || !(tokens >> std::ws).eof()) {
          throw LineError(line, "expected '" + verb + " <index> <p> <time>'");
        }
        if (verb == "INTERIM") {
          engine.submit_interim(i, p, t);
        } else {
          engine.submit_final(i, p, t);
        }
        const DecisionEvent& e = engine.log().back();
        out << e.index << ' ' << to_string(e.stage) << ' ' << fixed(e.level, 6) << ' '
            << fixed(e.boundary, 6) << ' ' << to_string(e.outcome) << '\n';
      } else {
        throw LineError(line, "unknown event '" + verb + "'");
      }
    } catch (const LineError&) {
      throw;
    } catch (const NumericalError&) {
      throw;
    } catch (const std::exception& e) {
      throw LineError(line, e.what());
    }
    if (log.is_open()) {
      log << text << '\n';
    }
  }
  return kExitOk;
}

// ---- simulate -----------------------------------------------------------

struct SimulateOptions {
  std::string config;
  std::string manifest;
  std::string out;
  std::size_t jobs = 0;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replications;
  std::optional<double> alpha;
  std::optional<std::string> spending;
  std::optional<std::string> beta_mode;
  std::optional<std::string> n_bound;
  bool quiet = false;
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err) {
  RunManifest manifest;
  if (!o.manifest.empty()) {
    manifest = RunManifest::load(o.manifest);
    if (!o.config.empty()) {
      throw ConfigError("config", "--config and --manifest are mutually exclusive");
    }
  } else {
    if (o.config.empty()) {
      throw ConfigError("config", "--config or --manifest is required");
    }
    manifest.config = resolve_config_path(o.config).string();
  }
  auto add_override = [&](const std::string& key, const std::string& value) {
    manifest.overrides.emplace_back(key, value);
  };
  if (o.seed) add_override("seed", std::to_string(*o.seed));
  if (o.replications) add_override("replications", std::to_string(*o.replications));
  if (o.alpha) {
    std::ostringstream s;
    s.precision(17);
    s << *o.alpha;
    add_override("alpha", s.str());
  }
  if (o.spending) add_override("spending", *o.spending);
  if (o.beta_mode) add_override("beta_mode", *o.beta_mode);
  if (o.n_bound) add_override("N", *o.n_bound);
  if (!o.out.empty()) {
    manifest.output = o.out;
  }
  if (manifest.output.empty()) {
    throw ConfigError("out", "--out is required");
  }

  const auto scenarios = load_scenario_config(manifest.config, manifest.overrides);
  std::vector<std::string> ids;
  for (const auto& s : scenarios) {
    ids.push_back(s.id);
  }
  if (!o.manifest.empty() && !manifest.scenarios.empty() && manifest.scenarios != ids) {
    throw ConfigError("scenarios", "config no longer resolves to the scenarios in the manifest");
  }
  manifest.scenarios = ids;

  const std::size_t jobs =
      o.jobs > 0 ? o.jobs : std::max<unsigned>(1, std::thread::hardware_concurrency());
  ProgressCallback progress;
  if (!o.quiet) {
    progress = [&](std::size_t i, const TrialScenario& s) {
      err << "[" << (i + 1) << "/" << scenarios.size() << "] " << s.id << " "
          << to_string(s.procedure) << " " << to_string(s.spending) << " "
          << to_string(s.control) << " pi0=" << s.pi0 << " (" << s.replications
          << " replications)\n";
    };
  }
  const auto results = run_grid(scenarios, jobs, progress);

  std::ofstream csv(manifest.output, std::ios::binary);
  if (!csv) {
    throw ConfigError("out", "cannot write '" + manifest.output + "'");
  }
  write_results_csv(csv, results);
  std::ofstream mf(manifest.output + ".manifest", std::ios::binary);
  if (!mf) {
    throw ConfigError("out", "cannot write '" + manifest.output + ".manifest'");
  }
  manifest.write(mf);
  if (!o.quiet) {
    out << "wrote " << manifest.output << " (" << results.size() << " scenarios)\n";
  }
  return kExitOk;
}

template <typename T>
CLI::Option* add_optional(CLI::App* app, const std::string& name, std::optional<T>& target,
                          const std::string& help) {
  return app->add_option_function<T>(name, [&target](const T& v) { target = v; }, help);
}

}  // namespace

void RunManifest::write(std::ostream& os) const {
  os << "tool = " << tool << '\n';
  os << "version = " << version << '\n';
  os << "config = " << config << '\n';
  for (const auto& [key, value] : overrides) {
    os << "override." << key << " = " << value << '\n';
  }
  os << "output = " << output << '\n';
  os << "scenarios = ";
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    os << (i ? ", " : "") << scenarios[i];
  }
  os << '\n';
}

RunManifest RunManifest::read(std::istream& is) {
  RunManifest m;
  m.scenarios.clear();
  std::string raw;
  std::size_t line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const std::string text = trim(raw);
    if (text.empty() || text.front() == '#') {
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("manifest", "expected 'key = value' on line " + std::to_string(line));
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key == "tool") {
      m.tool = value;
    } else if (key == "version") {
      m.version = value;
    } else if (key == "config") {
      m.config = value;
    } else if (key == "output") {
      m.output = value;
    } else if (key == "scenarios") {
      std::istringstream ids(value);
      std::string id;
      while (std::getline(ids, id, ',')) {
        if (!trim(id).empty()) {
          m.scenarios.push_back(trim(id));
        }
      }
    } else if (key.rfind("override.", 0) == 0) {
      m.overrides.emplace_back(key.substr(9), value);
    } else {
      throw ConfigError("manifest", "unknown key '" + key + "' on line " + std::to_string(line));
    }
  }
  if (m.config.empty()) {
    throw ConfigError("manifest", "missing config entry");
  }
  return m;
}

RunManifest RunManifest::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("manifest", "cannot read '" + path.string() + "'");
  }
  return read(in);
}

std::filesystem::path resolve_config_path(const std::string& name) {
  namespace fs = std::filesystem;
  if (fs::is_regular_file(name)) {
    return fs::absolute(name);
  }
  const fs::path dir = GSLOND_CONFIG_DIR;
  for (const fs::path& candidate : {dir / (name + ".cfg"), dir / name}) {
    if (fs::is_regular_file(candidate)) {
      return candidate;
    }
  }
  throw ConfigError("config", "no config file or bundled config named '" + name + "'");
}

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Online FDR control for group-sequential platform trials", std::string(kToolName)};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  BoundariesOptions bo;
  auto* boundaries = app.add_subcommand("boundaries", "Print nominal levels and boundary tables");
  boundaries->add_option("--alpha", bo.alpha, "Overall level")->capture_default_str();
  boundaries->add_option("--spending", bo.spending, "Comma list of spending functions (po, obf)")
      ->capture_default_str();
  boundaries->add_option("--beta-mode", bo.beta_mode, "unbounded, bounded, equal, dependent")
      ->capture_default_str();
  boundaries->add_option("--dependent-base", bo.dependent_base, "Base mode of dependent betas");
  add_optional(boundaries, "--n-bound", bo.n_bound, "Upper bound N (default K)");
  boundaries->add_option("-K,--hypotheses", bo.hypotheses, "Number of hypotheses")
      ->capture_default_str();
  boundaries->add_option("--hypothesis", bo.hypothesis, "Hypothesis of the level table")
      ->capture_default_str();
  boundaries->add_option("--target", bo.targets, "Hypotheses of the variant tables");
  boundaries->add_option("--t1", bo.t1, "Interim information fraction")->capture_default_str();
  boundaries->add_option("--alpha-futility", bo.alpha_futility, "Futility threshold")
      ->capture_default_str();
  boundaries->add_option("--n", bo.n, "Per-arm treatment sample of the variant platform")
      ->capture_default_str();
  boundaries->add_option("--n-delta", bo.n_delta, "Control patients between arm starts")
      ->capture_default_str();
  boundaries->add_option("--table", bo.table, "levels, variants or all")
      ->check(CLI::IsMember({"all", "levels", "variants"}))
      ->capture_default_str();
  boundaries->add_option("--format", bo.format, "text or csv")
      ->check(CLI::IsMember({"text", "csv"}))
      ->capture_default_str();
  boundaries->add_option("--digits", bo.digits, "Decimals printed")
      ->check(CLI::Range(1, 15))
      ->capture_default_str();

  BetasOptions be;
  auto* betas = app.add_subcommand("betas", "Print the beta sequence");
  betas->add_option("--beta-mode", be.beta_mode, "unbounded, bounded, equal, dependent")
      ->capture_default_str();
  betas->add_option("--dependent-base", be.dependent_base, "Base mode of dependent betas");
  betas->add_option("--alpha", be.alpha, "Overall level")->capture_default_str();
  add_optional(betas, "--n-bound", be.n_bound, "Upper bound N");
  betas->add_option("--count", be.count, "Number of terms")->capture_default_str();

  DecideOptions de;
  auto* decide = app.add_subcommand("decide", "Stream REGISTER / INTERIM / FINAL events");
  decide->add_option("--alpha", de.alpha, "Overall level")->capture_default_str();
  decide->add_option("--alpha-futility", de.alpha_futility, "Futility threshold")
      ->capture_default_str();
  decide->add_option("--spending", de.spending, "obf or po")->capture_default_str();
  decide->add_option("--procedure", de.procedure, "LOND, gsLOND, gsLOND.II, gsLOND.III, ...")
      ->capture_default_str();
  decide->add_option("--t1", de.t1, "Interim information fraction")->capture_default_str();
  decide->add_option("--bonferroni-k", de.bonferroni_k, "K for the Bonferroni comparator");
  decide->add_option("--input", de.input, "Event file (default stdin)");
  decide->add_option("--log", de.log, "Persist the accepted events to this file");

  SimulateOptions so;
  auto* simulate = app.add_subcommand("simulate", "Run a scenario grid and write CSV + manifest");
  simulate->add_option("--config", so.config, "Config path or bundled name (fig2 ... fig6)");
  simulate->add_option("--manifest", so.manifest, "Re-run the run described by a manifest");
  simulate->add_option("--out", so.out, "CSV output path");
  simulate->add_option("--jobs", so.jobs, "Worker threads (default: all cores)");
  add_optional(simulate, "--seed", so.seed, "Master seed override");
  add_optional(simulate, "--replications", so.replications, "Replications override");
  add_optional(simulate, "--alpha", so.alpha, "Overall level override");
  add_optional(simulate, "--spending", so.spending, "Spending override (obf, po)");
  add_optional(simulate, "--beta-mode", so.beta_mode, "Beta mode override");
  add_optional(simulate, "--n-bound", so.n_bound, "N override (integer or inf)");
  simulate->add_flag("--quiet", so.quiet, "No progress output");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*boundaries) return cmd_boundaries(bo, out);
    if (*betas) return cmd_betas(be, out);
    if (*decide) return cmd_decide(de, in, out);
    if (*simulate) return cmd_simulate(so, out, err);
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const LineError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace gslond
