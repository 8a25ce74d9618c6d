#include "tcprep/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "tcprep/evolve.hpp"
#include "tcprep/parallel.hpp"
#include "tcprep/serialize.hpp"
#include "tcprep/spectral.hpp"

namespace tcprep {

namespace {

namespace fs = std::filesystem;

// Everything that goes wrong before any computation starts.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Outcome {
  json doc;
  std::optional<std::string> csv;
  bool pass = true;
};

struct Job {
  json resolved;
  std::function<Outcome()> run;
};

struct Globals {
  std::optional<std::uint64_t> seed;
};

ModelParams read_params(const json& cfg) {
  ModelParams p;
  p.U = config_value<double>(cfg, "U", p.U);
  p.g = config_value<double>(cfg, "g", p.g);
  p.xi = config_value<double>(cfg, "xi", p.xi);
  p.validate();
  return p;
}

json params_json(const ModelParams& p) { return {{"U", p.U}, {"g", p.g}, {"xi", p.xi}}; }

int read_size(const json& cfg, int fallback) {
  const int L = config_value<int>(cfg, "L", fallback);
  if (L < 2 || L > kMaxLinearSize) throw ConfigError("L must lie in [2, 5], got " + std::to_string(L));
  return L;
}

EigenSolverOptions read_solver(const json& cfg, const Globals& g) {
  EigenSolverOptions o;
  o.tol = config_value<double>(cfg, "tol", o.tol);
  if (!(o.tol > 0.0)) throw ConfigError("tol must be positive");
  o.seed = config_value<std::uint64_t>(cfg, "seed", o.seed);
  if (g.seed) o.seed = *g.seed;
  return o;
}

void require_small_full_space(int L, const char* what) {
  if (L > 3) {
    throw ConfigError(std::string(what) + ": the full-space method is limited to L <= 3 (" +
                      std::to_string(1ull << (2 * L * L)) +
                      " states at L = " + std::to_string(L) +
                      "); use \"method\": \"sector\" for larger lattices");
  }
}

Job plan_spectrum(const json& cfg, const Globals& g) {
  reject_unknown_keys(cfg, {"L", "tau", "U", "g", "xi", "schedule", "space", "winding", "m", "tol",
                            "seed", "degeneracy_tol"},
                      "spectrum config");
  const int L = read_size(cfg, 2);
  const double tau = config_value<double>(cfg, "tau", 1.0);
  if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("tau must lie in [0, 1]");
  const ModelParams params = read_params(cfg);
  const Schedule schedule = Schedule::from_name(config_value<std::string>(cfg, "schedule", "linear"));
  const std::string space = config_value<std::string>(cfg, "space", "sector");
  if (space != "sector" && space != "closed-strings" && space != "full") {
    throw ConfigError("space must be sector, closed-strings or full");
  }
  if (space == "full") require_small_full_space(L, "spectrum");
  const auto winding = config_value<std::vector<int>>(cfg, "winding", {0, 0});
  if (winding.size() != 2 || (winding[0] != 0 && winding[0] != 1) ||
      (winding[1] != 0 && winding[1] != 1)) {
    throw ConfigError("winding must be [i, j] with i, j in {0, 1}");
  }
  const int m = config_value<int>(cfg, "m", 4);
  if (m < 1) throw ConfigError("m must be >= 1");
  const double deg_tol = config_value<double>(cfg, "degeneracy_tol", 1e-8);
  const EigenSolverOptions solver = read_solver(cfg, g);

  json resolved = params_json(params);
  resolved.update({{"L", L},
                   {"tau", tau},
                   {"schedule", schedule.name()},
                   {"space", space},
                   {"winding", winding},
                   {"m", m},
                   {"tol", solver.tol},
                   {"seed", solver.seed},
                   {"degeneracy_tol", deg_tol}});

  return {resolved, [=] {
            const TorusLattice lat(L);
            SectorBasisPtr basis;
            if (space == "full") {
              basis = std::make_shared<const SectorBasis>(SectorBasis::full(lat.num_links()));
            } else if (space == "closed-strings") {
              basis = std::make_shared<const SectorBasis>(closed_string_basis(lat));
            } else {
              basis = std::make_shared<const SectorBasis>(
                  enumerate_sector(lat, SectorLabel::neutral(lat, winding[0], winding[1])));
            }
            if (static_cast<std::size_t>(m) > basis->dim()) {
              throw ConfigError("m = " + std::to_string(m) + " exceeds the basis dimension " +
                                std::to_string(basis->dim()));
            }
            const BlockOperator op =
                project_hamiltonian(interpolated_hamiltonian(lat, params, schedule, tau), basis);
            const SpectralResult r = low_spectrum(op, m, solver);
            int degeneracy = 0;
            for (double e : r.eigenvalues) {
              if (e - r.eigenvalues.front() <= deg_tol * std::max(1.0, std::abs(r.eigenvalues.front())))
                ++degeneracy;
            }
            Outcome out;
            out.doc = to_json(r);
            out.doc["dimension"] = basis->dim();
            out.doc["basis"] = basis->description();
            out.doc["ground_degeneracy"] = degeneracy;
            return out;
          }};
}

struct ScanSetup {
  ModelParams params;
  Schedule schedule;
  std::vector<double> grid;
  std::string method;
  GapScanOptions opts;
};

ScanSetup read_scan(const json& cfg, const Globals& g, json& resolved) {
  ScanSetup s;
  s.params = read_params(cfg);
  s.schedule = Schedule::from_name(config_value<std::string>(cfg, "schedule", "linear"));
  if (cfg.contains("grid")) {
    s.grid = config_value<std::vector<double>>(cfg, "grid", {});
  } else {
    s.grid = uniform_grid(config_value<int>(cfg, "grid_points", 41));
  }
  if (s.grid.size() < 2) throw ConfigError("gap scan needs at least two grid points");
  for (double t : s.grid) {
    if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("grid points must lie in [0, 1]");
  }
  s.method = config_value<std::string>(cfg, "method", "sector");
  if (s.method != "sector" && s.method != "full") throw ConfigError("method must be sector or full");
  s.opts.degeneracy_tol = config_value<double>(cfg, "degeneracy_tol", s.opts.degeneracy_tol);
  s.opts.tau_tol = config_value<double>(cfg, "tau_tol", s.opts.tau_tol);
  if (!(s.opts.tau_tol > 0.0)) throw ConfigError("tau_tol must be positive");
  s.opts.solver = read_solver(cfg, g);

  resolved.update(params_json(s.params));
  resolved.update({{"schedule", s.schedule.name()},
                   {"grid", s.grid},
                   {"method", s.method},
                   {"degeneracy_tol", s.opts.degeneracy_tol},
                   {"tau_tol", s.opts.tau_tol},
                   {"tol", s.opts.solver.tol},
                   {"seed", s.opts.solver.seed}});
  return s;
}

GapScan run_scan(int L, const ScanSetup& s) {
  const TorusLattice lat(L);
  SectorBasisPtr basis;
  if (s.method == "full") {
    basis = std::make_shared<const SectorBasis>(SectorBasis::full(lat.num_links()));
  }
  return gap_scan(lat, s.params, s.schedule, s.grid, s.opts, basis);
}

const std::set<std::string> kScanKeys = {"U",      "g",           "xi",  "schedule",
                                         "grid",   "grid_points", "method", "degeneracy_tol",
                                         "tau_tol", "tol",        "seed"};

Job plan_gap_scan(const json& cfg, const Globals& g) {
  auto keys = kScanKeys;
  keys.insert("L");
  reject_unknown_keys(cfg, keys, "gap-scan config");
  const int L = read_size(cfg, 2);
  json resolved = {{"L", L}};
  const ScanSetup s = read_scan(cfg, g, resolved);
  if (s.method == "full") require_small_full_space(L, "gap-scan");

  return {resolved, [=] {
            const GapScan scan = run_scan(L, s);
            Outcome out;
            out.doc = to_json(scan);
            out.doc["L"] = L;
            out.csv = gap_scan_csv(scan, s.params, s.schedule);
            return out;
          }};
}

Job plan_scaling(const json& cfg, const Globals& g) {
  auto keys = kScanKeys;
  keys.insert("L_list");
  reject_unknown_keys(cfg, keys, "scaling config");
  const auto sizes = config_value<std::vector<int>>(cfg, "L_list", {2, 3, 4});
  if (sizes.empty()) throw ConfigError("L_list must not be empty");
  for (int L : sizes) {
    if (L < 2 || L > kMaxLinearSize) throw ConfigError("L_list entries must lie in {2, 3, 4, 5}");
  }
  json resolved = {{"L_list", sizes}};
  const ScanSetup s = read_scan(cfg, g, resolved);
  if (s.method == "full") {
    for (int L : sizes) require_small_full_space(L, "scaling");
  }

  return {resolved, [=] {
            std::vector<double> minima;
            json rows = json::array();
            std::ostringstream csv;
            csv << "L,tau_star,f_star,lambda1_over_lambda2,gap_min\n";
            for (int L : sizes) {
              const GapScan scan = run_scan(L, s);
              minima.push_back(scan.gap_min);
              rows.push_back({{"L", L},
                              {"tau_star", scan.tau_star},
                              {"f_star", s.schedule.f(scan.tau_star)},
                              {"ratio_star", std::isfinite(scan.ratio_star) ? json(scan.ratio_star)
                                                                            : json(nullptr)},
                              {"gap_min", scan.gap_min}});
              csv << L << ',' << format_decimal(scan.tau_star) << ','
                  << format_decimal(s.schedule.f(scan.tau_star)) << ','
                  << format_decimal(scan.ratio_star) << ',' << format_decimal(scan.gap_min) << '\n';
            }
            const SlopeFit fit = fit_log_log(sizes, minima);
            Outcome out;
            out.doc = {{"minima", rows},
                       {"slope", fit.valid ? json(fit.slope) : json(nullptr)},
                       {"intercept", fit.valid ? json(fit.intercept) : json(nullptr)},
                       {"slope_stderr", fit.has_stderr ? json(fit.stderr_slope) : json(nullptr)}};
            out.csv = csv.str();
            return out;
          }};
}

SweepConfig read_sweep(json cfg, const Globals& g) {
  if (g.seed && cfg.is_object()) cfg["seed"] = *g.seed;
  return sweep_config_from_json(cfg);
}

Job plan_sweep(const json& cfg, const Globals& g, std::ostream& log) {
  if (cfg.contains("V_list")) throw ConfigError("V_list belongs to the protect subcommand");
  const SweepConfig config = read_sweep(cfg, g);
  std::ostream* logp = &log;
  return {to_json(config), [=] {
            const SweepResult r = propagate(config);
            *logp << "sweep: " << r.stats.steps << " steps, " << r.stats.matvecs << " matvecs, "
                  << r.wall_seconds << " s\n";
            Outcome out;
            out.doc = to_json(r);
            out.csv = sweep_csv(r);
            return out;
          }};
}

Job plan_protect(const json& cfg, const Globals& g, std::ostream& log) {
  json base_cfg = cfg.is_object() ? cfg : json::object();
  const auto strengths = config_value<std::vector<double>>(base_cfg, "V_list", {0.05, 0.1});
  base_cfg.erase("V_list");
  if (base_cfg.contains("V")) throw ConfigError("protect takes V_list, not V");
  if (strengths.empty()) throw ConfigError("V_list must not be empty");
  SweepConfig base = read_sweep(base_cfg, g);
  if (base.L > 3) throw ConfigError("protect supports L in {2, 3}");
  for (double v : strengths) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("V_list entries must be >= 0");
    if (v >= base.params.xi) {
      log << "warning: V = " << v << " >= xi = " << base.params.xi
          << "; the tunneling bound is not claimed for this strength\n";
    }
  }
  json resolved = to_json(base);
  resolved["V_list"] = strengths;
  return {resolved, [=] {
            const ProtectionReport rep = perturbed_protection_experiment(base, strengths);
            Outcome out;
            out.doc = to_json(rep);
            out.pass = rep.pass;
            return out;
          }};
}

Job plan_duality(const json& cfg, const Globals& g) {
  reject_unknown_keys(cfg, {"L", "lambda1", "lambda2", "m", "tol", "solver_tol", "seed"},
                      "duality config");
  const int L = config_value<int>(cfg, "L", 2);
  if (L != 2 && L != 3) throw ConfigError("duality supports L in {2, 3}");
  const double l1 = config_value<double>(cfg, "lambda1", 1.0);
  const double l2 = config_value<double>(cfg, "lambda2", 1.0);
  if (!std::isfinite(l1) || !std::isfinite(l2)) throw ConfigError("couplings must be finite");
  const int m = config_value<int>(cfg, "m", 4);
  const double tol = config_value<double>(cfg, "tol", 1e-9);
  if (!(tol > 0.0)) throw ConfigError("tol must be positive");
  json solver_cfg = {{"tol", config_value<double>(cfg, "solver_tol", 1e-10)}};
  if (cfg.contains("seed")) solver_cfg["seed"] = cfg["seed"];
  const EigenSolverOptions solver = read_solver(solver_cfg, g);
  json resolved = {{"L", L},          {"lambda1", l1},         {"lambda2", l2}, {"m", m},
                   {"tol", tol},      {"solver_tol", solver.tol}, {"seed", solver.seed}};
  return {resolved, [=] {
            const DualityReport rep = duality_spectrum_check(L, l1, l2, m, tol, solver);
            Outcome out;
            out.doc = to_json(rep);
            out.pass = rep.pass;
            return out;
          }};
}

Job plan_lattice_dump(const json& cfg) {
  reject_unknown_keys(cfg, {"L", "first_k"}, "lattice-dump config");
  const int L = read_size(cfg, 2);
  const int first_k = config_value<int>(cfg, "first_k", 8);
  if (first_k < 0) throw ConfigError("first_k must be >= 0");
  return {{{"L", L}, {"first_k", first_k}}, [=] {
            const TorusLattice lat(L);
            Outcome out;
            out.doc = to_json(lat);
            out.doc["sector_00"] = to_json(*make_sector00(lat), first_k);
            return out;
          }};
}

json read_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    json j = json::parse(in);
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON in '") + path + "': " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

SlopeFit fit_log_log(const std::vector<int>& sizes, const std::vector<double>& gaps) {
  if (sizes.size() != gaps.size()) throw std::invalid_argument("fit_log_log: size mismatch");
  SlopeFit fit;
  const std::size_t n = sizes.size();
  if (n < 2) return fit;
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!(gaps[k] > 0.0)) throw std::domain_error("fit_log_log: gaps must be positive");
    mx += std::log(static_cast<double>(sizes[k]));
    my += std::log(gaps[k]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dx = std::log(static_cast<double>(sizes[k])) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(gaps[k]) - my);
  }
  if (sxx == 0.0) return fit;
  fit.valid = true;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (n > 2) {
    double ssr = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double r =
          std::log(gaps[k]) - fit.intercept - fit.slope * std::log(static_cast<double>(sizes[k]));
      ssr += r * r;
    }
    fit.has_stderr = true;
    fit.stderr_slope = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
  }
  return fit;
}

int run_cli(int argc, const char* const* argv, std::ostream& log) {
  CLI::App app{"Toric code adiabatic preparation simulator", "tcprep"};
  app.require_subcommand(1, 1);
  std::string config_path, out_path;
  int threads = 0;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Seed for the eigensolver start block");
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_path, "Output JSON path; CSV goes next to it");
  app.add_option("--threads", threads, "Worker threads (default: all cores)")
      ->check(CLI::NonNegativeNumber);
  for (const char* name :
       {"spectrum", "gap-scan", "scaling", "sweep", "protect", "duality", "lattice-dump"}) {
    auto* sub = app.add_subcommand(name);
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream msg, err;
    const int code = app.exit(e, msg, err);
    log << msg.str() << err.str();
    return code == 0 ? kExitOk : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  if (threads > 0) set_num_threads(threads);
  Globals g;
  if (seed_opt->count() > 0) g.seed = seed;

  Job job;
  try {
    const json cfg = read_config(config_path);
    if (command == "spectrum") job = plan_spectrum(cfg, g);
    else if (command == "gap-scan") job = plan_gap_scan(cfg, g);
    else if (command == "scaling") job = plan_scaling(cfg, g);
    else if (command == "sweep") job = plan_sweep(cfg, g, log);
    else if (command == "protect") job = plan_protect(cfg, g, log);
    else if (command == "duality") job = plan_duality(cfg, g);
    else job = plan_lattice_dump(cfg);
  } catch (const std::exception& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  Outcome outcome;
  try {
    outcome = job.run();
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    log << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  }

  fs::path json_path = out_path.empty() ? fs::path(command + ".json") : fs::path(out_path);
  fs::path csv_path = json_path;
  csv_path.replace_extension(".csv");
  if (csv_path == json_path) json_path.replace_extension(".json");

  json doc = {{"subcommand", command}, {"version", kVersion}, {"config", job.resolved}};
  doc["result"] = std::move(outcome.doc);
  try {
    write_text(json_path, doc.dump(2) + "\n");
    if (outcome.csv) {
      write_text(csv_path, "# tcprep " + std::string(kVersion) + " " + command +
                               " config=" + job.resolved.dump() + "\n" + *outcome.csv);
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  if (!outcome.pass) {
    log << command << ": FAIL\n";
    return kExitCheckFail;
  }
  return kExitOk;
}

}  // namespace tcprep
