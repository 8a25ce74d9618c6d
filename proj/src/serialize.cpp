#include "tcprep/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace tcprep {

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const char* what) {
  if (!j.is_object()) throw std::invalid_argument(std::string(what) + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) {
      throw std::invalid_argument(std::string("unknown key '") + key + "' in " + what);
    }
  }
}

std::string hex_mask(Mask m) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(m));
  return buf;
}

Mask parse_hex_mask(const std::string& s) {
  std::size_t pos = 0;
  const Mask m = std::stoull(s, &pos, 16);
  if (pos != s.size()) throw std::invalid_argument("bad hex mask '" + s + "'");
  return m;
}

std::string format_decimal(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json to_json(const PauliString& p) {
  return {{"x", hex_mask(p.x_mask())},
          {"z", hex_mask(p.z_mask())},
          {"phase", static_cast<int>(p.phase())},
          {"letters", p.to_letters()}};
}

json to_json(const HamiltonianSpec& h) {
  json terms = json::array();
  for (const auto& t : h.terms()) {
    json jt = to_json(t.op);
    jt["coefficient"] = t.coefficient;
    terms.push_back(jt);
  }
  return {{"width", h.width()}, {"constant", h.constant()}, {"terms", terms}};
}

HamiltonianSpec hamiltonian_from_json(const json& j) {
  HamiltonianSpec h(j.at("width").get<int>());
  for (const auto& t : j.at("terms")) {
    const PauliString op(h.width(), parse_hex_mask(t.at("x").get<std::string>()),
                         parse_hex_mask(t.at("z").get<std::string>()),
                         phase_from_exponent(t.at("phase").get<int>()));
    h.add_term(op, t.at("coefficient").get<double>());
  }
  h.add_constant(j.at("constant").get<double>());
  return h;
}

json to_json(const TorusLattice& lat) {
  const int L = lat.size();
  json links = json::array();
  for (int y = 0; y < L; ++y) {
    for (int x = 0; x < L; ++x) {
      for (int d = 0; d < 2; ++d) {
        links.push_back({{"id", lat.link_index(x, y, static_cast<Direction>(d))},
                         {"x", x},
                         {"y", y},
                         {"d", d == 0 ? "horizontal" : "vertical"}});
      }
    }
  }
  json plaquettes = json::array(), stars = json::array();
  for (int p = 0; p < lat.num_plaquettes(); ++p) {
    const Site s = lat.site_of(p);
    plaquettes.push_back({{"id", p}, {"x", s.x}, {"y", s.y}, {"links", lat.plaquette_links(p)}});
    stars.push_back({{"id", p}, {"x", s.x}, {"y", s.y}, {"links", lat.star_links(p)}});
  }
  return {{"L", L},
          {"n", lat.num_links()},
          {"links", links},
          {"plaquettes", plaquettes},
          {"stars", stars},
          {"loops", {{"t1", lat.t1()}, {"t2", lat.t2()}, {"w1", lat.w1()}, {"w2", lat.w2()}}}};
}

json to_json(const SectorBasis& basis, std::size_t first_k) {
  json states = json::array();
  for (std::size_t k = 0; k < std::min(first_k, basis.dim()); ++k) {
    states.push_back(hex_mask(basis.state(k)));
  }
  json out = {{"description", basis.description()},
              {"dimension", basis.dim()},
              {"width", basis.width()},
              {"first_states", states}};
  if (basis.label()) {
    out["label"] = {{"star_charges", basis.label()->star_charges},
                    {"winding", {basis.label()->i, basis.label()->j}}};
  }
  return out;
}

json to_json(const SpectralResult& r) {
  return {{"eigenvalues", r.eigenvalues},
          {"residuals", r.residuals},
          {"matvecs", r.matvecs},
          {"restarts", r.restarts}};
}

json to_json(const GapScan& scan) {
  return {{"taus", scan.taus},
          {"gaps", scan.gaps},
          {"tau_star", scan.tau_star},
          {"gap_min", scan.gap_min},
          {"ratio_star", finite_or_null(scan.ratio_star)},
          {"excited_splitting", scan.excited_splitting},
          {"first_excited_nondegenerate", scan.first_excited_nondegenerate},
          {"degenerate_ground_taus", scan.degenerate_ground_taus}};
}

json to_json(const SweepResult& r) {
  json cps = json::array();
  for (const auto& c : r.checkpoints) {
    cps.push_back({{"tau", c.tau},
                   {"fidelity", c.fidelity},
                   {"energy", c.energy},
                   {"ground_energy", c.ground_energy},
                   {"first_excited", c.first_excited},
                   {"gap", c.first_excited - c.ground_energy},
                   {"weights", c.weights.winding},
                   {"neutral_weights", c.weights.neutral},
                   {"norm", c.norm}});
  }
  return {{"space", r.space},
          {"dimension", r.dim},
          {"delta", r.delta},
          {"final_overlap", r.final_overlap},
          {"max_norm_drift", r.max_norm_drift},
          {"steps", r.stats.steps},
          {"rejected_steps", r.stats.rejected},
          {"matvecs", r.stats.matvecs},
          {"checkpoints", cps}};
}

json to_json(const DualityReport& r) {
  return {{"L", r.L},
          {"lambda1", r.lambda1},
          {"lambda2", r.lambda2},
          {"gauge_levels", r.gauge_levels},
          {"ising_levels", r.ising_levels},
          {"differences", r.differences},
          {"max_difference", r.max_difference},
          {"tol", r.tol},
          {"structural_failure", r.structural_failure},
          {"message", r.message},
          {"pass", r.pass}};
}

json to_json(const ProtectionReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries) {
    entries.push_back({{"V", e.strength},
                       {"bound", e.claimed ? json(e.bound) : json("not claimed")},
                       {"claimed", e.claimed},
                       {"max_leakage", e.max_leakage},
                       {"max_winding_leakage", e.max_winding_leakage},
                       {"leakage", e.leakage},
                       {"pass", e.pass},
                       {"sweep", to_json(e.sweep)}});
  }
  return {{"L", r.L}, {"entries", entries}, {"pass", r.pass}};
}

json to_json(const SweepConfig& c) {
  json j = {{"L", c.L},
            {"U", c.params.U},
            {"g", c.params.g},
            {"xi", c.params.xi},
            {"schedule", c.schedule.name()},
            {"T", c.total_time},
            {"tolerance", c.integrator.tolerance},
            {"max_krylov", c.integrator.max_krylov},
            {"checkpoints", c.checkpoints},
            {"space", space_name(c.space)},
            {"solver_tol", c.solver.tol},
            {"seed", c.solver.seed}};
  if (c.perturbation) j["V"] = c.perturbation->strength;
  return j;
}

SweepConfig sweep_config_from_json(const json& j) {
  reject_unknown_keys(j,
                 {"L", "U", "g", "xi", "schedule", "T", "tolerance", "max_krylov",
                  "checkpoints", "checkpoint_count", "space", "V", "V_list", "solver_tol",
                  "seed"},
                 "sweep config");
  SweepConfig c;
  c.L = config_value<int>(j, "L", c.L);
  c.params.U = config_value<double>(j, "U", c.params.U);
  c.params.g = config_value<double>(j, "g", c.params.g);
  c.params.xi = config_value<double>(j, "xi", c.params.xi);
  c.schedule = Schedule::from_name(config_value<std::string>(j, "schedule", c.schedule.name()));
  c.total_time = config_value<double>(j, "T", c.total_time);
  c.integrator.tolerance = config_value<double>(j, "tolerance", c.integrator.tolerance);
  c.integrator.max_krylov = config_value<int>(j, "max_krylov", c.integrator.max_krylov);
  if (j.contains("checkpoints")) {
    c.checkpoints = config_value<std::vector<double>>(j, "checkpoints", {});
  } else if (j.contains("checkpoint_count")) {
    c.checkpoints = uniform_grid(config_value<int>(j, "checkpoint_count", 21));
  }
  c.space = space_from_name(config_value<std::string>(j, "space", "auto"));
  if (j.contains("V")) c.perturbation = Perturbation{config_value<double>(j, "V", 0.0), 1};
  c.solver.tol = config_value<double>(j, "solver_tol", c.solver.tol);
  c.solver.seed = config_value<std::uint64_t>(j, "seed", c.solver.seed);
  c.validate();
  return c;
}

std::string gap_scan_csv(const GapScan& scan, const ModelParams& params, const Schedule& schedule) {
  std::ostringstream os;
  os << "tau,f,lambda1_over_lambda2,gap\n";
  for (std::size_t k = 0; k < scan.taus.size(); ++k) {
    const double tau = scan.taus[k];
    const double ratio = coupling_ratio(params, schedule, tau);
    os << format_decimal(tau) << ',' << format_decimal(schedule.f(tau)) << ','
       << (std::isfinite(ratio) ? format_decimal(ratio) : "inf") << ','
       << format_decimal(scan.gaps[k]) << '\n';
  }
  return os.str();
}

std::string sweep_csv(const SweepResult& r) {
  std::ostringstream os;
  os << "tau,fidelity,energy,weight_00,weight_01,weight_10,weight_11\n";
  for (const auto& c : r.checkpoints) {
    os << format_decimal(c.tau) << ',' << format_decimal(c.fidelity) << ','
       << format_decimal(c.energy);
    for (double w : c.weights.winding) os << ',' << format_decimal(w);
    os << '\n';
  }
  return os.str();
}

}  // namespace tcprep
