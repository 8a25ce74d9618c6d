// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dense_oracle.hpp"
#include "tcprep/cli.hpp"
#include "tcprep/evolve.hpp"
#include "tcprep/spectral.hpp"

using namespace tcprep;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += "FAILED " + what;
    }
  }
  void note(const std::string& s) {
    if (!detail.empty()) detail += "; ";
    detail += s;
  }
};

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

int failures = 0;

void criterion(int id, const char* title, double time_limit_s, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v.pass = false;
    v.note(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > time_limit_s) {
    v.pass = false;
    v.note("runtime " + fmt(secs, "%.1f") + " s over limit " + fmt(time_limit_s, "%.0f") + " s");
  }
  if (!v.pass) ++failures;
  std::printf("[%s] %2d. %s (%.2f s): %s\n", v.pass ? "PASS" : "FAIL", id, title, secs,
              v.detail.c_str());
  std::fflush(stdout);
}

// <b| h |b> from the term list.
double diagonal_energy(const HamiltonianSpec& h, Mask bits) {
  double e = h.constant();
  for (const auto& t : h.terms()) {
    const Applied a = apply(t.op, BasisState{bits});
    if (a.state.bits == bits) e += t.coefficient * phase_real(a.phase);
  }
  return e;
}

Verdict algebra_suite() {
  Verdict v;
  long checks = 0;
  for (int L : {2, 3, 4}) {
    const TorusLattice lat(L);
    const int n = lat.num_links();
    std::vector<PauliString> stars, plaqs;
    for (int s = 0; s < lat.num_sites(); ++s) {
      stars.push_back(PauliString::z_string(n, lat.star_mask(s)));
      plaqs.push_back(PauliString::x_string(n, lat.plaquette_mask(s)));
    }
    bool ok = true;
    for (const auto& a : stars)
      for (const auto& b : plaqs) ok &= commutes(a, b), ++checks;
    v.require(ok, "A_s/B_p commutation at L=" + std::to_string(L));

    const auto t1 = PauliString::x_string(n, lat.t1_mask()), t2 = PauliString::x_string(n, lat.t2_mask());
    const auto w1 = PauliString::z_string(n, lat.w1_mask()), w2 = PauliString::z_string(n, lat.w2_mask());
    ok = !commutes(t1, w2) && !commutes(t2, w1) && commutes(t1, w1) && commutes(t2, w2);
    for (const auto& s : stars) ok &= commutes(t1, s) && commutes(t2, s);
    for (const auto& p : plaqs) ok &= commutes(w1, p) && commutes(w2, p);
    checks += 4 + 4 * lat.num_sites();
    v.require(ok, "loop intersection parities at L=" + std::to_string(L));

    // Dual spins: mu^x(p) = B_p, mu^z strings to the reference column/row.
    const DualVariables dv = dual_variables(lat);
    ok = true;
    for (int p = 0; p < lat.num_plaquettes(); ++p) {
      const Site sp = lat.site_of(p);
      for (int q = 0; q < lat.num_plaquettes(); ++q) {
        const Site sq = lat.site_of(q);
        const bool right = sp.x != 0 && sq.y == sp.y && (sq.x == sp.x || sq.x == 0);
        const bool up = sp.y != 0 && sq.x == sp.x && (sq.y == sp.y || sq.y == 0);
        ok &= commutes(dv.mu_x[q], dv.mu_z_right[p]) == !right;
        ok &= commutes(dv.mu_x[q], dv.mu_z_up[p]) == !up;
        ok &= commutes(dv.mu_x[p], dv.mu_x[q]);
        ok &= commutes(dv.mu_z_right[p], dv.mu_z_up[q]);
        checks += 4;
      }
      for (const auto& s : stars) ok &= commutes(dv.mu_z_right[p], s) && commutes(dv.mu_x[p], s);
      if (sp.y > 0) {
        const auto bond = multiply(dv.mu_z_up[p], dv.mu_z_up[lat.site_index(sp.x, sp.y - 1)]);
        ok &= bond.z_mask() == (Mask{1} << lat.link_index(sp.x, sp.y, Direction::horizontal));
      }
      if (sp.x > 0) {
        const auto bond = multiply(dv.mu_z_right[p], dv.mu_z_right[lat.site_index(sp.x - 1, sp.y)]);
        ok &= bond.z_mask() == (Mask{1} << lat.link_index(sp.x, sp.y, Direction::vertical));
      }
    }
    v.require(ok, "dual variable algebra at L=" + std::to_string(L));
  }
  v.note(std::to_string(checks) + " symplectic checks, L in {2,3,4}");
  return v;
}

Verdict ground_state_structure() {
  Verdict v;
  const ModelParams params;
  const Schedule lin(ScheduleKind::linear);
  for (int L : {2, 3, 4}) {
    const TorusLattice lat(L);
    const auto basis = make_sector00(lat);
    const SpectralResult r = low_spectrum(BlockOperator(interpolated_hamiltonian(lat, params, lin, 1.0), basis), 1);
    const double overlap = std::abs(r.eigenvectors[0].dot(ground_state_phi0(lat, *basis)));
    v.require(overlap >= 1.0 - 1e-10, "overlap at L=" + std::to_string(L));
    v.note("L=" + std::to_string(L) + " 1-overlap=" + fmt(1.0 - overlap, "%.2e"));
  }
  const TorusLattice lat(2);
  const auto full = std::make_shared<const SectorBasis>(SectorBasis::full(8));
  const SpectralResult r = low_spectrum(BlockOperator(interpolated_hamiltonian(lat, params, lin, 1.0), full), 6);
  int degenerate = 0;
  for (double e : r.eigenvalues) degenerate += e - r.eigenvalues[0] <= 1e-10;
  v.require(degenerate == 4, "full-space L=2 ground degeneracy");
  v.note("L=2 full-space ground degeneracy " + std::to_string(degenerate));
  return v;
}

Verdict string_energetics() {
  Verdict v;
  const TorusLattice lat(3);
  const int n = lat.num_links();
  const double U = 20.0, xi = 1.25;
  const HamiltonianSpec hxi = field_hamiltonian(lat, xi);
  const HamiltonianSpec hux = star_hamiltonian(lat, U) + hxi;
  const double e0 = diagonal_energy(hux, 0);
  std::mt19937_64 rng(2007);

  int closed_ok = 0;
  for (int k = 0; k < 20; ++k) {
    Mask gamma = 0;
    while (gamma == 0) {
      gamma = (rng() & 1) ? lat.t1_mask() : 0;
      if (rng() & 1) gamma ^= lat.t2_mask();
      for (int p = 0; p < lat.num_plaquettes(); ++p)
        if (rng() & 1) gamma ^= lat.plaquette_mask(p);
    }
    closed_ok += diagonal_energy(hxi, gamma) == 2 * xi * popcount(gamma);
  }
  v.require(closed_ok == 20, "closed strings " + std::to_string(closed_ok) + "/20");

  int open_ok = 0, made = 0;
  std::uniform_int_distribution<int> coord(0, 2), dir(0, 3), len(1, 8);
  while (made < 20) {
    // Random walk on sites; the XOR of traversed links is an open string
    // whenever the walk ends away from its start.
    int x = coord(rng), y = coord(rng);
    const int x0 = x, y0 = y;
    Mask gamma = 0;
    for (int s = len(rng); s > 0; --s) {
      switch (dir(rng)) {
        case 0: gamma ^= Mask{1} << lat.link_index(x, y, Direction::horizontal); x = lat.wrap(x + 1); break;
        case 1: x = lat.wrap(x - 1); gamma ^= Mask{1} << lat.link_index(x, y, Direction::horizontal); break;
        case 2: gamma ^= Mask{1} << lat.link_index(x, y, Direction::vertical); y = lat.wrap(y + 1); break;
        default: y = lat.wrap(y - 1); gamma ^= Mask{1} << lat.link_index(x, y, Direction::vertical); break;
      }
    }
    if (x == x0 && y == y0) continue;
    ++made;
    open_ok += diagonal_energy(hux, gamma) - e0 == 4 * U + 2 * xi * popcount(gamma);
  }
  v.require(open_ok == 20, "open strings " + std::to_string(open_ok) + "/20");
  v.note("closed " + std::to_string(closed_ok) + "/20, open " + std::to_string(open_ok) +
         "/20 exact at L=3 (n=" + std::to_string(n) + ")");
  return v;
}

Verdict sector_protection() {
  Verdict v;
  double worst = 0.0;
  int runs = 0;
  for (int L : {2, 3}) {
    for (auto kind : {ScheduleKind::linear, ScheduleKind::trig_smooth}) {
      SweepConfig c;
      c.L = L;
      c.schedule = Schedule(kind);
      c.space = EvolutionSpace::closed_strings;
      const SweepResult r = propagate(c);
      for (const auto& cp : r.checkpoints) worst = std::max(worst, std::abs(1.0 - cp.weights.winding[0]));
      ++runs;
    }
  }
  v.require(worst <= 1e-10, "winding-(0,0) weight");
  v.note(std::to_string(runs) + " sweeps in the closed-string space, max |1 - w00| = " + fmt(worst, "%.2e"));
  return v;
}

Verdict duality() {
  Verdict v;
  double worst = 0.0;
  for (int L : {2, 3}) {
    for (double ratio : {0.1, 0.25, 0.43, 1.0, 2.5}) {
      const DualityReport r = duality_spectrum_check(L, ratio, 1.0, 8, 1e-9);
      v.require(r.pass, "L=" + std::to_string(L) + " ratio " + fmt(ratio) + ": " + r.message);
      worst = std::max(worst, r.max_difference);
    }
  }
  v.note("L in {2,3}, ratios {0.1,0.25,0.43,1,2.5}, m=8, max level difference " + fmt(worst, "%.2e"));
  return v;
}

Verdict gap_scaling() {
  Verdict v;
  const ModelParams params;
  const Schedule lin(ScheduleKind::linear);
  std::vector<int> sizes = {2, 3, 4};
  std::vector<double> minima;
  double ratio4 = 0.0;
  for (int L : sizes) {
    const GapScan s = gap_scan(TorusLattice(L), params, lin, uniform_grid(41));
    minima.push_back(s.gap_min);
    if (L == 4) ratio4 = s.ratio_star;
    v.note("L=" + std::to_string(L) + " gap_min=" + fmt(s.gap_min) + " at lambda1/lambda2=" + fmt(s.ratio_star));
  }
  const SlopeFit fit = fit_log_log(sizes, minima);
  v.require(fit.valid && fit.slope >= -1.6 && fit.slope <= -0.6, "slope in [-1.6, -0.6]");
  v.require(ratio4 >= 0.2 && ratio4 <= 0.7, "L=4 argmin ratio in [0.2, 0.7]");
  v.note("slope " + fmt(fit.slope) + " +/- " + fmt(fit.stderr_slope));
  return v;
}

Verdict adiabatic_error() {
  Verdict v;
  const Schedule sched(ScheduleKind::trig_smooth);
  const double gmin = gap_scan(TorusLattice(2), ModelParams{}, sched, uniform_grid(41)).gap_min;
  auto delta_at = [&](double T) {
    SweepConfig c;
    c.schedule = sched;
    c.total_time = T;
    c.checkpoints = {1.0};
    return propagate(c).delta;
  };
  double c_found = 0.0, d0 = 1.0;
  for (double c : {5.0, 10.0, 20.0, 30.0, 40.0, 50.0}) {
    d0 = delta_at(c / gmin);
    if (d0 <= 0.1) {
      c_found = c;
      break;
    }
  }
  v.require(c_found > 0.0, "delta <= 0.1 for some c <= 50");
  if (c_found == 0.0) return v;
  std::vector<double> deltas = {d0};
  for (int k = 1; k <= 3; ++k) deltas.push_back(delta_at(c_found * (1 << k) / gmin));
  bool monotone = true;
  for (std::size_t k = 1; k < deltas.size(); ++k) monotone &= deltas[k] <= deltas[k - 1];
  v.require(monotone, "monotone over doublings");
  std::string series;
  for (double d : deltas) series += (series.empty() ? "" : ", ") + fmt(d, "%.3e");
  v.note("trig-smooth, gap_min=" + fmt(gmin) + ", c=" + fmt(c_found) + ", delta(T0..8T0) = [" + series + "]");
  return v;
}

Verdict protection() {
  Verdict v;
  const std::vector<double> strengths = {0.1, 0.25, 0.5};
  std::vector<std::vector<double>> leak(2);
  for (int L : {2, 3}) {
    SweepConfig base;
    base.L = L;
    const ProtectionReport rep = perturbed_protection_experiment(base, strengths);
    for (const auto& e : rep.entries) {
      v.require(e.pass, "L=" + std::to_string(L) + " V=" + fmt(e.strength) + " leakage " +
                            fmt(e.max_leakage, "%.3e") + " > bound " + fmt(e.bound, "%.3e"));
      leak[L - 2].push_back(e.max_leakage);
      v.note("L=" + std::to_string(L) + " V=" + fmt(e.strength) + ": " + fmt(e.max_leakage, "%.2e") +
             " <= " + fmt(e.bound, "%.2e") + " (" + e.sweep.space + ", dim " +
             std::to_string(e.sweep.dim) + ")");
    }
  }
  for (std::size_t k = 0; k < strengths.size(); ++k) {
    v.require(leak[1][k] < leak[0][k], "leakage decreases L=2 -> 3 at V=" + fmt(strengths[k]));
  }
  return v;
}

Verdict oracle_equivalence() {
  Verdict v;
  const TorusLattice lat(2);
  const ModelParams params{4.0, 1.0, 1.0};
  const Schedule sched(ScheduleKind::trig_smooth);
  const auto parts = interpolation_parts(lat, params);
  const oracle::ToricParts dense = oracle::toric_parts(2, params.U, params.g, params.xi);
  const oracle::Mat dense_v = oracle::sigma_x_field(2, 0.25);
  const auto full = std::make_shared<const SectorBasis>(SectorBasis::full(8));
  double worst = 0.0;

  // Spectra: full space and every neutral winding block.
  for (double tau : {0.0, 0.4, 0.8, 1.0}) {
    const double f = sched.f(tau);
    const oracle::Mat h = dense.stars + (1 - f) * dense.field + f * dense.plaquettes;
    const HamiltonianSpec spec = interpolated_hamiltonian(lat, params, sched, tau);
    const Eigen::VectorXd ref = oracle::eigenvalues(h);
    const SpectralResult r = low_spectrum(BlockOperator(spec, full), 8);
    for (int k = 0; k < 8; ++k) worst = std::max(worst, std::abs(r.eigenvalues[k] - ref[k]));
    for (int w = 0; w < 4; ++w) {
      const auto block = std::make_shared<const SectorBasis>(enumerate_sector(lat, SectorLabel::neutral(lat, w / 2, w % 2)));
      const Eigen::VectorXd bref = oracle::eigenvalues(oracle::restrict(h, block->states()));
      const SpectralResult br = low_spectrum(BlockOperator(spec, block), 8);
      for (int k = 0; k < 8; ++k) worst = std::max(worst, std::abs(br.eigenvalues[k] - bref[k]));
      // Projection: block matvec against the restricted dense matrix.
      Eigen::VectorXcd x = Eigen::VectorXcd::LinSpaced(8, cplx(-1.0, 0.5), cplx(1.0, -0.25));
      worst = std::max(worst, (BlockOperator(spec, block) * x - oracle::restrict(h, block->states()) * x).norm());
    }
  }
  const double spectra = worst;

  // Propagation with a sigma^x perturbation in the full space.
  SweepConfig c;
  c.params = params;
  c.schedule = sched;
  c.total_time = 2.0;
  c.perturbation = Perturbation{0.25, 1};
  c.integrator.tolerance = 1e-12;
  c.checkpoints = {1.0};
  const SweepResult r = propagate(c);
  oracle::Vec psi = oracle::Vec::Zero(256);
  psi[0] = 1.0;
  const oracle::Vec ref = oracle::rk4(
      [&](double t) {
        const double f = sched.f(t / c.total_time);
        return oracle::Mat(dense.stars + (1 - f) * dense.field + f * dense.plaquettes + dense_v);
      },
      psi, 0.0, c.total_time, 8000);
  const double prop = (r.final_state.amplitudes - ref).norm();
  worst = std::max(worst, prop);

  // Sector weights from the dense state.
  double w00 = 0.0;
  const auto s00 = make_sector00(lat);
  for (Mask s : s00->states()) w00 += std::norm(ref[static_cast<Eigen::Index>(s)]);
  const double weights = std::abs(r.checkpoints.back().weights.neutral[0] - w00);
  worst = std::max(worst, weights);

  v.require(worst <= 1e-8, "agreement to 1e-8");
  v.note("spectra/projections " + fmt(spectra, "%.2e") + ", propagation " + fmt(prop, "%.2e") +
         ", sector weight " + fmt(weights, "%.2e"));
  return v;
}

Verdict performance() {
  Verdict v;
  const TorusLattice lat(4);
  const auto t0 = std::chrono::steady_clock::now();
  const InterpolatedBlock block(lat, ModelParams{}, Schedule(ScheduleKind::linear), make_sector00(lat));
  const SpectralResult r = low_spectrum(block.at(0.7), 1);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  v.require(secs < 30.0, "L=4 ground state under 30 s");
  v.require(r.residuals[0] <= 1e-10, "L=4 residual");
  v.note("L=4 dim " + std::to_string(block.basis()->dim()) + " ground state in " + fmt(secs, "%.2f") +
         " s with " + std::to_string(num_threads()) + " thread(s), E0=" + fmt(r.eigenvalues[0], "%.10g") +
         "; L=5 stretch run: tcprep_bench_l5 (not gated)");
  return v;
}

}  // namespace

int main() {
  std::printf("tcprep acceptance suite %s\n", TCPREP_VERSION);
  criterion(1, "algebra suite", 1.0, algebra_suite);
  criterion(2, "ground-state structure", 10.0, ground_state_structure);
  criterion(3, "string energetics", 1.0, string_energetics);
  criterion(4, "sector protection", 60.0, sector_protection);
  criterion(5, "duality", 60.0, duality);
  criterion(6, "gap scaling trend", 600.0, gap_scaling);
  criterion(7, "adiabatic error", 300.0, adiabatic_error);
  criterion(8, "protection bound", 900.0, protection);
  criterion(9, "oracle equivalence", 60.0, oracle_equivalence);
  criterion(10, "performance gate", 30.0, performance);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
