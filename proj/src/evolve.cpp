#include "tcprep/evolve.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace tcprep {

namespace {

const double kSqrt3 = std::sqrt(3.0);

// Gauss nodes and weights of the two-exponential commutator-free scheme.
const double kC1 = 0.5 - kSqrt3 / 6.0;
const double kC2 = 0.5 + kSqrt3 / 6.0;
const double kA1 = 0.25 + kSqrt3 / 6.0;
const double kA2 = 0.25 - kSqrt3 / 6.0;

Eigen::VectorXcd exp_tridiagonal_e1(const std::vector<double>& alpha,
                                    const std::vector<double>& beta, double dt) {
  const auto s = static_cast<Eigen::Index>(alpha.size());
  Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(alpha.data(), s);
  Eigen::VectorXd e(std::max<Eigen::Index>(s - 1, 0));
  for (Eigen::Index k = 0; k + 1 < s; ++k) e[k] = beta[k];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
  const Eigen::MatrixXd& q = es.eigenvectors();
  Eigen::VectorXcd phase(s);
  for (Eigen::Index k = 0; k < s; ++k) {
    phase[k] = std::exp(cplx(0.0, -dt * es.eigenvalues()[k])) * q(0, k);
  }
  return q.cast<cplx>() * phase;
}

}  // namespace

template <typename Op>
Eigen::VectorXcd krylov_expv(const Op& h, double dt, const Eigen::VectorXcd& psi, double tol,
                             int max_krylov, long* matvecs) {
  const double beta0 = psi.norm();
  if (beta0 == 0.0 || dt == 0.0) return psi;
  const double scale = std::max(1.0, h.norm_bound());

  std::vector<Eigen::VectorXcd> v;
  v.reserve(max_krylov + 1);
  v.push_back(psi / beta0);
  std::vector<double> alpha, beta;
  for (int k = 0; k < max_krylov; ++k) {
    Eigen::VectorXcd w = h * v[k];
    if (matvecs) ++*matvecs;
    const double a = v[k].dot(w).real();
    w -= a * v[k];
    if (k > 0) w -= beta[k - 1] * v[k - 1];
    for (int j = 0; j <= k; ++j) w -= v[j].dot(w) * v[j];
    alpha.push_back(a);
    const double b = w.norm();

    const Eigen::VectorXcd c = exp_tridiagonal_e1(alpha, beta, dt);
    const bool invariant = b < 1e-13 * scale;
    if (invariant || b * std::abs(c[k]) <= tol) {
      Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi.size());
      for (int j = 0; j <= k; ++j) out += c[j] * v[j];
      return beta0 * out;
    }
    beta.push_back(b);
    v.push_back(w / b);
  }
  const Eigen::VectorXcd half = krylov_expv(h, 0.5 * dt, psi, 0.5 * tol, max_krylov, matvecs);
  return krylov_expv(h, 0.5 * dt, half, 0.5 * tol, max_krylov, matvecs);
}

template <typename Op>
Eigen::VectorXcd BasicIntegrator<Op>::step(const Eigen::VectorXcd& psi, double t, double dt) {
  const Op h1 = h_(t + kC1 * dt);
  const Op h2 = h_(t + kC2 * dt);
  const double ktol = 0.01 * opts_.tolerance;
  const Op first = Op::combine({{kA1, &h1}, {kA2, &h2}});
  const Eigen::VectorXcd mid = krylov_expv(first, dt, psi, ktol, opts_.max_krylov, &stats_.matvecs);
  const Op second = Op::combine({{kA2, &h1}, {kA1, &h2}});
  return krylov_expv(second, dt, mid, ktol, opts_.max_krylov, &stats_.matvecs);
}

template <typename Op>
void BasicIntegrator<Op>::advance(Eigen::VectorXcd& psi, double t0, double t1) {
  if (!(t1 > t0)) return;
  const double norm0 = psi.norm();
  if (dt_ <= 0.0) {
    if (opts_.initial_step > 0.0) {
      dt_ = opts_.initial_step;
    } else {
      // Scale the first step by how fast H changes over the interval.
      const double rate = std::abs(h_(t1).norm_bound() - h_(t0).norm_bound()) / (t1 - t0);
      dt_ = std::min(t1 - t0, std::pow(opts_.tolerance, 0.2) / std::sqrt(1.0 + rate));
    }
  }
  const double tiny = 1e-13 * std::max(1.0, t1);
  double t = t0;
  while (t1 - t > tiny) {
    const bool clipped = dt_ >= t1 - t;
    const double dt = clipped ? t1 - t : dt_;
    const Eigen::VectorXcd big = step(psi, t, dt);
    const Eigen::VectorXcd half = step(step(psi, t, 0.5 * dt), t + 0.5 * dt, 0.5 * dt);
    const double err = (big - half).norm() / 15.0;
    const double factor =
        err == 0.0 ? 2.0 : std::clamp(0.9 * std::pow(opts_.tolerance / err, 0.2), 0.2, 2.0);
    if (err <= opts_.tolerance) {
      psi = half;
      t = clipped ? t1 : t + dt;
      ++stats_.steps;
      stats_.last_step = dt;
      dt_ = clipped ? std::max(dt_, dt * factor) : dt * factor;
      const double drift = std::abs(psi.norm() - norm0);
      if (drift > opts_.norm_drift_limit) {
        throw IntegratorFailure("norm drift " + std::to_string(drift) + " at t = " +
                                std::to_string(t));
      }
    } else {
      ++stats_.rejected;
      dt_ = dt * factor;
    }
    if (dt_ < tiny) {
      throw IntegratorFailure("step size underflow at t = " + std::to_string(t) +
                              " (tolerance " + std::to_string(opts_.tolerance) +
                              " unreachable)");
    }
  }
}

template Eigen::VectorXcd krylov_expv(const BlockOperator&, double, const Eigen::VectorXcd&, double,
                                      int, long*);
template Eigen::VectorXcd krylov_expv(const SymmetricOperator&, double, const Eigen::VectorXcd&,
                                      double, int, long*);
template class BasicIntegrator<BlockOperator>;
template class BasicIntegrator<SymmetricOperator>;

std::string space_name(EvolutionSpace s) {
  switch (s) {
    case EvolutionSpace::automatic:
      return "auto";
    case EvolutionSpace::sector:
      return "sector";
    case EvolutionSpace::closed_strings:
      return "closed-strings";
    case EvolutionSpace::full:
      return "full";
    case EvolutionSpace::translation:
      return "translation";
  }
  return "auto";
}

EvolutionSpace space_from_name(const std::string& name) {
  if (name == "auto") return EvolutionSpace::automatic;
  if (name == "sector") return EvolutionSpace::sector;
  if (name == "closed-strings") return EvolutionSpace::closed_strings;
  if (name == "full") return EvolutionSpace::full;
  if (name == "translation") return EvolutionSpace::translation;
  throw std::invalid_argument("unknown evolution space '" + name + "'");
}

void SweepConfig::validate() const {
  if (L < 2 || L > kMaxLinearSize) throw std::invalid_argument("sweep L must lie in [2, 5]");
  params.validate();
  if (!(total_time > 0.0) || !std::isfinite(total_time)) {
    throw std::invalid_argument("total time T must be positive");
  }
  if (!(integrator.tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if ((space == EvolutionSpace::full || space == EvolutionSpace::translation) && L > 3) {
    throw std::invalid_argument(space_name(space) + " evolution is limited to L <= 3");
  }
  for (double t : checkpoints) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("checkpoints must lie in [0, 1]");
  }
  if (perturbation) {
    if (!(perturbation->strength >= 0.0)) throw std::invalid_argument("V must be >= 0");
    if (perturbation->k != 1) {
      throw std::invalid_argument("only the k = 1 sigma^x field perturbation is provided");
    }
  }
}

SectorWeights sector_weights(const BlockState& psi, const TorusLattice& lat) {
  const SectorBasis& basis = *psi.basis;
  if (static_cast<std::size_t>(psi.amplitudes.size()) != basis.dim()) {
    throw DimensionMismatch("sector_weights: state does not match its basis");
  }
  std::vector<Mask> stars;
  for (int s = 0; s < lat.num_sites(); ++s) stars.push_back(lat.star_mask(s));
  SectorWeights out;
  for (std::size_t k = 0; k < basis.dim(); ++k) {
    const double p = std::norm(psi.amplitudes[static_cast<Eigen::Index>(k)]);
    if (p == 0.0) continue;
    const Mask bits = basis.state(k);
    const int w = 2 * parity(lat.w2_mask() & bits) + parity(lat.w1_mask() & bits);
    out.winding[w] += p;
    bool neutral = true;
    for (Mask s : stars) {
      if (parity(s & bits)) {
        neutral = false;
        break;
      }
    }
    if (neutral) out.neutral[w] += p;
  }
  return out;
}

namespace {

// The pieces of H(tau) on one evolution space.
template <typename Op>
struct SweepParts {
  Op stars, field, plaquettes;
  std::optional<Op> perturbation;

  Op at(const Schedule& schedule, double tau) const {
    tau = std::clamp(tau, 0.0, 1.0);
    const auto w = InterpolationParts::weights(schedule, tau);
    std::vector<std::pair<double, const Op*>> parts = {
        {w[0], &stars}, {w[1], &field}, {w[2], &plaquettes}};
    if (perturbation) parts.emplace_back(1.0, &*perturbation);
    return Op::combine(parts);
  }
};

// Integrates through the sorted checkpoints and on to T. `record` gets the
// state in the evolution space and <psi|H(tau)|psi>.
template <typename Op>
IntegratorStats drive(const SweepParts<Op>& parts, const SweepConfig& config,
                      const std::vector<double>& cps, Eigen::VectorXcd& psi,
                      const std::function<void(double, const Eigen::VectorXcd&, double)>& record) {
  const double T = config.total_time;
  BasicIntegrator<Op> integrator(
      [&](double t) { return parts.at(config.schedule, t / T); }, config.integrator);
  double t = 0.0;
  for (double tau : cps) {
    integrator.advance(psi, t, tau * T);
    t = tau * T;
    const double energy = psi.dot(parts.at(config.schedule, tau) * psi).real() / psi.squaredNorm();
    record(tau, psi, energy);
  }
  if (t < T) integrator.advance(psi, t, T);
  return integrator.stats();
}

}  // namespace

SweepResult propagate(const SweepConfig& config, const std::optional<BlockState>& initial) {
  config.validate();
  const auto wall0 = std::chrono::steady_clock::now();
  const TorusLattice lat(config.L);
  const bool perturbed = config.perturbation && config.perturbation->strength > 0.0;

  EvolutionSpace space = config.space;
  if (space == EvolutionSpace::automatic) {
    // Without a caller state the sweep starts from |0>, which is invariant
    // under translations, as is every H(tau) including the sigma^x field.
    if (!perturbed) {
      space = EvolutionSpace::sector;
    } else {
      space = !initial && config.L <= 3 ? EvolutionSpace::translation : EvolutionSpace::full;
    }
  }
  const SectorBasisPtr sector00 = make_sector00(lat);
  // Basis the checkpoints and the final state are reported in. For the
  // translation space it is the full space the symmetric state expands to.
  SectorBasisPtr basis;
  switch (space) {
    case EvolutionSpace::sector:
      basis = sector00;
      break;
    case EvolutionSpace::closed_strings:
      basis = std::make_shared<const SectorBasis>(closed_string_basis(lat));
      break;
    default:
      if (config.L > 3) {
        throw std::invalid_argument("full-space evolution is limited to L <= 3");
      }
      basis = std::make_shared<const SectorBasis>(SectorBasis::full(lat.num_links()));
      break;
  }

  const HamiltonianSpec h_stars = star_hamiltonian(lat, config.params.U);
  const HamiltonianSpec h_field = field_hamiltonian(lat, config.params.xi);
  const HamiltonianSpec h_plaquettes = plaquette_hamiltonian(lat, config.params.g);
  std::optional<HamiltonianSpec> h_pert;
  if (perturbed) h_pert = sigma_x_field(lat, config.perturbation->strength);

  const InterpolatedBlock reference(lat, config.params, config.schedule, sector00);
  Eigen::VectorXcd phi0 = ground_state_phi0(lat, *sector00).cast<cplx>();

  Eigen::VectorXcd psi;
  if (initial) {
    psi = embed(*initial->basis, initial->amplitudes, *basis);
  } else {
    const auto vac = basis->index_of(0);
    if (!vac) throw std::logic_error("vacuum missing from evolution basis");
    psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->dim()));
    psi[static_cast<Eigen::Index>(*vac)] = 1.0;
  }

  SweepResult res;
  res.config = config;
  res.space = space_name(space);
  res.dim = basis->dim();
  const double norm0 = psi.norm();

  std::vector<double> cps = config.checkpoints;
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());

  auto record_full = [&](double tau, const Eigen::VectorXcd& state, double energy) {
    Checkpoint c;
    c.tau = tau;
    c.weights = sector_weights(BlockState{basis, state}, lat);
    c.energy = energy;
    const SpectralResult r =
        low_spectrum(reference.at(tau), std::min<int>(2, sector00->dim()), config.solver);
    c.ground_energy = r.eigenvalues[0];
    c.first_excited = r.eigenvalues.size() > 1 ? r.eigenvalues[1] : r.eigenvalues[0];
    c.fidelity = std::abs(cross_inner(*sector00, r.eigenvectors[0].cast<cplx>(), *basis, state));
    c.norm = state.norm();
    res.max_norm_drift = std::max(res.max_norm_drift, std::abs(c.norm - norm0));
    res.checkpoints.push_back(c);
  };

  if (space == EvolutionSpace::translation) {
    const auto symmetric = std::make_shared<const TranslationBasis>(lat);
    SweepParts<SymmetricOperator> parts{SymmetricOperator(h_stars, lat, symmetric),
                                        SymmetricOperator(h_field, lat, symmetric),
                                        SymmetricOperator(h_plaquettes, lat, symmetric),
                                        std::nullopt};
    if (h_pert) parts.perturbation.emplace(*h_pert, lat, symmetric);
    Eigen::VectorXcd a = symmetric->compress(psi);
    res.dim = symmetric->dim();
    res.stats = drive<SymmetricOperator>(
        parts, config, cps, a, [&](double tau, const Eigen::VectorXcd& state, double energy) {
          record_full(tau, symmetric->expand(state), energy);
        });
    psi = symmetric->expand(a);
  } else {
    SweepParts<BlockOperator> parts{BlockOperator(h_stars, basis), BlockOperator(h_field, basis),
                                    BlockOperator(h_plaquettes, basis), std::nullopt};
    if (h_pert) parts.perturbation.emplace(*h_pert, basis);
    res.stats = drive<BlockOperator>(parts, config, cps, psi, record_full);
  }

  // Direct norm of the difference; sqrt(2 - 2|<phi0|psi>|) loses all digits
  // once delta drops below ~1e-8.
  const Eigen::VectorXcd target = embed(*sector00, phi0, *basis);
  const cplx overlap = target.dot(psi);
  res.final_overlap = std::abs(overlap);
  const cplx phase = res.final_overlap > 0.0 ? overlap / res.final_overlap : cplx(1.0);
  res.delta = (psi - phase * target).norm();
  res.max_norm_drift = std::max(res.max_norm_drift, std::abs(psi.norm() - norm0));
  res.final_state = BlockState{basis, std::move(psi)};
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  return res;
}

double protection_bound(double V, double xi, int L, int k) {
  if (!(V >= 0.0) || !(xi > 0.0)) throw std::invalid_argument("need V >= 0 and xi > 0");
  if (L < 1 || k < 1) throw std::invalid_argument("need L >= 1 and k >= 1");
  if (V >= xi) {
    throw BoundNotClaimed("tunneling bound requires V < xi (V = " + std::to_string(V) +
                          ", xi = " + std::to_string(xi) + ")");
  }
  const double amp = std::pow(V / xi, static_cast<double>(L) / k) * L;
  return amp * amp;
}

ProtectionReport perturbed_protection_experiment(const SweepConfig& base,
                                                 const std::vector<double>& strengths) {
  if (base.L != 2 && base.L != 3) {
    throw std::invalid_argument("protection experiment supports L in {2, 3}");
  }
  ProtectionReport rep;
  rep.L = base.L;
  for (double V : strengths) {
    ProtectionEntry e;
    e.strength = V;
    try {
      e.bound = protection_bound(V, base.params.xi, base.L, 1);
    } catch (const BoundNotClaimed&) {
      e.claimed = false;
    }
    SweepConfig cfg = base;
    cfg.perturbation = Perturbation{V, 1};
    e.sweep = propagate(cfg);
    for (const auto& c : e.sweep.checkpoints) {
      e.leakage.push_back(c.weights.leakage());
      e.max_leakage = std::max(e.max_leakage, c.weights.leakage());
      e.max_winding_leakage = std::max(e.max_winding_leakage, c.weights.winding_leakage());
    }
    e.pass = !e.claimed || e.max_leakage <= e.bound;
    rep.pass = rep.pass && e.pass;
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

}  // namespace tcprep
