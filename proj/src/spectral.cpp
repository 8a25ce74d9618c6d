#include "tcprep/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

namespace tcprep {

namespace {

// Fix the overall sign so the largest entry is positive.
void canonical_sign(Eigen::VectorXd& v) {
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  if (v[k] < 0) v = -v;
}

Eigen::VectorXd random_unit(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index k = 0; k < n; ++k) v[k] = nd(rng);
  return v / v.norm();
}

SpectralResult lanczos_ground_low_memory(const BlockOperator& op, const EigenSolverOptions& opts) {
  const auto n = static_cast<Eigen::Index>(op.dim());
  std::mt19937_64 rng(opts.seed);
  Eigen::VectorXd start = random_unit(n, rng);
  SpectralResult res;
  double best = std::numeric_limits<double>::infinity();
  constexpr int kMaxSteps = 400;

  for (int cycle = 0; cycle <= opts.max_restarts; ++cycle) {
    std::vector<double> alpha, beta;
    Eigen::VectorXd v = start, v_prev = Eigen::VectorXd::Zero(n), w(n);
    double theta = 0.0;
    Eigen::VectorXd y;
    for (int k = 0; k < kMaxSteps; ++k) {
      w = op * v;
      ++res.matvecs;
      const double a = v.dot(w);
      w -= a * v;
      if (k > 0) w -= beta.back() * v_prev;
      alpha.push_back(a);
      const double b = w.norm();
      beta.push_back(b);

      if ((k + 1) % 10 == 0 || b < 1e-14) {
        const int s = static_cast<int>(alpha.size());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), s);
        Eigen::VectorXd sub = Eigen::Map<Eigen::VectorXd>(beta.data(), s - 1);
        es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
        theta = es.eigenvalues()[0];
        y = es.eigenvectors().col(0);
        if (b * std::abs(y[s - 1]) < 0.1 * opts.tol || b < 1e-14) break;
      }
      v_prev.swap(v);
      v = w / b;
    }
    if (y.size() == 0) continue;

    // Second pass: rebuild the Ritz vector from the same recurrence.
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    v = start;
    v_prev.setZero();
    for (Eigen::Index k = 0; k < y.size(); ++k) {
      x += y[k] * v;
      if (k + 1 == y.size()) break;
      w = op * v;
      ++res.matvecs;
      w -= alpha[k] * v;
      if (k > 0) w -= beta[k - 1] * v_prev;
      v_prev.swap(v);
      v = w / beta[k];
    }
    x /= x.norm();
    const Eigen::VectorXd r = op * x - theta * x;
    ++res.matvecs;
    const double rn = r.norm();
    best = std::min(best, rn);
    if (rn <= opts.tol) {
      canonical_sign(x);
      res.eigenvalues = {theta};
      res.eigenvectors = {x};
      res.residuals = {rn};
      res.restarts = cycle;
      return res;
    }
    start = x;
  }
  throw SolverFailure("low-memory lanczos did not converge", best);
}

}  // namespace

SpectralResult low_spectrum(const BlockOperator& op, int m, const EigenSolverOptions& opts) {
  const auto n = static_cast<Eigen::Index>(op.dim());
  if (m < 1 || m > n) {
    throw std::invalid_argument("requested " + std::to_string(m) +
                                " eigenpairs from a block of dimension " + std::to_string(n));
  }
  if (m == 1 && op.dim() > opts.low_memory_dim) return lanczos_ground_low_memory(op, opts);

  const int nn = static_cast<int>(n);
  const int b = std::min(nn, opts.block_size > 0 ? opts.block_size : m + 2);
  int kmax = opts.max_basis > 0 ? opts.max_basis : std::max(3 * b + 60, 150);
  kmax = std::min(nn, std::max(kmax, b + m));
  const double scale = std::max(1.0, op.norm_bound());
  // Breakdown threshold. It has to sit below tol, otherwise the directions
  // that would shrink the last residuals are discarded.
  const double eps = std::numeric_limits<double>::epsilon();
  const double drop = std::max(64.0 * eps * scale, std::min(1e-12 * scale, 1e-2 * opts.tol));

  std::mt19937_64 rng(opts.seed);
  Eigen::MatrixXd start(n, b);
  for (int c = 0; c < b; ++c) start.col(c) = random_unit(n, rng);

  Eigen::MatrixXd V(n, kmax);
  Eigen::MatrixXd T(kmax, kmax);
  SpectralResult res;
  double best = std::numeric_limits<double>::infinity();

  for (int cycle = 0; cycle <= opts.max_restarts; ++cycle) {
    int size = 0;
    for (int c = 0; c < start.cols() && size < kmax; ++c) {
      Eigen::VectorXd w = start.col(c);
      const double before = w.norm();
      for (int pass = 0; pass < 2 && size > 0; ++pass) {
        w -= V.leftCols(size) * (V.leftCols(size).transpose() * w);
      }
      const double after = w.norm();
      if (after > 1e-8 * before) V.col(size++) = w / after;
    }
    T.setZero();

    int p = 0;
    Eigen::MatrixXd ritz_vectors;
    while (p < size) {
      Eigen::VectorXd w = op * Eigen::VectorXd(V.col(p));
      ++res.matvecs;
      Eigen::VectorXd h = V.leftCols(size).transpose() * w;
      w -= V.leftCols(size) * h;
      const Eigen::VectorXd h2 = V.leftCols(size).transpose() * w;
      w -= V.leftCols(size) * h2;
      T.col(p).head(size) = h + h2;
      const double beta = w.norm();
      if (beta > drop && size < kmax) {
        V.col(size) = w / beta;
        T(size, p) = beta;
        ++size;
      }
      ++p;

      const bool exhausted = p == size;
      if (p < m || (p % b != 0 && !exhausted)) continue;

      const Eigen::MatrixXd tp = T.topLeftCorner(p, p);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (tp + tp.transpose()));
      const Eigen::VectorXd& theta = es.eigenvalues();
      const Eigen::MatrixXd& Y = es.eigenvectors();

      bool estimated = true;
      for (int k = 0; k < m && estimated; ++k) {
        Eigen::VectorXd r = T.block(0, 0, size, p) * Y.col(k);
        r.head(p) -= theta[k] * Y.col(k);
        estimated = r.norm() <= opts.tol;
      }
      if (!estimated && !exhausted) continue;

      const int keep = std::min(p, b);
      ritz_vectors = V.leftCols(p) * Y.leftCols(keep);
      std::vector<double> resid(m);
      double worst = 0.0;
      for (int k = 0; k < m; ++k) {
        const Eigen::VectorXd x = ritz_vectors.col(k);
        resid[k] = (op * x - theta[k] * x).norm();
        ++res.matvecs;
        worst = std::max(worst, resid[k]);
      }
      best = std::min(best, worst);
      if (worst <= opts.tol) {
        res.restarts = cycle;
        for (int k = 0; k < m; ++k) {
          Eigen::VectorXd x = ritz_vectors.col(k);
          x /= x.norm();
          canonical_sign(x);
          res.eigenvalues.push_back(theta[k]);
          res.eigenvectors.push_back(std::move(x));
          res.residuals.push_back(resid[k]);
        }
        return res;
      }
      if (exhausted) break;
    }
    if (ritz_vectors.cols() == 0) break;
    start = ritz_vectors;
  }
  char msg[96];
  std::snprintf(msg, sizeof msg, "eigensolver did not reach residual %.3g (best %.3g)", opts.tol, best);
  throw SolverFailure(msg, best);
}

SectorBasisPtr make_sector00(const TorusLattice& lat) {
  return std::make_shared<const SectorBasis>(enumerate_sector(lat, SectorLabel::neutral(lat)));
}

Eigen::VectorXd ground_state_phi0(const TorusLattice& lat, const SectorBasis& sector00) {
  const auto& label = sector00.label();
  if (!label || !label->all_neutral() || label->i != 0 || label->j != 0) {
    throw std::invalid_argument("phi0 lives on the neutral winding-(0,0) sector");
  }
  const int plaquette_rank = lat.num_plaquettes() - 1;
  if (sector00.rank() != plaquette_rank) throw std::logic_error("unexpected sector rank");
  const double amp = std::pow(2.0, -0.5 * plaquette_rank);
  return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(sector00.dim()), amp);
}

Eigen::VectorXd ground_state_phi0(const TorusLattice& lat) {
  return ground_state_phi0(lat, *make_sector00(lat));
}

InterpolatedBlock::InterpolatedBlock(const TorusLattice& lat, const ModelParams& params,
                                     Schedule schedule, SectorBasisPtr basis)
    : params_(params),
      schedule_(schedule),
      basis_(basis),
      stars_(star_hamiltonian(lat, params.U), basis),
      field_(field_hamiltonian(lat, params.xi), basis),
      plaquettes_(plaquette_hamiltonian(lat, params.g), basis) {
  params.validate();
}

BlockOperator InterpolatedBlock::at(double tau) const {
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::domain_error("tau must lie in [0, 1]");
  const auto w = InterpolationParts::weights(schedule_, tau);
  return BlockOperator::combine({{w[0], &stars_}, {w[1], &field_}, {w[2], &plaquettes_}});
}

BlockOperator InterpolatedBlock::derivative(double tau) const {
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::domain_error("tau must lie in [0, 1]");
  const auto w = InterpolationParts::weight_derivatives(schedule_, tau);
  return BlockOperator::combine({{w[0], &stars_}, {w[1], &field_}, {w[2], &plaquettes_}});
}

std::vector<double> uniform_grid(int points) {
  if (points < 2) throw std::invalid_argument("grid needs at least two points");
  std::vector<double> g(points);
  for (int k = 0; k < points; ++k) g[k] = static_cast<double>(k) / (points - 1);
  return g;
}

double coupling_ratio(const ModelParams& params, const Schedule& schedule, double tau) {
  const double f = schedule.f(tau);
  if (f <= 0.0) return std::numeric_limits<double>::infinity();
  return params.xi * (1.0 - f) / (params.g * f);
}

double sector_gap(const InterpolatedBlock& block, double tau, const GapScanOptions& opts,
                  bool* ground_degenerate) {
  const BlockOperator op = block.at(tau);
  const int dim = static_cast<int>(op.dim());
  int m = std::min(2, dim);
  if (ground_degenerate) *ground_degenerate = false;
  while (true) {
    const SpectralResult r = low_spectrum(op, m, opts.solver);
    for (int k = 1; k < m; ++k) {
      const double gap = r.eigenvalues[k] - r.eigenvalues[0];
      if (gap > opts.degeneracy_tol) return gap;
      if (ground_degenerate) *ground_degenerate = true;
    }
    if (m == dim) return 0.0;
    m = std::min(dim, 2 * m);
  }
}

GapScan gap_scan(const TorusLattice& lat, const ModelParams& params, const Schedule& schedule,
                 const std::vector<double>& grid, const GapScanOptions& opts,
                 SectorBasisPtr basis) {
  if (grid.size() < 2) throw std::invalid_argument("gap scan needs at least two grid points");
  for (double t : grid) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("gap scan grid must lie in [0, 1]");
  }
  InterpolatedBlock block(lat, params, schedule, basis ? basis : make_sector00(lat));
  GapScan scan;
  scan.taus = grid;
  auto eval = [&](double tau) {
    bool degenerate = false;
    double gap = 0.0;
    try {
      gap = sector_gap(block, tau, opts, &degenerate);
    } catch (const SolverFailure& e) {
      throw SolverFailure(std::string(e.what()) + " at tau = " + std::to_string(tau),
                          e.best_residual());
    }
    if (degenerate) scan.degenerate_ground_taus.push_back(tau);
    return gap;
  };
  for (double t : grid) scan.gaps.push_back(eval(t));

  const auto kmin = static_cast<std::size_t>(
      std::min_element(scan.gaps.begin(), scan.gaps.end()) - scan.gaps.begin());
  double best_tau = grid[kmin], best_gap = scan.gaps[kmin];

  // Golden-section refinement inside the neighbouring grid cells.
  double lo = grid[kmin > 0 ? kmin - 1 : kmin];
  double hi = grid[kmin + 1 < grid.size() ? kmin + 1 : kmin];
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  if (hi - lo > opts.tau_tol) {
    double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
    double fa = eval(a), fb = eval(b);
    while (hi - lo > opts.tau_tol) {
      if (fa < fb) {
        hi = b;
        b = a;
        fb = fa;
        a = hi - phi * (hi - lo);
        fa = eval(a);
      } else {
        lo = a;
        a = b;
        fa = fb;
        b = lo + phi * (hi - lo);
        fb = eval(b);
      }
    }
    if (fa < best_gap) best_tau = a, best_gap = fa;
    if (fb < best_gap) best_tau = b, best_gap = fb;
  }
  scan.tau_star = best_tau;
  scan.gap_min = best_gap;
  scan.ratio_star = coupling_ratio(params, schedule, best_tau);

  const BlockOperator op = block.at(best_tau);
  if (op.dim() >= 3) {
    const SpectralResult r = low_spectrum(op, 3, opts.solver);
    scan.excited_splitting = r.eigenvalues[2] - r.eigenvalues[1];
    scan.first_excited_nondegenerate = scan.excited_splitting > opts.degeneracy_tol;
  }
  return scan;
}

HdotElement hdot_matrix_element(const TorusLattice& lat, const ModelParams& params,
                                const Schedule& schedule, double tau, const BlockState& psi_i,
                                const BlockState& psi_j) {
  for (const BlockState* s : {&psi_i, &psi_j}) {
    if (!s->basis || static_cast<std::size_t>(s->amplitudes.size()) != s->basis->dim()) {
      throw DimensionMismatch("state does not match its basis");
    }
    if (std::abs(s->amplitudes.norm() - 1.0) > 1e-8) {
      throw std::invalid_argument("hdot_matrix_element expects unit vectors");
    }
  }
  const InterpolatedBlock block_j(lat, params, schedule, psi_j.basis);
  const Eigen::VectorXcd hdot_psi = block_j.derivative(tau) * psi_j.amplitudes;
  HdotElement out;
  out.value = cross_inner(*psi_i.basis, psi_i.amplitudes, *psi_j.basis, hdot_psi);
  out.energy_j = psi_j.amplitudes.dot(block_j.at(tau) * psi_j.amplitudes).real();
  if (psi_i.basis == psi_j.basis) {
    out.energy_i = psi_i.amplitudes.dot(block_j.at(tau) * psi_i.amplitudes).real();
  } else {
    const InterpolatedBlock block_i(lat, params, schedule, psi_i.basis);
    out.energy_i = psi_i.amplitudes.dot(block_i.at(tau) * psi_i.amplitudes).real();
  }
  return out;
}

double transition_bound(const HdotElement& e) {
  const double de = e.energy_i - e.energy_j;
  if (std::abs(de) < 1e-12) throw std::domain_error("transition bound needs E_i != E_j");
  return std::norm(e.value / (de * de));
}

double phi_dot_norm(const TorusLattice& lat, const ModelParams& params, const Schedule& schedule,
                    double tau, double dtau, const EigenSolverOptions& opts) {
  if (!(dtau > 0.0 && dtau < 0.5)) throw std::invalid_argument("dtau must lie in (0, 0.5)");
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::domain_error("tau must lie in [0, 1]");
  const InterpolatedBlock block(lat, params, schedule, make_sector00(lat));

  auto ground = [&](double t, bool check) {
    const SpectralResult r = low_spectrum(block.at(t), std::min<int>(2, block.basis()->dim()), opts);
    if (check && r.eigenvalues.size() > 1 && r.gap(1) < 1e-8) {
      throw DegenerateGroundState("sector ground state is degenerate at tau = " +
                                  std::to_string(t));
    }
    return r.eigenvectors[0];
  };
  const Eigen::VectorXd center = ground(tau, true);
  auto aligned = [&](double t) {
    Eigen::VectorXd v = ground(t, false);
    if (v.dot(center) < 0) v = -v;
    return v;
  };

  if (tau - dtau >= 0.0 && tau + dtau <= 1.0) {
    return (aligned(tau + dtau) - aligned(tau - dtau)).norm() / (2.0 * dtau);
  }
  if (tau + dtau <= 1.0) return (aligned(tau + dtau) - center).norm() / dtau;
  return (center - aligned(tau - dtau)).norm() / dtau;
}

}  // namespace tcprep
