#include <cmath>

#include "tcprep/spectral.hpp"

namespace tcprep {

DualityReport duality_spectrum_check(int L, double lambda1, double lambda2, int m, double tol,
                                     const EigenSolverOptions& opts) {
  if (L != 2 && L != 3) throw std::invalid_argument("duality check supports L in {2, 3}");
  DualityReport rep;
  rep.L = L;
  rep.lambda1 = lambda1;
  rep.lambda2 = lambda2;
  rep.tol = tol;

  const TorusLattice lat(L);
  const auto gauge_basis = make_sector00(lat);
  const BlockOperator gauge(gauge_hamiltonian(lat, lambda1, lambda2), gauge_basis);

  // In the Hadamard frame mu^x is diagonal and the even sector of
  // prod mu^x is the set of even-weight bitmasks.
  const int sites = L * L;
  const auto ising_basis = std::make_shared<const SectorBasis>(SectorBasis::even_parity(sites));
  const BlockOperator ising(hadamard_conjugate(ising_hamiltonian(L, lambda1, lambda2)),
                            ising_basis);

  if (gauge.dim() != ising.dim()) {
    rep.structural_failure = true;
    rep.message = "block dimensions differ: gauge " + std::to_string(gauge.dim()) + ", ising " +
                  std::to_string(ising.dim());
    return rep;
  }
  if (m < 1 || static_cast<std::size_t>(m) > gauge.dim()) {
    rep.structural_failure = true;
    rep.message = "requested " + std::to_string(m) + " levels from blocks of dimension " +
                  std::to_string(gauge.dim());
    return rep;
  }

  EigenSolverOptions solver = opts;
  solver.tol = std::min(opts.tol, 0.1 * tol);
  rep.gauge_levels = low_spectrum(gauge, m, solver).eigenvalues;
  rep.ising_levels = low_spectrum(ising, m, solver).eigenvalues;
  for (int k = 0; k < m; ++k) {
    const double d = std::abs(rep.gauge_levels[k] - rep.ising_levels[k]);
    rep.differences.push_back(d);
    rep.max_difference = std::max(rep.max_difference, d);
  }
  rep.pass = rep.max_difference <= tol;
  rep.message = rep.pass ? "spectra match" : "level mismatch";
  return rep;
}

}  // namespace tcprep
