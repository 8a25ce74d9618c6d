#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tcprep/block_operator.hpp"
#include "tcprep/lattice.hpp"
#include "tcprep/model.hpp"
#include "tcprep/sector.hpp"

namespace tcprep {

struct EigenSolverOptions {
  double tol = 1e-10;
  /// Start block width; 0 picks m + 2.
  int block_size = 0;
  /// Krylov basis cap per cycle; 0 picks a size from m and the dimension.
  int max_basis = 0;
  int max_restarts = 60;
  std::uint64_t seed = 20070101;
  /// Above this dimension (and for m == 1) a three-vector Lanczos without
  /// reorthogonalization is used instead of the stored Krylov basis.
  std::size_t low_memory_dim = std::size_t{1} << 20;
};

struct SpectralResult {
  std::vector<double> eigenvalues;  // ascending
  std::vector<Eigen::VectorXd> eigenvectors;
  std::vector<double> residuals;  // ||H v - E v||
  int matvecs = 0;
  int restarts = 0;

  double gap(int k = 1) const { return eigenvalues.at(k) - eigenvalues.at(0); }
};

class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, double best_residual)
      : std::runtime_error(what), best_residual_(best_residual) {}
  double best_residual() const { return best_residual_; }

 private:
  double best_residual_;
};

/// m lowest eigenpairs of a real symmetric block operator.
SpectralResult low_spectrum(const BlockOperator& op, int m, const EigenSolverOptions& opts = {});

/// Equal superposition of all contractible closed string nets, on sector (0,0).
Eigen::VectorXd ground_state_phi0(const TorusLattice& lat, const SectorBasis& sector00);
Eigen::VectorXd ground_state_phi0(const TorusLattice& lat);

/// H(tau) restricted to one basis, rebuilt cheaply for any tau.
class InterpolatedBlock {
 public:
  InterpolatedBlock(const TorusLattice& lat, const ModelParams& params, Schedule schedule,
                    SectorBasisPtr basis);

  BlockOperator at(double tau) const;
  /// dH/dtau; the stars do not depend on tau.
  BlockOperator derivative(double tau) const;

  const SectorBasisPtr& basis() const { return basis_; }
  const Schedule& schedule() const { return schedule_; }
  const ModelParams& params() const { return params_; }

 private:
  ModelParams params_;
  Schedule schedule_;
  SectorBasisPtr basis_;
  BlockOperator stars_;
  BlockOperator field_;
  BlockOperator plaquettes_;
};

SectorBasisPtr make_sector00(const TorusLattice& lat);

struct GapScanOptions {
  double degeneracy_tol = 1e-8;
  double tau_tol = 1e-4;
  EigenSolverOptions solver;
};

struct GapScan {
  std::vector<double> taus;
  std::vector<double> gaps;
  double tau_star = 0.0;
  double gap_min = 0.0;
  /// lambda1 / lambda2 = xi (1 - f) / (g f) at tau_star.
  double ratio_star = 0.0;
  /// E2 - E1 at tau_star; the first excited level is non-degenerate when
  /// this exceeds the degeneracy tolerance.
  double excited_splitting = 0.0;
  bool first_excited_nondegenerate = true;
  /// Grid points where the sector ground level itself was degenerate.
  std::vector<double> degenerate_ground_taus;
};

std::vector<double> uniform_grid(int points);

/// Gap profile over `grid`, refined around the minimum. `basis` defaults to
/// sector (0,0); any other basis gives the gap of H(tau) restricted to it.
GapScan gap_scan(const TorusLattice& lat, const ModelParams& params, const Schedule& schedule,
                 const std::vector<double>& grid, const GapScanOptions& opts = {},
                 SectorBasisPtr basis = nullptr);

double coupling_ratio(const ModelParams& params, const Schedule& schedule, double tau);

/// Gap above the ground level of H(tau) inside sector (0,0).
double sector_gap(const InterpolatedBlock& block, double tau, const GapScanOptions& opts,
                  bool* ground_degenerate = nullptr);

/// A state together with the basis it is expanded in.
struct BlockState {
  SectorBasisPtr basis;
  Eigen::VectorXcd amplitudes;
};

struct HdotElement {
  cplx value;       // <psi_i| dH/dtau |psi_j>
  double energy_i;  // <psi_i| H(tau) |psi_i>
  double energy_j;
};

HdotElement hdot_matrix_element(const TorusLattice& lat, const ModelParams& params,
                                const Schedule& schedule, double tau, const BlockState& psi_i,
                                const BlockState& psi_j);

/// |<i|dH|j> / (E_i - E_j)^2|^2; throws std::domain_error when E_i == E_j.
double transition_bound(const HdotElement& e);

class DegenerateGroundState : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Finite-difference norm of d phi / d tau for the sector-(0,0) ground state.
double phi_dot_norm(const TorusLattice& lat, const ModelParams& params, const Schedule& schedule,
                    double tau, double dtau, const EigenSolverOptions& opts = {});

struct DualityReport {
  int L = 0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  std::vector<double> gauge_levels;
  std::vector<double> ising_levels;
  std::vector<double> differences;
  double max_difference = 0.0;
  double tol = 0.0;
  bool structural_failure = false;
  std::string message;
  bool pass = false;
};

/// Gauge theory on the neutral winding-(0,0) block against the transverse
/// field Ising model on the even sector of prod mu^x.
DualityReport duality_spectrum_check(int L, double lambda1, double lambda2, int m, double tol,
                                     const EigenSolverOptions& opts = {});

}  // namespace tcprep
