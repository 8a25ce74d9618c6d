#pragma once

#include <array>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tcprep/block_operator.hpp"
#include "tcprep/model.hpp"
#include "tcprep/spectral.hpp"
#include "tcprep/symmetry.hpp"

namespace tcprep {

class IntegratorFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IntegratorOptions {
  /// Local error per accepted step (step-doubling estimate, 2-norm).
  double tolerance = 1e-10;
  int max_krylov = 40;
  double norm_drift_limit = 1e-8;
  /// First step length; 0 derives it from the tolerance and the interval.
  double initial_step = 0.0;
};

struct IntegratorStats {
  int steps = 0;
  int rejected = 0;
  long matvecs = 0;
  double last_step = 0.0;
};

/// exp(-i dt H) psi by a Lanczos projection with an a posteriori error check;
/// splits dt when the Krylov cap is reached.
/// Op is BlockOperator or SymmetricOperator.
template <typename Op>
Eigen::VectorXcd krylov_expv(const Op& h, double dt, const Eigen::VectorXcd& psi, double tol,
                             int max_krylov, long* matvecs = nullptr);

/// Solves i d psi / dt = H(t) psi from t0 to t1 with a fourth-order
/// commutator-free Magnus scheme and step-doubling control.
template <typename Op>
class BasicIntegrator {
 public:
  using HamiltonianAt = std::function<Op(double t)>;

  BasicIntegrator(HamiltonianAt h, IntegratorOptions opts) : h_(std::move(h)), opts_(opts) {}

  void advance(Eigen::VectorXcd& psi, double t0, double t1);
  const IntegratorStats& stats() const { return stats_; }

  /// One fixed step of the scheme.
  Eigen::VectorXcd step(const Eigen::VectorXcd& psi, double t, double dt);

 private:
  HamiltonianAt h_;
  IntegratorOptions opts_;
  IntegratorStats stats_;
  double dt_ = 0.0;
};

extern template class BasicIntegrator<BlockOperator>;
extern template class BasicIntegrator<SymmetricOperator>;
using Integrator = BasicIntegrator<BlockOperator>;

enum class EvolutionSpace { automatic, sector, closed_strings, full, translation };

std::string space_name(EvolutionSpace s);
EvolutionSpace space_from_name(const std::string& name);

struct Perturbation {
  /// Coefficient V of V * sum_j sigma^x_j (k = 1).
  double strength = 0.0;
  int k = 1;
};

struct SweepConfig {
  int L = 2;
  ModelParams params;
  Schedule schedule{ScheduleKind::trig_smooth};
  double total_time = 20.0;
  IntegratorOptions integrator;
  std::vector<double> checkpoints = uniform_grid(21);
  std::optional<Perturbation> perturbation;
  EvolutionSpace space = EvolutionSpace::automatic;
  EigenSolverOptions solver;

  void validate() const;
};

struct SectorWeights {
  /// Probability per winding (index 2 i + j), classifying every basis state.
  std::array<double, 4> winding{};
  /// Probability per winding restricted to all-neutral star charges.
  std::array<double, 4> neutral{};

  double leakage() const { return neutral[1] + neutral[2] + neutral[3]; }
  double winding_leakage() const { return winding[1] + winding[2] + winding[3]; }
};

SectorWeights sector_weights(const BlockState& psi, const TorusLattice& lat);

struct Checkpoint {
  double tau = 0.0;
  double fidelity = 0.0;  // |<phi(tau)|psi>|, phi the sector-(0,0) ground state of H(tau)
  double energy = 0.0;    // <psi|H(tau)|psi> for the propagated Hamiltonian
  double ground_energy = 0.0;
  double first_excited = 0.0;
  SectorWeights weights;
  double norm = 1.0;
};

struct SweepResult {
  SweepConfig config;
  std::string space;
  std::size_t dim = 0;
  std::vector<Checkpoint> checkpoints;
  double delta = 0.0;  // min over phase of ||psi(T) - phi0||
  double final_overlap = 0.0;
  double max_norm_drift = 0.0;
  IntegratorStats stats;
  double wall_seconds = 0.0;
  BlockState final_state;
};

/// Runs the sweep from |0> (or `initial`, which must fit the chosen space).
SweepResult propagate(const SweepConfig& config, const std::optional<BlockState>& initial = {});

/// |(V / xi)^{L / k} L|^2. Throws BoundNotClaimed for V >= xi.
double protection_bound(double V, double xi, int L, int k);

class BoundNotClaimed : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct ProtectionEntry {
  double strength = 0.0;
  bool claimed = true;
  double bound = 0.0;
  double max_leakage = 0.0;          // neutral weight outside winding (0,0)
  double max_winding_leakage = 0.0;  // same, classifying charged states too
  std::vector<double> leakage;       // per checkpoint
  bool pass = true;
  SweepResult sweep;
};

struct ProtectionReport {
  int L = 0;
  std::vector<ProtectionEntry> entries;
  bool pass = true;
};

ProtectionReport perturbed_protection_experiment(const SweepConfig& base,
                                                 const std::vector<double>& strengths);

}  // namespace tcprep
