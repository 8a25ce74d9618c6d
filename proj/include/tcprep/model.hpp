#pragma once

#include <array>
#include <string>
#include <vector>

#include "tcprep/lattice.hpp"
#include "tcprep/pauli.hpp"

namespace tcprep {

struct Term {
  PauliString op;
  double coefficient = 0.0;
};

/// constant * I + sum_k coefficient_k * op_k, every op a real symmetric
/// matrix in the computational basis.
class HamiltonianSpec {
 public:
  explicit HamiltonianSpec(int width = 0) : width_(width) {}

  void add_term(const PauliString& op, double coefficient);
  void add_constant(double c);

  int width() const { return width_; }
  const std::vector<Term>& terms() const { return terms_; }
  double constant() const { return constant_; }

  HamiltonianSpec scaled(double s) const;
  /// Term lists are concatenated, never merged.
  HamiltonianSpec operator+(const HamiltonianSpec& other) const;

 private:
  int width_;
  std::vector<Term> terms_;
  double constant_ = 0.0;
};

enum class ScheduleKind { linear, trig_smooth };

/// Interpolation f: [0, 1] -> [0, 1] with f(0) = 0 and f(1) = 1.
class Schedule {
 public:
  explicit Schedule(ScheduleKind kind = ScheduleKind::linear) : kind_(kind) {}

  ScheduleKind kind() const { return kind_; }
  double f(double tau) const;
  double df(double tau) const;

  std::string name() const;
  static Schedule from_name(const std::string& name);

 private:
  ScheduleKind kind_;
};

struct ModelParams {
  double U = 20.0;
  double g = 1.0;
  double xi = 1.0;

  void validate() const;
};

// Building blocks of H(tau) = H_U + [1 - f] H_xi + f H_g.
HamiltonianSpec star_hamiltonian(const TorusLattice& lat, double U);
HamiltonianSpec plaquette_hamiltonian(const TorusLattice& lat, double g);

HamiltonianSpec kitaev_hamiltonian(const TorusLattice& lat, double g, double U);

/// -xi sum_j sigma^z_j + xi n, so the vacuum sits at zero energy.
HamiltonianSpec field_hamiltonian(const TorusLattice& lat, double xi);

HamiltonianSpec interpolated_hamiltonian(const TorusLattice& lat, const ModelParams& params,
                                         const Schedule& schedule, double tau);

/// The three pieces of H(tau) and their tau-dependent weights.
struct InterpolationParts {
  HamiltonianSpec stars;
  HamiltonianSpec field;
  HamiltonianSpec plaquettes;

  static std::array<double, 3> weights(const Schedule& schedule, double tau);
  /// d/dtau of the weights.
  static std::array<double, 3> weight_derivatives(const Schedule& schedule, double tau);
};

InterpolationParts interpolation_parts(const TorusLattice& lat, const ModelParams& params);

/// h * sum_j sigma^x_j, the default k = 1 perturbation.
HamiltonianSpec sigma_x_field(const TorusLattice& lat, double h);

HamiltonianSpec gauge_hamiltonian(const TorusLattice& lat, double lambda1, double lambda2);

/// Dual spin operators, one per plaquette (plaquette id = x + L y).
///
/// mu_z_right(x, y) is the sigma^z string on vertical links (k, y) for
/// k = 1..x, i.e. the dual path from plaquette (x, y) back to column 0 next
/// to the t2 line. mu_z_up(x, y) runs over horizontal links (x, k), k = 1..y,
/// back to row 0 next to t1. Plaquettes in column 0 (row 0) are the
/// reference points of the right (up) strings and carry the identity.
struct DualVariables {
  std::vector<PauliString> mu_x;
  std::vector<PauliString> mu_z_right;
  std::vector<PauliString> mu_z_up;
};

DualVariables dual_variables(const TorusLattice& lat);

/// -lambda2 sum_p mu^x(p) - lambda1 sum_{p, i} mu^z(p) mu^z(p + i) on L*L
/// dual sites (site id x + L y), mu^x = X and mu^z = Z. 2 L^2 bonds.
HamiltonianSpec ising_hamiltonian(int L, double lambda1, double lambda2);

/// Conjugation by a Hadamard on every qubit (X <-> Z).
HamiltonianSpec hadamard_conjugate(const HamiltonianSpec& h);

}  // namespace tcprep
