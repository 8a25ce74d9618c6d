#include "tcprep/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tcprep {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(name) + " must be positive and finite");
  }
}

void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(name) + " must be non-negative and finite");
  }
}

}  // namespace

void HamiltonianSpec::add_term(const PauliString& op, double coefficient) {
  if (op.width() != width_) {
    throw WidthMismatch("term width " + std::to_string(op.width()) +
                        " does not match hamiltonian width " + std::to_string(width_));
  }
  if (!std::isfinite(coefficient)) throw std::invalid_argument("non-finite coefficient");
  if (!phase_is_real(op.phase()) || !op.is_hermitian()) {
    throw std::invalid_argument("term " + op.to_letters() + " is not a real symmetric matrix");
  }
  terms_.push_back({op, coefficient});
}

void HamiltonianSpec::add_constant(double c) {
  if (!std::isfinite(c)) throw std::invalid_argument("non-finite constant");
  constant_ += c;
}

HamiltonianSpec HamiltonianSpec::scaled(double s) const {
  HamiltonianSpec out(width_);
  out.terms_ = terms_;
  for (auto& t : out.terms_) t.coefficient *= s;
  out.constant_ = constant_ * s;
  return out;
}

HamiltonianSpec HamiltonianSpec::operator+(const HamiltonianSpec& other) const {
  if (other.width_ != width_) throw WidthMismatch("cannot add hamiltonians of different width");
  HamiltonianSpec out = *this;
  out.terms_.insert(out.terms_.end(), other.terms_.begin(), other.terms_.end());
  out.constant_ += other.constant_;
  return out;
}

double Schedule::f(double tau) const {
  switch (kind_) {
    case ScheduleKind::linear:
      return tau;
    case ScheduleKind::trig_smooth: {
      const double s = std::sin(0.5 * std::numbers::pi * tau);
      return s * s;
    }
  }
  return tau;
}

double Schedule::df(double tau) const {
  switch (kind_) {
    case ScheduleKind::linear:
      return 1.0;
    case ScheduleKind::trig_smooth:
      // d/dtau sin^2(pi tau / 2) = (pi / 2) sin(pi tau)
      return 0.5 * std::numbers::pi * std::sin(std::numbers::pi * tau);
  }
  return 1.0;
}

std::string Schedule::name() const {
  return kind_ == ScheduleKind::linear ? "linear" : "trig-smooth";
}

Schedule Schedule::from_name(const std::string& name) {
  if (name == "linear") return Schedule(ScheduleKind::linear);
  if (name == "trig-smooth" || name == "trig_smooth") return Schedule(ScheduleKind::trig_smooth);
  throw std::invalid_argument("unknown schedule '" + name + "'");
}

void ModelParams::validate() const {
  require_positive(U, "U");
  require_positive(g, "g");
  require_positive(xi, "xi");
}

HamiltonianSpec star_hamiltonian(const TorusLattice& lat, double U) {
  HamiltonianSpec h(lat.num_links());
  for (int s = 0; s < lat.num_sites(); ++s) {
    h.add_term(PauliString::z_string(lat.num_links(), lat.star_mask(s)), -U);
  }
  return h;
}

HamiltonianSpec plaquette_hamiltonian(const TorusLattice& lat, double g) {
  HamiltonianSpec h(lat.num_links());
  for (int p = 0; p < lat.num_plaquettes(); ++p) {
    h.add_term(PauliString::x_string(lat.num_links(), lat.plaquette_mask(p)), -g);
  }
  return h;
}

HamiltonianSpec kitaev_hamiltonian(const TorusLattice& lat, double g, double U) {
  require_positive(g, "g");
  require_positive(U, "U");
  return plaquette_hamiltonian(lat, g) + star_hamiltonian(lat, U);
}

HamiltonianSpec field_hamiltonian(const TorusLattice& lat, double xi) {
  require_positive(xi, "xi");
  const int n = lat.num_links();
  HamiltonianSpec h(n);
  for (int j = 0; j < n; ++j) h.add_term(PauliString::z_string(n, Mask{1} << j), -xi);
  h.add_constant(xi * n);
  return h;
}

std::array<double, 3> InterpolationParts::weights(const Schedule& schedule, double tau) {
  const double f = schedule.f(tau);
  return {1.0, 1.0 - f, f};
}

std::array<double, 3> InterpolationParts::weight_derivatives(const Schedule& schedule,
                                                             double tau) {
  const double df = schedule.df(tau);
  return {0.0, -df, df};
}

InterpolationParts interpolation_parts(const TorusLattice& lat, const ModelParams& params) {
  params.validate();
  return {star_hamiltonian(lat, params.U), field_hamiltonian(lat, params.xi),
          plaquette_hamiltonian(lat, params.g)};
}

HamiltonianSpec interpolated_hamiltonian(const TorusLattice& lat, const ModelParams& params,
                                         const Schedule& schedule, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw std::domain_error("tau must lie in [0, 1], got " + std::to_string(tau));
  }
  const auto parts = interpolation_parts(lat, params);
  const auto w = InterpolationParts::weights(schedule, tau);
  HamiltonianSpec h = parts.stars;
  if (w[1] != 0.0) h = h + parts.field.scaled(w[1]);
  if (w[2] != 0.0) h = h + parts.plaquettes.scaled(w[2]);
  return h;
}

HamiltonianSpec sigma_x_field(const TorusLattice& lat, double h) {
  require_nonnegative(h, "perturbation strength");
  const int n = lat.num_links();
  HamiltonianSpec out(n);
  for (int j = 0; j < n; ++j) out.add_term(PauliString::x_string(n, Mask{1} << j), h);
  return out;
}

HamiltonianSpec gauge_hamiltonian(const TorusLattice& lat, double lambda1, double lambda2) {
  require_nonnegative(lambda1, "lambda1");
  require_nonnegative(lambda2, "lambda2");
  const int n = lat.num_links();
  HamiltonianSpec h(n);
  for (int j = 0; j < n; ++j) h.add_term(PauliString::z_string(n, Mask{1} << j), -lambda1);
  for (int p = 0; p < lat.num_plaquettes(); ++p) {
    h.add_term(PauliString::x_string(n, lat.plaquette_mask(p)), -lambda2);
  }
  return h;
}

DualVariables dual_variables(const TorusLattice& lat) {
  const int L = lat.size();
  const int n = lat.num_links();
  DualVariables dv;
  for (int y = 0; y < L; ++y) {
    for (int x = 0; x < L; ++x) {
      const int p = lat.site_index(x, y);
      dv.mu_x.push_back(PauliString::x_string(n, lat.plaquette_mask(p)));
      Mask right = 0, up = 0;
      for (int k = 1; k <= x; ++k) right ^= Mask{1} << lat.link_index(k, y, Direction::vertical);
      for (int k = 1; k <= y; ++k) up ^= Mask{1} << lat.link_index(x, k, Direction::horizontal);
      dv.mu_z_right.push_back(PauliString::z_string(n, right));
      dv.mu_z_up.push_back(PauliString::z_string(n, up));
    }
  }
  return dv;
}

HamiltonianSpec ising_hamiltonian(int L, double lambda1, double lambda2) {
  if (L < 2) throw InvalidSize("ising lattice size must be >= 2");
  if (L * L > 64) throw InvalidSize("ising lattice too large for one mask");
  require_nonnegative(lambda1, "lambda1");
  require_nonnegative(lambda2, "lambda2");
  const int sites = L * L;
  auto id = [L](int x, int y) { return ((x % L + L) % L) + L * ((y % L + L) % L); };
  HamiltonianSpec h(sites);
  for (int p = 0; p < sites; ++p) h.add_term(PauliString::x_string(sites, Mask{1} << p), -lambda2);
  for (int y = 0; y < L; ++y) {
    for (int x = 0; x < L; ++x) {
      const Mask here = Mask{1} << id(x, y);
      h.add_term(PauliString::z_string(sites, here | (Mask{1} << id(x + 1, y))), -lambda1);
      h.add_term(PauliString::z_string(sites, here | (Mask{1} << id(x, y + 1))), -lambda1);
    }
  }
  return h;
}

HamiltonianSpec hadamard_conjugate(const HamiltonianSpec& h) {
  HamiltonianSpec out(h.width());
  for (const auto& t : h.terms()) {
    if (t.op.x_mask() & t.op.z_mask()) {
      throw std::invalid_argument("hadamard_conjugate does not handle Y factors");
    }
    out.add_term(PauliString(h.width(), t.op.z_mask(), t.op.x_mask(), t.op.phase()),
                 t.coefficient);
  }
  out.add_constant(h.constant());
  return out;
}

}  // namespace tcprep
