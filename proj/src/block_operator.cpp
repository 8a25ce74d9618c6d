#include "tcprep/block_operator.hpp"

#include <cmath>
#include <map>
#include <string>

namespace tcprep {

void check_block_diagonal(const HamiltonianSpec& h, const SectorBasis& basis) {
  if (h.width() != basis.width()) {
    throw DimensionMismatch("hamiltonian width " + std::to_string(h.width()) +
                            " does not match basis width " + std::to_string(basis.width()));
  }
  for (const auto& t : h.terms()) {
    for (const auto& sym : basis.conserved()) {
      if (!commutes(t.op, sym)) {
        throw NotBlockDiagonal("term " + t.op.to_letters() + " anticommutes with conserved " +
                               sym.to_letters() + " of " + basis.description());
      }
    }
    if (!basis.in_linear_span(t.op.x_mask())) {
      throw NotBlockDiagonal("term " + t.op.to_letters() + " leaves " + basis.description());
    }
  }
}

BlockOperator::BlockOperator(const HamiltonianSpec& h, SectorBasisPtr basis)
    : basis_(std::move(basis)) {
  check_block_diagonal(h, *basis_);
  const auto& states = basis_->states();
  const std::size_t dim = states.size();
  diag_.assign(dim, h.constant());

  std::map<std::size_t, double> merged;
  for (const auto& t : h.terms()) {
    const double c = t.coefficient * phase_real(t.op.phase());
    const Mask x = t.op.x_mask();
    const Mask z = t.op.z_mask();
    if (x == 0) {
      if (z == 0) {
        for (auto& d : diag_) d += c;
        continue;
      }
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(dim); ++k) {
        diag_[k] += c * parity_sign(z & states[k]);
      }
    } else if (z == 0) {
      merged[basis_->extract(x)] += c;
    } else {
      signed_hops_.push_back({basis_->extract(x), z, c});
    }
  }
  for (const auto& [flip, c] : merged) {
    if (c != 0.0) hops_.push_back({flip, c});
  }
}

template <typename T>
void BlockOperator::apply_impl(std::span<const T> x, std::span<T> y) const {
  const std::size_t dim = diag_.size();
  if (x.size() != dim || y.size() != dim) {
    throw DimensionMismatch("vector of size " + std::to_string(x.size()) +
                            " applied to block of dimension " + std::to_string(dim));
  }
  const auto& states = basis_->states();
  const Hop* hops = hops_.data();
  const std::size_t nh = hops_.size();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t sj = 0; sj < static_cast<std::ptrdiff_t>(dim); ++sj) {
    const std::size_t j = static_cast<std::size_t>(sj);
    T acc = diag_[j] * x[j];
    for (std::size_t t = 0; t < nh; ++t) acc += hops[t].coefficient * x[j ^ hops[t].flip];
    for (const auto& sh : signed_hops_) {
      const std::size_t k = j ^ sh.flip;
      acc += (sh.coefficient * parity_sign(sh.z & states[k])) * x[k];
    }
    y[j] = acc;
  }
}

void BlockOperator::apply(std::span<const double> x, std::span<double> y) const {
  apply_impl<double>(x, y);
}

void BlockOperator::apply(std::span<const cplx> x, std::span<cplx> y) const {
  apply_impl<cplx>(x, y);
}

Eigen::VectorXd BlockOperator::operator*(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y(x.size());
  apply(std::span<const double>(x.data(), x.size()), std::span<double>(y.data(), y.size()));
  return y;
}

Eigen::VectorXcd BlockOperator::operator*(const Eigen::VectorXcd& x) const {
  Eigen::VectorXcd y(x.size());
  apply(std::span<const cplx>(x.data(), x.size()), std::span<cplx>(y.data(), y.size()));
  return y;
}

BlockOperator BlockOperator::combine(
    const std::vector<std::pair<double, const BlockOperator*>>& parts) {
  if (parts.empty()) throw std::invalid_argument("combine: no operators");
  BlockOperator out;
  out.basis_ = parts.front().second->basis_;
  const std::size_t dim = out.basis_->dim();
  out.diag_.assign(dim, 0.0);
  std::map<std::size_t, double> merged;
  for (const auto& [w, op] : parts) {
    if (op->basis_ != out.basis_) throw DimensionMismatch("combine: operators on different bases");
    if (w == 0.0) continue;
    const double* d = op->diag_.data();
    for (std::size_t k = 0; k < dim; ++k) out.diag_[k] += w * d[k];
    for (const auto& h : op->hops_) merged[h.flip] += w * h.coefficient;
    for (const auto& sh : op->signed_hops_) {
      out.signed_hops_.push_back({sh.flip, sh.z, w * sh.coefficient});
    }
  }
  for (const auto& [flip, c] : merged) {
    if (c != 0.0) out.hops_.push_back({flip, c});
  }
  return out;
}

double BlockOperator::norm_bound() const {
  double off = 0.0;
  for (const auto& h : hops_) off += std::abs(h.coefficient);
  for (const auto& sh : signed_hops_) off += std::abs(sh.coefficient);
  double dmax = 0.0;
  for (double d : diag_) dmax = std::max(dmax, std::abs(d));
  return dmax + off;
}

BlockOperator project_hamiltonian(const HamiltonianSpec& h, SectorBasisPtr basis) {
  return BlockOperator(h, std::move(basis));
}

Eigen::VectorXcd embed(const SectorBasis& from, const Eigen::VectorXcd& v, const SectorBasis& to) {
  if (static_cast<std::size_t>(v.size()) != from.dim()) {
    throw DimensionMismatch("embed: vector does not match source basis");
  }
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(to.dim()));
  for (std::size_t k = 0; k < from.dim(); ++k) {
    const auto idx = to.index_of(from.state(k));
    if (idx) {
      out[static_cast<Eigen::Index>(*idx)] = v[static_cast<Eigen::Index>(k)];
    } else if (v[static_cast<Eigen::Index>(k)] != cplx{0.0}) {
      throw DimensionMismatch("embed: state outside the target basis has nonzero amplitude");
    }
  }
  return out;
}

cplx cross_inner(const SectorBasis& basis_a, const Eigen::VectorXcd& a, const SectorBasis& basis_b,
                 const Eigen::VectorXcd& b) {
  if (static_cast<std::size_t>(a.size()) != basis_a.dim() ||
      static_cast<std::size_t>(b.size()) != basis_b.dim()) {
    throw DimensionMismatch("cross_inner: vector does not match its basis");
  }
  cplx s = 0.0;
  for (std::size_t k = 0; k < basis_b.dim(); ++k) {
    const auto idx = basis_a.index_of(basis_b.state(k));
    if (idx) s += std::conj(a[static_cast<Eigen::Index>(*idx)]) * b[static_cast<Eigen::Index>(k)];
  }
  return s;
}

}  // namespace tcprep
