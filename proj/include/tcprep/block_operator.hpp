#pragma once

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tcprep/lattice.hpp"
#include "tcprep/model.hpp"
#include "tcprep/parallel.hpp"
#include "tcprep/sector.hpp"

namespace tcprep {

class NotBlockDiagonal : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A HamiltonianSpec restricted to a SectorBasis, applied matrix-free.
///
/// Diagonal terms are folded into one precomputed diagonal. Every
/// off-diagonal term maps basis position k to k ^ flip, so the product is
/// evaluated as a gather over output positions; each output entry is a
/// fixed-order sum and the result is independent of the thread count.
class BlockOperator {
 public:
  BlockOperator(const HamiltonianSpec& h, SectorBasisPtr basis);

  std::size_t dim() const { return basis_->dim(); }
  const SectorBasis& basis() const { return *basis_; }
  const SectorBasisPtr& basis_ptr() const { return basis_; }
  const std::vector<double>& diagonal() const { return diag_; }

  void apply(std::span<const double> x, std::span<double> y) const;
  void apply(std::span<const cplx> x, std::span<cplx> y) const;

  Eigen::VectorXd operator*(const Eigen::VectorXd& x) const;
  Eigen::VectorXcd operator*(const Eigen::VectorXcd& x) const;

  /// sum_k w_k op_k over operators sharing one basis.
  static BlockOperator combine(const std::vector<std::pair<double, const BlockOperator*>>& parts);

  /// Upper bound on the spectral radius (max row sum of |entries|).
  double norm_bound() const;

 private:
  BlockOperator() = default;

  struct Hop {
    std::size_t flip;
    double coefficient;
  };
  struct SignedHop {
    std::size_t flip;
    Mask z;
    double coefficient;
  };

  template <typename T>
  void apply_impl(std::span<const T> x, std::span<T> y) const;

  SectorBasisPtr basis_;
  std::vector<double> diag_;
  std::vector<Hop> hops_;
  std::vector<SignedHop> signed_hops_;
};

/// Fails with NotBlockDiagonal unless every term of h maps the block into itself.
void check_block_diagonal(const HamiltonianSpec& h, const SectorBasis& basis);

/// project_hamiltonian: the block operator of h on `basis`.
BlockOperator project_hamiltonian(const HamiltonianSpec& h, SectorBasisPtr basis);

/// Embeds a block vector into another basis (entries outside `to` must vanish).
Eigen::VectorXcd embed(const SectorBasis& from, const Eigen::VectorXcd& v, const SectorBasis& to);

/// <a|b> for vectors living on different bases; states outside the overlap contribute 0.
cplx cross_inner(const SectorBasis& basis_a, const Eigen::VectorXcd& a, const SectorBasis& basis_b,
                 const Eigen::VectorXcd& b);

}  // namespace tcprep
