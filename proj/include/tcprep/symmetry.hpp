#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "tcprep/lattice.hpp"
#include "tcprep/model.hpp"
#include "tcprep/parallel.hpp"

namespace tcprep {

class NotTranslationInvariant : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Zero-momentum states of the full link space under the L^2 torus
/// translations. Basis vector r is the normalized sum over the orbit of its
/// representative (the smallest mask in the orbit).
///
/// Keeps a lookup table over all 2^n masks, so it is limited to L <= 3.
class TranslationBasis {
 public:
  explicit TranslationBasis(const TorusLattice& lat);

  int width() const { return width_; }
  std::size_t dim() const { return reps_.size(); }
  Mask representative(std::size_t r) const { return reps_[r]; }
  int orbit_size(std::size_t r) const { return orbit_[r]; }
  /// Basis index of the orbit containing `bits`.
  std::size_t index_of(Mask bits) const { return index_[bits]; }

  /// Image of `bits` under the translation by (dx, dy).
  Mask translate(Mask bits, int dx, int dy) const;

  /// Full-space amplitudes (ordered by mask value) of a symmetric vector.
  Eigen::VectorXcd expand(const Eigen::VectorXcd& a) const;
  /// Inverse of expand. Throws NotTranslationInvariant when v has weight
  /// outside the zero-momentum space.
  Eigen::VectorXcd compress(const Eigen::VectorXcd& v, double tol = 1e-12) const;

 private:
  int L_;
  int width_;
  std::vector<std::vector<int>> perms_;  // link permutation per translation
  std::vector<Mask> reps_;
  std::vector<int> orbit_;
  std::vector<std::uint32_t> index_;
};

using TranslationBasisPtr = std::shared_ptr<const TranslationBasis>;

/// Fails with NotTranslationInvariant unless the term list of h is mapped
/// onto itself by the unit translations.
void check_translation_invariant(const HamiltonianSpec& h, const TorusLattice& lat);

/// A translation-invariant HamiltonianSpec on the zero-momentum space.
/// Diagonal terms are folded into one vector; the rest is kept as weighted
/// sparse parts that combine() shares instead of copying.
class SymmetricOperator {
 public:
  using Sparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  SymmetricOperator(const HamiltonianSpec& h, const TorusLattice& lat, TranslationBasisPtr basis);

  std::size_t dim() const { return diag_.size(); }
  const TranslationBasis& basis() const { return *basis_; }

  Eigen::VectorXcd operator*(const Eigen::VectorXcd& x) const;

  static SymmetricOperator combine(
      const std::vector<std::pair<double, const SymmetricOperator*>>& parts);

  double norm_bound() const;

 private:
  SymmetricOperator() = default;

  TranslationBasisPtr basis_;
  Eigen::VectorXd diag_;
  std::vector<std::pair<double, std::shared_ptr<const Sparse>>> off_;
};

}  // namespace tcprep
