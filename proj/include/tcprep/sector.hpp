#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tcprep/lattice.hpp"
#include "tcprep/pauli.hpp"

namespace tcprep {

/// Eigenvalues of the conserved Z-type operators: one +/-1 per star plus the
/// two winding parities. Winding i is read from w2 (flipped by t1), winding j
/// from w1 (flipped by t2).
struct SectorLabel {
  std::vector<int> star_charges;
  int i = 0;
  int j = 0;

  static SectorLabel neutral(const TorusLattice& lat, int i = 0, int j = 0);
  bool all_neutral() const;
  int winding_index() const { return 2 * i + j; }
  std::string winding_name() const { return std::to_string(i) + std::to_string(j); }

  friend bool operator==(const SectorLabel&, const SectorLabel&) = default;
};

SectorLabel classify(const TorusLattice& lat, BasisState b);

class InconsistentLabel : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Ordered computational basis of an affine GF(2) subspace offset + span(G).
///
/// Generators are kept in reduced row echelon form keyed on their highest
/// set bit, and the offset is reduced to vanish on every pivot bit. Sorting
/// the states ascending then coincides with counting the pivot bits as a
/// binary number, so the position of a state is a bit extraction and the
/// position of P|s> is position(s) XOR extract(P.x_mask).
class SectorBasis {
 public:
  static SectorBasis span(int width, Mask offset, const std::vector<Mask>& generators,
                          std::string description = "span");
  static SectorBasis full(int width);
  /// Even-weight bitmasks on `width` qubits.
  static SectorBasis even_parity(int width);

  int width() const { return width_; }
  std::size_t dim() const { return states_.size(); }
  int rank() const { return static_cast<int>(reduced_.size()); }
  Mask offset() const { return offset_; }
  Mask pivot_mask() const { return pivots_; }
  const std::vector<Mask>& reduced_generators() const { return reduced_; }
  const std::vector<Mask>& states() const { return states_; }
  Mask state(std::size_t k) const { return states_[k]; }

  const std::optional<SectorLabel>& label() const { return label_; }
  const std::string& description() const { return description_; }

  /// Position of `bits` in the ordered basis, or nullopt when outside.
  std::optional<std::size_t> index_of(Mask bits) const {
    const std::size_t k = extract(bits);
    if (k < states_.size() && states_[k] == bits) return k;
    return std::nullopt;
  }
  /// Bit extraction onto the pivot positions; linear under XOR.
  std::size_t extract(Mask bits) const;
  /// True when x lies in the linear part span(G).
  bool in_linear_span(Mask x) const;

  void set_label(SectorLabel label) { label_ = std::move(label); }

  /// Z-type operators whose eigenvalues are fixed on this basis.
  const std::vector<PauliString>& conserved() const { return conserved_; }
  void set_conserved(std::vector<PauliString> ops) { conserved_ = std::move(ops); }

 private:
  SectorBasis() = default;

  int width_ = 0;
  Mask offset_ = 0;
  Mask pivots_ = 0;
  std::vector<Mask> reduced_;
  std::vector<Mask> states_;
  std::optional<SectorLabel> label_;
  std::vector<PauliString> conserved_;
  std::string description_;
};

using SectorBasisPtr = std::shared_ptr<const SectorBasis>;

/// Block with the given star charges and winding parities.
SectorBasis enumerate_sector(const TorusLattice& lat, const SectorLabel& label);

/// Union of the four neutral winding blocks (all closed string nets).
SectorBasis closed_string_basis(const TorusLattice& lat);

/// Z-type strings whose eigenvalues label the sectors: stars, then w1, w2.
std::vector<PauliString> sector_symmetries(const TorusLattice& lat);

}  // namespace tcprep
