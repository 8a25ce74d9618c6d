#pragma once

#include <bit>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include "tcprep/lattice.hpp"

namespace tcprep {

inline int popcount(Mask m) { return std::popcount(m); }
inline int parity(Mask m) { return std::popcount(m) & 1; }
inline double parity_sign(Mask m) { return parity(m) ? -1.0 : 1.0; }

/// Overall phase i^k of a Pauli string, k in {0, 1, 2, 3}.
enum class Phase : std::uint8_t { plus_one = 0, plus_i = 1, minus_one = 2, minus_i = 3 };

inline Phase phase_mul(Phase a, Phase b) {
  return static_cast<Phase>((static_cast<int>(a) + static_cast<int>(b)) & 3);
}
inline Phase phase_from_exponent(int k) { return static_cast<Phase>(((k % 4) + 4) % 4); }
inline bool phase_is_real(Phase p) { return (static_cast<int>(p) & 1) == 0; }
/// +1 or -1 for a real phase; throws otherwise.
double phase_real(Phase p);
std::complex<double> phase_value(Phase p);

/// Spin configuration relative to the all-up vacuum: bit j set means link j is flipped.
struct BasisState {
  Mask bits = 0;
  friend bool operator==(const BasisState&, const BasisState&) = default;
};

class WidthMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// phase * X^{x_mask} Z^{z_mask} on `width` qubits; Z acts first.
class PauliString {
 public:
  PauliString() = default;
  /// Checked constructor: masks must fit in `width` bits, width <= 64.
  PauliString(int width, Mask x_mask, Mask z_mask, Phase phase = Phase::plus_one);

  static PauliString identity(int width) { return PauliString(width, 0, 0); }
  static PauliString x_string(int width, Mask links) { return PauliString(width, links, 0); }
  static PauliString z_string(int width, Mask links) { return PauliString(width, 0, links); }
  /// Hermitian single-site letters: "XIZY..." with position j = qubit j.
  static PauliString from_letters(const std::string& letters);

  int width() const { return width_; }
  Mask x_mask() const { return x_; }
  Mask z_mask() const { return z_; }
  Phase phase() const { return phase_; }

  bool is_identity() const { return x_ == 0 && z_ == 0; }
  bool is_diagonal() const { return x_ == 0; }
  /// True when the operator equals its adjoint.
  bool is_hermitian() const;

  std::string to_letters() const;

  friend bool operator==(const PauliString&, const PauliString&) = default;

 private:
  int width_ = 0;
  Mask x_ = 0;
  Mask z_ = 0;
  Phase phase_ = Phase::plus_one;
};

struct Applied {
  BasisState state;
  Phase phase;
};

inline Applied apply(const PauliString& p, BasisState b) {
  const int flips = parity(p.z_mask() & b.bits) ? 2 : 0;
  return {BasisState{b.bits ^ p.x_mask()}, phase_mul(p.phase(), static_cast<Phase>(flips))};
}

bool commutes(const PauliString& p, const PauliString& q);

/// Operator product p * q (q acts first).
PauliString multiply(const PauliString& p, const PauliString& q);

/// Number of links carrying sigma^x.
inline int string_weight(const PauliString& p) { return popcount(p.x_mask()); }

}  // namespace tcprep
