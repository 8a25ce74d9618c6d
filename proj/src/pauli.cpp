#include "tcprep/pauli.hpp"

namespace tcprep {

namespace {

Mask width_mask(int width) { return width == 64 ? ~Mask{0} : (Mask{1} << width) - 1; }

void check_widths(const PauliString& p, const PauliString& q) {
  if (p.width() != q.width()) {
    throw WidthMismatch("pauli strings of width " + std::to_string(p.width()) + " and " +
                        std::to_string(q.width()));
  }
}

}  // namespace

double phase_real(Phase p) {
  switch (p) {
    case Phase::plus_one:
      return 1.0;
    case Phase::minus_one:
      return -1.0;
    default:
      throw std::domain_error("phase is not real");
  }
}

std::complex<double> phase_value(Phase p) {
  switch (p) {
    case Phase::plus_one:
      return {1.0, 0.0};
    case Phase::plus_i:
      return {0.0, 1.0};
    case Phase::minus_one:
      return {-1.0, 0.0};
    case Phase::minus_i:
      return {0.0, -1.0};
  }
  return {};
}

PauliString::PauliString(int width, Mask x_mask, Mask z_mask, Phase phase)
    : width_(width), x_(x_mask), z_(z_mask), phase_(phase) {
  if (width < 0 || width > 64) {
    throw std::invalid_argument("pauli width must be in [0, 64], got " + std::to_string(width));
  }
  const Mask allowed = width_mask(width);
  if ((x_mask & ~allowed) || (z_mask & ~allowed)) {
    throw std::invalid_argument("pauli mask exceeds width " + std::to_string(width));
  }
}

PauliString PauliString::from_letters(const std::string& letters) {
  Mask x = 0, z = 0;
  int ys = 0;
  for (std::size_t j = 0; j < letters.size(); ++j) {
    const Mask bit = Mask{1} << j;
    switch (letters[j]) {
      case 'I':
      case '_':
        break;
      case 'X':
        x |= bit;
        break;
      case 'Z':
        z |= bit;
        break;
      case 'Y':
        // Y = i X Z
        x |= bit;
        z |= bit;
        ++ys;
        break;
      default:
        throw std::invalid_argument(std::string("bad pauli letter '") + letters[j] + "'");
    }
  }
  return PauliString(static_cast<int>(letters.size()), x, z, phase_from_exponent(ys));
}

bool PauliString::is_hermitian() const {
  // (i^k X^x Z^z)^dagger = i^{-k} (-1)^{|x & z|} X^x Z^z
  const int k = static_cast<int>(phase_);
  return ((k + popcount(x_ & z_)) & 1) == 0;
}

std::string PauliString::to_letters() const {
  std::string s(width_, 'I');
  for (int j = 0; j < width_; ++j) {
    const bool bx = (x_ >> j) & 1, bz = (z_ >> j) & 1;
    s[j] = bx ? (bz ? 'Y' : 'X') : (bz ? 'Z' : 'I');
  }
  return s;
}

bool commutes(const PauliString& p, const PauliString& q) {
  check_widths(p, q);
  return parity((p.x_mask() & q.z_mask()) ^ (p.z_mask() & q.x_mask())) == 0;
}

PauliString multiply(const PauliString& p, const PauliString& q) {
  check_widths(p, q);
  // Z^{zp} X^{xq} = (-1)^{|zp & xq|} X^{xq} Z^{zp}
  Phase ph = phase_mul(p.phase(), q.phase());
  if (parity(p.z_mask() & q.x_mask())) ph = phase_mul(ph, Phase::minus_one);
  return PauliString(p.width(), p.x_mask() ^ q.x_mask(), p.z_mask() ^ q.z_mask(), ph);
}

}  // namespace tcprep
