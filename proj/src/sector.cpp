#include "tcprep/sector.hpp"

#include <algorithm>
#include <bit>

#if defined(__BMI2__)
#include <immintrin.h>
#endif

namespace tcprep {

namespace {

int top_bit(Mask m) { return 63 - std::countl_zero(m); }

Mask reduce(Mask v, const std::vector<Mask>& rref) {
  for (Mask r : rref) {
    if (v & (Mask{1} << top_bit(r))) v ^= r;
  }
  return v;
}

// Syndrome bits: star s -> bit s, w2 parity -> bit L^2, w1 parity -> bit L^2 + 1.
Mask syndrome(const TorusLattice& lat, Mask bits) {
  Mask syn = 0;
  for (int s = 0; s < lat.num_sites(); ++s) {
    if (parity(lat.star_mask(s) & bits)) syn |= Mask{1} << s;
  }
  const int base = lat.num_sites();
  if (parity(lat.w2_mask() & bits)) syn |= Mask{1} << base;
  if (parity(lat.w1_mask() & bits)) syn |= Mask{1} << (base + 1);
  return syn;
}

Mask label_syndrome(const TorusLattice& lat, const SectorLabel& label) {
  Mask syn = 0;
  for (int s = 0; s < lat.num_sites(); ++s) {
    if (label.star_charges[s] < 0) syn |= Mask{1} << s;
  }
  const int base = lat.num_sites();
  if (label.i) syn |= Mask{1} << base;
  if (label.j) syn |= Mask{1} << (base + 1);
  return syn;
}

// Some link configuration with the requested syndrome, by elimination over
// single-link syndromes.
Mask solve_offset(const TorusLattice& lat, Mask target) {
  struct Row {
    Mask syn;
    Mask links;
  };
  std::vector<Row> rows;
  for (int j = 0; j < lat.num_links(); ++j) {
    Row r{syndrome(lat, Mask{1} << j), Mask{1} << j};
    for (const Row& e : rows) {
      if (r.syn & (Mask{1} << top_bit(e.syn))) {
        r.syn ^= e.syn;
        r.links ^= e.links;
      }
    }
    if (r.syn) rows.push_back(r);
  }
  Mask links = 0;
  for (const Row& e : rows) {
    if (target & (Mask{1} << top_bit(e.syn))) {
      target ^= e.syn;
      links ^= e.links;
    }
  }
  if (target != 0) throw InconsistentLabel("sector label is not reachable");
  return links;
}

}  // namespace

SectorLabel SectorLabel::neutral(const TorusLattice& lat, int i, int j) {
  if ((i != 0 && i != 1) || (j != 0 && j != 1)) {
    throw InconsistentLabel("winding parities must be 0 or 1");
  }
  return SectorLabel{std::vector<int>(lat.num_sites(), 1), i, j};
}

bool SectorLabel::all_neutral() const {
  for (int c : star_charges) {
    if (c != 1) return false;
  }
  return true;
}

SectorLabel classify(const TorusLattice& lat, BasisState b) {
  SectorLabel label;
  label.star_charges.resize(lat.num_sites());
  for (int s = 0; s < lat.num_sites(); ++s) {
    label.star_charges[s] = parity(lat.star_mask(s) & b.bits) ? -1 : 1;
  }
  label.i = parity(lat.w2_mask() & b.bits);
  label.j = parity(lat.w1_mask() & b.bits);
  return label;
}

SectorBasis SectorBasis::span(int width, Mask offset, const std::vector<Mask>& generators,
                              std::string description) {
  if (width < 1 || width > 64) throw std::invalid_argument("basis width must be in [1, 64]");
  SectorBasis b;
  b.width_ = width;
  b.description_ = std::move(description);

  for (Mask g : generators) {
    g = reduce(g, b.reduced_);
    if (!g) continue;
    const Mask pivot = Mask{1} << top_bit(g);
    for (Mask& r : b.reduced_) {
      if (r & pivot) r ^= g;
    }
    b.reduced_.push_back(g);
  }
  std::sort(b.reduced_.begin(), b.reduced_.end(),
            [](Mask a, Mask c) { return top_bit(a) < top_bit(c); });
  for (Mask r : b.reduced_) b.pivots_ |= Mask{1} << top_bit(r);
  b.offset_ = reduce(offset, b.reduced_);

  const int rank = b.rank();
  if (rank > 40) throw std::length_error("basis rank too large to enumerate");
  const std::size_t dim = std::size_t{1} << rank;
  b.states_.resize(dim);
  b.states_[0] = b.offset_;
  for (std::size_t c = 1; c < dim; ++c) {
    b.states_[c] = b.states_[c & (c - 1)] ^ b.reduced_[std::countr_zero(c)];
  }
  return b;
}

SectorBasis SectorBasis::full(int width) {
  std::vector<Mask> gens;
  for (int j = 0; j < width; ++j) gens.push_back(Mask{1} << j);
  return span(width, 0, gens, "full");
}

SectorBasis SectorBasis::even_parity(int width) {
  std::vector<Mask> gens;
  for (int j = 0; j + 1 < width; ++j) gens.push_back((Mask{1} << j) | (Mask{1} << (j + 1)));
  return span(width, 0, gens, "even-parity");
}

std::size_t SectorBasis::extract(Mask bits) const {
#if defined(__BMI2__)
  return static_cast<std::size_t>(_pext_u64(bits, pivots_));
#else
  std::size_t out = 0;
  int k = 0;
  for (Mask m = pivots_; m; m &= m - 1, ++k) {
    if (bits & (m & -m)) out |= std::size_t{1} << k;
  }
  return out;
#endif
}

bool SectorBasis::in_linear_span(Mask x) const { return reduce(x, reduced_) == 0; }

SectorBasis enumerate_sector(const TorusLattice& lat, const SectorLabel& label) {
  if (static_cast<int>(label.star_charges.size()) != lat.num_sites()) {
    throw InconsistentLabel("label has " + std::to_string(label.star_charges.size()) +
                            " star charges for " + std::to_string(lat.num_sites()) + " stars");
  }
  int product = 1;
  for (int c : label.star_charges) {
    if (c != 1 && c != -1) throw InconsistentLabel("star charges must be +1 or -1");
    product *= c;
  }
  if (product != 1) throw InconsistentLabel("product of star charges must be +1");
  if ((label.i != 0 && label.i != 1) || (label.j != 0 && label.j != 1)) {
    throw InconsistentLabel("winding parities must be 0 or 1");
  }

  Mask offset = 0;
  if (label.all_neutral()) {
    if (label.i) offset ^= lat.t1_mask();
    if (label.j) offset ^= lat.t2_mask();
  } else {
    offset = solve_offset(lat, label_syndrome(lat, label));
  }
  std::vector<Mask> gens;
  for (int p = 0; p < lat.num_plaquettes(); ++p) gens.push_back(lat.plaquette_mask(p));
  SectorBasis b = SectorBasis::span(lat.num_links(), offset, gens,
                                    "sector " + label.winding_name() +
                                        (label.all_neutral() ? "" : " (charged)"));
  b.set_label(label);
  b.set_conserved(sector_symmetries(lat));
  return b;
}

SectorBasis closed_string_basis(const TorusLattice& lat) {
  std::vector<Mask> gens;
  for (int p = 0; p < lat.num_plaquettes(); ++p) gens.push_back(lat.plaquette_mask(p));
  gens.push_back(lat.t1_mask());
  gens.push_back(lat.t2_mask());
  SectorBasis b = SectorBasis::span(lat.num_links(), 0, gens, "closed-strings");
  auto syms = sector_symmetries(lat);
  syms.resize(lat.num_sites());
  b.set_conserved(std::move(syms));
  return b;
}

std::vector<PauliString> sector_symmetries(const TorusLattice& lat) {
  std::vector<PauliString> out;
  const int n = lat.num_links();
  for (int s = 0; s < lat.num_sites(); ++s) out.push_back(PauliString::z_string(n, lat.star_mask(s)));
  out.push_back(PauliString::z_string(n, lat.w1_mask()));
  out.push_back(PauliString::z_string(n, lat.w2_mask()));
  return out;
}

}  // namespace tcprep
