#include "tcprep/lattice.hpp"

#include <string>

namespace tcprep {

TorusLattice::TorusLattice(int L) : L_(L) {
  if (L < 2) {
    throw InvalidSize("torus linear size must be >= 2, got " + std::to_string(L));
  }
  if (L > kMaxLinearSize) {
    throw InvalidSize("torus linear size must be <= " + std::to_string(kMaxLinearSize) +
                      " (one 64-bit mask per state), got " + std::to_string(L));
  }

  const auto h = Direction::horizontal;
  const auto v = Direction::vertical;
  plaquettes_.reserve(L * L);
  stars_.reserve(L * L);
  for (int y = 0; y < L; ++y) {
    for (int x = 0; x < L; ++x) {
      plaquettes_.push_back({link_index(x, y, h), link_index(x, y, v),
                             link_index(x + 1, y, v), link_index(x, y + 1, h)});
      stars_.push_back({link_index(x, y, h), link_index(x, y, v),
                        link_index(x - 1, y, h), link_index(x, y - 1, v)});
    }
  }

  for (int k = 0; k < L; ++k) {
    t1_.push_back(link_index(k, 0, h));
    t2_.push_back(link_index(0, k, v));
    w1_.push_back(link_index(k, 0, v));
    w2_.push_back(link_index(0, k, h));
  }
  t1_mask_ = links_to_mask(t1_);
  t2_mask_ = links_to_mask(t2_);
  w1_mask_ = links_to_mask(w1_);
  w2_mask_ = links_to_mask(w2_);
}

int TorusLattice::link_index(int x, int y, Direction d) const {
  return 2 * (wrap(x) + L_ * wrap(y)) + static_cast<int>(d);
}

const std::array<int, 4>& TorusLattice::plaquette_links(int p) const {
  if (p < 0 || p >= num_plaquettes()) {
    throw std::out_of_range("plaquette id " + std::to_string(p) + " out of range");
  }
  return plaquettes_[p];
}

const std::array<int, 4>& TorusLattice::star_links(int s) const {
  if (s < 0 || s >= num_sites()) {
    throw std::out_of_range("site id " + std::to_string(s) + " out of range");
  }
  return stars_[s];
}

Mask TorusLattice::plaquette_mask(int p) const { return links_to_mask(plaquette_links(p)); }

Mask TorusLattice::star_mask(int s) const { return links_to_mask(star_links(s)); }

Mask TorusLattice::all_links_mask() const {
  const int n = num_links();
  return n == 64 ? ~Mask{0} : (Mask{1} << n) - 1;
}

TorusLattice build_torus(int L) { return TorusLattice(L); }

Loops loops(const TorusLattice& lat) { return {lat.t1(), lat.t2(), lat.w1(), lat.w2()}; }

Mask links_to_mask(const std::vector<int>& links) {
  Mask m = 0;
  for (int j : links) m ^= Mask{1} << j;
  return m;
}

Mask links_to_mask(const std::array<int, 4>& links) {
  Mask m = 0;
  for (int j : links) m ^= Mask{1} << j;
  return m;
}

}  // namespace tcprep
