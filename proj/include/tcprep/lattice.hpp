#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace tcprep {

using Mask = std::uint64_t;

// Largest supported linear size: 2 * 5 * 5 = 50 links fit in one 64-bit mask.
inline constexpr int kMaxLinearSize = 5;

enum class Direction : int { horizontal = 0, vertical = 1 };

struct Site {
  int x = 0;
  int y = 0;
};

class InvalidSize : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// L x L square lattice wrapped on a torus, one spin per link.
///
/// Site (x, y) owns the horizontal link towards (x+1, y) and the vertical
/// link towards (x, y+1). Plaquette (x, y) is the square whose lower-left
/// corner is site (x, y). Link ids follow 2 * (x + L * y) + d.
class TorusLattice {
 public:
  explicit TorusLattice(int L);

  int size() const { return L_; }
  int num_links() const { return 2 * L_ * L_; }
  int num_sites() const { return L_ * L_; }
  int num_plaquettes() const { return L_ * L_; }

  int link_index(int x, int y, Direction d) const;
  int site_index(int x, int y) const { return wrap(x) + L_ * wrap(y); }
  Site site_of(int id) const { return {id % L_, id / L_}; }

  const std::array<int, 4>& plaquette_links(int p) const;
  const std::array<int, 4>& star_links(int s) const;
  const std::array<int, 4>& plaquette_links(int x, int y) const {
    return plaquette_links(site_index(x, y));
  }
  const std::array<int, 4>& star_links(int x, int y) const {
    return star_links(site_index(x, y));
  }

  Mask plaquette_mask(int p) const;
  Mask star_mask(int s) const;

  // Incontractible loops. t1/t2 carry sigma^x, w1/w2 carry sigma^z.
  const std::vector<int>& t1() const { return t1_; }
  const std::vector<int>& t2() const { return t2_; }
  const std::vector<int>& w1() const { return w1_; }
  const std::vector<int>& w2() const { return w2_; }
  Mask t1_mask() const { return t1_mask_; }
  Mask t2_mask() const { return t2_mask_; }
  Mask w1_mask() const { return w1_mask_; }
  Mask w2_mask() const { return w2_mask_; }

  Mask all_links_mask() const;

  int wrap(int v) const { return ((v % L_) + L_) % L_; }

 private:
  int L_;
  std::vector<std::array<int, 4>> plaquettes_;
  std::vector<std::array<int, 4>> stars_;
  std::vector<int> t1_, t2_, w1_, w2_;
  Mask t1_mask_ = 0, t2_mask_ = 0, w1_mask_ = 0, w2_mask_ = 0;
};

TorusLattice build_torus(int L);

struct Loops {
  std::vector<int> t1, t2, w1, w2;
};

Loops loops(const TorusLattice& lat);

Mask links_to_mask(const std::vector<int>& links);
Mask links_to_mask(const std::array<int, 4>& links);

}  // namespace tcprep
