#include "tcprep/symmetry.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <tuple>

namespace tcprep {

namespace {

std::vector<int> link_permutation(const TorusLattice& lat, int dx, int dy) {
  std::vector<int> perm(lat.num_links());
  for (int y = 0; y < lat.size(); ++y) {
    for (int x = 0; x < lat.size(); ++x) {
      for (Direction d : {Direction::horizontal, Direction::vertical}) {
        perm[lat.link_index(x, y, d)] = lat.link_index(x + dx, y + dy, d);
      }
    }
  }
  return perm;
}

Mask permute(Mask bits, const std::vector<int>& perm) {
  Mask out = 0;
  for (; bits; bits &= bits - 1) out |= Mask{1} << perm[std::countr_zero(bits)];
  return out;
}

using TermKey = std::tuple<Mask, Mask, int>;

std::map<TermKey, double> term_table(const HamiltonianSpec& h, const std::vector<int>* perm) {
  std::map<TermKey, double> out;
  for (const auto& t : h.terms()) {
    Mask x = t.op.x_mask(), z = t.op.z_mask();
    if (perm) {
      x = permute(x, *perm);
      z = permute(z, *perm);
    }
    out[{x, z, static_cast<int>(t.op.phase())}] += t.coefficient;
  }
  return out;
}

}  // namespace

TranslationBasis::TranslationBasis(const TorusLattice& lat) : L_(lat.size()), width_(lat.num_links()) {
  if (L_ > 3) {
    throw std::invalid_argument("translation basis is limited to L <= 3, got L = " +
                                std::to_string(L_));
  }
  for (int dy = 0; dy < L_; ++dy)
    for (int dx = 0; dx < L_; ++dx) perms_.push_back(link_permutation(lat, dx, dy));

  const std::size_t total = std::size_t{1} << width_;
  constexpr auto unset = std::numeric_limits<std::uint32_t>::max();
  index_.assign(total, unset);
  std::vector<Mask> orbit;
  for (Mask m = 0; m < total; ++m) {
    if (index_[m] != unset) continue;
    // Masks are visited in ascending order, so m is the smallest of its orbit.
    const auto r = static_cast<std::uint32_t>(reps_.size());
    orbit.clear();
    for (const auto& perm : perms_) {
      const Mask g = permute(m, perm);
      if (index_[g] == unset) {
        index_[g] = r;
        orbit.push_back(g);
      }
    }
    reps_.push_back(m);
    orbit_.push_back(static_cast<int>(orbit.size()));
  }
}

Mask TranslationBasis::translate(Mask bits, int dx, int dy) const {
  dx = ((dx % L_) + L_) % L_;
  dy = ((dy % L_) + L_) % L_;
  return permute(bits, perms_[dx + L_ * dy]);
}

Eigen::VectorXcd TranslationBasis::expand(const Eigen::VectorXcd& a) const {
  if (static_cast<std::size_t>(a.size()) != dim()) {
    throw std::invalid_argument("expand: vector does not match the translation basis");
  }
  Eigen::VectorXcd v(static_cast<Eigen::Index>(index_.size()));
  for (std::size_t m = 0; m < index_.size(); ++m) {
    const std::size_t r = index_[m];
    v[static_cast<Eigen::Index>(m)] = a[static_cast<Eigen::Index>(r)] / std::sqrt(double(orbit_[r]));
  }
  return v;
}

Eigen::VectorXcd TranslationBasis::compress(const Eigen::VectorXcd& v, double tol) const {
  if (static_cast<std::size_t>(v.size()) != index_.size()) {
    throw std::invalid_argument("compress: vector does not match the full space");
  }
  Eigen::VectorXcd a(static_cast<Eigen::Index>(dim()));
  for (std::size_t r = 0; r < dim(); ++r) {
    a[static_cast<Eigen::Index>(r)] =
        v[static_cast<Eigen::Index>(reps_[r])] * std::sqrt(double(orbit_[r]));
  }
  const double miss = (expand(a) - v).norm();
  if (miss > tol * std::max(1.0, v.norm())) {
    throw NotTranslationInvariant("state is not translation invariant (residual " +
                                  std::to_string(miss) + ")");
  }
  return a;
}

void check_translation_invariant(const HamiltonianSpec& h, const TorusLattice& lat) {
  if (h.width() != lat.num_links()) {
    throw std::invalid_argument("hamiltonian width does not match the lattice");
  }
  const auto base = term_table(h, nullptr);
  for (auto [dx, dy] : {std::pair{1, 0}, std::pair{0, 1}}) {
    const auto perm = link_permutation(lat, dx, dy);
    const auto moved = term_table(h, &perm);
    bool same = moved.size() == base.size();
    for (auto it = moved.begin(); same && it != moved.end(); ++it) {
      const auto found = base.find(it->first);
      same = found != base.end() &&
             std::abs(found->second - it->second) <= 1e-12 * std::max(1.0, std::abs(it->second));
    }
    if (!same) {
      throw NotTranslationInvariant("hamiltonian changes under the translation by (" +
                                    std::to_string(dx) + ", " + std::to_string(dy) + ")");
    }
  }
}

SymmetricOperator::SymmetricOperator(const HamiltonianSpec& h, const TorusLattice& lat,
                                     TranslationBasisPtr basis)
    : basis_(std::move(basis)) {
  if (basis_->width() != lat.num_links()) {
    throw std::invalid_argument("translation basis does not match the lattice");
  }
  check_translation_invariant(h, lat);
  const auto n = static_cast<Eigen::Index>(basis_->dim());
  diag_ = Eigen::VectorXd::Constant(n, h.constant());

  std::vector<Eigen::Triplet<double>> entries;
  for (const auto& t : h.terms()) {
    const double c = t.coefficient * phase_real(t.op.phase());
    const Mask x = t.op.x_mask(), z = t.op.z_mask();
    for (Eigen::Index r = 0; r < n; ++r) {
      const Mask rep = basis_->representative(static_cast<std::size_t>(r));
      const double v = c * parity_sign(z & rep);
      if (x == 0) {
        diag_[r] += v;
        continue;
      }
      const std::size_t target = basis_->index_of(rep ^ x);
      const double ratio = double(basis_->orbit_size(static_cast<std::size_t>(r))) /
                           basis_->orbit_size(target);
      entries.emplace_back(static_cast<Eigen::Index>(target), r, v * std::sqrt(ratio));
    }
  }
  if (!entries.empty()) {
    auto m = std::make_shared<Sparse>(n, n);
    m->setFromTriplets(entries.begin(), entries.end());
    m->makeCompressed();
    off_.emplace_back(1.0, std::move(m));
  }
}

Eigen::VectorXcd SymmetricOperator::operator*(const Eigen::VectorXcd& x) const {
  const auto n = static_cast<Eigen::Index>(dim());
  if (x.size() != n) throw std::invalid_argument("vector does not match the translation basis");
  Eigen::VectorXcd y(n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    cplx acc = diag_[i] * x[i];
    for (const auto& [w, m] : off_) {
      const int* outer = m->outerIndexPtr();
      const int* inner = m->innerIndexPtr();
      const double* val = m->valuePtr();
      cplx part = 0.0;
      for (int k = outer[i]; k < outer[i + 1]; ++k) part += val[k] * x[inner[k]];
      acc += w * part;
    }
    y[i] = acc;
  }
  return y;
}

SymmetricOperator SymmetricOperator::combine(
    const std::vector<std::pair<double, const SymmetricOperator*>>& parts) {
  if (parts.empty()) throw std::invalid_argument("combine: no operators");
  SymmetricOperator out;
  out.basis_ = parts.front().second->basis_;
  out.diag_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out.basis_->dim()));
  for (const auto& [w, op] : parts) {
    if (op->basis_ != out.basis_) throw std::invalid_argument("combine: operators on different bases");
    if (w == 0.0) continue;
    out.diag_ += w * op->diag_;
    for (const auto& [wm, m] : op->off_) {
      bool merged = false;
      for (auto& [wo, mo] : out.off_) {
        if (mo == m) {
          wo += w * wm;
          merged = true;
        }
      }
      if (!merged) out.off_.emplace_back(w * wm, m);
    }
  }
  return out;
}

double SymmetricOperator::norm_bound() const {
  double off = 0.0;
  for (const auto& [w, m] : off_) {
    double row_max = 0.0;
    for (Eigen::Index i = 0; i < m->outerSize(); ++i) {
      double row = 0.0;
      for (Sparse::InnerIterator it(*m, i); it; ++it) row += std::abs(it.value());
      row_max = std::max(row_max, row);
    }
    off += std::abs(w) * row_max;
  }
  return diag_.cwiseAbs().maxCoeff() + off;
}

}  // namespace tcprep
