#include <random>

#include <gtest/gtest.h>

#include "dense_oracle.hpp"
#include "tcprep/spectral.hpp"

using namespace tcprep;

namespace {

oracle::Mat dense_block(const HamiltonianSpec& h, const SectorBasis& b) {
  return oracle::from_terms_restricted(h, b.states(), phase_value);
}

SectorBasisPtr full_basis(int n) { return std::make_shared<const SectorBasis>(SectorBasis::full(n)); }

const ModelParams kParams{20.0, 1.0, 1.0};
const Schedule kLinear{ScheduleKind::linear};

}  // namespace

TEST(LowSpectrum, MatchesDenseEigenvalues) {
  const TorusLattice lat(2);
  for (double tau : {0.0, 0.35, 0.7, 1.0}) {
    const HamiltonianSpec h = interpolated_hamiltonian(lat, kParams, kLinear, tau);
    const auto basis = full_basis(8);
    const SpectralResult r = low_spectrum(BlockOperator(h, basis), 6);
    const Eigen::VectorXd ref = oracle::eigenvalues(oracle::from_terms(h, phase_value));
    ASSERT_EQ(r.eigenvalues.size(), 6u);
    for (int k = 0; k < 6; ++k) {
      EXPECT_NEAR(r.eigenvalues[k], ref[k], 1e-9) << "tau=" << tau << " k=" << k;
      EXPECT_LE(r.residuals[k], 1e-10);
      if (k > 0) EXPECT_LE(r.eigenvalues[k - 1], r.eigenvalues[k]);
    }
  }
}

TEST(LowSpectrum, SectorBlockAtL3MatchesDense) {
  const TorusLattice lat(3);
  const auto basis = make_sector00(lat);
  const HamiltonianSpec h = interpolated_hamiltonian(lat, kParams, kLinear, 0.72);
  const SpectralResult r = low_spectrum(BlockOperator(h, basis), 4);
  const Eigen::VectorXd ref = oracle::eigenvalues(dense_block(h, *basis));
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR(r.eigenvalues[k], ref[k], 1e-9);
    EXPECT_LE(r.residuals[k], 1e-10);
  }
}

// Residuals near the floor used to stall once the new Krylov directions
// became shorter than the breakdown threshold.
TEST(LowSpectrum, ConvergesNearCriticalPointAtL4) {
  const TorusLattice lat(4);
  const auto basis = make_sector00(lat);
  const HamiltonianSpec h = interpolated_hamiltonian(lat, ModelParams{}, kLinear, 0.475);
  const SpectralResult r = low_spectrum(BlockOperator(h, basis), 2);
  EXPECT_LE(r.residuals[0], 1e-10);
  EXPECT_LE(r.residuals[1], 1e-10);
  EXPECT_GT(r.gap(), 1.0);
}

TEST(LowSpectrum, EndpointGaps) {
  const TorusLattice lat(2);
  const auto basis = make_sector00(lat);
  const ModelParams p{20.0, 1.5, 0.8};
  const SpectralResult r1 =
      low_spectrum(BlockOperator(interpolated_hamiltonian(lat, p, kLinear, 1.0), basis), 2);
  EXPECT_NEAR(r1.eigenvalues[0], -p.U * 4 - p.g * 4, 1e-9);
  EXPECT_NEAR(r1.gap(), 4 * p.g, 1e-9);
  const SpectralResult r0 =
      low_spectrum(BlockOperator(interpolated_hamiltonian(lat, p, kLinear, 0.0), basis), 2);
  EXPECT_NEAR(r0.eigenvalues[0], -p.U * 4, 1e-9);
  EXPECT_NEAR(r0.gap(), 8 * p.xi, 1e-9);
}

TEST(LowSpectrum, FullSpaceFourfoldGround) {
  const TorusLattice lat(2);
  const SpectralResult r = low_spectrum(
      BlockOperator(interpolated_hamiltonian(lat, kParams, kLinear, 1.0), full_basis(8)), 5);
  for (int k = 1; k < 4; ++k) EXPECT_NEAR(r.eigenvalues[k], r.eigenvalues[0], 1e-10);
  EXPECT_GT(r.eigenvalues[4] - r.eigenvalues[0], 1.0);
}

TEST(LowSpectrum, WholeBlockAndLimits) {
  const TorusLattice lat(2);
  const BlockOperator op(interpolated_hamiltonian(lat, kParams, kLinear, 0.5), make_sector00(lat));
  const SpectralResult all = low_spectrum(op, 8);
  EXPECT_EQ(all.eigenvalues.size(), 8u);
  EXPECT_THROW(low_spectrum(op, 9), std::invalid_argument);
  EXPECT_THROW(low_spectrum(op, 0), std::invalid_argument);
}

TEST(LowSpectrum, Deterministic) {
  const TorusLattice lat(3);
  const BlockOperator op(interpolated_hamiltonian(lat, kParams, kLinear, 0.7), make_sector00(lat));
  const SpectralResult a = low_spectrum(op, 3), b = low_spectrum(op, 3);
  EXPECT_EQ(a.eigenvalues, b.eigenvalues);
  EXPECT_EQ(a.eigenvectors[0], b.eigenvectors[0]);
}

TEST(LowSpectrum, ReportsFailure) {
  const TorusLattice lat(3);
  const BlockOperator op(interpolated_hamiltonian(lat, kParams, kLinear, 0.7), make_sector00(lat));
  EigenSolverOptions opts;
  opts.max_basis = 8;
  opts.block_size = 1;
  opts.max_restarts = 1;
  opts.tol = 1e-14;
  EXPECT_THROW(low_spectrum(op, 4, opts), SolverFailure);
}

TEST(GroundState, UniformClosedStringState) {
  const TorusLattice lat(2);
  const Eigen::VectorXd phi = ground_state_phi0(lat);
  ASSERT_EQ(phi.size(), 8);
  for (double a : phi) EXPECT_NEAR(a, 1.0 / std::sqrt(8.0), 1e-15);
  const BlockOperator h1(interpolated_hamiltonian(lat, kParams, kLinear, 1.0), make_sector00(lat));
  EXPECT_NEAR(phi.dot(h1 * phi), -kParams.U * 4 - kParams.g * 4, 1e-12);
}

TEST(GroundState, EigensolverOverlap) {
  for (int L : {2, 3}) {
    const TorusLattice lat(L);
    const auto basis = make_sector00(lat);
    const BlockOperator h1(interpolated_hamiltonian(lat, kParams, kLinear, 1.0), basis);
    const SpectralResult r = low_spectrum(h1, 1);
    EXPECT_GE(std::abs(r.eigenvectors[0].dot(ground_state_phi0(lat, *basis))), 1.0 - 1e-10);
  }
}

TEST(InterpolatedBlock, MatchesDirectProjection) {
  const TorusLattice lat(2);
  const Schedule trig(ScheduleKind::trig_smooth);
  const InterpolatedBlock block(lat, kParams, trig, make_sector00(lat));
  Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(8, -1.0, 1.0);
  for (double tau : {0.0, 0.3, 1.0}) {
    const BlockOperator ref(interpolated_hamiltonian(lat, kParams, trig, tau), block.basis());
    EXPECT_LT((block.at(tau) * v - ref * v).norm(), 1e-12);
  }
  const double tau = 0.4, h = 1e-6;
  const Eigen::VectorXd fd = (block.at(tau + h) * v - block.at(tau - h) * v) / (2 * h);
  EXPECT_LT((block.derivative(tau) * v - fd).norm(), 1e-6);
}

TEST(GapScan, Basics) {
  const TorusLattice l2(2), l3(3);
  const GapScan s2 = gap_scan(l2, kParams, kLinear, uniform_grid(41));
  EXPECT_GT(s2.gap_min, 0.0);
  EXPECT_NEAR(s2.gaps.front(), 8 * kParams.xi, 1e-9);
  EXPECT_NEAR(s2.gaps.back(), 4 * kParams.g, 1e-9);
  EXPECT_LE(s2.gap_min, *std::min_element(s2.gaps.begin(), s2.gaps.end()) + 1e-12);
  EXPECT_NEAR(s2.ratio_star, coupling_ratio(kParams, kLinear, s2.tau_star), 1e-15);
  EXPECT_TRUE(s2.first_excited_nondegenerate);
  const GapScan s3 = gap_scan(l3, kParams, kLinear, uniform_grid(21));
  EXPECT_LT(s3.gap_min, s2.gap_min);
}

TEST(GapScan, Validation) {
  const TorusLattice lat(2);
  EXPECT_THROW(gap_scan(lat, kParams, kLinear, {0.5}), std::invalid_argument);
  EXPECT_THROW(gap_scan(lat, kParams, kLinear, {0.0, 1.5}), std::domain_error);
  EXPECT_THROW(uniform_grid(1), std::invalid_argument);
  EXPECT_TRUE(std::isinf(coupling_ratio(kParams, kLinear, 0.0)));
  EXPECT_DOUBLE_EQ(coupling_ratio(kParams, kLinear, 1.0), 0.0);
}

TEST(Hdot, CrossSectorElementVanishes) {
  const TorusLattice lat(2);
  const auto s00 = make_sector00(lat);
  const auto s10 = std::make_shared<const SectorBasis>(enumerate_sector(lat, SectorLabel::neutral(lat, 1, 0)));
  const double tau = 0.5;
  const BlockState a{s00, low_spectrum(InterpolatedBlock(lat, kParams, kLinear, s00).at(tau), 1)
                              .eigenvectors[0].cast<cplx>()};
  const BlockState b{s10, low_spectrum(InterpolatedBlock(lat, kParams, kLinear, s10).at(tau), 1)
                              .eigenvectors[0].cast<cplx>()};
  EXPECT_EQ(hdot_matrix_element(lat, kParams, kLinear, tau, a, b).value, cplx(0.0));
}

TEST(Hdot, AgreesWithDense) {
  const TorusLattice lat(2);
  const auto basis = make_sector00(lat);
  const double tau = 0.5;
  const SpectralResult r = low_spectrum(InterpolatedBlock(lat, kParams, kLinear, basis).at(tau), 2);
  const BlockState s0{basis, r.eigenvectors[0].cast<cplx>()}, s1{basis, r.eigenvectors[1].cast<cplx>()};
  const auto parts = interpolation_parts(lat, kParams);
  // dH/dtau = f' (H_g - H_xi), the field constant included.
  const oracle::Mat hdot = dense_block(parts.plaquettes, *basis) - dense_block(parts.field, *basis);
  const HdotElement off = hdot_matrix_element(lat, kParams, kLinear, tau, s0, s1);
  EXPECT_NEAR(std::abs(off.value), std::abs(s0.amplitudes.dot(hdot * s1.amplitudes)), 1e-12);
  EXPECT_GT(std::abs(off.value), 1e-3);
  EXPECT_NEAR(off.energy_i, r.eigenvalues[0], 1e-9);
  const HdotElement diag = hdot_matrix_element(lat, kParams, kLinear, tau, s0, s0);
  EXPECT_NEAR(diag.value.real(), s0.amplitudes.dot(hdot * s0.amplitudes).real(), 1e-12);
  EXPECT_NEAR(diag.value.imag(), 0.0, 1e-14);
  EXPECT_GT(transition_bound(off), 0.0);
  EXPECT_THROW(transition_bound(diag), std::domain_error);
}

TEST(PhiDot, FirstOrderAtStart) {
  // d phi/d tau at tau=0 is (g / 8 xi) sum_p |p>, norm g L / (8 xi).
  const TorusLattice lat(2);
  EXPECT_NEAR(phi_dot_norm(lat, kParams, kLinear, 0.0, 1e-5), 2.0 / 8.0, 1e-3);
  const ModelParams p{20.0, 0.5, 2.0};
  EXPECT_NEAR(phi_dot_norm(lat, p, kLinear, 0.0, 1e-5), 0.5 * 2 / 16.0, 1e-3);
}

TEST(PhiDot, FlatScheduleAndGrowth) {
  const TorusLattice l2(2), l3(3);
  EXPECT_LT(phi_dot_norm(l2, kParams, Schedule(ScheduleKind::trig_smooth), 0.0, 1e-4), 1e-3);
  EXPECT_GT(phi_dot_norm(l3, kParams, kLinear, 0.5, 1e-4), phi_dot_norm(l2, kParams, kLinear, 0.5, 1e-4));
  EXPECT_THROW(phi_dot_norm(l2, kParams, kLinear, 0.5, 0.0), std::invalid_argument);
}

TEST(Duality, FreeLimit) {
  const DualityReport r = duality_spectrum_check(2, 0.0, 1.0, 8, 1e-10);
  EXPECT_TRUE(r.pass) << r.message;
  EXPECT_NEAR(r.gauge_levels.front(), -4.0, 1e-10);
  EXPECT_NEAR(r.gauge_levels.back(), 4.0, 1e-10);
}

TEST(Duality, LevelByLevel) {
  const DualityReport r2 = duality_spectrum_check(2, 1.0, 1.0, 8, 1e-10);
  EXPECT_TRUE(r2.pass) << r2.message;
  EXPECT_LE(r2.max_difference, 1e-10);
  const DualityReport r3 = duality_spectrum_check(3, 0.43, 1.0, 6, 1e-9);
  EXPECT_TRUE(r3.pass) << r3.message;
  EXPECT_EQ(r3.gauge_levels.size(), 6u);
}

TEST(Duality, StructuralFailures) {
  const DualityReport r = duality_spectrum_check(2, 1.0, 1.0, 9, 1e-9);
  EXPECT_TRUE(r.structural_failure);
  EXPECT_FALSE(r.pass);
  EXPECT_THROW(duality_spectrum_check(4, 1.0, 1.0, 2, 1e-9), std::invalid_argument);
}
