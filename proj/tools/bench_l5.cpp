// Ground state of the largest lattice in sector (0,0). Not part of ctest.
//   tcprep_bench_l5 [L=5] [tau=0.7]
#include <chrono>
#include <cstdlib>
#include <iostream>

#include "tcprep/spectral.hpp"

int main(int argc, char** argv) {
  using namespace tcprep;
  const int L = argc > 1 ? std::atoi(argv[1]) : 5;
  const double tau = argc > 2 ? std::atof(argv[2]) : 0.7;
  try {
    const auto t0 = std::chrono::steady_clock::now();
    const TorusLattice lat(L);
    const InterpolatedBlock block(lat, ModelParams{}, Schedule(ScheduleKind::linear),
                                  make_sector00(lat));
    const auto t1 = std::chrono::steady_clock::now();
    EigenSolverOptions opts;
    opts.tol = 1e-8;
    const SpectralResult r = low_spectrum(block.at(tau), 1, opts);
    const auto t2 = std::chrono::steady_clock::now();
    const auto secs = [](auto a, auto b) { return std::chrono::duration<double>(b - a).count(); };
    std::cout.precision(12);
    std::cout << "L=" << L << " tau=" << tau << " dim=" << block.basis()->dim()
              << " E0=" << r.eigenvalues[0] << " residual=" << r.residuals[0]
              << " matvecs=" << r.matvecs << " build_s=" << secs(t0, t1)
              << " solve_s=" << secs(t1, t2) << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
