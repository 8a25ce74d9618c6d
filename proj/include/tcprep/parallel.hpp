#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace tcprep {

using cplx = std::complex<double>;

void set_num_threads(int n);
int num_threads();

// Reductions are summed over fixed-size chunks in a fixed order, so results
// do not depend on the thread count.
double dot(std::span<const double> a, std::span<const double> b);
cplx dot(std::span<const cplx> a, std::span<const cplx> b);  // conj(a) . b
double norm(std::span<const double> a);
double norm(std::span<const cplx> a);

}  // namespace tcprep
