#pragma once

#include <cstddef>

// Dense double-precision kernels used by the network training loop and the
// dense solvers. A scalar reference implementation always exists; on x86 an
// AVX2+FMA variant (NEON on aarch64) is selected once at startup by CPU
// detection. Equivalence between lanes is covered in tests/test_kernels.cpp.
//
// SIMD lanes reduce with multiple accumulators, so results may differ from
// the scalar lane by rounding; on a given machine the selected lane is fixed,
// which keeps runs reproducible.

namespace feop::kernels {

enum class Isa { Scalar, Avx2, Neon };

// Best lane supported by this CPU.
Isa detected_isa();

// Lane currently in use.
Isa active_isa();

// Override the active lane (used by the equivalence tests). Requesting an
// unsupported lane throws. Not thread safe.
void force_isa(Isa isa);

const char* isa_name(Isa isa);

double dot(const double* a, const double* b, std::size_t n);
double nrm2_sq(const double* a, std::size_t n);
// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);
// x *= alpha
void scal(double alpha, double* x, std::size_t n);
// y = A x with A row-major (rows x cols)
void gemv(const double* a, std::size_t rows, std::size_t cols,
          const double* x, double* y);

}  // namespace feop::kernels
