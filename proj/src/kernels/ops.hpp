#pragma once

#include <cstddef>

namespace feop::kernels::detail {

struct Ops {
    double (*dot)(const double*, const double*, std::size_t);
    double (*nrm2_sq)(const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*scal)(double, double*, std::size_t);
    void (*gemv)(const double*, std::size_t, std::size_t, const double*, double*);
};

Ops scalar_ops();

#if FEOP_HAVE_AVX2
Ops avx2_ops();
bool avx2_supported();
#endif

#if FEOP_HAVE_NEON
Ops neon_ops();
#endif

}  // namespace feop::kernels::detail
