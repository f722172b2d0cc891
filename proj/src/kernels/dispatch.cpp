#include "feop/kernels.hpp"

#include <stdexcept>

#include "ops.hpp"

namespace feop::kernels {

namespace {

detail::Ops g_ops = detail::scalar_ops();
Isa g_active = Isa::Scalar;
bool g_initialized = false;

void init_once() {
    if (g_initialized) return;
#if FEOP_HAVE_AVX2
    if (detail::avx2_supported()) {
        g_ops = detail::avx2_ops();
        g_active = Isa::Avx2;
        g_initialized = true;
        return;
    }
#endif
#if FEOP_HAVE_NEON
    g_ops = detail::neon_ops();
    g_active = Isa::Neon;
    g_initialized = true;
    return;
#endif
    g_ops = detail::scalar_ops();
    g_active = Isa::Scalar;
    g_initialized = true;
}

}  // namespace

Isa detected_isa() {
#if FEOP_HAVE_AVX2
    if (detail::avx2_supported()) return Isa::Avx2;
#endif
#if FEOP_HAVE_NEON
    return Isa::Neon;
#endif
    return Isa::Scalar;
}

Isa active_isa() {
    init_once();
    return g_active;
}

void force_isa(Isa isa) {
    init_once();
    switch (isa) {
        case Isa::Scalar:
            g_ops = detail::scalar_ops();
            g_active = Isa::Scalar;
            return;
        case Isa::Avx2:
#if FEOP_HAVE_AVX2
            if (detail::avx2_supported()) {
                g_ops = detail::avx2_ops();
                g_active = Isa::Avx2;
                return;
            }
#endif
            throw std::invalid_argument("force_isa: AVX2 not supported on this CPU");
        case Isa::Neon:
#if FEOP_HAVE_NEON
            g_ops = detail::neon_ops();
            g_active = Isa::Neon;
            return;
#endif
            throw std::invalid_argument("force_isa: NEON not supported on this CPU");
    }
    throw std::invalid_argument("force_isa: unknown isa");
}

const char* isa_name(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
        case Isa::Neon: return "neon";
    }
    return "unknown";
}

double dot(const double* a, const double* b, std::size_t n) {
    init_once();
    return g_ops.dot(a, b, n);
}

double nrm2_sq(const double* a, std::size_t n) {
    init_once();
    return g_ops.nrm2_sq(a, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    init_once();
    g_ops.axpy(alpha, x, y, n);
}

void scal(double alpha, double* x, std::size_t n) {
    init_once();
    g_ops.scal(alpha, x, n);
}

void gemv(const double* a, std::size_t rows, std::size_t cols,
          const double* x, double* y) {
    init_once();
    g_ops.gemv(a, rows, cols, x, y);
}

}  // namespace feop::kernels
