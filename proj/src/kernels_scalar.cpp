#include <cmath>
#include <cstdlib>
#include <cstring>

#include "bec/kernels.hpp"

namespace bec::kernels {

namespace {

void sinc_scalar(const double* x, double a, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double ax = a * x[i];
        if (std::abs(ax) < 1e-6)
            out[i] = a * (1.0 - ax * ax / 6.0);
        else
            out[i] = std::sin(ax) / x[i];
    }
}

void sin_scalar(const double* x, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::sin(x[i]);
}

double dot_scalar(const double* w, const double* s, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += w[i] * s[i];
    return acc;
}

const KernelTable kScalar{"scalar", &sinc_scalar, &sin_scalar, &dot_scalar};

}  // namespace

const KernelTable& scalar() { return kScalar; }

const KernelTable& active() {
    static const KernelTable* chosen = [] {
        const char* env = std::getenv("BEC_KINETICS_KERNELS");
        if (env && std::strcmp(env, "scalar") == 0) return &kScalar;
        if (const KernelTable* t = avx2()) return t;
        if (const KernelTable* t = neon()) return t;
        return &kScalar;
    }();
    return *chosen;
}

}  // namespace bec::kernels
