#pragma once

#include <cstddef>
#include <string>

namespace bec::kernels {

// Batched inner loops of the lattice double sums. The scalar table is the
// reference; vector tables must agree with it to a few ulps per element.
struct KernelTable {
    const char* name;
    // out[i] = sin(a x[i]) / x[i], with a (1 - (a x)^2 / 6) once |a x| < 1e-6.
    void (*sinc_batch)(const double* x, double a, double* out, std::size_t n);
    // out[i] = sin(x[i])
    void (*sin_batch)(const double* x, double* out, std::size_t n);
    // sum_i w[i] s[i] in a fixed, variant-specific order.
    double (*dot)(const double* w, const double* s, std::size_t n);
};

const KernelTable& scalar();
// nullptr when the variant is not compiled in or the CPU lacks the feature.
const KernelTable* avx2();
const KernelTable* neon();

// Chosen once per process: AVX2 (x86-64 with avx2+fma) or NEON (aarch64),
// falling back to scalar. BEC_KINETICS_KERNELS=scalar forces the reference.
const KernelTable& active();

}  // namespace bec::kernels
