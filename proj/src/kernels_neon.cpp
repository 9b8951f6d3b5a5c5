#include "bec/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>

namespace bec::kernels {

namespace {

constexpr double kTwoOverPi = 0.63661977236758134308;
constexpr double kPio2a = 1.5707963267948966192;
constexpr double kPio2b = 6.123233995736766036e-17;
constexpr double kPio2c = -1.4973849048591698e-33;
constexpr double S1 = -1.66666666666666324348e-01, S2 = 8.33333333332248946124e-03,
                 S3 = -1.98412698298579493134e-04, S4 = 2.75573137070700676789e-06,
                 S5 = -2.50507602534068634195e-08, S6 = 1.58969099521155010221e-10;
constexpr double C1 = 4.16666666666666019037e-02, C2 = -1.38888888888741095749e-03,
                 C3 = 2.48015872894767294178e-05, C4 = -2.75573143513906633035e-07,
                 C5 = 2.08757232129817482790e-09, C6 = -1.13596475577881948265e-11;
constexpr double kReduceLimit = 1e8;

inline float64x2_t sin2(float64x2_t x) {
    const float64x2_t k = vrndnq_f64(vmulq_n_f64(x, kTwoOverPi));
    float64x2_t r = vfmsq_f64(x, k, vdupq_n_f64(kPio2a));
    r = vfmsq_f64(r, k, vdupq_n_f64(kPio2b));
    r = vfmsq_f64(r, k, vdupq_n_f64(kPio2c));
    const float64x2_t z = vmulq_f64(r, r);

    float64x2_t ps = vfmaq_f64(vdupq_n_f64(S5), z, vdupq_n_f64(S6));
    ps = vfmaq_f64(vdupq_n_f64(S4), z, ps);
    ps = vfmaq_f64(vdupq_n_f64(S3), z, ps);
    ps = vfmaq_f64(vdupq_n_f64(S2), z, ps);
    ps = vfmaq_f64(vdupq_n_f64(S1), z, ps);
    const float64x2_t sinr = vfmaq_f64(r, vmulq_f64(r, z), ps);

    float64x2_t pc = vfmaq_f64(vdupq_n_f64(C5), z, vdupq_n_f64(C6));
    pc = vfmaq_f64(vdupq_n_f64(C4), z, pc);
    pc = vfmaq_f64(vdupq_n_f64(C3), z, pc);
    pc = vfmaq_f64(vdupq_n_f64(C2), z, pc);
    pc = vfmaq_f64(vdupq_n_f64(C1), z, pc);
    const float64x2_t cosr = vfmaq_f64(vfmsq_f64(vdupq_n_f64(1.0), vdupq_n_f64(0.5), z), vmulq_f64(z, z), pc);

    const int64x2_t q = vcvtq_s64_f64(k);
    const uint64x2_t use_cos = vtstq_s64(q, vdupq_n_s64(1));
    const uint64x2_t flip = vtstq_s64(q, vdupq_n_s64(2));
    float64x2_t v = vbslq_f64(use_cos, cosr, sinr);
    return vbslq_f64(flip, vnegq_f64(v), v);
}

inline bool needs_scalar(float64x2_t ax) {
    uint64x2_t big = vcagtq_f64(ax, vdupq_n_f64(kReduceLimit));
    uint64x2_t ordered = vceqq_f64(ax, ax);
    return (vgetq_lane_u64(big, 0) | vgetq_lane_u64(big, 1)) != 0 ||
           (vgetq_lane_u64(ordered, 0) & vgetq_lane_u64(ordered, 1)) == 0;
}

void sinc_neon(const double* x, double a, double* out, std::size_t n) {
    const KernelTable& ref = scalar();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t vx = vld1q_f64(x + i);
        const float64x2_t ax = vmulq_n_f64(vx, a);
        if (needs_scalar(ax)) {
            ref.sinc_batch(x + i, a, out + i, 2);
            continue;
        }
        const uint64x2_t small = vcaltq_f64(ax, vdupq_n_f64(1e-6));
        const float64x2_t series =
            vmulq_n_f64(vfmsq_f64(vdupq_n_f64(1.0), vmulq_f64(ax, ax), vdupq_n_f64(1.0 / 6.0)), a);
        const float64x2_t den = vbslq_f64(small, vdupq_n_f64(1.0), vx);
        const float64x2_t direct = vdivq_f64(sin2(ax), den);
        vst1q_f64(out + i, vbslq_f64(small, series, direct));
    }
    if (i < n) ref.sinc_batch(x + i, a, out + i, n - i);
}

void sin_neon(const double* x, double* out, std::size_t n) {
    const KernelTable& ref = scalar();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t vx = vld1q_f64(x + i);
        if (needs_scalar(vx)) {
            ref.sin_batch(x + i, out + i, 2);
            continue;
        }
        vst1q_f64(out + i, sin2(vx));
    }
    if (i < n) ref.sin_batch(x + i, out + i, n - i);
}

double dot_neon(const double* w, const double* s, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vfmaq_f64(acc, vld1q_f64(w + i), vld1q_f64(s + i));
    double total = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
    for (; i < n; ++i) total += w[i] * s[i];
    return total;
}

const KernelTable kNeon{"neon", &sinc_neon, &sin_neon, &dot_neon};

}  // namespace

const KernelTable* neon() { return &kNeon; }

}  // namespace bec::kernels

#else

namespace bec::kernels {
const KernelTable* neon() { return nullptr; }
}  // namespace bec::kernels

#endif
