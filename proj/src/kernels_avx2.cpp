#include "bec/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

#define BEC_AVX2 __attribute__((target("avx2,fma")))

namespace bec::kernels {

namespace {

// Cody-Waite split of pi/2 and fdlibm minimax coefficients on [-pi/4, pi/4].
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
// Beyond this the three-term reduction loses digits; such lanes go scalar.
constexpr double kReduceLimit = 1e8;

BEC_AVX2 inline __m256d sin4(__m256d x) {
    const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kTwoOverPi)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(k, _mm256_set1_pd(kPio2a), x);
    r = _mm256_fnmadd_pd(k, _mm256_set1_pd(kPio2b), r);
    r = _mm256_fnmadd_pd(k, _mm256_set1_pd(kPio2c), r);
    const __m256d z = _mm256_mul_pd(r, r);

    __m256d ps = _mm256_fmadd_pd(z, _mm256_set1_pd(S6), _mm256_set1_pd(S5));
    ps = _mm256_fmadd_pd(z, ps, _mm256_set1_pd(S4));
    ps = _mm256_fmadd_pd(z, ps, _mm256_set1_pd(S3));
    ps = _mm256_fmadd_pd(z, ps, _mm256_set1_pd(S2));
    ps = _mm256_fmadd_pd(z, ps, _mm256_set1_pd(S1));
    const __m256d sinr = _mm256_fmadd_pd(_mm256_mul_pd(r, z), ps, r);

    __m256d pc = _mm256_fmadd_pd(z, _mm256_set1_pd(C6), _mm256_set1_pd(C5));
    pc = _mm256_fmadd_pd(z, pc, _mm256_set1_pd(C4));
    pc = _mm256_fmadd_pd(z, pc, _mm256_set1_pd(C3));
    pc = _mm256_fmadd_pd(z, pc, _mm256_set1_pd(C2));
    pc = _mm256_fmadd_pd(z, pc, _mm256_set1_pd(C1));
    const __m256d cosr = _mm256_fmadd_pd(_mm256_mul_pd(z, z), pc,
                                         _mm256_fnmadd_pd(_mm256_set1_pd(0.5), z, _mm256_set1_pd(1.0)));

    const __m256i q = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(k));
    const __m256i one = _mm256_set1_epi64x(1);
    const __m256i two = _mm256_set1_epi64x(2);
    const __m256d use_cos = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(q, one), one));
    const __m256d flip = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(q, two), two));
    __m256d v = _mm256_blendv_pd(sinr, cosr, use_cos);
    const __m256d sign = _mm256_and_pd(flip, _mm256_set1_pd(-0.0));
    return _mm256_xor_pd(v, sign);
}

BEC_AVX2 inline bool needs_scalar(__m256d ax) {
    const __m256d absx = _mm256_andnot_pd(_mm256_set1_pd(-0.0), ax);
    const __m256d big = _mm256_cmp_pd(absx, _mm256_set1_pd(kReduceLimit), _CMP_GT_OQ);
    const __m256d bad = _mm256_cmp_pd(ax, ax, _CMP_UNORD_Q);
    return _mm256_movemask_pd(_mm256_or_pd(big, bad)) != 0;
}

BEC_AVX2 void sinc_avx2(const double* x, double a, double* out, std::size_t n) {
    const KernelTable& ref = scalar();
    const __m256d va = _mm256_set1_pd(a);
    const __m256d tiny = _mm256_set1_pd(1e-6);
    const __m256d sixth = _mm256_set1_pd(1.0 / 6.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vx = _mm256_loadu_pd(x + i);
        const __m256d ax = _mm256_mul_pd(va, vx);
        if (needs_scalar(ax)) {
            ref.sinc_batch(x + i, a, out + i, 4);
            continue;
        }
        const __m256d absx = _mm256_andnot_pd(_mm256_set1_pd(-0.0), ax);
        const __m256d small = _mm256_cmp_pd(absx, tiny, _CMP_LT_OQ);
        const __m256d series = _mm256_mul_pd(va, _mm256_fnmadd_pd(_mm256_mul_pd(ax, ax), sixth, _mm256_set1_pd(1.0)));
        // Guard the division on small lanes; the blend discards it.
        const __m256d den = _mm256_blendv_pd(vx, _mm256_set1_pd(1.0), small);
        const __m256d direct = _mm256_div_pd(sin4(ax), den);
        _mm256_storeu_pd(out + i, _mm256_blendv_pd(direct, series, small));
    }
    if (i < n) ref.sinc_batch(x + i, a, out + i, n - i);
}

BEC_AVX2 void sin_avx2(const double* x, double* out, std::size_t n) {
    const KernelTable& ref = scalar();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vx = _mm256_loadu_pd(x + i);
        if (needs_scalar(vx)) {
            ref.sin_batch(x + i, out + i, 4);
            continue;
        }
        _mm256_storeu_pd(out + i, sin4(vx));
    }
    if (i < n) ref.sin_batch(x + i, out + i, n - i);
}

BEC_AVX2 double dot_avx2(const double* w, const double* s, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(s + i), acc);
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double total = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; i < n; ++i) total += w[i] * s[i];
    return total;
}

const KernelTable kAvx2{"avx2", &sinc_avx2, &sin_avx2, &dot_avx2};

}  // namespace

const KernelTable* avx2() {
    static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return ok ? &kAvx2 : nullptr;
}

}  // namespace bec::kernels

#else

namespace bec::kernels {
const KernelTable* avx2() { return nullptr; }
}  // namespace bec::kernels

#endif
