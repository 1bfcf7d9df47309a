// AVX2+FMA variant of the kernel sums. Built with -mavx2 -mfma in its own
// translation unit; selected at runtime only when the CPU supports both.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

#include "singul/kernels.hpp"
#include "singul/summation.hpp"

namespace singul::kernels {

namespace {

// exp for 4 doubles: Cody-Waite reduction, degree-11 Taylor on the reduced
// argument, 2^k scaling through the exponent bits. Arguments below -708 give
// 0 (the true value is < 1e-307 and irrelevant to kernel weights); arguments
// are clamped at +708, which the kernel (always <= 0) never reaches.
inline __m256d exp4(__m256d x) {
    const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
    const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
    const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
    const __m256d underflow = _mm256_set1_pd(-708.0);

    __m256d clamped = _mm256_max_pd(x, underflow);
    clamped = _mm256_min_pd(clamped, _mm256_set1_pd(708.0));

    const __m256d kd = _mm256_round_pd(_mm256_mul_pd(clamped, log2e),
                                       _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(kd, ln2_hi, clamped);
    r = _mm256_fnmadd_pd(kd, ln2_lo, r);

    // Taylor coefficients 1/11! ... 1.
    __m256d p = _mm256_set1_pd(2.5052108385441718775e-08);
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.7557319223985892511e-07));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.7557319223985890653e-06));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.4801587301587301566e-05));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.9841269841269841253e-04));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.3888888888888889419e-03));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(8.3333333333333332177e-03));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(4.1666666666666664354e-02));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.6666666666666665741e-01));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(5.0e-01));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

    // Scale by 2^k: add k to the exponent field. k >= -1021 after the clamp,
    // so the result stays normal.
    const __m128i k32 = _mm256_cvtpd_epi32(kd);
    const __m256i k64 = _mm256_cvtepi32_epi64(k32);
    const __m256i bits = _mm256_add_epi64(_mm256_castpd_si256(p), _mm256_slli_epi64(k64, 52));
    __m256d result = _mm256_castsi256_pd(bits);

    const __m256d zero_mask = _mm256_cmp_pd(x, underflow, _CMP_LT_OQ);
    result = _mm256_andnot_pd(zero_mask, result);
    return result;
}

// Two independent evaluations; inlined so the scheduler interleaves the
// polynomial chains.
inline void exp4x2(__m256d a, __m256d b, __m256d& ra, __m256d& rb) {
    ra = exp4(a);
    rb = exp4(b);
}

// Per-lane Kahan accumulator. The summands are bounded kernel terms, so the
// running sum dominates and the classic recurrence keeps full compensation.
struct Comp4 {
    __m256d sum = _mm256_setzero_pd();
    __m256d comp = _mm256_setzero_pd();

    inline void add(__m256d v) {
        const __m256d t = _mm256_add_pd(sum, v);
        comp = _mm256_add_pd(comp, _mm256_add_pd(_mm256_sub_pd(sum, t), v));
        sum = t;
    }

    // Merge the four lanes into a scalar accumulator.
    void drain(CompensatedSum& out) const {
        alignas(32) double s[4], c[4];
        _mm256_store_pd(s, sum);
        _mm256_store_pd(c, comp);
        for (int i = 0; i < 4; ++i) out.add(s[i]);
        for (int i = 0; i < 4; ++i) out.add(c[i]);
    }
};

}  // namespace

KernelSums kernel_sums_avx2(const double* const* cols, const double* f, size_t n, size_t dim,
                            const double* x, double fx, double inv_t) {
    Comp4 weight4, fdiff4;
    const __m256d vinv_t = _mm256_set1_pd(-inv_t);
    const __m256d vfx = _mm256_set1_pd(fx);
    size_t j = 0;

    if (dim == 3) {
        const double* c0 = cols[0];
        const double* c1 = cols[1];
        const double* c2 = cols[2];
        const __m256d x0 = _mm256_set1_pd(x[0]);
        const __m256d x1 = _mm256_set1_pd(x[1]);
        const __m256d x2 = _mm256_set1_pd(x[2]);
        // Two independent streams so the exp polynomial chains overlap.
        Comp4 weight4b, fdiff4b;
        for (; j + 8 <= n; j += 8) {
            const __m256d da0 = _mm256_sub_pd(x0, _mm256_loadu_pd(c0 + j));
            const __m256d da1 = _mm256_sub_pd(x1, _mm256_loadu_pd(c1 + j));
            const __m256d da2 = _mm256_sub_pd(x2, _mm256_loadu_pd(c2 + j));
            const __m256d db0 = _mm256_sub_pd(x0, _mm256_loadu_pd(c0 + j + 4));
            const __m256d db1 = _mm256_sub_pd(x1, _mm256_loadu_pd(c1 + j + 4));
            const __m256d db2 = _mm256_sub_pd(x2, _mm256_loadu_pd(c2 + j + 4));
            __m256d ra = _mm256_mul_pd(da0, da0);
            __m256d rb = _mm256_mul_pd(db0, db0);
            ra = _mm256_fmadd_pd(da1, da1, ra);
            rb = _mm256_fmadd_pd(db1, db1, rb);
            ra = _mm256_fmadd_pd(da2, da2, ra);
            rb = _mm256_fmadd_pd(db2, db2, rb);
            __m256d wa, wb;
            exp4x2(_mm256_mul_pd(ra, vinv_t), _mm256_mul_pd(rb, vinv_t), wa, wb);
            weight4.add(wa);
            weight4b.add(wb);
            fdiff4.add(_mm256_mul_pd(wa, _mm256_sub_pd(vfx, _mm256_loadu_pd(f + j))));
            fdiff4b.add(_mm256_mul_pd(wb, _mm256_sub_pd(vfx, _mm256_loadu_pd(f + j + 4))));
        }
        for (; j + 4 <= n; j += 4) {
            const __m256d d0 = _mm256_sub_pd(x0, _mm256_loadu_pd(c0 + j));
            const __m256d d1 = _mm256_sub_pd(x1, _mm256_loadu_pd(c1 + j));
            const __m256d d2 = _mm256_sub_pd(x2, _mm256_loadu_pd(c2 + j));
            __m256d r2 = _mm256_mul_pd(d0, d0);
            r2 = _mm256_fmadd_pd(d1, d1, r2);
            r2 = _mm256_fmadd_pd(d2, d2, r2);
            const __m256d w = exp4(_mm256_mul_pd(r2, vinv_t));
            weight4.add(w);
            fdiff4.add(_mm256_mul_pd(w, _mm256_sub_pd(vfx, _mm256_loadu_pd(f + j))));
        }
        weight4.sum = _mm256_add_pd(weight4.sum, weight4b.sum);
        weight4.comp = _mm256_add_pd(weight4.comp, weight4b.comp);
        fdiff4.sum = _mm256_add_pd(fdiff4.sum, fdiff4b.sum);
        fdiff4.comp = _mm256_add_pd(fdiff4.comp, fdiff4b.comp);
    } else if (dim == 2) {
        const double* c0 = cols[0];
        const double* c1 = cols[1];
        const __m256d x0 = _mm256_set1_pd(x[0]);
        const __m256d x1 = _mm256_set1_pd(x[1]);
        for (; j + 4 <= n; j += 4) {
            const __m256d d0 = _mm256_sub_pd(x0, _mm256_loadu_pd(c0 + j));
            const __m256d d1 = _mm256_sub_pd(x1, _mm256_loadu_pd(c1 + j));
            __m256d r2 = _mm256_mul_pd(d0, d0);
            r2 = _mm256_fmadd_pd(d1, d1, r2);
            const __m256d w = exp4(_mm256_mul_pd(r2, vinv_t));
            weight4.add(w);
            fdiff4.add(_mm256_mul_pd(w, _mm256_sub_pd(vfx, _mm256_loadu_pd(f + j))));
        }
    } else {
        for (; j + 4 <= n; j += 4) {
            __m256d r2 = _mm256_setzero_pd();
            for (size_t k = 0; k < dim; ++k) {
                const __m256d d = _mm256_sub_pd(_mm256_set1_pd(x[k]), _mm256_loadu_pd(cols[k] + j));
                r2 = _mm256_fmadd_pd(d, d, r2);
            }
            const __m256d w = exp4(_mm256_mul_pd(r2, vinv_t));
            weight4.add(w);
            fdiff4.add(_mm256_mul_pd(w, _mm256_sub_pd(vfx, _mm256_loadu_pd(f + j))));
        }
    }

    CompensatedSum weight, fdiff;
    weight4.drain(weight);
    fdiff4.drain(fdiff);
    for (; j < n; ++j) {
        double r2 = 0.0;
        for (size_t k = 0; k < dim; ++k) {
            const double d = x[k] - cols[k][j];
            r2 += d * d;
        }
        const double w = std::exp(-r2 * inv_t);
        weight.add(w);
        fdiff.add(w * (fx - f[j]));
    }
    return {weight.value(), fdiff.value()};
}

}  // namespace singul::kernels

#endif  // x86_64
