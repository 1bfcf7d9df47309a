// AVX-512F variant: same algorithm as the AVX2 path at width 8.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

#include "singul/kernels.hpp"
#include "singul/summation.hpp"

namespace singul::kernels {

namespace {

inline __m512d exp8(__m512d x) {
    const __m512d log2e = _mm512_set1_pd(1.4426950408889634074);
    const __m512d ln2_hi = _mm512_set1_pd(6.93147180369123816490e-01);
    const __m512d ln2_lo = _mm512_set1_pd(1.90821492927058770002e-10);
    const __m512d underflow = _mm512_set1_pd(-708.0);

    const __mmask8 zero_mask = _mm512_cmp_pd_mask(x, underflow, _CMP_LT_OQ);
    __m512d clamped = _mm512_max_pd(x, underflow);
    clamped = _mm512_min_pd(clamped, _mm512_set1_pd(708.0));

    const __m512d kd = _mm512_roundscale_pd(_mm512_mul_pd(clamped, log2e),
                                            _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m512d r = _mm512_fnmadd_pd(kd, ln2_hi, clamped);
    r = _mm512_fnmadd_pd(kd, ln2_lo, r);

    __m512d p = _mm512_set1_pd(2.5052108385441718775e-08);
    p = _mm512_fmadd_pd(p, r, _mm512_set1_pd(2.7557319223985892511e-07));
    p = _mm512_fmadd_pd(p, r, _mm512_set1_pd(2.7557319223985890653e-06));
    p = _mm512_fmadd_pd(p, r, _mm512_set1_pd(2.4801587301587301566e-05));
    p = _mm512_fmadd_pd(p, r, _mm512_set1_pd(1.9841269841269841253e-04));
    p = _mm512_fmadd_pd(p, r, _mm512_set1_pd(1.3888888888888889419e-03));
    p = _mm512_fmadd_pd(p, r, _mm512_set1_pd(8.3333333333333332177e-03));
    p = _mm512_fmadd_pd(p, r, _mm512_set1_pd(4.1666666666666664354e-02));
    p = _mm512_fmadd_pd(p, r, _mm512_set1_pd(1.6666666666666665741e-01));
    p = _mm512_fmadd_pd(p, r, _mm512_set1_pd(5.0e-01));
    p = _mm512_fmadd_pd(p, r, _mm512_set1_pd(1.0));
    p = _mm512_fmadd_pd(p, r, _mm512_set1_pd(1.0));

    const __m256i k32 = _mm512_cvtpd_epi32(kd);
    const __m512i k64 = _mm512_cvtepi32_epi64(k32);
    const __m512i bits = _mm512_add_epi64(_mm512_castpd_si512(p), _mm512_slli_epi64(k64, 52));
    __m512d result = _mm512_castsi512_pd(bits);
    result = _mm512_maskz_mov_pd(~zero_mask, result);
    return result;
}

struct Comp8 {
    __m512d sum = _mm512_setzero_pd();
    __m512d comp = _mm512_setzero_pd();

    inline void add(__m512d v) {
        const __m512d t = _mm512_add_pd(sum, v);
        comp = _mm512_add_pd(comp, _mm512_add_pd(_mm512_sub_pd(sum, t), v));
        sum = t;
    }

    void drain(CompensatedSum& out) const {
        alignas(64) double s[8], c[8];
        _mm512_store_pd(s, sum);
        _mm512_store_pd(c, comp);
        for (int i = 0; i < 8; ++i) out.add(s[i]);
        for (int i = 0; i < 8; ++i) out.add(c[i]);
    }
};

}  // namespace

KernelSums kernel_sums_avx512(const double* const* cols, const double* f, size_t n, size_t dim,
                              const double* x, double fx, double inv_t) {
    Comp8 weight8, fdiff8;
    const __m512d vinv_t = _mm512_set1_pd(-inv_t);
    const __m512d vfx = _mm512_set1_pd(fx);
    size_t j = 0;

    if (dim == 3) {
        const double* c0 = cols[0];
        const double* c1 = cols[1];
        const double* c2 = cols[2];
        const __m512d x0 = _mm512_set1_pd(x[0]);
        const __m512d x1 = _mm512_set1_pd(x[1]);
        const __m512d x2 = _mm512_set1_pd(x[2]);
        Comp8 weight8b, fdiff8b;
        for (; j + 16 <= n; j += 16) {
            const __m512d da0 = _mm512_sub_pd(x0, _mm512_loadu_pd(c0 + j));
            const __m512d da1 = _mm512_sub_pd(x1, _mm512_loadu_pd(c1 + j));
            const __m512d da2 = _mm512_sub_pd(x2, _mm512_loadu_pd(c2 + j));
            const __m512d db0 = _mm512_sub_pd(x0, _mm512_loadu_pd(c0 + j + 8));
            const __m512d db1 = _mm512_sub_pd(x1, _mm512_loadu_pd(c1 + j + 8));
            const __m512d db2 = _mm512_sub_pd(x2, _mm512_loadu_pd(c2 + j + 8));
            __m512d ra = _mm512_mul_pd(da0, da0);
            __m512d rb = _mm512_mul_pd(db0, db0);
            ra = _mm512_fmadd_pd(da1, da1, ra);
            rb = _mm512_fmadd_pd(db1, db1, rb);
            ra = _mm512_fmadd_pd(da2, da2, ra);
            rb = _mm512_fmadd_pd(db2, db2, rb);
            const __m512d wa = exp8(_mm512_mul_pd(ra, vinv_t));
            const __m512d wb = exp8(_mm512_mul_pd(rb, vinv_t));
            weight8.add(wa);
            weight8b.add(wb);
            fdiff8.add(_mm512_mul_pd(wa, _mm512_sub_pd(vfx, _mm512_loadu_pd(f + j))));
            fdiff8b.add(_mm512_mul_pd(wb, _mm512_sub_pd(vfx, _mm512_loadu_pd(f + j + 8))));
        }
        for (; j + 8 <= n; j += 8) {
            const __m512d d0 = _mm512_sub_pd(x0, _mm512_loadu_pd(c0 + j));
            const __m512d d1 = _mm512_sub_pd(x1, _mm512_loadu_pd(c1 + j));
            const __m512d d2 = _mm512_sub_pd(x2, _mm512_loadu_pd(c2 + j));
            __m512d r2 = _mm512_mul_pd(d0, d0);
            r2 = _mm512_fmadd_pd(d1, d1, r2);
            r2 = _mm512_fmadd_pd(d2, d2, r2);
            const __m512d w = exp8(_mm512_mul_pd(r2, vinv_t));
            weight8.add(w);
            fdiff8.add(_mm512_mul_pd(w, _mm512_sub_pd(vfx, _mm512_loadu_pd(f + j))));
        }
        weight8.sum = _mm512_add_pd(weight8.sum, weight8b.sum);
        weight8.comp = _mm512_add_pd(weight8.comp, weight8b.comp);
        fdiff8.sum = _mm512_add_pd(fdiff8.sum, fdiff8b.sum);
        fdiff8.comp = _mm512_add_pd(fdiff8.comp, fdiff8b.comp);
    } else {
        for (; j + 8 <= n; j += 8) {
            __m512d r2 = _mm512_setzero_pd();
            for (size_t k = 0; k < dim; ++k) {
                const __m512d d =
                    _mm512_sub_pd(_mm512_set1_pd(x[k]), _mm512_loadu_pd(cols[k] + j));
                r2 = _mm512_fmadd_pd(d, d, r2);
            }
            const __m512d w = exp8(_mm512_mul_pd(r2, vinv_t));
            weight8.add(w);
            fdiff8.add(_mm512_mul_pd(w, _mm512_sub_pd(vfx, _mm512_loadu_pd(f + j))));
        }
    }

    CompensatedSum weight, fdiff;
    weight8.drain(weight);
    fdiff8.drain(fdiff);
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
