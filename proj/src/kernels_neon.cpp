// NEON variant (aarch64). Mirrors the AVX2 path at width 2.

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>

#include "singul/kernels.hpp"
#include "singul/summation.hpp"

namespace singul::kernels {

namespace {

inline float64x2_t exp2d(float64x2_t x) {
    const float64x2_t log2e = vdupq_n_f64(1.4426950408889634074);
    const float64x2_t ln2_hi = vdupq_n_f64(6.93147180369123816490e-01);
    const float64x2_t ln2_lo = vdupq_n_f64(1.90821492927058770002e-10);
    const float64x2_t lo_lim = vdupq_n_f64(-708.0);

    uint64x2_t zero_mask = vcltq_f64(x, lo_lim);
    float64x2_t clamped = vmaxq_f64(x, lo_lim);
    clamped = vminq_f64(clamped, vdupq_n_f64(708.0));

    const float64x2_t kd = vrndnq_f64(vmulq_f64(clamped, log2e));
    float64x2_t r = vfmsq_f64(clamped, kd, ln2_hi);
    r = vfmsq_f64(r, kd, ln2_lo);

    float64x2_t p = vdupq_n_f64(2.5052108385441718775e-08);
    p = vfmaq_f64(vdupq_n_f64(2.7557319223985892511e-07), p, r);
    p = vfmaq_f64(vdupq_n_f64(2.7557319223985890653e-06), p, r);
    p = vfmaq_f64(vdupq_n_f64(2.4801587301587301566e-05), p, r);
    p = vfmaq_f64(vdupq_n_f64(1.9841269841269841253e-04), p, r);
    p = vfmaq_f64(vdupq_n_f64(1.3888888888888889419e-03), p, r);
    p = vfmaq_f64(vdupq_n_f64(8.3333333333333332177e-03), p, r);
    p = vfmaq_f64(vdupq_n_f64(4.1666666666666664354e-02), p, r);
    p = vfmaq_f64(vdupq_n_f64(1.6666666666666665741e-01), p, r);
    p = vfmaq_f64(vdupq_n_f64(5.0e-01), p, r);
    p = vfmaq_f64(vdupq_n_f64(1.0), p, r);
    p = vfmaq_f64(vdupq_n_f64(1.0), p, r);

    const int64x2_t k64 = vcvtq_s64_f64(kd);
    const int64x2_t bits = vaddq_s64(vreinterpretq_s64_f64(p), vshlq_n_s64(k64, 52));
    float64x2_t result = vreinterpretq_f64_s64(bits);
    result = vreinterpretq_f64_u64(vbicq_u64(vreinterpretq_u64_f64(result), zero_mask));
    return result;
}

struct Comp2 {
    float64x2_t sum = vdupq_n_f64(0.0);
    float64x2_t comp = vdupq_n_f64(0.0);

    inline void add(float64x2_t v) {
        const float64x2_t t = vaddq_f64(sum, v);
        const float64x2_t big_first = vaddq_f64(vsubq_f64(sum, t), v);
        const float64x2_t small_first = vaddq_f64(vsubq_f64(v, t), sum);
        const uint64x2_t mask = vcgeq_f64(vabsq_f64(sum), vabsq_f64(v));
        comp = vaddq_f64(comp, vbslq_f64(mask, big_first, small_first));
        sum = t;
    }

    void drain(CompensatedSum& out) const {
        out.add(vgetq_lane_f64(sum, 0));
        out.add(vgetq_lane_f64(sum, 1));
        out.add(vgetq_lane_f64(comp, 0));
        out.add(vgetq_lane_f64(comp, 1));
    }
};

}  // namespace

KernelSums kernel_sums_neon(const double* const* cols, const double* f, size_t n, size_t dim,
                            const double* x, double fx, double inv_t) {
    Comp2 weight2, fdiff2;
    const float64x2_t vfx = vdupq_n_f64(fx);
    const float64x2_t vneg_inv_t = vdupq_n_f64(-inv_t);
    size_t j = 0;
    for (; j + 2 <= n; j += 2) {
        float64x2_t r2 = vdupq_n_f64(0.0);
        for (size_t k = 0; k < dim; ++k) {
            const float64x2_t d = vsubq_f64(vdupq_n_f64(x[k]), vld1q_f64(cols[k] + j));
            r2 = vfmaq_f64(r2, d, d);
        }
        const float64x2_t w = exp2d(vmulq_f64(r2, vneg_inv_t));
        weight2.add(w);
        fdiff2.add(vmulq_f64(w, vsubq_f64(vfx, vld1q_f64(f + j))));
    }
    CompensatedSum weight, fdiff;
    weight2.drain(weight);
    fdiff2.drain(fdiff);
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

#endif  // aarch64
