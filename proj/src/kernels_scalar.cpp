#include <cmath>

#include "singul/kernels.hpp"
#include "singul/summation.hpp"

namespace singul::kernels {

KernelSums kernel_sums_scalar(const double* const* cols, const double* f, size_t n, size_t dim,
                              const double* x, double fx, double inv_t) {
    CompensatedSum weight, fdiff;
    if (dim == 3) {
        const double* c0 = cols[0];
        const double* c1 = cols[1];
        const double* c2 = cols[2];
        const double x0 = x[0], x1 = x[1], x2 = x[2];
        for (size_t j = 0; j < n; ++j) {
            const double d0 = x0 - c0[j];
            const double d1 = x1 - c1[j];
            const double d2 = x2 - c2[j];
            const double w = std::exp(-(d0 * d0 + d1 * d1 + d2 * d2) * inv_t);
            weight.add(w);
            fdiff.add(w * (fx - f[j]));
        }
    } else {
        for (size_t j = 0; j < n; ++j) {
            double d2 = 0.0;
            for (size_t k = 0; k < dim; ++k) {
                const double d = x[k] - cols[k][j];
                d2 += d * d;
            }
            const double w = std::exp(-d2 * inv_t);
            weight.add(w);
            fdiff.add(w * (fx - f[j]));
        }
    }
    return {weight.value(), fdiff.value()};
}

}  // namespace singul::kernels
