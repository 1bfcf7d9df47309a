#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace singul::kernels {

/// Accumulated Gaussian-kernel sums against a fixed evaluation point:
///   weight = Σ_j exp(-‖x - X_j‖² / t)
///   fdiff  = Σ_j exp(-‖x - X_j‖² / t) · (f(x) - f(X_j))
/// Both compensated; fdiff is the unnormalized graph-Laplacian response.
struct KernelSums {
    double weight = 0.0;
    double fdiff = 0.0;
};

/// cols: dim pointers, one contiguous column of length n per coordinate
/// (structure-of-arrays). f: per-point probe values v·X_j. x: evaluation
/// point (dim entries), fx = v·x, inv_t = 1/t.
using kernel_sums_fn = KernelSums (*)(const double* const* cols, const double* f, size_t n,
                                      size_t dim, const double* x, double fx, double inv_t);

enum class Impl { Auto, Scalar, Avx2, Avx512, Neon };

/// Scalar reference path (libm exp + Neumaier); ground truth for the
/// equivalence tests.
KernelSums kernel_sums_scalar(const double* const* cols, const double* f, size_t n, size_t dim,
                              const double* x, double fx, double inv_t);

#if defined(__x86_64__) || defined(_M_X64)
KernelSums kernel_sums_avx2(const double* const* cols, const double* f, size_t n, size_t dim,
                            const double* x, double fx, double inv_t);
KernelSums kernel_sums_avx512(const double* const* cols, const double* f, size_t n, size_t dim,
                              const double* x, double fx, double inv_t);
#endif
#if defined(__aarch64__)
KernelSums kernel_sums_neon(const double* const* cols, const double* f, size_t n, size_t dim,
                            const double* x, double fx, double inv_t);
#endif

/// Variants usable on this machine (always includes Scalar).
std::vector<Impl> available_impls();

/// Select the active implementation; Auto picks the widest supported one.
/// Honors the SINGUL_KERNEL_IMPL environment variable (scalar|avx2|neon|auto)
/// on first use. Throws if the requested variant is unsupported.
void set_impl(Impl impl);
Impl active_impl();
std::string impl_name(Impl impl);

/// The dispatched entry point (resolves the active implementation once).
KernelSums kernel_sums(const double* const* cols, const double* f, size_t n, size_t dim,
                       const double* x, double fx, double inv_t);

}  // namespace singul::kernels
