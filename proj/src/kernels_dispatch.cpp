#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "singul/kernels.hpp"

namespace singul::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

bool cpu_has_avx512() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx512f");
#else
    return false;
#endif
}

Impl resolve_auto() {
#if defined(__aarch64__)
    return Impl::Neon;
#else
    if (cpu_has_avx512()) return Impl::Avx512;
    return cpu_has_avx2() ? Impl::Avx2 : Impl::Scalar;
#endif
}

Impl impl_from_env() {
    const char* env = std::getenv("SINGUL_KERNEL_IMPL");
    if (env == nullptr || std::strlen(env) == 0) return resolve_auto();
    if (std::strcmp(env, "scalar") == 0) return Impl::Scalar;
    if (std::strcmp(env, "avx2") == 0) return Impl::Avx2;
    if (std::strcmp(env, "avx512") == 0) return Impl::Avx512;
    if (std::strcmp(env, "neon") == 0) return Impl::Neon;
    return resolve_auto();
}

std::atomic<Impl> g_impl{Impl::Auto};

kernel_sums_fn fn_for(Impl impl) {
    switch (impl) {
        case Impl::Scalar:
            return kernel_sums_scalar;
#if defined(__x86_64__) || defined(_M_X64)
        case Impl::Avx2:
            if (!cpu_has_avx2()) throw std::runtime_error("AVX2 kernels requested but CPU lacks avx2/fma");
            return kernel_sums_avx2;
        case Impl::Avx512:
            if (!cpu_has_avx512()) throw std::runtime_error("AVX-512 kernels requested but CPU lacks avx512f");
            return kernel_sums_avx512;
#endif
#if defined(__aarch64__)
        case Impl::Neon:
            return kernel_sums_neon;
#endif
        default:
            throw std::runtime_error("kernel implementation unavailable on this platform: " +
                                     impl_name(impl));
    }
}

}  // namespace

std::vector<Impl> available_impls() {
    std::vector<Impl> v{Impl::Scalar};
#if defined(__x86_64__) || defined(_M_X64)
    if (cpu_has_avx2()) v.push_back(Impl::Avx2);
    if (cpu_has_avx512()) v.push_back(Impl::Avx512);
#endif
#if defined(__aarch64__)
    v.push_back(Impl::Neon);
#endif
    return v;
}

void set_impl(Impl impl) {
    if (impl != Impl::Auto) fn_for(impl);  // validate
    g_impl.store(impl);
}

Impl active_impl() {
    Impl impl = g_impl.load();
    if (impl == Impl::Auto) {
        impl = impl_from_env();
        g_impl.store(impl);
    }
    return impl;
}

std::string impl_name(Impl impl) {
    switch (impl) {
        case Impl::Auto: return "auto";
        case Impl::Scalar: return "scalar";
        case Impl::Avx2: return "avx2";
        case Impl::Avx512: return "avx512";
        case Impl::Neon: return "neon";
    }
    return "unknown";
}

KernelSums kernel_sums(const double* const* cols, const double* f, size_t n, size_t dim,
                       const double* x, double fx, double inv_t) {
    return fn_for(active_impl())(cols, f, n, dim, x, fx, inv_t);
}

}  // namespace singul::kernels
