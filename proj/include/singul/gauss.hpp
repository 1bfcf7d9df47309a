#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace singul {

/// Gauss-Legendre nodes/weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Nodes by Newton iteration on the Legendre polynomial (full double accuracy).
inline GaussRule make_gauss_legendre(int order) {
    if (order < 1) throw std::invalid_argument("gauss order must be >= 1");
    GaussRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const int m = (order + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.weights[i] = w;
        rule.nodes[order - 1 - i] = x;
        rule.weights[order - 1 - i] = w;
    }
    return rule;
}

inline const GaussRule& gauss_legendre(int order) {
    static std::map<int, GaussRule> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, make_gauss_legendre(order)).first;
    return it->second;
}

inline double integrate_1d(const std::function<double(double)>& f, double a, double b,
                           int order = 32) {
    const GaussRule& rule = gauss_legendre(order);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < order; ++i) s += rule.weights[i] * f(c + h * rule.nodes[i]);
    return s * h;
}

/// Composite Gauss with panel doubling until successive values agree.
inline double integrate_1d_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double tol = 1e-12, double* err_out = nullptr,
                                    int order = 16) {
    double prev = integrate_1d(f, a, b, order);
    int panels = 2;
    double value = prev, err = std::abs(prev);
    for (int level = 0; level < 12; ++level) {
        double s = 0.0;
        const double h = (b - a) / panels;
        for (int p = 0; p < panels; ++p) s += integrate_1d(f, a + p * h, a + (p + 1) * h, order);
        err = std::abs(s - prev);
        value = s;
        prev = s;
        panels *= 2;
        if (err <= tol * std::max(1.0, std::abs(s))) break;
    }
    if (err_out) *err_out = err;
    return value;
}

}  // namespace singul
