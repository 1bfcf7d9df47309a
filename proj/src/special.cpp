#include "singul/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace singul {

namespace {

// Lanczos, g = 7, 9 coefficients (Godfrey). Relative error below 1e-14 on
// the positive axis.
const double kLanczos[9] = {
    0.99999999999980993,  676.5203681218851,   -1259.1392167224028,
    771.32342877765313,   -176.61502916214059, 12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_gamma(double a) {
    if (a < 0.5) {
        // Reflection; only reached for a in (0, 0.5).
        return M_PI / (std::sin(M_PI * a) * lanczos_gamma(1.0 - a));
    }
    const double z = a - 1.0;
    double x = kLanczos[0];
    for (int i = 1; i < 9; ++i) x += kLanczos[i] / (z + i);
    const double t = z + 7.5;
    return std::sqrt(2.0 * M_PI) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

void check_gamma_domain(double a, double x) {
    if (!(a > 0.0)) throw std::domain_error("incomplete gamma: requires a > 0, got a=" + std::to_string(a));
    if (!(x >= 0.0)) throw std::domain_error("incomplete gamma: requires x >= 0, got x=" + std::to_string(x));
}

// Regularized P(a,x) by its power series; converges well for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-17) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized Q(a,x) by the modified Lentz continued fraction; for x >= a + 1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_complete(double a) {
    if (!(a > 0.0)) throw std::domain_error("gamma_complete: requires a > 0, got a=" + std::to_string(a));
    return lanczos_gamma(a);
}

double gamma_p(double a, double x) {
    check_gamma_domain(a, x);
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double gamma_lower(double a, double x) {
    check_gamma_domain(a, x);
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x) * gamma_complete(a);
    return (1.0 - gamma_q_cf(a, x)) * gamma_complete(a);
}

double gamma_upper(double a, double x) {
    check_gamma_domain(a, x);
    if (x == 0.0) return gamma_complete(a);
    if (x < a + 1.0) return (1.0 - gamma_p_series(a, x)) * gamma_complete(a);
    return gamma_q_cf(a, x) * gamma_complete(a);
}

namespace {

constexpr double kInvE = 0.36787944117144233;  // 1/e

void check_lambert_domain(double rho) {
    if (!(rho > 0.0) || rho > kInvE * (1.0 + 4e-16))
        throw std::domain_error("lambert_w: requires rho in (0, 1/e], got rho=" + std::to_string(rho));
}

// Halley iteration on g(w) = w e^w + rho.
double lambert_halley(double w, double rho) {
    for (int it = 0; it < 60; ++it) {
        const double ew = std::exp(w);
        const double g = w * ew + rho;
        if (std::abs(g) <= 1e-14 * (std::abs(w * ew) + rho)) break;
        const double dg = ew * (w + 1.0);
        const double d2g = ew * (w + 2.0);
        double step = g / dg;
        const double denom = 1.0 - step * d2g / (2.0 * dg);
        if (denom != 0.0 && std::isfinite(denom)) step /= denom;
        const double next = w - step;
        if (next == w) break;
        w = next;
    }
    return w;
}

// Branch-point expansion in p = sqrt(2(1 - e rho)); sign picks the branch.
double branch_point_guess(double rho, double sign) {
    const double p = sign * std::sqrt(2.0 * std::max(0.0, 1.0 - M_E * rho));
    return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
}

}  // namespace

double lambert_w0(double rho) {
    check_lambert_domain(rho);
    const double z = -rho;  // argument of W
    double w;
    if (rho > 0.3) {
        w = branch_point_guess(rho, +1.0);
    } else {
        w = z * (1.0 + z * (-1.0 + z * (1.5 - 8.0 / 3.0 * z)));  // series at 0
    }
    w = lambert_halley(w, rho);
    return std::min(std::max(w, -1.0), -0.0);
}

double lambert_wm1(double rho) {
    check_lambert_domain(rho);
    double w;
    if (rho > 0.3) {
        w = branch_point_guess(rho, -1.0);
    } else {
        const double l1 = std::log(rho);           // negative
        const double l2 = std::log(-l1);
        w = l1 - l2 + l2 / l1 + l2 * (l2 - 2.0) / (2.0 * l1 * l1);
    }
    w = lambert_halley(w, rho);
    return std::min(w, -1.0);
}

double sphere_area(int d) {
    if (d < 1) throw std::domain_error("sphere_area: requires d >= 1, got d=" + std::to_string(d));
    return 2.0 * std::pow(M_PI, 0.5 * d) / gamma_complete(0.5 * d);
}

}  // namespace singul
