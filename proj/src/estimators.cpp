#include "singul/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace singul {

std::string EstimateReport::to_json() const {
    nlohmann::json j;
    j["s_hat"] = s_hat;
    j["r_max_hat"] = r_max_hat;
    j["theta_hat"] = theta_hat;
    j["argmax_point"] = argmax_point;
    j["argmin_point"] = argmin_point;
    j["t"] = t_used;
    return j.dump();
}

CrossingEstimate estimate_crossing(const LaplacianResponse& response) {
    const size_t m = response.size();
    if (m < 3) throw std::invalid_argument("estimate_crossing: requires at least 3 points");
    size_t imax = 0, imin = 0;
    for (size_t i = 1; i < m; ++i) {
        if (response.values[i] > response.values[imax]) imax = i;
        if (response.values[i] < response.values[imin]) imin = i;
    }
    if (!(response.values[imax] > 0.0 && response.values[imin] < 0.0))
        throw std::runtime_error("estimate_crossing: no sign change in the response profile");
    CrossingEstimate ce;
    ce.argmax_idx = imax;
    ce.argmin_idx = imin;
    ce.s_hat = midpoint(response.point(imax), response.point(imin));
    return ce;
}

AngleEstimate estimate_angle(const LaplacianResponse& response, const CrossingEstimate& crossing,
                             double t) {
    if (!(t > 0.0)) throw std::invalid_argument("estimate_angle: requires t > 0");
    AngleEstimate ae;
    ae.r_max_hat = dist(crossing.s_hat, response.point(crossing.argmax_idx)) / std::sqrt(t);
    const double arg = 1.0 / (std::sqrt(2.0) * ae.r_max_hat);
    if (arg > 1.0)
        throw std::runtime_error("estimate_angle: angle unresolvable at this bandwidth");
    ae.theta_hat = std::asin(arg);
    return ae;
}

EstimateReport estimate_intersection(const LaplacianResponse& response, double t) {
    const auto crossing = estimate_crossing(response);
    const auto angle = estimate_angle(response, crossing, t);
    EstimateReport rep;
    rep.s_hat = crossing.s_hat;
    rep.r_max_hat = angle.r_max_hat;
    rep.theta_hat = angle.theta_hat;
    rep.argmax_point.assign(response.point(crossing.argmax_idx).begin(),
                            response.point(crossing.argmax_idx).end());
    rep.argmin_point.assign(response.point(crossing.argmin_idx).begin(),
                            response.point(crossing.argmin_idx).end());
    rep.t_used = t;
    return rep;
}

namespace {

// Arc-length coordinates centered between the two extrema.
Vec centered_arc(const LaplacianResponse& response, const CrossingEstimate& ce) {
    const size_t m = response.size();
    Vec arc = response.arc;
    if (arc.size() != m) {
        arc.assign(m, 0.0);
        for (size_t i = 1; i < m; ++i)
            arc[i] = arc[i - 1] + dist(response.point(i), response.point(i - 1));
    }
    const double center = 0.5 * (arc[ce.argmax_idx] + arc[ce.argmin_idx]);
    for (auto& a : arc) a -= center;
    return arc;
}

double fit_sse(const Vec& u, const Vec& p, double c2, double* c1_out) {
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < u.size(); ++i) {
        const double phi = u[i] * std::exp(-c2 * u[i] * u[i]);
        num += phi * p[i];
        den += phi * phi;
    }
    const double c1 = den > 0.0 ? num / den : 0.0;
    if (c1_out) *c1_out = c1;
    double sse = 0.0;
    for (size_t i = 0; i < u.size(); ++i) {
        const double r = p[i] - c1 * u[i] * std::exp(-c2 * u[i] * u[i]);
        sse += r * r;
    }
    return sse;
}

}  // namespace

ProfileFit profile_fit_diagnostics(const LaplacianResponse& response) {
    if (response.size() < 10)
        throw std::invalid_argument("profile_fit_diagnostics: requires at least 10 points");
    ProfileFit fit;
    double p_norm2 = 0.0;
    for (double v : response.values) p_norm2 += v * v;
    if (p_norm2 == 0.0) {
        fit.singular = true;
        return fit;
    }
    CrossingEstimate ce;
    try {
        ce = estimate_crossing(response);
    } catch (const std::runtime_error&) {
        fit.singular = true;
        return fit;
    }
    const Vec u = centered_arc(response, ce);
    double umax = 0.0;
    for (double ui : u) umax = std::max(umax, std::abs(ui));
    if (umax == 0.0) {
        fit.singular = true;
        return fit;
    }

    // 1-D profile in c2 (c1 eliminated in closed form); golden section on a
    // log grid wide enough for any peak the arc range can hold.
    const double lo = std::log(1e-3 / (umax * umax));
    const double hi = std::log(1e7 / (umax * umax));
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = fit_sse(u, response.values, std::exp(c), nullptr);
    double fd = fit_sse(u, response.values, std::exp(d), nullptr);
    for (int it = 0; it < 200; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = fit_sse(u, response.values, std::exp(c), nullptr);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = fit_sse(u, response.values, std::exp(d), nullptr);
        }
    }
    fit.c2 = std::exp(0.5 * (a + b));
    const double sse = fit_sse(u, response.values, fit.c2, &fit.c1);
    fit.residual_ratio = std::sqrt(sse / p_norm2);
    if (fit.c1 == 0.0) fit.singular = true;
    return fit;
}

}  // namespace singul
