#pragma once

#include <cstddef>
#include <string>

#include "singul/laplacian.hpp"
#include "singul/vecmath.hpp"

namespace singul {

struct EstimateReport {
    Vec s_hat;
    double r_max_hat = 0.0;
    double theta_hat = 0.0;
    Vec argmax_point;
    Vec argmin_point;
    double t_used = 0.0;
    std::string to_json() const;
};

struct CrossingEstimate {
    Vec s_hat;
    size_t argmax_idx = 0;
    size_t argmin_idx = 0;
};

/// Crossing-point estimate: the midpoint of the curve points attaining the
/// maximum and minimum of the response. The discrete extrema are used as-is
/// (no interpolation). Requires a visible sign change.
CrossingEstimate estimate_crossing(const LaplacianResponse& response);

struct AngleEstimate {
    double r_max_hat = 0.0;
    double theta_hat = 0.0;
};

/// Angle from the peak offset: r̂ = ‖ŝ - argmax‖/√t, θ̂ = arcsin(1/(√2·r̂)).
/// Fails when r̂ < 1/√2 (profile peak closer than the bandwidth resolves).
AngleEstimate estimate_angle(const LaplacianResponse& response, const CrossingEstimate& crossing,
                             double t);

EstimateReport estimate_intersection(const LaplacianResponse& response, double t);

struct ProfileFit {
    double c1 = 0.0;
    double c2 = 0.0;
    double residual_ratio = 1.0;
    bool singular = false;
};

/// Least-squares fit of c1·u·exp(-c2·u²) to the response against arc length
/// centered at the crossing estimate.
ProfileFit profile_fit_diagnostics(const LaplacianResponse& response);

}  // namespace singul
