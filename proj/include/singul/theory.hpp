#pragma once

#include <optional>
#include <span>
#include <string>

#include "singul/manifold.hpp"
#include "singul/vecmath.hpp"

namespace singul {

/// Scaled local coordinates of an evaluation point x relative to a candidate
/// singular point x0 on a piece: ‖x-x0‖ = r√t, theta ∈ [0, π/2] is the angle
/// between x-x0 and its tangent-plane projection, and v_n is the component of
/// the probe direction along the unit normal pointing from the projection
/// x_hat toward x (zero when x lies on the plane).
struct LocalGeometry {
    Vec x0, x, x_hat;
    int piece_index = 0;
    int d = 0;
    double r = 0.0;
    double theta = 0.0;
    double v_n = 0.0;
    double r0 = 0.0;

    static LocalGeometry compute(const Scene& scene, int piece, std::span<const double> x,
                                 std::span<const double> v, double t, double r0);
};

/// Boundary-window coordinates: k0 is the signed distance (in √t units) of
/// x_hat to the boundary plane along the outward normal (negative inside the
/// piece), delta0 = sqrt(r0² - r² sin²θ) the scaled window radius.
struct BoundaryGeometry {
    double k0 = 0.0;
    double delta0 = 0.0;
    double v_n_boundary = 0.0;

    static BoundaryGeometry compute(const Scene& scene, const LocalGeometry& geom,
                                    std::span<const double> v, double t);
};

struct TermRange {
    double central = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

struct PredictionEnvelope {
    double central = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    TermRange signal;
    TermRange boundary;
    TermRange curvature;
    TermRange tail;
    double amplitude_exact = 0.0;  // incomplete-gamma evaluation of the signal amplitude

    bool contains(double value, double extra_tol = 0.0) const {
        return value >= lower - extra_tol && value <= upper + extra_tol;
    }
    std::string to_json() const;
};

/// Convention for the central signal amplitude (per-unit-density): the
/// envelope bounds pin it at π^{d/2}·p; a 2π^{d/2}·p variant is retained for
/// comparison and is rejected by the oracle-calibration test.
enum class AmplitudeConvention { PiHalfD, TwoPiHalfD };

/// Variant of the amplitude lower bound: Proof keeps the e^{-r0²} remainder
/// of the gamma tail; Statement uses the looser 2^{d/2} r0^{d-1} e^{-r0²+1}
/// form. Proof is the default.
enum class LowerBoundVariant { Proof, Statement };

/// Flat piece, boundary far: response envelope of the restricted expected
/// operator at x. area = |Ω| of the whole scene (uniform density 1/area).
PredictionEnvelope predict_flat_interior(const LocalGeometry& geom, double t, double area,
                                         AmplitudeConvention conv = AmplitudeConvention::PiHalfD,
                                         LowerBoundVariant variant = LowerBoundVariant::Proof);

/// Flat piece with a straight boundary inside the window. Rejects d = 1
/// (the boundary formulas involve gamma of (d-1)/2, degenerate there).
PredictionEnvelope predict_flat_boundary(const LocalGeometry& geom, const BoundaryGeometry& bgeom,
                                         double t, double area,
                                         AmplitudeConvention conv = AmplitudeConvention::PiHalfD,
                                         LowerBoundVariant variant = LowerBoundVariant::Proof);

/// Curvature-regular piece (constant L), off-manifold x.
PredictionEnvelope predict_general(const LocalGeometry& geom, double t, double L, double diam,
                                   double area,
                                   AmplitudeConvention conv = AmplitudeConvention::PiHalfD);

/// Curvature-regular piece, x on the piece: pure error band around zero.
PredictionEnvelope predict_general_on_manifold(int d, double r0, double t, double L, double diam,
                                               double area);

/// Two-piece union near a transversal intersection, evaluated at x on the
/// other piece: signal from the first piece plus doubled curvature/tail
/// allowances and the on-manifold term of the carrier piece.
PredictionEnvelope predict_intersection_sum(const LocalGeometry& geom1, double t, double L,
                                            double diam, double area,
                                            AmplitudeConvention conv = AmplitudeConvention::PiHalfD);

}  // namespace singul
