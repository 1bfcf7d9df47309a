#include "singul/theory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "singul/special.hpp"

namespace singul {

LocalGeometry LocalGeometry::compute(const Scene& scene, int piece, std::span<const double> x,
                                     std::span<const double> v, double t, double r0) {
    const ManifoldPiece& p = scene.pieces.at(piece);
    LocalGeometry g;
    g.piece_index = piece;
    g.d = p.intrinsic_dim;
    g.r0 = r0;
    g.x.assign(x.begin(), x.end());
    g.x0 = scene.intersection ? scene.intersection->x0 : p.anchor;

    // Tangent plane at x0 (equals the carrier plane for flat pieces).
    const Vec u0 = p.chart(g.x0);
    const Mat tf = p.tangent_frame_at(u0);
    const Vec rel = sub(x, g.x0);
    const Vec coeff = matvec_t(tf, rel);
    g.x_hat = g.x0;
    for (int k = 0; k < p.intrinsic_dim; ++k)
        for (int i = 0; i < p.ambient_dim; ++i) g.x_hat[i] += tf(i, k) * coeff[k];

    const double dist_full = norm(rel);
    g.r = dist_full / std::sqrt(t);
    if (dist_full < 1e-300) {
        g.theta = 0.0;
    } else {
        const double cos_theta = std::clamp(dist(g.x_hat, g.x0) / dist_full, 0.0, 1.0);
        g.theta = std::acos(cos_theta);
    }
    const Vec off = sub(x, g.x_hat);
    const double off_norm = norm(off);
    g.v_n = off_norm < 1e-14 ? 0.0 : dot(v, off) / off_norm;
    return g;
}

BoundaryGeometry BoundaryGeometry::compute(const Scene& scene, const LocalGeometry& geom,
                                           std::span<const double> v, double t) {
    if (!scene.boundary) throw std::invalid_argument("BoundaryGeometry: scene has no boundary face");
    const BoundaryFace& face = *scene.boundary;
    const ManifoldPiece& p = scene.pieces.at(face.piece);
    BoundaryGeometry b;
    const double plane = face.side > 0 ? p.extent.hi[face.axis] : p.extent.lo[face.axis];
    const Vec c = p.chart(geom.x_hat);
    b.k0 = face.side * (c[face.axis] - plane) / std::sqrt(t);
    Vec n_out = p.frame.col(face.axis);
    if (face.side < 0)
        for (auto& z : n_out) z = -z;
    b.v_n_boundary = dot(v, n_out);
    const double rs = geom.r * std::sin(geom.theta);
    const double d0sq = geom.r0 * geom.r0 - rs * rs;
    if (d0sq <= 0.0)
        throw std::domain_error("BoundaryGeometry: r·sin(theta) exceeds the window radius r0");
    b.delta0 = std::sqrt(d0sq);
    if (b.k0 < -b.delta0 - 1e-9 || b.k0 > b.delta0 + 1e-9)
        throw std::domain_error("BoundaryGeometry: k0 outside [-delta0, delta0]");
    b.k0 = std::clamp(b.k0, -b.delta0, b.delta0);
    return b;
}

std::string PredictionEnvelope::to_json() const {
    nlohmann::json j;
    j["central"] = central;
    j["lower"] = lower;
    j["upper"] = upper;
    j["amplitude_exact"] = amplitude_exact;
    auto term = [](const TermRange& t) {
        return nlohmann::json{{"central", t.central}, {"lo", t.lo}, {"hi", t.hi}};
    };
    j["terms"] = {{"signal", term(signal)},
                  {"boundary", term(boundary)},
                  {"curvature", term(curvature)},
                  {"tail", term(tail)}};
    return j.dump();
}

namespace {

constexpr double kSlack = 1e-12;

void require(bool ok, const std::string& what) {
    if (!ok) throw std::domain_error("theorem hypothesis violated: " + what);
}

void check_flat_hypotheses(const LocalGeometry& g) {
    require(g.d >= 1, "d >= 1");
    require(g.r0 > 2.0, "r0 > 2");
    require(g.r < 0.5 * g.r0, "r < r0/2");
    // t <= R²/(d/2+1) with R = r0·√t reduces to r0² >= d/2 + 1.
    require(g.r0 * g.r0 >= 0.5 * g.d + 1.0, "t <= R^2/(d/2+1)");
}

struct AmplitudeBounds {
    double lo = 0.0, hi = 0.0, exact = 0.0, central = 0.0;
};

// Bounds on the signal amplitude (density folded in): the window integral
// evaluates to p·π^{d/2}·P(d/2, r0² - (r sinθ)²) exactly, which the bounds
// bracket.
AmplitudeBounds amplitude_bounds(int d, double r0, double r_sin_theta, double p,
                                 AmplitudeConvention conv, LowerBoundVariant variant) {
    AmplitudeBounds a;
    const double pi_d2 = std::pow(M_PI, 0.5 * d);
    const double sphere = sphere_area(d);
    a.hi = p * pi_d2;
    const double lower_proof =
        0.5 * std::max(p * pi_d2,
                       2.0 * p * pi_d2 - p * sphere * std::pow(r0, d - 2) * std::exp(-r0 * r0));
    const double lower_statement =
        0.5 * std::max(p * pi_d2,
                       p * (2.0 * pi_d2 - sphere * std::pow(2.0, 0.5 * d) * std::pow(r0, d - 1) *
                                              std::exp(-r0 * r0 + 1.0)));
    a.lo = variant == LowerBoundVariant::Proof ? lower_proof : lower_statement;
    a.exact = p * pi_d2 * gamma_p(0.5 * d, r0 * r0 - r_sin_theta * r_sin_theta);
    a.central = (conv == AmplitudeConvention::PiHalfD ? 1.0 : 2.0) * p * pi_d2;
    return a;
}

TermRange signed_product(double lo_coeff, double hi_coeff, double central_coeff, double factor) {
    TermRange t;
    t.central = central_coeff * factor;
    t.lo = std::min(lo_coeff * factor, hi_coeff * factor);
    t.hi = std::max(lo_coeff * factor, hi_coeff * factor);
    return t;
}

TermRange symmetric_band(double magnitude) {
    TermRange t;
    t.lo = -std::abs(magnitude);
    t.hi = std::abs(magnitude);
    return t;
}

PredictionEnvelope assemble(const TermRange& signal, const TermRange& boundary,
                            const TermRange& curvature, const TermRange& tail) {
    PredictionEnvelope e;
    e.signal = signal;
    e.boundary = boundary;
    e.curvature = curvature;
    e.tail = tail;
    e.central = signal.central + boundary.central + curvature.central + tail.central;
    e.lower = signal.lo + boundary.lo + curvature.lo + tail.lo;
    e.upper = signal.hi + boundary.hi + curvature.hi + tail.hi;
    const double slack = kSlack * std::max(1.0, std::abs(e.central));
    e.lower -= slack;
    e.upper += slack;
    return e;
}

double tail_magnitude(int d, double r0, double p, double t) {
    const double b_bound = 0.25 * (d + 1) * std::pow(r0, d) * p * sphere_area(d);
    return b_bound * std::pow(t, 0.5 * (d + 1)) * std::exp(-r0 * r0);
}

double curvature_coefficient_bound(double L, double R, double t) {
    const double l4r2 = L * 4.0 * R * R;
    return 4.0 * l4r2 * l4r2 * R / t + L * R * R * (1.0 + 4.0 * L * R * R);
}

void check_general_hypotheses(const LocalGeometry& g, double t, double L) {
    check_flat_hypotheses(g);
    const double R = g.r0 * std::sqrt(t);
    require(L * 4.0 * R * R / std::sqrt(t) <= 0.5, "L·4R²/√t <= 1/2");
}

}  // namespace

PredictionEnvelope predict_flat_interior(const LocalGeometry& geom, double t, double area,
                                         AmplitudeConvention conv, LowerBoundVariant variant) {
    check_flat_hypotheses(geom);
    const double p = 1.0 / area;
    const double st = std::sin(geom.theta);
    const auto amp = amplitude_bounds(geom.d, geom.r0, geom.r * st, p, conv, variant);
    const double shape = geom.v_n * geom.r * st * std::exp(-geom.r * geom.r * st * st) *
                         std::pow(t, 0.5 * (geom.d + 1));
    PredictionEnvelope e = assemble(signed_product(amp.lo, amp.hi, amp.central, shape),
                                    TermRange{}, TermRange{},
                                    symmetric_band(tail_magnitude(geom.d, geom.r0, p, t)));
    e.amplitude_exact = amp.exact;
    return e;
}

PredictionEnvelope predict_flat_boundary(const LocalGeometry& geom, const BoundaryGeometry& bgeom,
                                         double t, double area, AmplitudeConvention conv,
                                         LowerBoundVariant variant) {
    check_flat_hypotheses(geom);
    if (geom.d < 2)
        throw std::domain_error(
            "predict_flat_boundary: d = 1 unsupported (the (d-1)/2 gamma arguments degenerate)");
    const double p = 1.0 / area;
    const double a = 0.5 * (geom.d - 1);
    const double d0 = bgeom.delta0, k0 = bgeom.k0;
    const double y = std::max(0.0, d0 * d0 - k0 * k0);
    const double half_sphere = 0.5 * sphere_area(geom.d - 1);  // |S^{d-2}|/2
    const double gamma_y = y == 0.0 ? 0.0 : gamma_lower(a, y);

    // Window mass J per unit density, bracketed by the partial-integration
    // lower estimate and the full-line Gaussian upper estimate.
    const double j_hi = gamma_complete(a) * std::sqrt(M_PI);
    double j_lo = (std::exp(-k0 * k0) * gamma_y -
                   (variant == LowerBoundVariant::Proof ? std::exp(-d0 * d0) : 1.0) * 2.0 *
                       std::pow(y, a) / (geom.d - 1)) /
                  (2.0 * d0);
    j_lo = std::clamp(j_lo, 0.0, j_hi);

    const double st = std::sin(geom.theta);
    const double atten = std::exp(-geom.r * geom.r * st * st);
    const double t_pow = std::pow(t, 0.5 * (geom.d + 1));
    const double s1 = geom.v_n * geom.r * st * atten * t_pow;
    const TermRange signal = signed_product(p * half_sphere * j_lo, p * half_sphere * j_hi,
                                            p * half_sphere * 0.5 * (j_lo + j_hi), s1);

    // Exact boundary term: the normal-coordinate window integral evaluates to
    //   W = ½ e^{-k0²} γ(a, δ0²-k0²) - e^{-δ0²} (δ0²-k0²)^{(d-1)/2}/(d-1),
    // oriented along the outward boundary normal.
    const double w = 0.5 * std::exp(-k0 * k0) * gamma_y -
                     std::exp(-d0 * d0) * std::pow(y, 0.5 * (geom.d - 1)) / (geom.d - 1);
    const double s2 = bgeom.v_n_boundary * atten * t_pow;
    TermRange boundary;
    boundary.central = p * half_sphere * w * s2;
    boundary.lo = boundary.hi = boundary.central;

    PredictionEnvelope e = assemble(signal, boundary, TermRange{},
                                    symmetric_band(tail_magnitude(geom.d, geom.r0, p, t)));
    const auto amp = amplitude_bounds(geom.d, geom.r0, geom.r * st, p, conv, variant);
    e.amplitude_exact = amp.exact;
    return e;
}

PredictionEnvelope predict_general(const LocalGeometry& geom, double t, double L, double diam,
                                   double area, AmplitudeConvention conv) {
    check_general_hypotheses(geom, t, L);
    const double p = 1.0 / area;
    const double R = geom.r0 * std::sqrt(t);
    const double c_bound = curvature_coefficient_bound(L, R, t);
    const double st = std::sin(geom.theta);
    const auto amp =
        amplitude_bounds(geom.d, geom.r0, geom.r * st, p, conv, LowerBoundVariant::Proof);
    // |A - Â| <= (1+3C)·A with Â > 0, so Â ranges over [0, (2+3C)·A_hi].
    const double hat_hi = (2.0 + 3.0 * c_bound) * amp.hi;
    const double shape = geom.v_n * geom.r * st * std::exp(-geom.r * geom.r * st * st) *
                         std::pow(t, 0.5 * (geom.d + 1));
    const TermRange signal = signed_product(0.0, hat_hi, amp.central, shape);
    const double pi_d2 = std::pow(M_PI, 0.5 * geom.d);
    const TermRange curvature =
        symmetric_band(std::pow(t, 0.5 * geom.d) * c_bound * 4.0 * p * pi_d2);
    const TermRange tail = symmetric_band(diam * std::exp(-geom.r0 * geom.r0));
    PredictionEnvelope e = assemble(signal, TermRange{}, curvature, tail);
    e.amplitude_exact = amp.exact;
    return e;
}

PredictionEnvelope predict_general_on_manifold(int d, double r0, double t, double L, double diam,
                                               double area) {
    require(d >= 1, "d >= 1");
    require(r0 > 2.0, "r0 > 2");
    require(r0 * r0 >= 0.5 * d + 1.0, "t <= R^2/(d/2+1)");
    const double R = r0 * std::sqrt(t);
    require(L * 4.0 * R * R / std::sqrt(t) <= 0.5, "L·4R²/√t <= 1/2");
    const double p = 1.0 / area;
    const double c_bound = curvature_coefficient_bound(L, R, t);
    const double pi_d2 = std::pow(M_PI, 0.5 * d);
    const double hat_hi = (2.0 + 3.0 * c_bound) * p * pi_d2;
    const double t_d2 = std::pow(t, 0.5 * d);
    const TermRange signal = symmetric_band(t_d2 * hat_hi * L * R * R);
    const TermRange curvature = symmetric_band(t_d2 * c_bound * 4.0 * p * pi_d2);
    const TermRange tail = symmetric_band(diam * std::exp(-r0 * r0));
    return assemble(signal, TermRange{}, curvature, tail);
}

PredictionEnvelope predict_intersection_sum(const LocalGeometry& geom1, double t, double L,
                                            double diam, double area, AmplitudeConvention conv) {
    check_general_hypotheses(geom1, t, L);
    const double p = 1.0 / area;
    const double R = geom1.r0 * std::sqrt(t);
    const double c_bound = curvature_coefficient_bound(L, R, t);
    const double st = std::sin(geom1.theta);
    const auto amp =
        amplitude_bounds(geom1.d, geom1.r0, geom1.r * st, p, conv, LowerBoundVariant::Proof);
    const double hat_hi = (2.0 + 3.0 * c_bound) * amp.hi;
    const double shape = geom1.v_n * geom1.r * st * std::exp(-geom1.r * geom1.r * st * st) *
                         std::pow(t, 0.5 * (geom1.d + 1));
    const TermRange signal = signed_product(0.0, hat_hi, amp.central, shape);
    const double pi_d2 = std::pow(M_PI, 0.5 * geom1.d);
    const double t_d2 = std::pow(t, 0.5 * geom1.d);
    // Carrier-piece contribution (x lies on the second piece) plus doubled
    // curvature and tail allowances.
    const TermRange carrier = symmetric_band(t_d2 * hat_hi * L * R * R);
    const TermRange curvature = symmetric_band(t_d2 * c_bound * 8.0 * p * pi_d2);
    const TermRange tail = symmetric_band(2.0 * diam * std::exp(-geom1.r0 * geom1.r0));
    PredictionEnvelope e = assemble(signal, carrier, curvature, tail);
    e.amplitude_exact = amp.exact;
    return e;
}

}  // namespace singul
