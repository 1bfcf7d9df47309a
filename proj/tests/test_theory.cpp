#include <doctest.h>

#include <cmath>

#include "singul/gauss.hpp"
#include "singul/laplacian.hpp"
#include "singul/manifold.hpp"
#include "singul/rng.hpp"
#include "singul/special.hpp"
#include "singul/theory.hpp"

using namespace singul;

namespace {

// Place x at scaled polar coordinates (r, theta) relative to x0: in-plane
// direction dir_t (unit, tangent), off-plane direction dir_n (unit, normal).
Vec place_point(const Vec& x0, const Vec& dir_t, const Vec& dir_n, double r, double theta,
                double t) {
    Vec x = x0;
    const double rt = r * std::sqrt(t);
    axpy(rt * std::cos(theta), dir_t, x);
    axpy(rt * std::sin(theta), dir_n, x);
    return x;
}

}  // namespace

TEST_CASE("flat interior: geometry invariants and the analytic peak value") {
    // Unit-area piece so the density factor is 1.
    const Scene s = make_plane_scene(3, 2, {0.5, 0.5});
    const double t = 1e-3, r0 = 6.0;
    const Vec x0(3, 0.0);
    const Vec dir_t{1.0, 0.0, 0.0}, dir_n{0.0, 0.0, 1.0};
    const double r = 1.0 / std::sqrt(2.0), theta = 0.5 * M_PI;
    const Vec x = place_point(x0, dir_t, dir_n, r, theta, t);
    const Vec v = dir_n;  // v_n = 1

    const auto geom = LocalGeometry::compute(s, 0, x, v, t, r0);
    CHECK(geom.r == doctest::Approx(r).epsilon(1e-12));
    CHECK(geom.theta == doctest::Approx(theta).epsilon(1e-9));
    CHECK(geom.v_n == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dist(geom.x_hat, geom.x) ==
          doctest::Approx(geom.r * std::sqrt(t) * std::sin(geom.theta)).epsilon(1e-12));

    const auto env = predict_flat_interior(geom, t, s.total_area());
    const double expect = std::pow(t, 1.5) * M_PI * r * std::exp(-0.5);
    CHECK(env.signal.central == doctest::Approx(expect).epsilon(1e-12));
    CHECK(env.lower <= env.central);
    CHECK(env.central <= env.upper);

    // The quadrature oracle lands inside the envelope and near the center.
    const auto orc = expected_laplacian_oracle(s, 0, x, v, t, 64, 1e-13);
    CHECK(orc.converged);
    CHECK(env.contains(orc.value, orc.error));
    CHECK(orc.value == doctest::Approx(env.central).epsilon(1e-3));
}

TEST_CASE("flat interior: theta = 0 leaves only the tail band") {
    const Scene s = make_plane_scene(3, 2, {0.5, 0.5});
    const double t = 1e-3, r0 = 6.0;
    const Vec x{0.02, 0.0, 0.0};  // in-plane offset: theta = 0
    Rng rng(1);
    const Vec v = rng.unit_vector(3);
    const auto geom = LocalGeometry::compute(s, 0, x, v, t, r0);
    CHECK(geom.theta == doctest::Approx(0.0).epsilon(1e-9));
    const auto env = predict_flat_interior(geom, t, s.total_area());
    CHECK(env.signal.central == 0.0);
    CHECK(env.upper <= 2e-12);
    CHECK(env.lower >= -2e-12);
}

TEST_CASE("flat interior: amplitude convention calibrated by the oracle") {
    const Scene s = make_plane_scene(3, 2, {0.5, 0.5});
    const double t = 1e-3, r0 = 6.0;
    const Vec x0(3, 0.0);
    const Vec x = place_point(x0, Vec{0.0, 1.0, 0.0}, Vec{0.0, 0.0, 1.0}, 0.9, 0.9, t);
    const Vec v{0.0, 0.0, 1.0};
    const auto geom = LocalGeometry::compute(s, 0, x, v, t, r0);
    const auto orc = expected_laplacian_oracle(s, 0, x, v, t, 64, 1e-13);
    const auto pi_env = predict_flat_interior(geom, t, 1.0, AmplitudeConvention::PiHalfD);
    const auto two_pi_env = predict_flat_interior(geom, t, 1.0, AmplitudeConvention::TwoPiHalfD);
    CHECK(std::abs(orc.value - pi_env.central) < 0.05 * std::abs(pi_env.central));
    CHECK(std::abs(orc.value - two_pi_env.central) > 0.4 * std::abs(two_pi_env.central));
    // The exact amplitude sits inside the bound bracket.
    CHECK(pi_env.amplitude_exact <= M_PI + 1e-12);
    CHECK(pi_env.amplitude_exact >= 0.5 * M_PI - 1e-12);
}

TEST_CASE("flat interior: oracle containment across random admissible configs") {
    const Scene s = make_plane_scene(3, 2, {1.0, 1.0});
    const double t = 1e-3, r0 = 6.0;
    Rng rng(77);
    const Vec x0(3, 0.0);
    for (int it = 0; it < 10; ++it) {
        const double r = rng.uniform(0.1, 2.9);
        const double theta = rng.uniform(0.0, 0.5 * M_PI);
        const double phi = rng.uniform(0.0, 2.0 * M_PI);
        const Vec dir_t{std::cos(phi), std::sin(phi), 0.0};
        const Vec dir_n{0.0, 0.0, 1.0};
        const Vec x = place_point(x0, dir_t, dir_n, r, theta, t);
        const Vec v = rng.unit_vector(3);
        const auto geom = LocalGeometry::compute(s, 0, x, v, t, r0);
        const auto env = predict_flat_interior(geom, t, s.total_area());
        const auto orc = expected_laplacian_oracle(s, 0, x, v, t, 64, 1e-13);
        CHECK(orc.converged);
        CHECK(env.contains(orc.value, orc.error));
    }
}

TEST_CASE("theorem hypotheses are enforced by name") {
    const Scene s = make_plane_scene(3, 2, {0.5, 0.5});
    const double t = 1e-3;
    const Vec x{0.01, 0.0, 0.02};
    const Vec v{0.0, 0.0, 1.0};
    CHECK_THROWS_WITH_AS(
        predict_flat_interior(LocalGeometry::compute(s, 0, x, v, t, 1.5), t, 1.0),
        doctest::Contains("r0 > 2"), std::domain_error);
    const Vec far = place_point(Vec(3, 0.0), Vec{1, 0, 0}, Vec{0, 0, 1}, 4.0, 0.3, t);
    CHECK_THROWS_WITH_AS(
        predict_flat_interior(LocalGeometry::compute(s, 0, far, v, t, 6.0), t, 1.0),
        doctest::Contains("r < r0/2"), std::domain_error);
}

TEST_CASE("signal shape peaks at r = 1/(√2 sinθ)") {
    const Scene s = make_plane_scene(3, 2, {1.0, 1.0});
    const double t = 1e-3, r0 = 6.0;
    const Vec x0(3, 0.0);
    const Vec dir_t{1.0, 0.0, 0.0}, dir_n{0.0, 0.0, 1.0};
    const Vec v = dir_n;
    for (double theta : {0.5 * M_PI, 0.25 * M_PI, 0.125 * M_PI}) {
        auto central_at = [&](double r) {
            const Vec x = place_point(x0, dir_t, dir_n, r, theta, t);
            const auto geom = LocalGeometry::compute(s, 0, x, v, t, r0);
            return std::abs(predict_flat_interior(geom, t, s.total_area()).central);
        };
        // Golden-section maximization over r.
        double a = 0.05, b = std::min(2.9, 2.5 / std::sin(theta));
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double c = b - gr * (b - a), d = a + gr * (b - a);
        for (int i = 0; i < 80; ++i) {
            if (central_at(c) < central_at(d))
                a = c, c = d, d = a + gr * (b - a);
            else
                b = d, d = c, c = b - gr * (b - a);
        }
        const double r_star = 0.5 * (a + b);
        CHECK(r_star == doctest::Approx(1.0 / (std::sqrt(2.0) * std::sin(theta))).epsilon(1e-4));
    }
}

TEST_CASE("boundary term: closed form matches direct quadrature of the window integrals") {
    // The one-dimensional h-integrals behind the boundary prediction.
    for (int d : {2, 3}) {
        const double a = 0.5 * (d - 1);
        for (double d0 : {2.2, 3.5, 6.0}) {
            for (double k0 : {-0.999 * d0, -1.5, -0.3, 0.0, 0.4, 1.2, 0.999 * d0}) {
                if (std::abs(k0) > d0) continue;
                const double y = d0 * d0 - k0 * k0;
                // W = ∫_{k0}^{d0} h e^{-h²} γ(a, d0²-h²) dh
                const double w_quad = integrate_1d_adaptive(
                    [&](double h) {
                        const double arg = d0 * d0 - h * h;
                        return h * std::exp(-h * h) * (arg <= 0 ? 0.0 : gamma_lower(a, arg));
                    },
                    k0, d0, 1e-14);
                const double w_closed = 0.5 * std::exp(-k0 * k0) *
                                            (y == 0.0 ? 0.0 : gamma_lower(a, y)) -
                                        std::exp(-d0 * d0) * std::pow(y, a) / (d - 1);
                CHECK(w_closed == doctest::Approx(w_quad).epsilon(1e-8));

                // J = ∫_{-d0}^{-k0} e^{-h²} γ(a, d0²-h²) dh sits inside its bounds.
                const double j_quad = integrate_1d_adaptive(
                    [&](double h) {
                        const double arg = d0 * d0 - h * h;
                        return std::exp(-h * h) * (arg <= 0 ? 0.0 : gamma_lower(a, arg));
                    },
                    -d0, -k0, 1e-13);
                const double j_hi = gamma_complete(a) * std::sqrt(M_PI);
                const double j_lo =
                    (std::exp(-k0 * k0) * (y == 0.0 ? 0.0 : gamma_lower(a, y)) -
                     std::exp(-d0 * d0) * 2.0 * std::pow(y, a) / (d - 1)) /
                    (2.0 * d0);
                CHECK(j_quad <= j_hi * (1.0 + 1e-12));
                CHECK(j_quad >= j_lo - 1e-12);
            }
        }
    }
}

TEST_CASE("boundary prediction: half-plane oracle containment and exact terms") {
    const Scene s = make_halfplane_scene(3, 2, 1.0);
    const double t = 1e-3, r0 = 6.0;
    Rng rng(42);
    // x0 at assorted depths inside the boundary; x at assorted (r, theta).
    for (int it = 0; it < 12; ++it) {
        const double depth = rng.uniform(0.0, 4.0) * std::sqrt(t);
        Vec x0{-depth, rng.uniform(-0.2, 0.2), 0.0};
        const double r = rng.uniform(0.1, 2.9);
        const double theta = rng.uniform(0.0, 0.5 * M_PI);
        const double phi = rng.uniform(0.0, 2.0 * M_PI);
        const Vec dir_t{std::cos(phi), std::sin(phi), 0.0};
        const Vec dir_n{0.0, 0.0, 1.0};
        const Vec x = place_point(x0, dir_t, dir_n, r, theta, t);
        const Vec v = rng.unit_vector(3);

        Scene local = s;  // anchor the geometry at this x0
        local.intersection = IntersectionMeta{x0, 0.0, 0};
        const auto geom = LocalGeometry::compute(local, 0, x, v, t, r0);
        const auto bgeom = BoundaryGeometry::compute(local, geom, v, t);
        const double rs = geom.r * std::sin(geom.theta);
        CHECK(bgeom.delta0 * bgeom.delta0 + rs * rs == doctest::Approx(r0 * r0).epsilon(1e-12));
        const auto env = predict_flat_boundary(geom, bgeom, t, local.total_area());
        const auto orc = expected_laplacian_oracle(local, 0, x, v, t, 64, 1e-13);
        CHECK(orc.converged);
        CHECK(env.contains(orc.value, orc.error));
    }

    // x on the boundary itself, v along the outward normal: the response is
    // the boundary term alone; compare to the oracle directly.
    Vec x0{0.0, 0.0, 0.0};
    Scene local = s;
    local.intersection = IntersectionMeta{x0, 0.0, 0};
    const Vec v{1.0, 0.0, 0.0};  // outward boundary normal
    const auto geom = LocalGeometry::compute(local, 0, x0, v, t, r0);
    const auto bgeom = BoundaryGeometry::compute(local, geom, v, t);
    CHECK(bgeom.k0 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(bgeom.v_n_boundary == doctest::Approx(1.0));
    const auto env = predict_flat_boundary(geom, bgeom, t, local.total_area());
    const auto orc = expected_laplacian_oracle(local, 0, x0, v, t, 64, 1e-13);
    CHECK(env.contains(orc.value, orc.error));
    CHECK(orc.value == doctest::Approx(env.boundary.central).epsilon(1e-4));

    // v orthogonal to both normals: all signal terms vanish.
    const Vec v_t{0.0, 1.0, 0.0};
    const auto geom2 = LocalGeometry::compute(local, 0, x0, v_t, t, r0);
    const auto bgeom2 = BoundaryGeometry::compute(local, geom2, v_t, t);
    const auto env2 = predict_flat_boundary(geom2, bgeom2, t, local.total_area());
    CHECK(env2.signal.central == 0.0);
    CHECK(env2.boundary.central == 0.0);

    // d = 1 is rejected.
    LocalGeometry g1;
    g1.d = 1;
    g1.r = 0.5;
    g1.theta = 0.3;
    g1.r0 = 6.0;
    CHECK_THROWS_AS(predict_flat_boundary(g1, bgeom, t, 1.0), std::domain_error);
}

TEST_CASE("general prediction: flat limit and curved containment") {
    const double t = 5e-4, r0 = 3.0;
    const Vec x0(3, 0.0);

    // L = 0: envelope reduces to the flat structure (zero curvature band).
    const Scene flat = make_plane_scene(3, 2, {0.5, 0.5});
    const Vec x = place_point(x0, Vec{1, 0, 0}, Vec{0, 0, 1}, 1.2, 0.7, t);
    const Vec v{0.0, 0.0, 1.0};
    const auto geom = LocalGeometry::compute(flat, 0, x, v, t, r0);
    const auto env0 = predict_general(geom, t, 0.0, 2.0, flat.total_area());
    CHECK(env0.curvature.hi == 0.0);
    const auto fenv = predict_flat_interior(geom, t, flat.total_area());
    CHECK(env0.central == doctest::Approx(fenv.central).epsilon(1e-12));
    CHECK(env0.lower <= fenv.lower + 1e-15);
    CHECK(env0.upper >= fenv.upper - 1e-15);

    // Curved scene, L = 0.5: oracle inside the envelope off-manifold.
    const Scene curved = make_intersection_scene(3, 2, M_PI / 4.0, true, 0.5, {0.5, 0.5});
    const double diam = 2.0;
    Rng rng(9);
    for (int it = 0; it < 8; ++it) {
        const double r = rng.uniform(0.1, 1.45);
        const double theta = rng.uniform(0.0, 0.5 * M_PI);
        const Vec xx = place_point(x0, Vec{1, 0, 0}, Vec{0, 0, 1}, r, theta, t);
        const Vec vv = rng.unit_vector(3);
        const auto g = LocalGeometry::compute(curved, 0, xx, vv, t, r0);
        const auto env = predict_general(g, t, 0.5, diam, curved.total_area());
        const auto orc = expected_laplacian_oracle(curved, 0, xx, vv, t, 64, 1e-13);
        CHECK(orc.converged);
        CHECK(env.contains(orc.value, orc.error));
    }

    // Hypothesis gate: L·4R²/√t must stay below 1/2.
    CHECK_THROWS_WITH_AS(predict_general(geom, 1e-3, 40.0, 2.0, 1.0),
                         doctest::Contains("L·4R²"), std::domain_error);
}

TEST_CASE("on-manifold error band and two-piece intersection sum") {
    const double t = 5e-4, r0 = 3.0;
    const Scene curved = make_intersection_scene(3, 2, M_PI / 4.0, true, 0.5, {0.5, 0.5});
    const double area = curved.total_area(), diam = 2.0;
    Rng rng(15);

    // On-manifold: the restricted operator stays inside the error band.
    for (int it = 0; it < 6; ++it) {
        Vec u{rng.uniform(-0.03, 0.03), rng.uniform(-0.03, 0.03)};
        const Vec xx = curved.pieces[0].embed(u);
        const Vec vv = rng.unit_vector(3);
        const auto band = predict_general_on_manifold(2, r0, t, 0.5, diam, area);
        const auto orc = expected_laplacian_oracle(curved, 0, xx, vv, t, 64, 1e-13);
        CHECK(band.contains(orc.value, orc.error));
    }

    // Two-piece case: full operator at x on piece 2, signal read from piece 1.
    for (int it = 0; it < 6; ++it) {
        Vec u{rng.uniform(-0.025, 0.025), rng.uniform(-0.025, 0.025)};
        const Vec xx = curved.pieces[1].embed(u);
        const Vec vv = rng.unit_vector(3);
        const auto g1 = LocalGeometry::compute(curved, 0, xx, vv, t, r0);
        const auto env = predict_intersection_sum(g1, t, 0.5, diam, area);
        const auto full = expected_laplacian_full(curved, xx, vv, t, 64, 1e-13);
        CHECK(env.contains(full.value, full.error));
    }
}

TEST_CASE("envelope serializes with its term breakdown") {
    const Scene s = make_plane_scene(3, 2, {0.5, 0.5});
    const double t = 1e-3;
    const Vec x = place_point(Vec(3, 0.0), Vec{1, 0, 0}, Vec{0, 0, 1}, 0.7, 0.9, t);
    const Vec v{0.0, 0.0, 1.0};
    const auto geom = LocalGeometry::compute(s, 0, x, v, t, 6.0);
    const auto env = predict_flat_interior(geom, t, 1.0);
    const std::string j = env.to_json();
    CHECK(j.find("\"signal\"") != std::string::npos);
    CHECK(j.find("\"tail\"") != std::string::npos);
    CHECK(j.find("\"central\"") != std::string::npos);
}
