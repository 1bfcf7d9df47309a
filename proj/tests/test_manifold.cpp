#include <doctest.h>

#include <cmath>
#include <vector>

#include "singul/gauss.hpp"
#include "singul/manifold.hpp"
#include "singul/rng.hpp"
#include "singul/vecmath.hpp"

using namespace singul;

namespace {

// Empirical curvature ratios against the tangent plane at a random base point.
// Returns max over pairs of ‖y - proj(y)‖ / ‖x - proj(y)‖².
double lr_bound1_ratio(const ManifoldPiece& p, size_t pairs, uint64_t seed) {
    Rng rng(seed);
    double worst = 0.0;
    Vec u0(p.intrinsic_dim), u1(p.intrinsic_dim);
    for (size_t it = 0; it < pairs; ++it) {
        for (int k = 0; k < p.intrinsic_dim; ++k) {
            u0[k] = rng.uniform(p.extent.lo[k], p.extent.hi[k]);
            u1[k] = rng.uniform(p.extent.lo[k], p.extent.hi[k]);
        }
        const Vec x = p.embed(u0);
        const Vec y = p.embed(u1);
        const Mat tf = p.tangent_frame_at(u0);
        // Project y onto the affine tangent plane at x.
        const Vec rel = sub(y, x);
        const Vec coeff = matvec_t(tf, rel);
        Vec proj = x;
        for (int k = 0; k < p.intrinsic_dim; ++k)
            for (int i = 0; i < p.ambient_dim; ++i) proj[i] += tf(i, k) * coeff[k];
        const double dperp = dist(y, proj);
        const double dpar2 = dist2(x, proj);
        if (dpar2 > 1e-8) worst = std::max(worst, dperp / dpar2);
    }
    return worst;
}

}  // namespace

TEST_CASE("orthogonal flat intersection scene") {
    const Scene s = make_intersection_scene(3, 2, M_PI / 2.0, false, 0.0, {1.0, 1.0});
    REQUIRE(s.pieces.size() == 2);
    const Vec t1 = s.pieces[0].frame.col(1);
    const Vec t2 = s.pieces[1].frame.col(1);
    CHECK(std::abs(dot(t1, t2)) < 1e-12);
    REQUIRE(s.intersection.has_value());
    for (const auto& p : s.pieces) CHECK(p.on_piece_residual(s.intersection->x0) <= 1e-10);
}

TEST_CASE("angled flat scene hits the requested dihedral angle") {
    const double theta = M_PI / 4.0;
    const Scene s = make_intersection_scene(3, 2, theta, false, 0.0, {1.0, 1.0});
    const Vec t1 = s.pieces[0].frame.col(1);
    const Vec t2 = s.pieces[1].frame.col(1);
    CHECK(std::acos(dot(t1, t2)) == doctest::Approx(theta).epsilon(1e-12));
    CHECK_THROWS_AS(make_intersection_scene(3, 2, 0.0, false, 0.0, {1.0, 1.0}),
                    std::invalid_argument);
}

TEST_CASE("curved scene: certified curvature holds empirically") {
    const double L = 0.5;
    const Scene s = make_intersection_scene(3, 2, M_PI / 4.0, true, L, {1.0, 1.0});
    for (const auto& p : s.pieces) {
        CHECK(p.curvature_bound == doctest::Approx(L));
        const double ratio = lr_bound1_ratio(p, 10000, 99);
        CHECK(ratio <= L * 1.05);
        CHECK(ratio >= L * 0.5);  // the bound is attained near flat base points
    }
    // Tangent planes at x0 still meet at theta.
    const Vec u0(2, 0.0);
    const Mat tf1 = s.pieces[0].tangent_frame_at(u0);
    const Mat tf2 = s.pieces[1].tangent_frame_at(u0);
    CHECK(std::acos(dot(tf1.col(1), tf2.col(1))) == doctest::Approx(M_PI / 4.0).epsilon(1e-10));
}

TEST_CASE("curved scene: volume-form bound holds empirically") {
    // Chart over the tangent plane at embed(u0): the volume form there is
    // sec of the slope change, and must stay within L·(tangential dist)² of 1.
    const double L = 0.5;
    const Scene s = make_intersection_scene(3, 2, M_PI / 2.0, true, L, {1.0, 1.0});
    const ManifoldPiece& p = s.pieces[0];
    Rng rng(123);
    Vec u0(2), u1(2);
    for (int it = 0; it < 10000; ++it) {
        for (int k = 0; k < 2; ++k) {
            u0[k] = rng.uniform(p.extent.lo[k], p.extent.hi[k]);
            u1[k] = rng.uniform(p.extent.lo[k], p.extent.hi[k]);
        }
        const Vec x = p.embed(u0);
        const Vec y = p.embed(u1);
        const Mat tf = p.tangent_frame_at(u0);
        const Vec rel = sub(y, x);
        const Vec coeff = matvec_t(tf, rel);
        double par2 = 0.0;
        for (double c : coeff) par2 += c * c;
        if (par2 < 1e-10) continue;
        const double dphi = std::atan(p.bend_coeff * u1[p.bend_axis]) -
                            std::atan(p.bend_coeff * u0[p.bend_axis]);
        const double vform = 1.0 / std::cos(dphi);
        CHECK(std::abs(vform - 1.0) <= L * 1.05 * par2 + 1e-9);
    }
}

TEST_CASE("flat charts are isometries") {
    const Scene s = make_intersection_scene(3, 2, M_PI / 3.0, false, 0.0, {1.5, 0.5});
    Rng rng(7);
    for (const auto& p : s.pieces) {
        for (int it = 0; it < 200; ++it) {
            Vec a(2), b(2);
            for (int k = 0; k < 2; ++k) {
                a[k] = rng.uniform(p.extent.lo[k], p.extent.hi[k]);
                b[k] = rng.uniform(p.extent.lo[k], p.extent.hi[k]);
            }
            CHECK(dist(p.embed(a), p.embed(b)) == doctest::Approx(dist(a, b)).epsilon(1e-12));
        }
    }
}

TEST_CASE("uniform sampling: stratified counts on a flat square") {
    const Scene s = make_plane_scene(3, 2, {0.5, 0.5});
    const size_t n = 100000;
    const PointCloud cloud = sample_uniform(s, {n}, 4242);
    REQUIRE(cloud.size() == n);
    // 10-cell stratification along u0.
    std::vector<int> bins(10, 0);
    for (size_t i = 0; i < n; ++i) {
        const Vec u = s.pieces[0].chart(cloud.point(i));
        int b = static_cast<int>((u[0] + 0.5) * 10.0);
        b = std::min(9, std::max(0, b));
        bins[b]++;
    }
    const double expect = n / 10.0;
    const double sigma = std::sqrt(n * 0.1 * 0.9);
    for (int b = 0; b < 10; ++b) CHECK(std::abs(bins[b] - expect) <= 4.0 * sigma);

    // chi-square over the 10 bins at level 0.01 (critical value, 9 dof).
    double chi2 = 0.0;
    for (int b = 0; b < 10; ++b) chi2 += (bins[b] - expect) * (bins[b] - expect) / expect;
    CHECK(chi2 < 21.67);
}

TEST_CASE("sampling is deterministic in the seed") {
    const Scene s = make_intersection_scene(3, 2, M_PI / 2.0, false, 0.0, {1.0, 1.0});
    const PointCloud a = sample_uniform(s, {500, 500}, 99);
    const PointCloud b = sample_uniform(s, {500, 500}, 99);
    CHECK(a.pts == b.pts);
    CHECK(a.labels == b.labels);
    const PointCloud c = sample_uniform(s, {500, 500}, 100);
    CHECK(a.pts != c.pts);
}

TEST_CASE("curved sampling matches the area-weighted marginal") {
    const double L = 0.5;
    const Scene s = make_intersection_scene(3, 2, M_PI / 2.0, true, L, {1.0, 1.0});
    const ManifoldPiece& p = s.pieces[0];
    const size_t n = 100000;
    const PointCloud cloud = sample_uniform(s, {n, 0}, 31337);
    // Histogram over the bent axis; reference masses from quadrature of the
    // volume form.
    const int bins = 20;
    std::vector<double> emp(bins, 0.0), ref(bins, 0.0);
    for (size_t i = 0; i < n; ++i) {
        const Vec u = p.chart(cloud.point(i));
        int b = static_cast<int>((u[1] + 1.0) * 0.5 * bins);
        b = std::min(bins - 1, std::max(0, b));
        emp[b] += 1.0 / n;
    }
    double total = 0.0;
    for (int b = 0; b < bins; ++b) {
        const double a = -1.0 + 2.0 * b / bins;
        const double bnd = -1.0 + 2.0 * (b + 1) / bins;
        ref[b] = integrate_1d(
            [&](double s2) { return std::sqrt(1.0 + p.bend_coeff * p.bend_coeff * s2 * s2); }, a,
            bnd, 32);
        total += ref[b];
    }
    double tv = 0.0;
    for (int b = 0; b < bins; ++b) tv += std::abs(emp[b] - ref[b] / total);
    CHECK(0.5 * tv <= 0.02);
}

TEST_CASE("probe curve: uniform spacing, on-piece, crossing recorded") {
    const Scene flat = make_intersection_scene(3, 2, M_PI / 4.0, false, 0.0, {1.0, 1.0});
    Vec through = flat.pieces[0].embed(Vec{0.3, -0.2});
    const ProbeCurve pc = make_probe_curve(flat, 0, through, 1000);
    REQUIRE(pc.size() == 1000);
    for (size_t i = 1; i < pc.size(); ++i) {
        const double d = dist(pc.point(i), pc.point(i - 1));
        const double d0 = dist(pc.point(1), pc.point(0));
        CHECK(std::abs(d - d0) <= 0.01 * d0);
    }
    // Crossing arc maps to a point on the intersection set (u1 = 0).
    const double ca = pc.crossing_arc;
    CHECK(ca > 0.0);
    CHECK(ca < pc.arc.back());

    const Scene curved = make_intersection_scene(3, 2, M_PI / 4.0, true, 0.5, {1.0, 1.0});
    Vec through2 = curved.pieces[0].embed(Vec{0.1, 0.4});
    const ProbeCurve pc2 = make_probe_curve(curved, 0, through2, 500);
    for (size_t i = 0; i < pc2.size(); ++i)
        CHECK(curved.pieces[0].on_piece_residual(pc2.point(i)) <= 1e-10);
    for (size_t i = 1; i < pc2.size(); ++i) {
        const double d = dist(pc2.point(i), pc2.point(i - 1));
        const double d0 = dist(pc2.point(1), pc2.point(0));
        CHECK(std::abs(d - d0) <= 0.01 * d0 + 1e-9);
    }
    CHECK(make_probe_curve(flat, 0, through, 2).size() == 2);
}

TEST_CASE("noise: zero sigma is the identity; moments check out") {
    const Scene s = make_plane_scene(3, 2, {1.0, 1.0});
    const PointCloud cloud = sample_uniform(s, {100000}, 5);
    const PointCloud same = add_noise(cloud, 0.0, 77);
    CHECK(same.pts == cloud.pts);

    const double sigma = 0.1;
    const PointCloud noisy = add_noise(cloud, sigma, 77);
    CHECK(noisy.labels == cloud.labels);
    const size_t n = cloud.size();
    double mean = 0.0, var = 0.0;
    for (size_t i = 0; i < n; ++i) {
        for (int k = 0; k < 3; ++k) {
            const double d = noisy.point(i)[k] - cloud.point(i)[k];
            mean += d;
            var += d * d;
        }
    }
    const size_t m = 3 * n;
    mean /= m;
    var = var / m - mean * mean;
    CHECK(std::abs(mean) <= 3.0 * sigma / std::sqrt((double)m));
    CHECK(std::abs(var - sigma * sigma) <= 3.0 * sigma * sigma * std::sqrt(2.0 / m));
    // Labeled points stay within the noise tolerance of their piece.
    for (size_t i = 0; i < 2000; ++i)
        CHECK(s.pieces[0].on_piece_residual(noisy.point(i)) <= 6.0 * sigma);
}

TEST_CASE("scenes serialize and hash reproducibly") {
    const Scene a = make_intersection_scene(3, 2, M_PI / 4.0, true, 0.5, {1.0, 1.0});
    const Scene b = make_intersection_scene(3, 2, M_PI / 4.0, true, 0.5, {1.0, 1.0});
    CHECK(a.to_json() == b.to_json());
    CHECK(a.hash() == b.hash());
    const Scene c = make_intersection_scene(3, 2, M_PI / 8.0, true, 0.5, {1.0, 1.0});
    CHECK(a.hash() != c.hash());
}

TEST_CASE("ball mass: analytic cases") {
    const Scene s = make_plane_scene(3, 2, {2.0, 2.0});
    // Disk fully inside the box.
    CHECK(ball_mass(s, Vec{0.0, 0.0, 0.0}, 1.0) ==
          doctest::Approx(M_PI / 16.0).epsilon(1e-6));
    // Off-plane center: effective radius shrinks.
    const double h = 0.6;
    CHECK(ball_mass(s, Vec{0.0, 0.0, h}, 1.0) ==
          doctest::Approx(M_PI * (1.0 - h * h) / 16.0).epsilon(1e-6));
}
