#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "singul/rng.hpp"
#include "singul/zeroset.hpp"

using namespace singul;
using namespace singul::zeroset;

namespace {

SphericalNet cancel_net() {
    // k = 3, equal target weights, a1 = -a2 = -a3.
    SphericalNet net;
    net.k = 3;
    net.signs = {1, -1, -1};
    net.target = {{{0.8, 0.6}}, {{0.8, 0.6}}, {{0.8, 0.6}}};
    return net;
}

Box box_around(const Vec& center, double half) {
    Box b;
    for (double c : center) b.iv.push_back({c - half, c + half});
    return b;
}

Vec sample_in_box(const Box& b, Rng& rng) {
    Vec w(b.dim());
    for (size_t k = 0; k < b.dim(); ++k) w[k] = rng.uniform(b.iv[k].lo, b.iv[k].hi);
    return w;
}

}  // namespace

TEST_CASE("interval primitives are sound on random samples") {
    Rng rng(17);
    for (int it = 0; it < 200; ++it) {
        const Interval a{rng.uniform(-3, 3), 0};
        const Interval aa{std::min(a.lo, a.hi + 2), std::max(a.lo, a.hi + 2)};
        const Interval bb{rng.uniform(-3, 0), rng.uniform(0, 3)};
        for (int s = 0; s < 500; ++s) {
            const double xa = rng.uniform(aa.lo, aa.hi);
            const double xb = rng.uniform(bb.lo, bb.hi);
            CHECK(add(aa, bb).contains(xa + xb));
            CHECK(sub(aa, bb).contains(xa - xb));
            CHECK(mul(aa, bb).contains(xa * xb));
            CHECK(scale(aa, -1.7).contains(xa * -1.7));
            CHECK(relu(aa).contains(std::max(0.0, xa)));
            CHECK(abs_value(aa).contains(std::abs(xa)));
        }
    }
    // Degenerate (point) inputs.
    const Interval p = Interval::point(0.37);
    CHECK(p.lo == p.hi);
    CHECK(relu(Interval::point(-2.0)).lo == 0.0);
}

TEST_CASE("network enclosure: degenerate box is (near-)exact, samples stay inside") {
    const auto net = cancel_net();
    Rng rng(23);
    const Vec x{0.6, -0.8};
    Vec w0(6);
    for (auto& w : w0) w = rng.uniform(-2, 2);
    Box point_box;
    for (double w : w0) point_box.iv.push_back(Interval::point(w));
    const Interval enc = interval_eval_net(point_box, net, x);
    const double direct = net.eval(w0, x);
    CHECK(enc.contains(direct));
    CHECK(enc.width() <= 1e-12);

    // Box symmetric about zero with a single positive node contains 0.
    SphericalNet one;
    one.k = 1;
    one.signs = {1};
    one.target = {{{1.0, 0.0}}};
    Box sym = box_around(Vec{0.0, 0.0}, 1.0);
    const Interval e1 = interval_eval_net(sym, one, x);
    CHECK(e1.contains(0.0));  // the ReLU kink is attained
    CHECK(e1.lo >= -1e-300);  // only outward rounding below zero
    CHECK(e1.hi > 0.5);

    // Monte-Carlo soundness of the enclosure.
    for (int boxes = 0; boxes < 20; ++boxes) {
        Vec c(6);
        for (auto& ci : c) ci = rng.uniform(-3, 3);
        const Box b = box_around(c, rng.uniform(0.01, 1.0));
        const Interval enc2 = interval_eval_net(b, net, x);
        for (int s = 0; s < 500; ++s) {
            const Vec w = sample_in_box(b, rng);
            CHECK(enc2.contains(net.eval(w, x)));
        }
    }
}

TEST_CASE("contract: identity on the target, rejection when infeasible, soundness") {
    const auto net = cancel_net();
    const auto data = CircleDataset::uniform(net, 100);
    const double delta = 0.01;

    // A point box at W* passes through unchanged.
    Box target_box;
    for (const auto& w : net.target) {
        target_box.iv.push_back(Interval::point(w[0]));
        target_box.iv.push_back(Interval::point(w[1]));
    }
    const auto kept = contract(target_box, net, data, delta);
    REQUIRE(kept.has_value());
    for (size_t k = 0; k < 6; ++k) {
        CHECK(kept->iv[k].lo == target_box.iv[k].lo);
        CHECK(kept->iv[k].hi == target_box.iv[k].hi);
    }

    // A far-away box is rejected on the forward pass.
    const Box far = box_around(Vec{9.0, 9.0, 9.0, 9.0, 9.0, 9.0}, 0.2);
    CHECK(!contract(far, net, data, delta).has_value());

    // Soundness: known satisfying weights survive contraction of any box
    // containing them. The solution family (u, u, w*) reproduces the target
    // for every u, since its first two nodes cancel.
    Rng rng(31);
    int checked = 0;
    for (int bi = 0; bi < 60; ++bi) {
        Vec w_sat{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), 0.0, 0.0,
                  net.target[2][0], net.target[2][1]};
        w_sat[2] = w_sat[0];
        w_sat[3] = w_sat[1];
        bool sat = true;
        for (size_t i = 0; i < data.inputs.size() && sat; ++i)
            sat = std::abs(net.eval(w_sat, data.inputs[i]) - data.targets[i]) < delta;
        REQUIRE(sat);
        Vec center = w_sat;
        const double half = rng.uniform(0.05, 0.6);
        for (auto& ci : center) ci += rng.uniform(-0.8, 0.8) * half;
        Box b = box_around(center, half);
        for (size_t k = 0; k < 6; ++k) {  // make sure the box contains w_sat
            b.iv[k].lo = std::min(b.iv[k].lo, w_sat[k] - 1e-9);
            b.iv[k].hi = std::max(b.iv[k].hi, w_sat[k] + 1e-9);
        }
        const auto contracted = contract(b, net, data, delta);
        ++checked;
        REQUIRE(contracted.has_value());
        for (size_t k = 0; k < 6; ++k) {
            CHECK(w_sat[k] >= contracted->iv[k].lo);
            CHECK(w_sat[k] <= contracted->iv[k].hi);
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("desk-scale paving: k = 1 completes and certifies its centroids") {
    SphericalNet net;
    net.k = 1;
    net.signs = {1};
    net.target = {{{0.3, -0.2}}};
    const auto data = CircleDataset::uniform(net, 100);
    const double delta = 0.01;
    PaveOptions opt;
    opt.width_cap = 0.05;
    opt.budget = 200000;
    const Box domain = box_around(Vec{0.0, 0.0}, 2.0);
    const Paving paving = pave(net, data, delta, domain, opt);
    CHECK(paving.complete);
    CHECK(!paving.accepted.empty());
    for (const auto& b : paving.accepted) {
        CHECK(b.max_width() <= opt.width_cap * (1.0 + 1e-12));
        CHECK(b.inside(domain));
    }
    const double slack =
        delta + net.lipschitz() * 0.5 * opt.width_cap * std::sqrt(2.0 * net.k);
    const PointCloud pts = centroids(paving);
    for (size_t i = 0; i < pts.size(); ++i) {
        for (size_t s = 0; s < data.inputs.size(); ++s) {
            const double err = std::abs(net.eval(pts.point(i), data.inputs[s]) - data.targets[s]);
            CHECK(err <= slack);
        }
    }
    // The target itself is covered by some accepted box.
    bool covered = false;
    for (const auto& b : paving.accepted) {
        bool in = b.iv[0].contains(0.3) && b.iv[1].contains(-0.2);
        covered |= in;
    }
    CHECK(covered);
}

TEST_CASE("infeasible constraints produce an empty paving") {
    SphericalNet net;
    net.k = 1;
    net.signs = {1};
    net.target = {{{0.3, -0.2}}};
    auto data = CircleDataset::uniform(net, 50);
    for (auto& t : data.targets) t = -1.0;  // f_W >= 0 pointwise: unreachable
    PaveOptions opt;
    opt.width_cap = 0.1;
    const Paving paving = pave(net, data, 1e-6, box_around(Vec{0.0, 0.0}, 2.0), opt);
    CHECK(paving.accepted.empty());
    CHECK(paving.complete);
}

TEST_CASE("paving determinism and budget flagging") {
    const auto net = cancel_net();
    const auto data = CircleDataset::uniform(net, 40);
    const Box domain = box_around(Vec{0.8, 0.6, 0.8, 0.6, 0.8, 0.6}, 0.5);
    PaveOptions opt;
    opt.width_cap = 0.2;
    opt.budget = 100000;
    const Paving a = pave(net, data, 0.01, domain, opt);
    const Paving b = pave(net, data, 0.01, domain, opt);
    CHECK(a.to_csv() == b.to_csv());
    CHECK(a.complete);

    PaveOptions starved = opt;
    starved.budget = 3;
    const Paving c = pave(net, data, 0.01, domain, starved);
    CHECK(!c.complete);
}

TEST_CASE("checkpoint and resume reproduce the uninterrupted paving") {
    const auto net = cancel_net();
    const auto data = CircleDataset::uniform(net, 40);
    const Box domain = box_around(Vec{0.8, 0.6, 0.8, 0.6, 0.8, 0.6}, 0.4);
    const std::string ckpt = "/tmp/singul_test_ckpt.json";
    PaveOptions opt;
    opt.width_cap = 0.2;
    const Paving full = pave(net, data, 0.01, domain, opt);

    PaveOptions partial = opt;
    partial.budget = 50;
    partial.checkpoint_path = ckpt;
    const Paving interrupted = pave(net, data, 0.01, domain, partial);
    CHECK(!interrupted.complete);
    PaveOptions resume_opt;
    resume_opt.budget = 1000000;
    const Paving resumed = pave_resume(net, data, 0.01, ckpt, resume_opt);
    CHECK(resumed.complete);
    CHECK(resumed.to_csv() == full.to_csv());
    std::filesystem::remove(ckpt);
}

TEST_CASE("centroid distance bound carries the advertised constant") {
    // width_cap 0.01 in 6 coordinates: centroids sit within 0.005·sqrt(6) of
    // any point of their own box.
    Box b;
    for (int k = 0; k < 6; ++k) b.iv.push_back({0.0, 0.01});
    const Vec c = b.centroid();
    double worst = 0.0;
    Rng rng(5);
    for (int s = 0; s < 2000; ++s) {
        Vec w = sample_in_box(b, rng);
        worst = std::max(worst, dist(w, c));
    }
    CHECK(worst <= 0.005 * std::sqrt(6.0) + 1e-12);
    CHECK(centroids(Paving{{b}, 0, 0, 0.01, true}).size() == 1);
    CHECK_THROWS_AS(centroids(Paving{}), std::runtime_error);
}
