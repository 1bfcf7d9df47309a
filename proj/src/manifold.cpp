#include "singul/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "singul/gauss.hpp"
#include "singul/rng.hpp"

namespace singul {

Vec ManifoldPiece::embed(std::span<const double> u) const {
    Vec x = anchor;
    for (int k = 0; k < intrinsic_dim; ++k) {
        const double uk = u[k];
        for (int i = 0; i < ambient_dim; ++i) x[i] += frame(i, k) * uk;
    }
    if (kind == PieceKind::CurvedGraph) {
        const double h = height(u);
        for (int i = 0; i < ambient_dim; ++i) x[i] += normal[i] * h;
    }
    return x;
}

Vec ManifoldPiece::chart(std::span<const double> x) const {
    Vec rel = sub(x, anchor);
    return matvec_t(frame, rel);
}

double ManifoldPiece::on_piece_residual(std::span<const double> x) const {
    const Vec u = chart(x);
    return dist(x, embed(u));
}

double ManifoldPiece::volume_form(std::span<const double> u) const {
    const double s = height_slope(u);
    return std::sqrt(1.0 + s * s);
}

double ManifoldPiece::volume_form_max() const {
    if (kind == PieceKind::Flat) return 1.0;
    const double m = std::max(std::abs(extent.lo[bend_axis]), std::abs(extent.hi[bend_axis]));
    const double s = bend_coeff * m;
    return std::sqrt(1.0 + s * s);
}

namespace {

// ∫ sqrt(1 + c²s²) ds
double arc_antiderivative(double c, double s) {
    if (c == 0.0) return s;
    return 0.5 * (s * std::sqrt(1.0 + c * c * s * s) + std::asinh(c * s) / c);
}

}  // namespace

double ManifoldPiece::area() const {
    double a = 1.0;
    for (int k = 0; k < intrinsic_dim; ++k) {
        if (kind == PieceKind::CurvedGraph && k == bend_axis) {
            a *= arc_antiderivative(bend_coeff, extent.hi[k]) -
                 arc_antiderivative(bend_coeff, extent.lo[k]);
        } else {
            a *= extent.side(k);
        }
    }
    return a;
}

Mat ManifoldPiece::tangent_frame_at(std::span<const double> u0) const {
    Mat t(ambient_dim, intrinsic_dim);
    for (int k = 0; k < intrinsic_dim; ++k) {
        for (int i = 0; i < ambient_dim; ++i) t(i, k) = frame(i, k);
        if (kind == PieceKind::CurvedGraph && k == bend_axis) {
            const double s = height_slope(u0);
            for (int i = 0; i < ambient_dim; ++i) t(i, k) += normal[i] * s;
        }
    }
    return orthonormalized_columns(t);
}

double Scene::total_area() const {
    double a = 0.0;
    for (const auto& p : pieces) a += p.area();
    return a;
}

std::string Scene::to_json() const {
    nlohmann::json j;
    j["pieces"] = nlohmann::json::array();
    for (const auto& p : pieces) {
        nlohmann::json pj;
        pj["kind"] = p.kind == PieceKind::Flat ? "flat" : "curved-graph";
        pj["ambient_dim"] = p.ambient_dim;
        pj["intrinsic_dim"] = p.intrinsic_dim;
        pj["anchor"] = p.anchor;
        pj["frame"] = p.frame.data;
        pj["normal"] = p.normal;
        pj["extent_lo"] = p.extent.lo;
        pj["extent_hi"] = p.extent.hi;
        pj["bend_coeff"] = p.bend_coeff;
        pj["bend_axis"] = p.bend_axis;
        pj["curvature_bound"] = p.curvature_bound;
        pj["area"] = p.area();
        j["pieces"].push_back(pj);
    }
    if (intersection) {
        j["intersection"] = {{"x0", intersection->x0},
                             {"theta", intersection->theta},
                             {"transverse_axis", intersection->transverse_axis}};
    }
    if (boundary) {
        j["boundary"] = {{"piece", boundary->piece}, {"axis", boundary->axis}, {"side", boundary->side}};
    }
    return j.dump();
}

Scene Scene::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    Scene s;
    for (const auto& pj : j.at("pieces")) {
        ManifoldPiece p;
        p.kind = pj.at("kind").get<std::string>() == "flat" ? PieceKind::Flat
                                                            : PieceKind::CurvedGraph;
        p.ambient_dim = pj.at("ambient_dim").get<int>();
        p.intrinsic_dim = pj.at("intrinsic_dim").get<int>();
        p.anchor = pj.at("anchor").get<Vec>();
        p.frame = Mat(p.ambient_dim, p.intrinsic_dim);
        p.frame.data = pj.at("frame").get<Vec>();
        p.normal = pj.at("normal").get<Vec>();
        p.extent.lo = pj.at("extent_lo").get<Vec>();
        p.extent.hi = pj.at("extent_hi").get<Vec>();
        p.bend_coeff = pj.at("bend_coeff").get<double>();
        p.bend_axis = pj.at("bend_axis").get<int>();
        p.curvature_bound = pj.at("curvature_bound").get<double>();
        s.pieces.push_back(std::move(p));
    }
    if (j.contains("intersection")) {
        IntersectionMeta meta;
        meta.x0 = j["intersection"].at("x0").get<Vec>();
        meta.theta = j["intersection"].at("theta").get<double>();
        meta.transverse_axis = j["intersection"].at("transverse_axis").get<int>();
        s.intersection = meta;
    }
    if (j.contains("boundary")) {
        BoundaryFace f;
        f.piece = j["boundary"].at("piece").get<int>();
        f.axis = j["boundary"].at("axis").get<int>();
        f.side = j["boundary"].at("side").get<int>();
        s.boundary = f;
    }
    return s;
}

uint64_t Scene::hash() const {
    const std::string s = to_json();
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void PointCloud::append(std::span<const double> x, int label) {
    pts.insert(pts.end(), x.begin(), x.end());
    labels.push_back(label);
}

namespace {

// Regularity ratios of the parabola h = (c/2)s² over [-w, w], maximized over
// a dense pair grid: distance-to-tangent-plane and chart-distortion, each
// divided by the squared tangential distance. These are the two quantities a
// curvature constant must dominate, and the flat chart axes only dilute them,
// so the 1-D sweep is the worst case for the whole piece.
double parabola_regularity(double c, double w) {
    const int G = 400;
    double worst = 0.0;
    for (int i = 0; i <= G; ++i) {
        const double u0 = -w + 2.0 * w * i / G;
        const double s0 = std::sqrt(1.0 + c * c * u0 * u0);
        const double phi0 = std::atan(c * u0);
        for (int j = 0; j <= G; ++j) {
            if (i == j) continue;
            const double u1 = -w + 2.0 * w * j / G;
            const double d = u1 - u0;
            const double dperp = 0.5 * c * d * d / s0;
            const double dh = 0.5 * c * (u1 * u1 - u0 * u0);
            const double chord2 = d * d + dh * dh;
            const double dpar2 = chord2 - dperp * dperp;
            if (dpar2 < 1e-14) return 1e300;
            const double dphi = std::atan(c * u1) - phi0;
            if (std::abs(dphi) >= 0.5 * M_PI) return 1e300;
            const double r1 = dperp / dpar2;
            const double r2 = (1.0 / std::cos(dphi) - 1.0) / dpar2;
            worst = std::max({worst, r1, r2});
        }
    }
    return worst;
}

// Largest bend coefficient whose empirical regularity stays below 0.98·L,
// leaving headroom under the audited 1.05·L slack.
double solve_bend_coeff(double L, double w) {
    double hi = 2.0 * L;
    if (parabola_regularity(hi, w) <= 0.98 * L) return hi;
    double lo = 0.0;
    for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (parabola_regularity(mid, w) <= 0.98 * L)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

ChartBox centered_box(const Vec& half_extents) {
    ChartBox b;
    b.lo = scaled(half_extents, -1.0);
    b.hi = half_extents;
    return b;
}

void validate_dims(int N, int d) {
    if (d < 1 || N < 1 || d >= N)
        throw std::invalid_argument("scene: requires 1 <= intrinsic_dim < ambient_dim");
}

}  // namespace

Scene make_plane_scene(int N, int d, const Vec& half_extents) {
    validate_dims(N, d);
    if (static_cast<int>(half_extents.size()) != d)
        throw std::invalid_argument("make_plane_scene: extent size must equal intrinsic_dim");
    ManifoldPiece p;
    p.kind = PieceKind::Flat;
    p.ambient_dim = N;
    p.intrinsic_dim = d;
    p.anchor.assign(N, 0.0);
    p.frame = Mat(N, d);
    for (int k = 0; k < d; ++k) p.frame(k, k) = 1.0;
    p.normal.assign(N, 0.0);
    p.normal[d] = 1.0;
    p.extent = centered_box(half_extents);
    Scene s;
    s.pieces.push_back(std::move(p));
    return s;
}

Scene make_intersection_scene(int N, int d, double theta, bool curved, double curvature_L,
                              const Vec& half_extents) {
    validate_dims(N, d);
    if (!(theta > 0.0) || theta > 0.5 * M_PI + 1e-12)
        throw std::invalid_argument(
            "make_intersection_scene: requires 0 < theta <= pi/2 (tangential pieces carry no "
            "singularity)");
    if (curved && !(curvature_L > 0.0))
        throw std::invalid_argument("make_intersection_scene: curved pieces require L > 0");

    Scene s = make_plane_scene(N, d, half_extents);
    ManifoldPiece p2 = s.pieces[0];
    // Rotate the transverse tangent direction e_{d-1} toward e_d by theta.
    const int ta = d - 1;  // transverse chart axis
    const double c = std::cos(theta), sn = std::sin(theta);
    for (int i = 0; i < N; ++i) p2.frame(i, ta) = 0.0;
    p2.frame(d - 1, ta) = c;
    p2.frame(d, ta) = sn;
    p2.normal.assign(N, 0.0);
    p2.normal[d - 1] = -sn;
    p2.normal[d] = c;

    if (curved) {
        const double coeff = solve_bend_coeff(curvature_L, half_extents[ta]);
        for (ManifoldPiece* p : {&s.pieces[0], &p2}) {
            p->kind = PieceKind::CurvedGraph;
            p->bend_coeff = coeff;
            p->bend_axis = ta;
            p->curvature_bound = curvature_L;
        }
    }
    s.pieces.push_back(std::move(p2));

    IntersectionMeta meta;
    meta.x0.assign(N, 0.0);
    meta.theta = theta;
    meta.transverse_axis = ta;
    s.intersection = meta;
    return s;
}

Scene make_halfplane_scene(int N, int d, double half_extent) {
    validate_dims(N, d);
    if (d < 2) throw std::invalid_argument("make_halfplane_scene: requires d >= 2");
    Vec he(d, half_extent);
    Scene s = make_plane_scene(N, d, he);
    ManifoldPiece& p = s.pieces[0];
    p.extent.lo[0] = -2.0 * half_extent;
    p.extent.hi[0] = 0.0;
    BoundaryFace f;
    f.piece = 0;
    f.axis = 0;
    f.side = +1;
    s.boundary = f;
    return s;
}

namespace {

Vec sample_on_piece(const ManifoldPiece& p, Rng& rng) {
    const size_t d = p.extent.dim();
    Vec u(d);
    while (true) {
        for (size_t k = 0; k < d; ++k) u[k] = rng.uniform(p.extent.lo[k], p.extent.hi[k]);
        if (p.kind == PieceKind::Flat) return u;
        const double accept = p.volume_form(u) / p.volume_form_max();
        if (rng.uniform() < accept) return u;
    }
}

}  // namespace

PointCloud sample_uniform(const Scene& scene, const std::vector<size_t>& n_per_piece,
                          uint64_t seed) {
    if (n_per_piece.size() != scene.pieces.size())
        throw std::invalid_argument("sample_uniform: one count per piece required");
    PointCloud cloud;
    cloud.ambient_dim = scene.pieces.at(0).ambient_dim;
    cloud.seed = seed;
    for (size_t pi = 0; pi < scene.pieces.size(); ++pi) {
        const ManifoldPiece& p = scene.pieces[pi];
        for (size_t k = 0; k < p.extent.dim(); ++k)
            if (!std::isfinite(p.extent.lo[k]) || !std::isfinite(p.extent.hi[k]))
                throw std::invalid_argument("sample_uniform: unbounded extent");
        Rng rng(mix_seed(seed, pi));
        for (size_t i = 0; i < n_per_piece[pi]; ++i) {
            const Vec u = sample_on_piece(p, rng);
            cloud.append(p.embed(u), static_cast<int>(pi));
        }
    }
    return cloud;
}

PointCloud sample_uniform_total(const Scene& scene, size_t n, uint64_t seed) {
    PointCloud cloud;
    cloud.ambient_dim = scene.pieces.at(0).ambient_dim;
    cloud.seed = seed;
    Vec cum;
    double total = 0.0;
    for (const auto& p : scene.pieces) {
        total += p.area();
        cum.push_back(total);
    }
    Rng rng(mix_seed(seed, 0x5ce11e));
    for (size_t i = 0; i < n; ++i) {
        const double r = rng.uniform() * total;
        size_t pi = 0;
        while (pi + 1 < cum.size() && r > cum[pi]) ++pi;
        const Vec u = sample_on_piece(scene.pieces[pi], rng);
        cloud.append(scene.pieces[pi].embed(u), static_cast<int>(pi));
    }
    return cloud;
}

ProbeCurve make_probe_curve(const Scene& scene, int piece, std::span<const double> through,
                            size_t m, double edge_margin) {
    if (m < 2) throw std::invalid_argument("make_probe_curve: requires m >= 2");
    const ManifoldPiece& p = scene.pieces.at(piece);
    const Vec u0 = p.chart(through);
    if (p.on_piece_residual(through) > 1e-8)
        throw std::invalid_argument("make_probe_curve: through-point is not on the piece");
    if (!scene.intersection)
        throw std::invalid_argument("make_probe_curve: scene has no intersection set");
    const int ta = scene.intersection->transverse_axis;
    const double s_lo = p.extent.lo[ta] + edge_margin - u0[ta];
    const double s_hi = p.extent.hi[ta] - edge_margin - u0[ta];
    if (!(s_lo < 0.0 && s_hi > 0.0) || !(u0[ta] >= p.extent.lo[ta] && u0[ta] <= p.extent.hi[ta]))
        throw std::invalid_argument("make_probe_curve: curve misses the intersection set");

    // Arc-length table along the chart line u(s) = u0 + s e_ta (speed depends
    // on the height slope for curved pieces).
    const int kTable = 8192;
    Vec svals(kTable + 1), arc(kTable + 1);
    Vec u = u0;
    arc[0] = 0.0;
    svals[0] = s_lo;
    double prev_speed;
    {
        u[ta] = u0[ta] + s_lo;
        const double g = p.height_slope(u);
        prev_speed = std::sqrt(1.0 + g * g);
    }
    for (int i = 1; i <= kTable; ++i) {
        const double s = s_lo + (s_hi - s_lo) * i / kTable;
        u[ta] = u0[ta] + s;
        const double g = p.height_slope(u);
        const double speed = std::sqrt(1.0 + g * g);
        arc[i] = arc[i - 1] + 0.5 * (prev_speed + speed) * (s_hi - s_lo) / kTable;
        svals[i] = s;
        prev_speed = speed;
    }
    const double total_arc = arc[kTable];

    auto s_at_arc = [&](double a) {
        const auto it = std::lower_bound(arc.begin(), arc.end(), a);
        if (it == arc.begin()) return svals.front();
        if (it == arc.end()) return svals.back();
        const size_t i = static_cast<size_t>(it - arc.begin());
        const double w = (a - arc[i - 1]) / (arc[i] - arc[i - 1]);
        return svals[i - 1] + w * (svals[i] - svals[i - 1]);
    };
    auto arc_at_s = [&](double s) {
        const auto it = std::lower_bound(svals.begin(), svals.end(), s);
        if (it == svals.begin()) return arc.front();
        if (it == svals.end()) return arc.back();
        const size_t i = static_cast<size_t>(it - svals.begin());
        const double w = (s - svals[i - 1]) / (svals[i] - svals[i - 1]);
        return arc[i - 1] + w * (arc[i] - arc[i - 1]);
    };

    ProbeCurve curve;
    curve.ambient_dim = p.ambient_dim;
    curve.piece = piece;
    curve.arc.resize(m);
    curve.pts.reserve(m * p.ambient_dim);
    for (size_t i = 0; i < m; ++i) {
        const double a = total_arc * static_cast<double>(i) / static_cast<double>(m - 1);
        const double s = s_at_arc(a);
        u[ta] = u0[ta] + s;
        const Vec x = p.embed(u);
        curve.pts.insert(curve.pts.end(), x.begin(), x.end());
        curve.arc[i] = a;
    }
    curve.crossing_arc = arc_at_s(-u0[ta]);
    return curve;
}

PointCloud add_noise(const PointCloud& cloud, double sigma, uint64_t seed) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("add_noise: requires sigma >= 0");
    PointCloud out = cloud;
    out.noise_sigma = std::sqrt(cloud.noise_sigma * cloud.noise_sigma + sigma * sigma);
    if (sigma == 0.0) return out;
    Rng rng(mix_seed(seed, 0xa01fe));
    for (double& v : out.pts) v += sigma * rng.normal();
    return out;
}

double ball_mass(const Scene& scene, std::span<const double> center, double radius) {
    double mass = 0.0;
    for (const auto& p : scene.pieces) {
        if (p.kind == PieceKind::Flat) {
            // Chart decomposition: dist²(x, embed(u)) = off² + ‖u − c‖².
            const Vec c = p.chart(center);
            const double off2 = dist2(center, p.embed(c));
            const double r2 = radius * radius - off2;
            if (r2 <= 0.0) continue;
            const double r = std::sqrt(r2);
            if (p.intrinsic_dim == 1) {
                const double lo = std::max(p.extent.lo[0], c[0] - r);
                const double hi = std::min(p.extent.hi[0], c[0] + r);
                mass += std::max(0.0, hi - lo);
            } else if (p.intrinsic_dim == 2) {
                const double lo = std::max(p.extent.lo[0], c[0] - r);
                const double hi = std::min(p.extent.hi[0], c[0] + r);
                if (hi > lo) {
                    mass += integrate_1d(
                        [&](double u0) {
                            const double du = u0 - c[0];
                            const double w = std::sqrt(std::max(0.0, r2 - du * du));
                            const double a = std::max(p.extent.lo[1], c[1] - w);
                            const double b = std::min(p.extent.hi[1], c[1] + w);
                            return std::max(0.0, b - a);
                        },
                        lo, hi, 64);
                }
            } else {
                throw std::invalid_argument("ball_mass: flat pieces supported for d <= 2");
            }
        } else {
            // Volume-form weighted chart integral with an indicator; midpoint
            // grid is adequate for the coarse masses this feeds.
            if (p.intrinsic_dim != 2)
                throw std::invalid_argument("ball_mass: curved pieces supported for d == 2");
            const int G = 512;
            double acc = 0.0;
            Vec u(2);
            for (int i = 0; i < G; ++i) {
                u[0] = p.extent.lo[0] + p.extent.side(0) * (i + 0.5) / G;
                for (int j = 0; j < G; ++j) {
                    u[1] = p.extent.lo[1] + p.extent.side(1) * (j + 0.5) / G;
                    if (dist(p.embed(u), center) <= radius) acc += p.volume_form(u);
                }
            }
            mass += acc * p.extent.side(0) * p.extent.side(1) / (G * G);
        }
    }
    return mass / scene.total_area();
}

}  // namespace singul
