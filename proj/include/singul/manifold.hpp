#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "singul/vecmath.hpp"

namespace singul {

struct ChartBox {
    Vec lo, hi;
    size_t dim() const { return lo.size(); }
    double side(size_t k) const { return hi[k] - lo[k]; }
    double volume() const {
        double v = 1.0;
        for (size_t k = 0; k < lo.size(); ++k) v *= side(k);
        return v;
    }
    bool contains(std::span<const double> u, double slack = 0.0) const {
        for (size_t k = 0; k < lo.size(); ++k)
            if (u[k] < lo[k] - slack || u[k] > hi[k] + slack) return false;
        return true;
    }
};

enum class PieceKind { Flat, CurvedGraph };

/// One manifold piece: either a flat chart box embedded by an orthonormal
/// frame, or the graph of a quadratic height map over that frame,
///   α(u) = anchor + frame·u + normal·(c/2)·u[bend_axis]².
/// The quadratic certifies the curvature constant analytically: the distance
/// from a graph point to the tangent plane at any other graph point is at
/// most (c/2)·(tangential distance)², so curvature_bound = c/2.
struct ManifoldPiece {
    PieceKind kind = PieceKind::Flat;
    int ambient_dim = 0;
    int intrinsic_dim = 0;
    Vec anchor;       // N
    Mat frame;        // N×d, orthonormal columns
    Vec normal;       // N, unit, orthogonal to the frame (curved pieces)
    ChartBox extent;  // chart domain
    double bend_coeff = 0.0;  // c
    int bend_axis = 0;
    double curvature_bound = 0.0;  // certified L

    double height(std::span<const double> u) const {
        return kind == PieceKind::Flat ? 0.0 : 0.5 * bend_coeff * u[bend_axis] * u[bend_axis];
    }
    double height_slope(std::span<const double> u) const {
        return kind == PieceKind::Flat ? 0.0 : bend_coeff * u[bend_axis];
    }

    Vec embed(std::span<const double> u) const;
    /// Chart coordinates of x: orthogonal projection onto the frame. For
    /// points on the piece this inverts embed().
    Vec chart(std::span<const double> x) const;
    /// ‖x − embed(chart(x))‖; zero (to roundoff) exactly on the piece.
    double on_piece_residual(std::span<const double> x) const;

    double volume_form(std::span<const double> u) const;
    double volume_form_max() const;
    double area() const;

    /// Affine tangent plane at chart point u0: returns (point, basis columns).
    Mat tangent_frame_at(std::span<const double> u0) const;
};

struct IntersectionMeta {
    Vec x0;
    double theta = 0.0;
    // Chart convention used by the generators: the intersection set is
    // {u[transverse_axis] = 0} on every participating piece.
    int transverse_axis = 0;
};

struct BoundaryFace {
    int piece = 0;
    int axis = 0;
    int side = +1;  // +1: the hi face, -1: the lo face
};

struct Scene {
    std::vector<ManifoldPiece> pieces;
    std::optional<IntersectionMeta> intersection;
    std::optional<BoundaryFace> boundary;

    double total_area() const;
    std::string to_json() const;
    static Scene from_json(const std::string& text);
    uint64_t hash() const;
};

struct PointCloud {
    int ambient_dim = 0;
    std::vector<double> pts;  // n×N row-major
    std::vector<int> labels;  // optional piece index per point (empty if none)
    uint64_t seed = 0;
    double noise_sigma = 0.0;

    size_t size() const { return ambient_dim == 0 ? 0 : pts.size() / ambient_dim; }
    std::span<const double> point(size_t i) const {
        return {pts.data() + i * ambient_dim, static_cast<size_t>(ambient_dim)};
    }
    void append(std::span<const double> x, int label);
};

struct ProbeCurve {
    int ambient_dim = 0;
    std::vector<double> pts;  // m×N
    Vec arc;                  // arc-length parameter per point
    int piece = 0;
    double crossing_arc = 0.0;  // arc parameter where the curve meets the intersection set
    size_t size() const { return ambient_dim == 0 ? 0 : pts.size() / ambient_dim; }
    std::span<const double> point(size_t i) const {
        return {pts.data() + i * ambient_dim, static_cast<size_t>(ambient_dim)};
    }
};

/// Single flat piece spanning the first d coordinate axes, centered at the
/// origin; the null-hypothesis scene.
Scene make_plane_scene(int ambient_dim, int intrinsic_dim, const Vec& half_extents);

/// Two pieces meeting along the (d-1)-dimensional subspace span{e_1..e_{d-1}}
/// through the origin at dihedral angle theta. Curved pieces are quadratic
/// graphs bending transversely to the intersection with certified constant L.
Scene make_intersection_scene(int ambient_dim, int intrinsic_dim, double theta, bool curved,
                              double curvature_L, const Vec& half_extents);

/// Flat piece whose chart box is [-2w, 0]×[-w, w]^{d-1}; the u_0 = 0 face is
/// the designated straight boundary (outward normal = frame column 0).
Scene make_halfplane_scene(int ambient_dim, int intrinsic_dim, double half_extent);

/// n_per_piece[i] uniform samples on piece i (chart-uniform for flat pieces,
/// volume-form rejection sampling for curved ones).
PointCloud sample_uniform(const Scene& scene, const std::vector<size_t>& n_per_piece,
                          uint64_t seed);

/// n samples from the uniform density on the union: each sample picks a piece
/// with probability proportional to its area.
PointCloud sample_uniform_total(const Scene& scene, size_t n, uint64_t seed);

/// Chart-line probe curve through `through`, transverse to the intersection
/// set, sampled at m points uniformly spaced in arc length. The curve spans
/// the chart extent minus `edge_margin` on each side, keeping it clear of the
/// piece's own boundary response.
ProbeCurve make_probe_curve(const Scene& scene, int piece, std::span<const double> through,
                            size_t m, double edge_margin = 0.0);

PointCloud add_noise(const PointCloud& cloud, double sigma, uint64_t seed);

/// Mass of the ball B_radius(center) under the uniform density on the union.
double ball_mass(const Scene& scene, std::span<const double> center, double radius);

}  // namespace singul
