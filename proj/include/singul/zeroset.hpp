#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "singul/manifold.hpp"
#include "singul/vecmath.hpp"

namespace singul::zeroset {

/// Closed interval with outward-rounded arithmetic: every primitive widens
/// its result by a couple of ulps per side instead of switching rounding
/// modes, which keeps results identical across platforms.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    Interval(double l, double h) : lo(l), hi(h) {}
    static Interval point(double x) { return {x, x}; }

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool contains(double x) const { return x >= lo && x <= hi; }
};

Interval widen(Interval a);
Interval add(Interval a, Interval b);
Interval sub(Interval a, Interval b);
Interval mul(Interval a, Interval b);
Interval scale(Interval a, double s);
Interval relu(Interval a);
Interval abs_value(Interval a);
std::optional<Interval> intersect(Interval a, Interval b);

struct Box {
    std::vector<Interval> iv;

    size_t dim() const { return iv.size(); }
    double max_width() const;
    int widest_axis() const;  // ties resolved to the lowest index
    Vec centroid() const;
    bool inside(const Box& outer) const;
};

/// Single-hidden-layer network on the unit circle:
///   f_W(x) = Σ_i a_i (w_i · x)_+,   a_i = ±1, w_i ∈ R², x ∈ S¹.
struct SphericalNet {
    int k = 0;
    std::vector<int> signs;                     // ±1 per node
    std::vector<std::array<double, 2>> target;  // W*: the weights of g

    double eval(std::span<const double> w_flat, std::span<const double> x) const;
    double eval_target(std::span<const double> x) const;
    /// Lipschitz constant of W ↦ f_W(x) w.r.t. the Euclidean norm on R^{2k}
    /// for unit inputs: √k.
    double lipschitz() const;
};

/// m unit inputs at uniformly spaced angles, plus the target values.
struct CircleDataset {
    std::vector<std::array<double, 2>> inputs;
    Vec targets;
    static CircleDataset uniform(const SphericalNet& net, size_t m);
};

/// Interval enclosure of {f_W(x) : W ∈ box}.
Interval interval_eval_net(const Box& box, const SphericalNet& net, std::span<const double> x);

/// Forward-backward constraint propagation of |f_W(x_i) - g(x_i)| < delta for
/// every dataset input. Returns the contracted box (a subset of the input
/// containing every satisfying W) or nullopt when the box is proven
/// infeasible.
std::optional<Box> contract(const Box& box, const SphericalNet& net, const CircleDataset& data,
                            double delta);

struct Paving {
    std::vector<Box> accepted;
    size_t rejected = 0;
    size_t processed = 0;
    double width_cap = 0.0;
    bool complete = true;  // false when the box budget ran out

    std::string to_csv() const;
};

struct PaveOptions {
    double width_cap = 0.05;
    size_t budget = 1000000;  // boxes processed
    std::string checkpoint_path;  // empty: no checkpointing
    size_t checkpoint_every = 50000;
};

/// Branch-and-contract covering of the satisfying set inside `domain`:
/// contract, accept at width_cap, else bisect the widest coordinate (ties to
/// the lowest index). Deterministic; optionally checkpoints its full state.
Paving pave(const SphericalNet& net, const CircleDataset& data, double delta, const Box& domain,
            const PaveOptions& options = {});

/// Resume a previously checkpointed run.
Paving pave_resume(const SphericalNet& net, const CircleDataset& data, double delta,
                   const std::string& checkpoint_path, const PaveOptions& options = {});

/// One representative (the centroid) per accepted box, as a point cloud in
/// R^{2k}; each centroid is within (width_cap/2)·√(2k) of the covered set.
PointCloud centroids(const Paving& paving);

}  // namespace singul::zeroset
