#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "singul/manifold.hpp"
#include "singul/vecmath.hpp"

namespace singul {

/// Bandwidth from the power analysis: min{1, 2/log(e(n-1)/log(2n/α))}.
double bandwidth_power(size_t n, double alpha);

/// Bandwidth cap from the level guarantee: min{1, 2/log(e(n-1)/(2·log(2n/α)))}.
double bandwidth_hypothesis(size_t n, double alpha);

/// The bandwidth used by the experiments: the power-analysis value, after
/// verifying it also satisfies the level-guarantee cap (throws otherwise).
double bandwidth_for_test(size_t n, double alpha);

/// Rejection threshold δ = sqrt(t·log(2n/α)/(e(n-1))). Depends only on
/// (n, t, α), never on data.
double threshold_delta(size_t n, double t, double alpha);

/// Deviation-probability bound 2n·exp(-4e(n-1)ε²/t), clamped to [0, 1].
double concentration_bound(size_t n, double t, double eps);

struct TestConfig {
    double alpha = 0.05;
    Vec x0;
    double radius = 1.0;
    std::optional<double> t_override;
};

struct TestReport {
    double T = 0.0;
    double delta = 0.0;
    double t_used = 0.0;
    size_t n_in_ball = 0;
    bool reject = false;
    Vec v;
    bool v_from_disjoint = false;  // caller-asserted: v was chosen on a disjoint sample
    std::string to_json() const;
};

/// Level-α singularity test at x0: T = max over in-ball samples of
/// |L_{n,t} f(X_m)|, rejected when T > δ. The direction must come from a
/// sample disjoint from `cloud`; the caller asserts that via
/// v_from_disjoint and the flag is recorded in the report.
TestReport run_test(const PointCloud& cloud, const TestConfig& config, const Vec& v,
                    bool v_from_disjoint);

struct PowerConditions {
    bool satisfied = false;
    bool ok1 = false, ok2 = false;
    double lhs1 = 0.0, rhs1 = 0.0;
    double lhs2 = 0.0, rhs2 = 0.0;
};

/// The two sample-size conditions of the power guarantee, evaluated verbatim.
PowerConditions power_conditions_check(double t, int d, double v_n, double theta1);

/// Power lower bound 1 - α - P(X ∉ B_{R/3}(x0))^n with the ball mass computed
/// from the scene geometry.
double power_lower_bound(size_t n, double alpha, const Scene& scene, std::span<const double> x0,
                         double R = 1.0);

struct ExperimentSpec {
    std::vector<size_t> sample_sizes{20000, 30000, 40000, 55000, 60000, 65000, 70000};
    std::vector<double> h1_angles{M_PI / 4.0, M_PI / 2.0};
    size_t trials = 100;
    double alpha = 0.05;
    uint64_t seed = 1;
    unsigned threads = 1;
    // Scene scale: chart half-extent of the single H0 piece, and of the two
    // intersecting pieces per H1 angle (aligned with h1_angles). These sizes
    // set the uniform density and hence where each power transition lands;
    // they are recorded in run metadata. Defaults fixed by pilot sweeps.
    double h0_half_extent = 2.5;
    std::vector<double> h1_half_extents{2.0, 1.66};
    size_t n_candidates = 64;
    size_t selection_eval_cap = 96;
    double ball_radius = 1.0;
};

struct ExperimentTable {
    ExperimentSpec spec;
    std::vector<size_t> sample_sizes;
    std::vector<double> h0_rates;
    std::vector<std::vector<double>> h1_rates;       // [angle][row]
    std::vector<std::vector<uint8_t>> h0_rejects;    // [row][trial]
    std::vector<std::vector<std::vector<uint8_t>>> h1_rejects;  // [angle][row][trial]
    std::string to_csv() const;
    std::string trial_log_json() const;
};

/// Rejection-rate table over sample sizes × {H0, H1 angles}, each cell run
/// `trials` times with per-trial derived seeds: sample a selection cloud and
/// a disjoint test cloud, pick the direction on the selection cloud's
/// in-ball points among n_candidates random ones, then run the test.
ExperimentTable run_experiment_table(const ExperimentSpec& spec);

}  // namespace singul
