#include "singul/hyptest.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "singul/laplacian.hpp"
#include "singul/parallel.hpp"
#include "singul/rng.hpp"

namespace singul {

namespace {

void check_level(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("test level alpha must lie in (0, 1)");
}

double log_2n_over_alpha(size_t n, double alpha) {
    return std::log(2.0 * static_cast<double>(n) / alpha);
}

}  // namespace

double bandwidth_power(size_t n, double alpha) {
    check_level(alpha);
    if (n < 3) throw std::invalid_argument("bandwidth: requires n >= 3");
    const double b = log_2n_over_alpha(n, alpha);
    const double arg = M_E * static_cast<double>(n - 1) / b;
    if (!(arg > 1.0)) throw std::invalid_argument("bandwidth: n too small for a positive log");
    return std::min(1.0, 2.0 / std::log(arg));
}

double bandwidth_hypothesis(size_t n, double alpha) {
    check_level(alpha);
    if (n < 3) throw std::invalid_argument("bandwidth: requires n >= 3");
    const double b = 2.0 * log_2n_over_alpha(n, alpha);
    const double arg = M_E * static_cast<double>(n - 1) / b;
    if (!(arg > 1.0)) throw std::invalid_argument("bandwidth: n too small for a positive log");
    return std::min(1.0, 2.0 / std::log(arg));
}

double bandwidth_for_test(size_t n, double alpha) {
    const double t = bandwidth_power(n, alpha);
    const double cap = bandwidth_hypothesis(n, alpha);
    if (t > cap * (1.0 + 1e-12))
        throw std::runtime_error("bandwidth_for_test: power bandwidth exceeds the level cap");
    return t;
}

double threshold_delta(size_t n, double t, double alpha) {
    check_level(alpha);
    if (n < 2) throw std::invalid_argument("threshold_delta: requires n >= 2");
    if (!(t > 0.0)) throw std::invalid_argument("threshold_delta: requires t > 0");
    return std::sqrt(t / (M_E * static_cast<double>(n - 1)) * log_2n_over_alpha(n, alpha));
}

double concentration_bound(size_t n, double t, double eps) {
    if (n < 2 || !(t > 0.0) || eps < 0.0)
        throw std::invalid_argument("concentration_bound: requires n >= 2, t > 0, eps >= 0");
    const double raw =
        2.0 * static_cast<double>(n) * std::exp(-4.0 * M_E * static_cast<double>(n - 1) * eps * eps / t);
    return std::clamp(raw, 0.0, 1.0);
}

std::string TestReport::to_json() const {
    nlohmann::json j;
    j["T"] = T;
    j["delta"] = delta;
    j["t"] = t_used;
    j["n_in_ball"] = n_in_ball;
    j["reject"] = reject;
    j["v"] = v;
    j["v_from_disjoint"] = v_from_disjoint;
    return j.dump();
}

TestReport run_test(const PointCloud& cloud, const TestConfig& config, const Vec& v,
                    bool v_from_disjoint) {
    check_level(config.alpha);
    const size_t n = cloud.size();
    if (n < 3) throw std::invalid_argument("run_test: requires at least 3 samples");
    if (config.x0.size() != static_cast<size_t>(cloud.ambient_dim))
        throw std::invalid_argument("run_test: x0 dimension mismatch");

    TestReport rep;
    rep.t_used = config.t_override ? *config.t_override : bandwidth_for_test(n, config.alpha);
    rep.delta = threshold_delta(n, rep.t_used, config.alpha);
    rep.v = v;
    rep.v_from_disjoint = v_from_disjoint;

    LaplacianEvaluator eval(cloud, v, rep.t_used);
    const double r2 = config.radius * config.radius;
    double worst = 0.0;
    size_t in_ball = 0;
    for (size_t i = 0; i < n; ++i) {
        if (dist2(cloud.point(i), config.x0) > r2) continue;
        ++in_ball;
        worst = std::max(worst, std::abs(eval.apply(cloud.point(i))));
    }
    if (in_ball == 0) throw std::runtime_error("run_test: no samples inside the evaluation ball");
    rep.n_in_ball = in_ball;
    rep.T = worst;
    rep.reject = rep.T > rep.delta;
    return rep;
}

PowerConditions power_conditions_check(double t, int d, double v_n, double theta1) {
    if (!(t > 0.0) || d < 1 || !(std::abs(v_n) > 0.0) || !(theta1 > 0.0) ||
        theta1 > 0.5 * M_PI + 1e-12)
        throw std::invalid_argument("power_conditions_check: invalid arguments");
    PowerConditions pc;
    const double pi_d = std::pow(M_PI, d);
    const double vn2 = v_n * v_n;
    const double s = std::sin(theta1);
    pc.lhs1 = t * ((d + 1) * std::log(1.0 / t) + std::log(2.0 / (pi_d * vn2)));
    pc.rhs1 = 2.0 * (1.0 - s * s);
    pc.ok1 = pc.lhs1 <= pc.rhs1;
    pc.lhs2 = t;
    pc.rhs2 = 1.0 / (0.5 * d + std::log(256.0 * M_E * M_E / (pi_d * vn2 * s * s)));
    pc.ok2 = pc.lhs2 <= pc.rhs2;
    pc.satisfied = pc.ok1 && pc.ok2;
    return pc;
}

double power_lower_bound(size_t n, double alpha, const Scene& scene, std::span<const double> x0,
                         double R) {
    check_level(alpha);
    const double mass = ball_mass(scene, x0, R / 3.0);
    return 1.0 - alpha - std::pow(1.0 - mass, static_cast<double>(n));
}

namespace {

uint8_t run_single_trial(const Scene& scene, const Vec& x0, size_t n_test,
                         const ExperimentSpec& spec, uint64_t trial_seed) {
    const size_t n_select = std::max<size_t>(64, n_test / 4);
    const PointCloud sel_cloud = sample_uniform_total(scene, n_select, mix_seed(trial_seed, 1));
    const PointCloud test_cloud = sample_uniform_total(scene, n_test, mix_seed(trial_seed, 2));
    const double t = bandwidth_for_test(n_test, spec.alpha);

    std::vector<size_t> eval_idx;
    const double r2 = spec.ball_radius * spec.ball_radius;
    for (size_t i = 0; i < sel_cloud.size() && eval_idx.size() < spec.selection_eval_cap; ++i)
        if (dist2(sel_cloud.point(i), x0) <= r2) eval_idx.push_back(i);
    const Vec v = select_direction_random(sel_cloud, eval_idx, t, spec.n_candidates,
                                          mix_seed(trial_seed, 3));

    TestConfig cfg;
    cfg.alpha = spec.alpha;
    cfg.x0 = x0;
    cfg.radius = spec.ball_radius;
    cfg.t_override = t;
    return run_test(test_cloud, cfg, v, true).reject ? 1 : 0;
}

std::vector<uint8_t> run_cell(const Scene& scene, const Vec& x0, size_t n_test,
                              const ExperimentSpec& spec, uint64_t cell_seed) {
    std::vector<uint8_t> rejects(spec.trials, 0);
    parallel_for(spec.trials, spec.threads, [&](size_t trial) {
        rejects[trial] = run_single_trial(scene, x0, n_test, spec, mix_seed(cell_seed, trial));
    });
    return rejects;
}

double rate_of(const std::vector<uint8_t>& rejects) {
    double s = 0.0;
    for (uint8_t r : rejects) s += r;
    return rejects.empty() ? 0.0 : s / static_cast<double>(rejects.size());
}

}  // namespace

ExperimentTable run_experiment_table(const ExperimentSpec& spec) {
    if (spec.h1_half_extents.size() != spec.h1_angles.size())
        throw std::invalid_argument("run_experiment_table: one half-extent per angle required");
    ExperimentTable table;
    table.spec = spec;
    table.sample_sizes = spec.sample_sizes;

    const Scene h0 = make_plane_scene(3, 2, {spec.h0_half_extent, spec.h0_half_extent});
    const Vec x0(3, 0.0);
    uint64_t cell = 0;
    for (size_t n : spec.sample_sizes) {
        const auto rejects = run_cell(h0, x0, n, spec, mix_seed(spec.seed, ++cell));
        table.h0_rejects.push_back(rejects);
        table.h0_rates.push_back(rate_of(rejects));
    }
    table.h1_rates.resize(spec.h1_angles.size());
    table.h1_rejects.resize(spec.h1_angles.size());
    for (size_t ai = 0; ai < spec.h1_angles.size(); ++ai) {
        const double w = spec.h1_half_extents[ai];
        const Scene h1 = make_intersection_scene(3, 2, spec.h1_angles[ai], false, 0.0, {w, w});
        for (size_t n : spec.sample_sizes) {
            const auto rejects = run_cell(h1, x0, n, spec, mix_seed(spec.seed, ++cell));
            table.h1_rejects[ai].push_back(rejects);
            table.h1_rates[ai].push_back(rate_of(rejects));
        }
    }
    return table;
}

std::string ExperimentTable::to_csv() const {
    std::ostringstream os;
    os << "samples,h0";
    for (double a : spec.h1_angles) os << ",h1_theta_" << a;
    os << "\n";
    for (size_t row = 0; row < sample_sizes.size(); ++row) {
        os << sample_sizes[row] << "," << h0_rates[row];
        for (size_t ai = 0; ai < h1_rates.size(); ++ai) os << "," << h1_rates[ai][row];
        os << "\n";
    }
    return os.str();
}

std::string ExperimentTable::trial_log_json() const {
    nlohmann::json j;
    j["sample_sizes"] = sample_sizes;
    j["alpha"] = spec.alpha;
    j["trials"] = spec.trials;
    j["seed"] = spec.seed;
    j["h0_half_extent"] = spec.h0_half_extent;
    j["h1_half_extents"] = spec.h1_half_extents;
    j["h1_angles"] = spec.h1_angles;
    j["h0_rejects"] = h0_rejects;
    j["h1_rejects"] = h1_rejects;
    return j.dump();
}

}  // namespace singul
