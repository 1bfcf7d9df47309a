// singul: detect and characterize manifold singularities in point clouds via
// the graph Laplacian on linear probes.
//
// Subcommands: gen, laplacian, test, power-sweep, estimate, noise-check,
// zeroset, pca. All outputs are written atomically and accompanied by a run
// manifest; (command, flags, seed) fully determine every byte.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "singul/estimators.hpp"
#include "singul/hyptest.hpp"
#include "singul/io.hpp"
#include "singul/kernels.hpp"
#include "singul/laplacian.hpp"
#include "singul/manifold.hpp"
#include "singul/parallel.hpp"
#include "singul/rng.hpp"
#include "singul/theory.hpp"
#include "singul/vecmath.hpp"
#include "singul/zeroset.hpp"

namespace {

using namespace singul;

constexpr const char* kVersion = "0.1.0";

struct CommonOpts {
    uint64_t seed = 1;
    std::string out_dir = ".";
    unsigned threads = 0;  // 0: hardware default
    std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--seed", c.seed, "RNG seed (64-bit); per-trial streams are derived");
    cmd->add_option("--out-dir", c.out_dir, "output directory");
    cmd->add_option("--threads", c.threads, "worker threads (0 = hardware)");
    cmd->add_option("--format", c.format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
}

unsigned resolve_threads(const CommonOpts& c) {
    return c.threads == 0 ? default_thread_count() : c.threads;
}

std::string out_path(const CommonOpts& c, const std::string& name) {
    std::filesystem::create_directories(c.out_dir);
    return (std::filesystem::path(c.out_dir) / name).string();
}

void write_manifest(const CommonOpts& c, const std::string& command,
                    const nlohmann::json& params, const std::vector<std::string>& outputs,
                    std::optional<uint64_t> scene_hash = std::nullopt) {
    nlohmann::json j;
    j["command"] = command;
    j["version"] = kVersion;
    j["seed"] = c.seed;
    j["threads"] = resolve_threads(c);
    j["kernel_impl"] = kernels::impl_name(kernels::active_impl());
    j["parameters"] = params;
    j["outputs"] = outputs;
    if (scene_hash) j["scene_hash"] = *scene_hash;
    atomic_write_text(out_path(c, "manifest_" + command + ".json"), j.dump(2) + "\n");
}

Vec parse_vec(const std::string& s) {
    Vec v;
    size_t start = 0;
    while (start <= s.size()) {
        const size_t comma = s.find(',', start);
        const std::string part =
            comma == std::string::npos ? s.substr(start) : s.substr(start, comma - start);
        if (!part.empty()) v.push_back(parse_double(part));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return v;
}

struct SceneOpts {
    std::string kind = "intersection";  // plane | intersection | halfplane
    int ambient_dim = 3;
    int intrinsic_dim = 2;
    double theta = M_PI / 2.0;
    bool curved = false;
    double curvature_L = 0.5;
    std::vector<double> extent{1.0};
};

void add_scene_opts(CLI::App* cmd, SceneOpts& s) {
    cmd->add_option("--scene", s.kind, "plane | intersection | halfplane")
        ->check(CLI::IsMember({"plane", "intersection", "halfplane"}));
    cmd->add_option("--ambient-dim", s.ambient_dim, "ambient dimension N");
    cmd->add_option("--intrinsic-dim", s.intrinsic_dim, "intrinsic dimension d");
    cmd->add_option("--theta", s.theta, "intersection angle in (0, pi/2]");
    cmd->add_flag("--curved", s.curved, "curved (quadratic-graph) pieces");
    cmd->add_option("--curvature-L", s.curvature_L, "certified curvature constant L");
    cmd->add_option("--extent", s.extent,
                    "chart half-extent(s); one value per chart axis or a single shared one");
}

Scene build_scene(const SceneOpts& s) {
    Vec he(s.intrinsic_dim, s.extent.at(0));
    for (size_t k = 0; k < s.extent.size() && k < he.size(); ++k) he[k] = s.extent[k];
    if (s.kind == "plane") return make_plane_scene(s.ambient_dim, s.intrinsic_dim, he);
    if (s.kind == "halfplane")
        return make_halfplane_scene(s.ambient_dim, s.intrinsic_dim, s.extent.at(0));
    return make_intersection_scene(s.ambient_dim, s.intrinsic_dim, s.theta, s.curved,
                                   s.curvature_L, he);
}

// --- gen ---------------------------------------------------------------

int cmd_gen(const CommonOpts& c, const SceneOpts& so, size_t n, bool per_piece, double sigma,
            const std::string& prefix) {
    const Scene scene = build_scene(so);
    PointCloud cloud;
    if (per_piece) {
        std::vector<size_t> counts(scene.pieces.size(), n);
        cloud = sample_uniform(scene, counts, c.seed);
    } else {
        cloud = sample_uniform_total(scene, n, c.seed);
    }
    if (sigma > 0.0) cloud = add_noise(cloud, sigma, mix_seed(c.seed, 0x0153));
    const std::string csv_path = out_path(c, prefix + ".csv");
    const std::string sidecar_path = out_path(c, prefix + ".json");
    atomic_write_text(csv_path, cloud_to_csv(cloud));
    atomic_write_text(sidecar_path, cloud_sidecar_json(cloud, &scene) + "\n");
    nlohmann::json params{{"scene", nlohmann::json::parse(scene.to_json())},
                          {"n", n},
                          {"per_piece", per_piece},
                          {"sigma", sigma}};
    write_manifest(c, "gen", params, {csv_path, sidecar_path}, scene.hash());
    return 0;
}

// --- laplacian ----------------------------------------------------------

Scene scene_from_sidecar(const std::string& sidecar_path) {
    const nlohmann::json j = nlohmann::json::parse(read_text_file(sidecar_path));
    if (!j.contains("scene")) throw std::runtime_error("sidecar has no scene: " + sidecar_path);
    return Scene::from_json(j["scene"].dump());
}

int cmd_laplacian(const CommonOpts& c, const std::string& cloud_path,
                  const std::string& sidecar_path, int piece, const std::string& through_str,
                  size_t m, double t, const std::string& v_str, const std::string& prefix) {
    const PointCloud cloud = cloud_from_csv(read_text_file(cloud_path));
    const Scene scene = scene_from_sidecar(sidecar_path);
    Vec through;
    if (through_str.empty()) {
        through = scene.intersection ? scene.intersection->x0 : scene.pieces.at(piece).anchor;
    } else {
        through = parse_vec(through_str);
    }
    const ProbeCurve curve = make_probe_curve(scene, piece, through, m);
    Vec v;
    if (v_str.empty()) {
        Rng rng(mix_seed(c.seed, 0xd1));
        v = rng.unit_vector(cloud.ambient_dim);
    } else {
        v = normalized(parse_vec(v_str));
    }
    const auto resp = evaluate_on_curve(cloud, curve, v, t, resolve_threads(c));
    const std::string csv_path = out_path(c, prefix + "_response.csv");
    const std::string sidecar_out = out_path(c, prefix + "_response.json");
    atomic_write_text(csv_path, response_to_csv(resp));
    atomic_write_text(sidecar_out, response_sidecar_json(resp, c.seed, scene.hash()) + "\n");
    nlohmann::json params{{"cloud", cloud_path}, {"sidecar", sidecar_path}, {"piece", piece},
                          {"m", m},             {"t", t},                  {"v", v}};
    write_manifest(c, "laplacian", params, {csv_path, sidecar_out}, scene.hash());
    return 0;
}

// --- test ----------------------------------------------------------------

int cmd_test(const CommonOpts& c, const std::string& cloud_path, const std::string& x0_str,
             double alpha, double radius, double t_override, const std::string& v_str,
             size_t candidates, double select_frac, const std::string& prefix) {
    const PointCloud full = cloud_from_csv(read_text_file(cloud_path));
    Vec x0 = x0_str.empty() ? Vec(full.ambient_dim, 0.0) : parse_vec(x0_str);

    Vec v;
    PointCloud test_cloud;
    bool disjoint = false;
    if (!v_str.empty()) {
        v = normalized(parse_vec(v_str));
        test_cloud = full;
    } else {
        // Hold out the leading fraction for direction selection; test on the
        // disjoint remainder.
        const size_t n_sel = std::max<size_t>(8, static_cast<size_t>(select_frac * full.size()));
        PointCloud sel;
        sel.ambient_dim = full.ambient_dim;
        test_cloud.ambient_dim = full.ambient_dim;
        for (size_t i = 0; i < full.size(); ++i) {
            if (i < n_sel)
                sel.append(full.point(i), 0);
            else
                test_cloud.append(full.point(i), 0);
        }
        const double t_sel =
            t_override > 0.0 ? t_override : bandwidth_for_test(test_cloud.size(), alpha);
        std::vector<size_t> eval_idx;
        const double r2 = radius * radius;
        for (size_t i = 0; i < sel.size() && eval_idx.size() < 256; ++i)
            if (dist2(sel.point(i), x0) <= r2) eval_idx.push_back(i);
        v = select_direction_random(sel, eval_idx, t_sel, candidates, mix_seed(c.seed, 0x5e1));
        disjoint = true;
    }

    TestConfig cfg;
    cfg.alpha = alpha;
    cfg.x0 = x0;
    cfg.radius = radius;
    if (t_override > 0.0) cfg.t_override = t_override;
    const TestReport report = run_test(test_cloud, cfg, v, disjoint);
    const std::string report_path = out_path(c, prefix + "_report.json");
    atomic_write_text(report_path, report.to_json() + "\n");
    nlohmann::json params{{"cloud", cloud_path}, {"alpha", alpha}, {"radius", radius},
                          {"x0", x0},            {"candidates", candidates}};
    write_manifest(c, "test", params, {report_path});
    std::cout << (report.reject ? "reject" : "no-reject") << " T=" << format_double(report.T)
              << " delta=" << format_double(report.delta) << " t=" << format_double(report.t_used)
              << " n_in_ball=" << report.n_in_ball << "\n";
    return report.reject ? 1 : 0;
}

// --- power-sweep ----------------------------------------------------------

int cmd_power_sweep(const CommonOpts& c, ExperimentSpec spec, const std::string& prefix) {
    spec.seed = c.seed;
    spec.threads = resolve_threads(c);
    const ExperimentTable table = run_experiment_table(spec);
    const std::string csv_path = out_path(c, prefix + "_table.csv");
    const std::string log_path = out_path(c, prefix + "_trials.json");
    atomic_write_text(csv_path, table.to_csv());
    atomic_write_text(log_path, table.trial_log_json() + "\n");
    nlohmann::json params{{"sample_sizes", spec.sample_sizes},
                          {"angles", spec.h1_angles},
                          {"trials", spec.trials},
                          {"alpha", spec.alpha},
                          {"h0_half_extent", spec.h0_half_extent},
                          {"h1_half_extents", spec.h1_half_extents},
                          {"candidates", spec.n_candidates}};
    write_manifest(c, "power-sweep", params, {csv_path, log_path});
    std::cout << table.to_csv();
    return 0;
}

// --- estimate ---------------------------------------------------------------

int cmd_estimate(const CommonOpts& c, const std::string& response_path, double t,
                 const std::string& prefix) {
    const LaplacianResponse resp = response_from_csv(read_text_file(response_path));
    const auto report = estimate_intersection(resp, t);
    const auto fit = profile_fit_diagnostics(resp);
    nlohmann::json j = nlohmann::json::parse(report.to_json());
    j["profile_fit"] = {{"c1", fit.c1},
                        {"c2", fit.c2},
                        {"residual_ratio", fit.residual_ratio},
                        {"singular", fit.singular}};
    const std::string path = out_path(c, prefix + "_estimate.json");
    atomic_write_text(path, j.dump(2) + "\n");
    write_manifest(c, "estimate", {{"response", response_path}, {"t", t}}, {path});
    std::cout << "theta_hat=" << format_double(report.theta_hat)
              << " r_max_hat=" << format_double(report.r_max_hat) << "\n";
    return 0;
}

// --- noise-check -------------------------------------------------------------

int cmd_noise_check(const CommonOpts& c, size_t n, double sigma, double t, size_t draws,
                    size_t n_eval, const std::string& prefix) {
    const Scene scene = make_plane_scene(3, 2, {1.0, 1.0});
    const PointCloud cloud = sample_uniform(scene, {n}, c.seed);
    Rng rng(mix_seed(c.seed, 0xec));
    const Vec v = rng.unit_vector(3);
    std::vector<Vec> eval_points(n_eval);
    for (auto& x : eval_points)
        x = Vec{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-0.5, 0.5)};
    const auto res = noise_identity_check(cloud, sigma, t, draws, eval_points, v,
                                          mix_seed(c.seed, 0x715));
    const std::string path = out_path(c, prefix + "_noise_check.json");
    atomic_write_text(path, res.to_json() + "\n");
    nlohmann::json params{{"n", n}, {"sigma", sigma}, {"t", t}, {"draws", draws}};
    write_manifest(c, "noise-check", params, {path}, scene.hash());
    std::cout << "fitted_c=" << format_double(res.fitted_c)
              << " plain=" << format_double(res.c_plain) << " selected="
              << (res.selected == 1   ? "plain"
                  : res.selected == 2 ? "doubled"
                                      : "undecided")
              << "\n";
    return 0;
}

// --- zeroset -------------------------------------------------------------------

int cmd_zeroset(const CommonOpts& c, int k, const std::string& signs_str,
                const std::string& target_str, double delta, double width_cap, size_t budget,
                double box_half, size_t n_inputs, const std::string& checkpoint, bool resume,
                const std::string& prefix) {
    zeroset::SphericalNet net;
    net.k = k;
    for (char ch : signs_str) {
        if (ch == '+') net.signs.push_back(1);
        else if (ch == '-') net.signs.push_back(-1);
    }
    if (static_cast<int>(net.signs.size()) != k)
        throw std::runtime_error("zeroset: --signs must provide one +/- per node");
    Vec target = target_str.empty() ? Vec{} : parse_vec(target_str);
    if (target.empty()) {
        for (int i = 0; i < k; ++i) net.target.push_back({0.8, 0.6});
    } else if (target.size() == 2) {
        for (int i = 0; i < k; ++i) net.target.push_back({target[0], target[1]});
    } else if (target.size() == static_cast<size_t>(2 * k)) {
        for (int i = 0; i < k; ++i) net.target.push_back({target[2 * i], target[2 * i + 1]});
    } else {
        throw std::runtime_error("zeroset: --target needs 2 or 2k numbers");
    }
    const auto data = zeroset::CircleDataset::uniform(net, n_inputs);
    zeroset::PaveOptions opt;
    opt.width_cap = width_cap;
    opt.budget = budget;
    opt.checkpoint_path = checkpoint;
    zeroset::Box domain;
    for (int i = 0; i < k; ++i) {
        domain.iv.push_back({net.target[i][0] - box_half, net.target[i][0] + box_half});
        domain.iv.push_back({net.target[i][1] - box_half, net.target[i][1] + box_half});
    }
    const zeroset::Paving paving = resume && !checkpoint.empty()
                                       ? zeroset::pave_resume(net, data, delta, checkpoint, opt)
                                       : zeroset::pave(net, data, delta, domain, opt);
    const std::string paving_path = out_path(c, prefix + "_paving.csv");
    atomic_write_text(paving_path, paving.to_csv());
    std::vector<std::string> outputs{paving_path};
    if (!paving.accepted.empty()) {
        const PointCloud cloud = zeroset::centroids(paving);
        const std::string cloud_path = out_path(c, prefix + "_centroids.csv");
        atomic_write_text(cloud_path, cloud_to_csv(cloud));
        outputs.push_back(cloud_path);
    }
    nlohmann::json params{{"k", k},
                          {"signs", signs_str},
                          {"delta", delta},
                          {"width_cap", width_cap},
                          {"budget", budget},
                          {"box_half", box_half},
                          {"inputs", n_inputs},
                          {"complete", paving.complete}};
    write_manifest(c, "zeroset", params, outputs);
    std::cout << "accepted=" << paving.accepted.size() << " rejected=" << paving.rejected
              << " processed=" << paving.processed << (paving.complete ? "" : " (budget hit)")
              << "\n";
    return 0;
}

// --- pca ---------------------------------------------------------------------

int cmd_pca(const CommonOpts& c, const std::string& cloud_path, int target_dim,
            const std::string& prefix) {
    const PointCloud cloud = cloud_from_csv(read_text_file(cloud_path));
    const int N = cloud.ambient_dim;
    if (target_dim > N) throw std::runtime_error("pca: target dimension exceeds ambient");
    const size_t n = cloud.size();
    Vec mean(N, 0.0);
    for (size_t i = 0; i < n; ++i)
        for (int k = 0; k < N; ++k) mean[k] += cloud.point(i)[k];
    for (auto& m : mean) m /= static_cast<double>(n);
    Mat cov(N, N);
    for (size_t i = 0; i < n; ++i) {
        const auto p = cloud.point(i);
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b) cov(a, b) += (p[a] - mean[a]) * (p[b] - mean[b]);
    }
    for (auto& e : cov.data) e /= static_cast<double>(n);
    Vec evals;
    Mat evecs;
    jacobi_eigensym(cov, evals, evecs);

    double total = 0.0;
    int rank = 0;
    for (double e : evals) {
        total += std::max(0.0, e);
        if (e > 1e-12 * std::max(1.0, evals[0])) ++rank;
    }
    PointCloud projected;
    projected.ambient_dim = target_dim;
    Vec centered(N);
    for (size_t i = 0; i < n; ++i) {
        const auto p = cloud.point(i);
        for (int k = 0; k < N; ++k) centered[k] = p[k] - mean[k];
        Vec y(target_dim, 0.0);
        for (int j = 0; j < target_dim; ++j)
            for (int k = 0; k < N; ++k) y[j] += evecs(k, j) * centered[k];
        projected.append(y, 0);
    }
    projected.labels.clear();
    const std::string csv_path = out_path(c, prefix + "_pca.csv");
    atomic_write_text(csv_path, cloud_to_csv(projected));
    nlohmann::json info;
    info["explained_variance"] = evals;
    Vec ratios;
    for (double e : evals) ratios.push_back(total > 0 ? std::max(0.0, e) / total : 0.0);
    info["explained_variance_ratio"] = ratios;
    info["rank"] = rank;
    info["mean"] = mean;
    const std::string info_path = out_path(c, prefix + "_pca.json");
    atomic_write_text(info_path, info.dump(2) + "\n");
    write_manifest(c, "pca", {{"cloud", cloud_path}, {"dim", target_dim}},
                   {csv_path, info_path});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"graph-Laplacian singularity detection toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CommonOpts common;

    auto* gen = app.add_subcommand("gen", "generate a scene and sample a point cloud");
    SceneOpts gen_scene;
    size_t gen_n = 10000;
    bool gen_per_piece = false;
    double gen_sigma = 0.0;
    std::string gen_prefix = "cloud";
    add_common(gen, common);
    add_scene_opts(gen, gen_scene);
    gen->add_option("--n", gen_n, "sample count (total, or per piece with --per-piece)");
    gen->add_flag("--per-piece", gen_per_piece, "interpret --n as a per-piece count");
    gen->add_option("--sigma", gen_sigma, "isotropic Gaussian noise level");
    gen->add_option("--prefix", gen_prefix, "output file prefix");

    auto* lap =
        app.add_subcommand("laplacian", "evaluate the graph Laplacian along a probe curve");
    std::string lap_cloud, lap_sidecar, lap_through, lap_v, lap_prefix = "probe";
    int lap_piece = 0;
    size_t lap_m = 1000;
    double lap_t = 1e-3;
    add_common(lap, common);
    lap->add_option("--cloud", lap_cloud, "point cloud CSV")->required();
    lap->add_option("--sidecar", lap_sidecar, "cloud sidecar JSON (scene parameters)")->required();
    lap->add_option("--piece", lap_piece, "piece carrying the probe curve");
    lap->add_option("--through", lap_through, "comma-separated point the curve passes through");
    lap->add_option("--m", lap_m, "number of probe points");
    lap->add_option("--t", lap_t, "kernel bandwidth");
    lap->add_option("--v", lap_v, "probe direction (comma-separated; random if omitted)");
    lap->add_option("--prefix", lap_prefix, "output file prefix");

    auto* test = app.add_subcommand("test", "level-alpha singularity test at x0");
    std::string test_cloud, test_x0, test_v, test_prefix = "test";
    double test_alpha = 0.05, test_radius = 1.0, test_t = 0.0, test_frac = 0.2;
    size_t test_candidates = 64;
    add_common(test, common);
    test->add_option("--cloud", test_cloud, "point cloud CSV")->required();
    test->add_option("--x0", test_x0, "test point (comma-separated; origin if omitted)");
    test->add_option("--alpha", test_alpha, "test level in (0,1)");
    test->add_option("--radius", test_radius, "evaluation ball radius");
    test->add_option("--t", test_t, "bandwidth override (0: formula value)");
    test->add_option("--v", test_v, "probe direction; omit to select on a held-out split");
    test->add_option("--candidates", test_candidates, "random directions scored during selection");
    test->add_option("--select-frac", test_frac, "held-out fraction for direction selection");
    test->add_option("--prefix", test_prefix, "output file prefix");

    auto* sweep = app.add_subcommand("power-sweep", "rejection-rate table over n x angles");
    ExperimentSpec sweep_spec;
    std::string sweep_prefix = "sweep";
    add_common(sweep, common);
    sweep->add_option("--sizes", sweep_spec.sample_sizes, "sample sizes (rows)");
    sweep->add_option("--angles", sweep_spec.h1_angles, "intersection angles (columns)");
    sweep->add_option("--trials", sweep_spec.trials, "trials per cell");
    sweep->add_option("--alpha", sweep_spec.alpha, "test level");
    sweep->add_option("--h0-extent", sweep_spec.h0_half_extent, "half-extent of the null piece");
    sweep->add_option("--h1-extents", sweep_spec.h1_half_extents,
                      "half-extent per angle (sets the union area / density)");
    sweep->add_option("--candidates", sweep_spec.n_candidates, "directions scored per trial");
    sweep->add_option("--prefix", sweep_prefix, "output file prefix");

    auto* est = app.add_subcommand("estimate", "crossing point and angle from a response profile");
    std::string est_response, est_prefix = "run";
    double est_t = 1e-3;
    add_common(est, common);
    est->add_option("--response", est_response, "response CSV from `laplacian`")->required();
    est->add_option("--t", est_t, "bandwidth used for the response")->required();
    est->add_option("--prefix", est_prefix, "output file prefix");

    auto* noise = app.add_subcommand("noise-check",
                                     "Monte-Carlo check of the noise-averaged operator identity");
    size_t noise_n = 200, noise_draws = 100000, noise_eval = 20;
    double noise_sigma = 0.1, noise_t = 0.5;
    std::string noise_prefix = "noise";
    add_common(noise, common);
    noise->add_option("--n", noise_n, "cloud size");
    noise->add_option("--sigma", noise_sigma, "noise standard deviation");
    noise->add_option("--t", noise_t, "kernel bandwidth");
    noise->add_option("--draws", noise_draws, "Monte-Carlo noise draws");
    noise->add_option("--eval-points", noise_eval, "number of evaluation points");
    noise->add_option("--prefix", noise_prefix, "output file prefix");

    auto* zs = app.add_subcommand("zeroset",
                                  "pave the near-target weight set of a spherical network");
    int zs_k = 3;
    std::string zs_signs = "+--", zs_target, zs_ckpt, zs_prefix = "zeroset";
    double zs_delta = 0.01, zs_cap = 0.05, zs_half = 1.2;
    size_t zs_budget = 1000000, zs_inputs = 100;
    bool zs_resume = false;
    add_common(zs, common);
    zs->add_option("--k", zs_k, "node count");
    zs->add_option("--signs", zs_signs, "one +/- per node, e.g. +--");
    zs->add_option("--target", zs_target, "target weights (2 or 2k numbers; default equal)");
    zs->add_option("--delta", zs_delta, "constraint tolerance");
    zs->add_option("--width-cap", zs_cap, "accepted-box width cap");
    zs->add_option("--budget", zs_budget, "max boxes processed");
    zs->add_option("--box-half", zs_half, "search box half-width around the target");
    zs->add_option("--inputs", zs_inputs, "constraint sample count on the circle");
    zs->add_option("--checkpoint", zs_ckpt, "checkpoint file (JSON)");
    zs->add_flag("--resume", zs_resume, "resume from --checkpoint");
    zs->add_option("--prefix", zs_prefix, "output file prefix");

    auto* pca = app.add_subcommand("pca", "project a cloud onto its top principal components");
    std::string pca_cloud, pca_prefix = "proj";
    int pca_dim = 3;
    add_common(pca, common);
    pca->add_option("--cloud", pca_cloud, "point cloud CSV")->required();
    pca->add_option("--dim", pca_dim, "target dimension");
    pca->add_option("--prefix", pca_prefix, "output file prefix");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_gen(common, gen_scene, gen_n, gen_per_piece, gen_sigma, gen_prefix);
        if (lap->parsed())
            return cmd_laplacian(common, lap_cloud, lap_sidecar, lap_piece, lap_through, lap_m,
                                 lap_t, lap_v, lap_prefix);
        if (test->parsed())
            return cmd_test(common, test_cloud, test_x0, test_alpha, test_radius, test_t, test_v,
                            test_candidates, test_frac, test_prefix);
        if (sweep->parsed()) return cmd_power_sweep(common, sweep_spec, sweep_prefix);
        if (est->parsed()) return cmd_estimate(common, est_response, est_t, est_prefix);
        if (noise->parsed())
            return cmd_noise_check(common, noise_n, noise_sigma, noise_t, noise_draws, noise_eval,
                                   noise_prefix);
        if (zs->parsed())
            return cmd_zeroset(common, zs_k, zs_signs, zs_target, zs_delta, zs_cap, zs_budget,
                               zs_half, zs_inputs, zs_ckpt, zs_resume, zs_prefix);
        if (pca->parsed()) return cmd_pca(common, pca_cloud, pca_dim, pca_prefix);
    } catch (const std::exception& e) {
        nlohmann::json err{{"error", e.what()}};
        std::cerr << err.dump() << "\n";
        return 2;
    }
    return 2;
}
