#include "singul/laplacian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "singul/gauss.hpp"
#include "singul/kernels.hpp"
#include "singul/parallel.hpp"
#include "singul/rng.hpp"
#include "singul/summation.hpp"

namespace singul {

double kernel(std::span<const double> x, std::span<const double> y, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("kernel: requires t > 0");
    return std::exp(-dist2(x, y) / t);
}

LaplacianEvaluator::LaplacianEvaluator(const PointCloud& cloud, Vec v, double t)
    : n_(cloud.size()), dim_(cloud.ambient_dim), t_(t), v_(std::move(v)) {
    if (n_ == 0) throw std::invalid_argument("LaplacianEvaluator: empty cloud");
    if (!(t > 0.0)) throw std::invalid_argument("LaplacianEvaluator: requires t > 0");
    if (static_cast<int>(v_.size()) != dim_)
        throw std::invalid_argument("LaplacianEvaluator: direction dimension mismatch");
    soa_.resize(n_ * dim_);
    f_.resize(n_);
    for (size_t i = 0; i < n_; ++i) {
        const auto p = cloud.point(i);
        for (int k = 0; k < dim_; ++k) soa_[static_cast<size_t>(k) * n_ + i] = p[k];
        f_[i] = dot(p, v_);
    }
    cols_.resize(dim_);
    for (int k = 0; k < dim_; ++k) cols_[k] = soa_.data() + static_cast<size_t>(k) * n_;
}

double LaplacianEvaluator::apply(std::span<const double> x, double* weight_sum) const {
    const double fx = dot(x, v_);
    const auto sums =
        kernels::kernel_sums(cols_.data(), f_.data(), n_, dim_, x.data(), fx, 1.0 / t_);
    if (weight_sum) *weight_sum = sums.weight;
    return sums.fdiff / static_cast<double>(n_);
}

double LaplacianEvaluator::apply(std::span<const double> x) const { return apply(x, nullptr); }

double graph_laplacian_apply(const PointCloud& cloud, std::span<const double> x,
                             std::span<const double> v, double t) {
    LaplacianEvaluator eval(cloud, Vec(v.begin(), v.end()), t);
    return eval.apply(x);
}

LaplacianMatrix graph_laplacian_matrix(const PointCloud& cloud, double t, size_t max_n) {
    const size_t n = cloud.size();
    if (n == 0) throw std::invalid_argument("graph_laplacian_matrix: empty cloud");
    if (n > max_n)
        throw std::length_error("graph_laplacian_matrix: n exceeds the dense-matrix cap; use the "
                                "apply path");
    LaplacianMatrix m;
    m.n = n;
    m.weights.assign(n * n, 0.0);
    m.degrees.assign(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i; j < n; ++j) {
            const double w = kernel(cloud.point(i), cloud.point(j), t) / static_cast<double>(n);
            m.weights[i * n + j] = w;
            m.weights[j * n + i] = w;
        }
    }
    for (size_t i = 0; i < n; ++i) {
        CompensatedSum deg;
        for (size_t j = 0; j < n; ++j) deg.add(m.weights[i * n + j]);
        m.degrees[i] = deg.value();
    }
    return m;
}

namespace {

struct QuadCell {
    const ManifoldPiece* piece;
    Vec lo, hi;  // chart subdomain
};

// Chart-space integration window: outside ‖u - chart(x)‖_∞ <= cut the kernel
// is below e^{-144} (the frame-projected distance lower-bounds the ambient
// one). Returns false if the window misses the extent entirely.
bool truncated_window(const ManifoldPiece& p, std::span<const double> x, double t, Vec& lo,
                      Vec& hi) {
    const Vec c = p.chart(x);
    const double cut = 12.0 * std::sqrt(t);
    lo.resize(p.intrinsic_dim);
    hi.resize(p.intrinsic_dim);
    for (int k = 0; k < p.intrinsic_dim; ++k) {
        lo[k] = std::max(p.extent.lo[k], c[k] - cut);
        hi[k] = std::min(p.extent.hi[k], c[k] + cut);
        if (!(lo[k] < hi[k])) return false;
    }
    return true;
}

double integrand(const ManifoldPiece& p, std::span<const double> u, std::span<const double> x,
                 std::span<const double> v, double fx, double inv_t, double density) {
    const Vec y = p.embed(u);
    const double w = std::exp(-dist2(x, y) * inv_t);
    return w * (fx - dot(y, v)) * p.volume_form(u) * density;
}

// Composite tensor Gauss over a list of cells; `cells_per_axis` splits each
// listed cell further.
double quad_pass(const std::vector<QuadCell>& cells, int cells_per_axis, int order,
                 std::span<const double> x, std::span<const double> v, double fx, double inv_t,
                 double density) {
    const GaussRule& rule = gauss_legendre(order);
    CompensatedSum total;
    Vec u;
    for (const auto& cell : cells) {
        const int d = static_cast<int>(cell.lo.size());
        u.resize(d);
        std::vector<int> subcell(d, 0), node(d, 0);
        const Vec step = [&] {
            Vec s(d);
            for (int k = 0; k < d; ++k) s[k] = (cell.hi[k] - cell.lo[k]) / cells_per_axis;
            return s;
        }();
        // Iterate the tensor grid: per axis, cells_per_axis panels × order nodes.
        while (true) {
            double wprod = 1.0;
            for (int k = 0; k < d; ++k) {
                const double a = cell.lo[k] + subcell[k] * step[k];
                const double half = 0.5 * step[k];
                u[k] = a + half * (1.0 + rule.nodes[node[k]]);
                wprod *= half * rule.weights[node[k]];
            }
            total.add(wprod * integrand(*cell.piece, u, x, v, fx, inv_t, density));
            // Odometer over (subcell, node) pairs per axis.
            int k = 0;
            for (; k < d; ++k) {
                if (++node[k] < order) break;
                node[k] = 0;
                if (++subcell[k] < cells_per_axis) break;
                subcell[k] = 0;
            }
            if (k == d) break;
        }
    }
    return total.value();
}

OracleResult run_quadrature(const std::vector<QuadCell>& cells, std::span<const double> x,
                            std::span<const double> v, double t, int quad_resolution, double tol,
                            double truncation_bound, int order) {
    if (quad_resolution < 64)
        throw std::invalid_argument("expected_laplacian_oracle: quad_resolution must be >= 64");
    const double fx = dot(x, v);
    const double inv_t = 1.0 / t;
    int dmax = 1;
    for (const auto& c : cells) dmax = std::max(dmax, static_cast<int>(c.lo.size()));
    const int max_level = dmax <= 1 ? 6 : (dmax == 2 ? 4 : 3);

    int cells_per_axis = std::max(1, quad_resolution / order);
    double prev = quad_pass(cells, cells_per_axis, order, x, v, fx, inv_t, 1.0);
    OracleResult res;
    res.value = prev;
    res.error = std::abs(prev);
    for (int level = 1; level <= max_level; ++level) {
        cells_per_axis *= 2;
        const double cur = quad_pass(cells, cells_per_axis, order, x, v, fx, inv_t, 1.0);
        res.error = std::abs(cur - prev);
        res.value = cur;
        prev = cur;
        if (res.error <= std::max(tol, 1e-16 * std::abs(cur))) {
            res.converged = true;
            break;
        }
    }
    res.error += truncation_bound;
    if (res.error > std::max(tol, 1e-14 * std::abs(res.value))) res.converged = false;
    else res.converged = true;
    return res;
}

double truncation_tail_bound(const Scene& scene, std::span<const double> x) {
    // K_t < e^{-144} outside the window; |f(x)-f(y)| is at most the spatial
    // spread of the configuration.
    double reach = 1.0 + norm(x);
    for (const auto& p : scene.pieces) {
        double ext = norm(p.anchor);
        for (size_t k = 0; k < p.extent.dim(); ++k)
            ext += std::max(std::abs(p.extent.lo[k]), std::abs(p.extent.hi[k]));
        reach = std::max(reach, ext);
    }
    return std::exp(-144.0) * 2.0 * reach;
}

}  // namespace

OracleResult expected_laplacian_oracle(const Scene& scene, int piece, std::span<const double> x,
                                       std::span<const double> v, double t, int quad_resolution,
                                       double tol) {
    const ManifoldPiece& p = scene.pieces.at(piece);
    const double density = 1.0 / scene.total_area();
    Vec lo, hi;
    OracleResult res;
    const double tail = truncation_tail_bound(scene, x) * density;
    if (!truncated_window(p, x, t, lo, hi)) {
        res.value = 0.0;
        res.error = tail;
        res.converged = true;
        return res;
    }
    std::vector<QuadCell> cells{{&p, lo, hi}};
    res = run_quadrature(cells, x, v, t, quad_resolution, tol, tail, 16);
    res.value *= density;
    res.error = res.error * density + tail;
    return res;
}

OracleResult expected_laplacian_full(const Scene& scene, std::span<const double> x,
                                     std::span<const double> v, double t, int quad_resolution,
                                     double tol) {
    const double density = 1.0 / scene.total_area();
    std::vector<QuadCell> cells;
    Vec lo, hi;
    for (const auto& p : scene.pieces) {
        if (truncated_window(p, x, t, lo, hi)) cells.push_back({&p, lo, hi});
    }
    const double tail =
        truncation_tail_bound(scene, x) * density * static_cast<double>(scene.pieces.size());
    OracleResult res;
    if (cells.empty()) {
        res.value = 0.0;
        res.error = tail;
        res.converged = true;
        return res;
    }
    res = run_quadrature(cells, x, v, t, quad_resolution, tol, tail, 20);
    res.value *= density;
    res.error = res.error * density + tail;
    return res;
}

double flat_rect_expected_laplacian(const Scene& scene, int piece, std::span<const double> x,
                                    std::span<const double> v, double t) {
    const ManifoldPiece& p = scene.pieces.at(piece);
    if (p.kind != PieceKind::Flat)
        throw std::invalid_argument("flat_rect_expected_laplacian: flat pieces only");
    const double density = 1.0 / scene.total_area();
    const Vec c = p.chart(x);
    const Vec foot = p.embed(c);
    const Vec off = sub(x, foot);
    const double sqrt_t = std::sqrt(t);

    const int d = p.intrinsic_dim;
    Vec g0(d), g1(d), vf = matvec_t(p.frame, v);
    for (int k = 0; k < d; ++k) {
        const double a = (p.extent.lo[k] - c[k]) / sqrt_t;
        const double b = (p.extent.hi[k] - c[k]) / sqrt_t;
        g0[k] = 0.5 * std::sqrt(M_PI) * sqrt_t * (std::erf(b) - std::erf(a));
        g1[k] = 0.5 * t * (std::exp(-b * b) - std::exp(-a * a));
    }
    double sum = dot(off, v);
    double prod_all = 1.0;
    for (int k = 0; k < d; ++k) prod_all *= g0[k];
    double total = sum * prod_all;
    for (int k = 0; k < d; ++k) {
        double term = vf[k] * g1[k];
        for (int l = 0; l < d; ++l)
            if (l != k) term *= g0[l];
        total += term;
    }
    return density * std::exp(-norm2(off) / t) * total;
}

double noisy_laplacian_apply(const PointCloud& cloud, const std::vector<double>& noise_draws,
                             std::span<const double> x, std::span<const double> v, double t) {
    const size_t n = cloud.size();
    const size_t N = static_cast<size_t>(cloud.ambient_dim);
    if (noise_draws.size() != n * N)
        throw std::invalid_argument("noisy_laplacian_apply: noise draws must be n×N");
    const double fx = dot(x, v);
    CompensatedSum acc;
    Vec y(N);
    for (size_t j = 0; j < n; ++j) {
        const auto pj = cloud.point(j);
        for (size_t k = 0; k < N; ++k) y[k] = pj[k] + noise_draws[j * N + k];
        const double w = std::exp(-dist2(x, y) / t);
        acc.add(w * (fx - dot(y, v)));
    }
    return acc.value() / static_cast<double>(n);
}

LaplacianResponse evaluate_on_curve(const PointCloud& cloud, const ProbeCurve& curve,
                                    std::span<const double> v, double t, unsigned threads) {
    LaplacianEvaluator eval(cloud, Vec(v.begin(), v.end()), t);
    LaplacianResponse resp;
    resp.ambient_dim = curve.ambient_dim;
    resp.pts = curve.pts;
    resp.arc = curve.arc;
    resp.t = t;
    resp.v.assign(v.begin(), v.end());
    resp.values.assign(curve.size(), 0.0);
    parallel_for(curve.size(), threads,
                 [&](size_t i) { resp.values[i] = eval.apply(curve.point(i)); });
    return resp;
}

Vec select_direction(const PointCloud& cloud, const std::vector<size_t>& eval_idx, double t,
                     const std::vector<Vec>& candidates) {
    if (candidates.empty())
        throw std::invalid_argument("select_direction: empty candidate set");
    if (eval_idx.empty())
        throw std::invalid_argument("select_direction: empty evaluation set");
    double best = -1.0;
    size_t best_i = 0;
    for (size_t ci = 0; ci < candidates.size(); ++ci) {
        LaplacianEvaluator eval(cloud, candidates[ci], t);
        double score = 0.0;
        for (size_t idx : eval_idx) score = std::max(score, std::abs(eval.apply(cloud.point(idx))));
        if (score > best) {
            best = score;
            best_i = ci;
        }
    }
    return candidates[best_i];
}

Vec select_direction_random(const PointCloud& cloud, const std::vector<size_t>& eval_idx,
                            double t, size_t n_candidates, uint64_t seed) {
    if (n_candidates == 0)
        throw std::invalid_argument("select_direction_random: need at least one candidate");
    Rng rng(mix_seed(seed, 0xd19ec7));
    std::vector<Vec> candidates(n_candidates);
    for (auto& c : candidates) c = rng.unit_vector(cloud.ambient_dim);
    return select_direction(cloud, eval_idx, t, candidates);
}

std::string NoiseIdentityResult::to_json() const {
    nlohmann::json j;
    j["c_plain"] = c_plain;
    j["c_doubled"] = c_doubled;
    j["fitted_c"] = fitted_c;
    j["fitted_se"] = fitted_se;
    j["dev_plain"] = dev_plain;
    j["dev_doubled"] = dev_doubled;
    j["selected"] = selected == 1 ? "plain" : (selected == 2 ? "doubled" : "undecided");
    j["mc_mean"] = mc_mean;
    j["mc_se"] = mc_se;
    j["reference"] = reference;
    return j.dump(2);
}

NoiseIdentityResult noise_identity_check(const PointCloud& cloud, double sigma, double t,
                                         size_t n_draws, const std::vector<Vec>& eval_points,
                                         std::span<const double> v, uint64_t seed) {
    if (eval_points.empty())
        throw std::invalid_argument("noise_identity_check: no evaluation points");
    const size_t n = cloud.size();
    const size_t N = static_cast<size_t>(cloud.ambient_dim);
    const size_t m = eval_points.size();

    NoiseIdentityResult res;
    res.c_plain = std::pow(t / (2.0 * sigma * sigma + t), 0.5 * N + 1.0);
    res.c_doubled = 2.0 * res.c_plain;

    Vec sum(m, 0.0), sumsq(m, 0.0);
    std::vector<double> draws(n * N);
    Rng rng(mix_seed(seed, 0x10153));
    for (size_t d = 0; d < n_draws; ++d) {
        for (auto& e : draws) e = sigma * rng.normal();
        for (size_t j = 0; j < m; ++j) {
            const double val = noisy_laplacian_apply(cloud, draws, eval_points[j], v, t);
            sum[j] += val;
            sumsq[j] += val * val;
        }
    }
    res.mc_mean.resize(m);
    res.mc_se.resize(m);
    res.reference.resize(m);
    const double t_eff = 2.0 * sigma * sigma + t;
    LaplacianEvaluator ref_eval(cloud, Vec(v.begin(), v.end()), t_eff);
    for (size_t j = 0; j < m; ++j) {
        res.mc_mean[j] = sum[j] / static_cast<double>(n_draws);
        const double var =
            std::max(0.0, sumsq[j] / n_draws - res.mc_mean[j] * res.mc_mean[j]);
        res.mc_se[j] = std::sqrt(var / static_cast<double>(n_draws));
        res.reference[j] = ref_eval.apply(eval_points[j]);
    }
    // Weighted least squares for the scalar factor.
    double num = 0.0, den = 0.0;
    for (size_t j = 0; j < m; ++j) {
        const double w = res.mc_se[j] > 0.0 ? 1.0 / (res.mc_se[j] * res.mc_se[j]) : 0.0;
        num += w * res.reference[j] * res.mc_mean[j];
        den += w * res.reference[j] * res.reference[j];
    }
    if (den <= 0.0) return res;
    res.fitted_c = num / den;
    res.fitted_se = 1.0 / std::sqrt(den);
    res.dev_plain = std::abs(res.fitted_c - res.c_plain) / res.fitted_se;
    res.dev_doubled = std::abs(res.fitted_c - res.c_doubled) / res.fitted_se;
    if (res.dev_plain <= 3.0 && res.dev_doubled >= 5.0)
        res.selected = 1;
    else if (res.dev_doubled <= 3.0 && res.dev_plain >= 5.0)
        res.selected = 2;
    return res;
}

}  // namespace singul
