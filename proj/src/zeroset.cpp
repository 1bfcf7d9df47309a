#include "singul/zeroset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "singul/io.hpp"

namespace singul::zeroset {

namespace {

double step_down(double x, int ulps) {
    for (int i = 0; i < ulps; ++i) x = std::nextafter(x, -std::numeric_limits<double>::infinity());
    return x;
}

double step_up(double x, int ulps) {
    for (int i = 0; i < ulps; ++i) x = std::nextafter(x, std::numeric_limits<double>::infinity());
    return x;
}

}  // namespace

Interval widen(Interval a) { return {step_down(a.lo, 2), step_up(a.hi, 2)}; }

Interval add(Interval a, Interval b) { return widen({a.lo + b.lo, a.hi + b.hi}); }

Interval sub(Interval a, Interval b) { return widen({a.lo - b.hi, a.hi - b.lo}); }

Interval mul(Interval a, Interval b) {
    const double c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    return widen({std::min({c[0], c[1], c[2], c[3]}), std::max({c[0], c[1], c[2], c[3]})});
}

Interval scale(Interval a, double s) {
    return s >= 0.0 ? widen({a.lo * s, a.hi * s}) : widen({a.hi * s, a.lo * s});
}

Interval relu(Interval a) { return {std::max(0.0, a.lo), std::max(0.0, a.hi)}; }

Interval abs_value(Interval a) {
    if (a.lo >= 0.0) return a;
    if (a.hi <= 0.0) return {-a.hi, -a.lo};
    return {0.0, std::max(-a.lo, a.hi)};
}

std::optional<Interval> intersect(Interval a, Interval b) {
    const Interval r{std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
    if (r.lo > r.hi) return std::nullopt;
    return r;
}

double Box::max_width() const {
    double w = 0.0;
    for (const auto& i : iv) w = std::max(w, i.width());
    return w;
}

int Box::widest_axis() const {
    int best = 0;
    double w = -1.0;
    for (size_t k = 0; k < iv.size(); ++k) {
        if (iv[k].width() > w) {
            w = iv[k].width();
            best = static_cast<int>(k);
        }
    }
    return best;
}

Vec Box::centroid() const {
    Vec c(iv.size());
    for (size_t k = 0; k < iv.size(); ++k) c[k] = iv[k].mid();
    return c;
}

bool Box::inside(const Box& outer) const {
    for (size_t k = 0; k < iv.size(); ++k)
        if (iv[k].lo < outer.iv[k].lo || iv[k].hi > outer.iv[k].hi) return false;
    return true;
}

double SphericalNet::eval(std::span<const double> w_flat, std::span<const double> x) const {
    double s = 0.0;
    for (int i = 0; i < k; ++i) {
        const double d = w_flat[2 * i] * x[0] + w_flat[2 * i + 1] * x[1];
        s += signs[i] * std::max(0.0, d);
    }
    return s;
}

double SphericalNet::eval_target(std::span<const double> x) const {
    double s = 0.0;
    for (int i = 0; i < k; ++i) {
        const double d = target[i][0] * x[0] + target[i][1] * x[1];
        s += signs[i] * std::max(0.0, d);
    }
    return s;
}

double SphericalNet::lipschitz() const { return std::sqrt(static_cast<double>(k)); }

CircleDataset CircleDataset::uniform(const SphericalNet& net, size_t m) {
    CircleDataset d;
    d.inputs.resize(m);
    d.targets.resize(m);
    for (size_t i = 0; i < m; ++i) {
        const double phi = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(m);
        d.inputs[i] = {std::cos(phi), std::sin(phi)};
        d.targets[i] = net.eval_target(d.inputs[i]);
    }
    return d;
}

namespace {

struct ForwardTrace {
    std::vector<Interval> dots;    // per node: w_i · x
    std::vector<Interval> relus;   // per node: (w_i · x)_+
    std::vector<Interval> terms;   // per node: a_i · relu
    Interval total;
};

ForwardTrace forward(const Box& box, const SphericalNet& net, std::span<const double> x) {
    ForwardTrace tr;
    tr.dots.resize(net.k);
    tr.relus.resize(net.k);
    tr.terms.resize(net.k);
    Interval total = Interval::point(0.0);
    for (int i = 0; i < net.k; ++i) {
        const Interval d =
            add(scale(box.iv[2 * i], x[0]), scale(box.iv[2 * i + 1], x[1]));
        tr.dots[i] = d;
        tr.relus[i] = relu(d);
        tr.terms[i] = scale(tr.relus[i], static_cast<double>(net.signs[i]));
        total = add(total, tr.terms[i]);
    }
    tr.total = total;
    return tr;
}

// Backward pass for one constraint total ∈ allowed; shrinks box in place.
// Returns false when the box is proven infeasible.
bool revise(Box& box, const SphericalNet& net, std::span<const double> x, Interval allowed) {
    ForwardTrace tr = forward(box, net, x);
    auto total = intersect(tr.total, allowed);
    if (!total) return false;

    for (int i = 0; i < net.k; ++i) {
        // Sum node: term_i ∈ total' - Σ_{j≠i} term_j.
        Interval rest = Interval::point(0.0);
        for (int j = 0; j < net.k; ++j)
            if (j != i) rest = add(rest, tr.terms[j]);
        auto term = intersect(tr.terms[i], widen(sub(*total, rest)));
        if (!term) return false;
        // Sign: relu_i = a_i · term_i.
        auto rl = intersect(tr.relus[i], widen(scale(*term, static_cast<double>(net.signs[i]))));
        if (!rl) return false;
        if (rl->hi < 0.0) return false;
        // ReLU: d ≤ r.hi always; d ≥ r.lo only when the output is surely
        // positive.
        Interval d = tr.dots[i];
        d.hi = std::min(d.hi, step_up(rl->hi, 2));
        if (rl->lo > 0.0) d.lo = std::max(d.lo, step_down(rl->lo, 2));
        if (d.lo > d.hi) return false;
        tr.dots[i] = d;
        // Dot node: w0·x0 + w1·x1 = d.
        for (int c = 0; c < 2; ++c) {
            const double xc = x[c], xo = x[1 - c];
            if (std::abs(xc) < 1e-12) continue;
            const Interval other = scale(box.iv[2 * i + (1 - c)], xo);
            const Interval cand = scale(widen(sub(d, other)), 1.0 / xc);
            auto w = intersect(box.iv[2 * i + c], widen(cand));
            if (!w) return false;
            box.iv[2 * i + c] = *w;
        }
    }
    return true;
}

double box_volume_proxy(const Box& b) {
    double s = 0.0;
    for (const auto& i : b.iv) s += i.width();
    return s;
}

}  // namespace

Interval interval_eval_net(const Box& box, const SphericalNet& net, std::span<const double> x) {
    return forward(box, net, x).total;
}

std::optional<Box> contract(const Box& box, const SphericalNet& net, const CircleDataset& data,
                            double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("contract: requires delta > 0");
    Box work = box;
    for (int round = 0; round < 30; ++round) {
        const double before = box_volume_proxy(work);
        for (size_t s = 0; s < data.inputs.size(); ++s) {
            const Interval allowed{data.targets[s] - delta, data.targets[s] + delta};
            if (!revise(work, net, data.inputs[s], allowed)) return std::nullopt;
        }
        const double after = box_volume_proxy(work);
        if (before <= 0.0 || (before - after) < 0.01 * before) break;
    }
    return work;
}

namespace {

nlohmann::json box_to_json(const Box& b) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& i : b.iv) j.push_back({i.lo, i.hi});
    return j;
}

Box box_from_json(const nlohmann::json& j) {
    Box b;
    for (const auto& e : j) b.iv.push_back({e[0].get<double>(), e[1].get<double>()});
    return b;
}

struct PaveState {
    std::vector<Box> stack;
    Paving paving;
};

void save_checkpoint(const std::string& path, const PaveState& st) {
    nlohmann::json j;
    j["version"] = 1;
    j["width_cap"] = st.paving.width_cap;
    j["rejected"] = st.paving.rejected;
    j["processed"] = st.paving.processed;
    j["stack"] = nlohmann::json::array();
    for (const auto& b : st.stack) j["stack"].push_back(box_to_json(b));
    j["accepted"] = nlohmann::json::array();
    for (const auto& b : st.paving.accepted) j["accepted"].push_back(box_to_json(b));
    atomic_write_text(path, j.dump());
}

PaveState load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    nlohmann::json j;
    in >> j;
    PaveState st;
    st.paving.width_cap = j["width_cap"].get<double>();
    st.paving.rejected = j["rejected"].get<size_t>();
    st.paving.processed = j["processed"].get<size_t>();
    for (const auto& e : j["stack"]) st.stack.push_back(box_from_json(e));
    for (const auto& e : j["accepted"]) st.paving.accepted.push_back(box_from_json(e));
    return st;
}

Paving pave_loop(const SphericalNet& net, const CircleDataset& data, double delta,
                 PaveState st, const PaveOptions& options) {
    size_t since_checkpoint = 0;
    while (!st.stack.empty()) {
        if (st.paving.processed >= options.budget) {
            st.paving.complete = false;
            break;
        }
        Box box = st.stack.back();
        st.stack.pop_back();
        ++st.paving.processed;
        auto contracted = contract(box, net, data, delta);
        if (!contracted) {
            ++st.paving.rejected;
        } else if (contracted->max_width() <= options.width_cap) {
            st.paving.accepted.push_back(*contracted);
        } else {
            const int axis = contracted->widest_axis();
            const double mid = contracted->iv[axis].mid();
            Box lo_half = *contracted, hi_half = *contracted;
            lo_half.iv[axis].hi = mid;
            hi_half.iv[axis].lo = mid;
            st.stack.push_back(hi_half);
            st.stack.push_back(lo_half);  // lower half explored first
        }
        if (!options.checkpoint_path.empty() && ++since_checkpoint >= options.checkpoint_every) {
            since_checkpoint = 0;
            save_checkpoint(options.checkpoint_path, st);
        }
    }
    if (!options.checkpoint_path.empty()) save_checkpoint(options.checkpoint_path, st);
    // Canonical order regardless of exploration schedule.
    std::sort(st.paving.accepted.begin(), st.paving.accepted.end(),
              [](const Box& a, const Box& b) {
                  for (size_t k = 0; k < a.iv.size(); ++k) {
                      if (a.iv[k].lo != b.iv[k].lo) return a.iv[k].lo < b.iv[k].lo;
                      if (a.iv[k].hi != b.iv[k].hi) return a.iv[k].hi < b.iv[k].hi;
                  }
                  return false;
              });
    return st.paving;
}

}  // namespace

Paving pave(const SphericalNet& net, const CircleDataset& data, double delta, const Box& domain,
            const PaveOptions& options) {
    if (!(options.width_cap > 0.0)) throw std::invalid_argument("pave: requires width_cap > 0");
    PaveState st;
    st.paving.width_cap = options.width_cap;
    st.stack.push_back(domain);
    return pave_loop(net, data, delta, std::move(st), options);
}

Paving pave_resume(const SphericalNet& net, const CircleDataset& data, double delta,
                   const std::string& checkpoint_path, const PaveOptions& options) {
    PaveState st = load_checkpoint(checkpoint_path);
    PaveOptions opts = options;
    opts.width_cap = st.paving.width_cap;
    opts.checkpoint_path = checkpoint_path;
    st.paving.complete = true;
    return pave_loop(net, data, delta, std::move(st), opts);
}

std::string Paving::to_csv() const {
    std::ostringstream os;
    if (!accepted.empty()) {
        for (size_t k = 0; k < accepted[0].iv.size(); ++k)
            os << (k ? "," : "") << "lo" << k << ",hi" << k;
        os << "\n";
    }
    for (const auto& b : accepted) {
        for (size_t k = 0; k < b.iv.size(); ++k)
            os << (k ? "," : "") << format_double(b.iv[k].lo) << "," << format_double(b.iv[k].hi);
        os << "\n";
    }
    return os.str();
}

PointCloud centroids(const Paving& paving) {
    if (paving.accepted.empty())
        throw std::runtime_error("centroids: paving has no accepted boxes");
    PointCloud cloud;
    cloud.ambient_dim = static_cast<int>(paving.accepted[0].dim());
    for (const auto& b : paving.accepted) cloud.append(b.centroid(), -1);
    cloud.labels.clear();
    return cloud;
}

}  // namespace singul::zeroset
