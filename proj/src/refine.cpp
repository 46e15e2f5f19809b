#include "m3d/refine.hpp"

#include <algorithm>
#include <cmath>

namespace m3d {

const std::array<const char*, kNumDims> kDimNames = {"w", "h", "l", "x", "y", "z", "theta"};

IntervalSpec IntervalSpec::defaults() {
    IntervalSpec s;
    s.dims[static_cast<int>(Dim::W)] = {0.10, 5};
    s.dims[static_cast<int>(Dim::H)] = {0.13, 5};
    s.dims[static_cast<int>(Dim::L)] = {0.41, 5};
    s.dims[static_cast<int>(Dim::X)] = {0.48, 10};
    s.dims[static_cast<int>(Dim::Y)] = {0.10, 5};
    s.dims[static_cast<int>(Dim::Z)] = {1.65, 10};
    s.dims[static_cast<int>(Dim::Theta)] = {0.05, 5};
    return s;
}

int IntervalSpec::total_classes() const {
    int total = 0;
    for (int d = 0; d < kNumDims; ++d)
        total += 2 * dims[d].n_half + 1;
    return total;
}

Residual encode_residual(const Box3D& g, const Box3D& gt) {
    const double diag = std::sqrt(g.l * g.l + g.w * g.w);
    Residual r;
    r.dx = (gt.x - g.x) / diag;
    r.dy = (gt.y - g.y) / diag;
    r.dz = (gt.z - g.z) / g.h;
    r.dl = std::log(gt.l / g.l);
    r.dw = std::log(gt.w / g.w);
    r.dh = std::log(gt.h / g.h);
    r.dtheta = wrap_angle(gt.theta - g.theta);
    return r;
}

Box3D decode_residual(const Box3D& g, const Residual& r) {
    const double diag = std::sqrt(g.l * g.l + g.w * g.w);
    Box3D out;
    out.x = g.x + r.dx * diag;
    out.y = g.y + r.dy * diag;
    out.z = g.z + r.dz * g.h;
    out.l = g.l * std::exp(r.dl);
    out.w = g.w * std::exp(r.dw);
    out.h = g.h * std::exp(r.dh);
    out.theta = wrap_angle(g.theta + r.dtheta);
    return out;
}

std::array<double, kNumDims> raw_deltas(const Box3D& g, const Box3D& gt) {
    return {gt.w - g.w,  gt.h - g.h, gt.l - g.l,
            gt.x - g.x,  gt.y - g.y, gt.z - g.z,
            wrap_angle(gt.theta - g.theta)};
}

int classify_delta(const IntervalSpec& spec, double delta, Dim d) {
    const auto& di = spec.dim(d);
    const int offset = static_cast<int>(std::lround(delta / di.sigma));
    const int idx = di.n_half + offset;
    return std::clamp(idx, 0, 2 * di.n_half);
}

Box3D apply_shift(const Box3D& box, Dim d, double amount) {
    Box3D out = box;
    switch (d) {
        case Dim::W: out.w = std::max(box.w + amount, 1e-6); break;
        case Dim::H: out.h = std::max(box.h + amount, 1e-6); break;
        case Dim::L: out.l = std::max(box.l + amount, 1e-6); break;
        case Dim::X: out.x += amount; break;
        case Dim::Y: out.y += amount; break;
        case Dim::Z: out.z += amount; break;
        case Dim::Theta: out.theta = wrap_angle(box.theta + amount); break;
    }
    return out;
}

std::array<std::vector<Box3D>, kNumDims> shifted_candidates(const Box3D& guidance,
                                                            const IntervalSpec& spec) {
    std::array<std::vector<Box3D>, kNumDims> out;
    for (int d = 0; d < kNumDims; ++d) {
        const Dim dim = static_cast<Dim>(d);
        const int n = spec.num_classes(dim);
        out[d].reserve(n);
        for (int cls = 0; cls < n; ++cls)
            out[d].push_back(apply_shift(guidance, dim, spec.center(dim, cls)));
    }
    return out;
}

double quality_label(double ov) {
    if (ov < 0 || ov > 1)
        throw OutOfRange("overlap must be in [0, 1]");
    if (ov > 0.75) return 1.0;
    if (ov < 0.25) return 0.0;
    return 2 * ov - 0.5;
}

namespace {
constexpr double kBceEps = 1e-7;
double clip_p(double p) { return std::clamp(p, kBceEps, 1 - kBceEps); }
}  // namespace

double quality_bce(double p, double q) {
    p = clip_p(p);
    return -(q * std::log(p) + (1 - q) * std::log(1 - p));
}

double quality_bce_dp(double p, double q) {
    p = clip_p(p);
    return -q / p + (1 - q) / (1 - p);
}

IntervalLabels make_interval_labels(
    const Box3D& guidance, const std::optional<Box3D>& gt, const IntervalSpec& spec,
    const std::function<double(const Box3D&, const Box3D&)>& iou3d_fn) {
    IntervalLabels labels;
    for (int d = 0; d < kNumDims; ++d)
        labels.q[d].assign(spec.num_classes(static_cast<Dim>(d)), 0.0);

    if (!gt)
        return labels;

    labels.matched = true;
    const auto candidates = shifted_candidates(guidance, spec);
    for (int d = 0; d < kNumDims; ++d)
        for (size_t cls = 0; cls < candidates[d].size(); ++cls)
            labels.q[d][cls] = quality_label(iou3d_fn(candidates[d][cls], *gt));
    return labels;
}

std::optional<Refined> decode_prediction(const Box3D& guidance,
                                         const IntervalScores& scores,
                                         const IntervalSpec& spec,
                                         double reject_threshold,
                                         double det_score) {
    for (int d = 0; d < kNumDims; ++d) {
        const int expected = spec.num_classes(static_cast<Dim>(d));
        if (static_cast<int>(scores.p[d].size()) != expected)
            throw ShapeMismatch("dimension '" + std::string(kDimNames[d]) + "' expects " +
                                std::to_string(expected) + " scores, got " +
                                std::to_string(scores.p[d].size()));
    }

    Box3D box = guidance;
    double log_conf = 0;
    bool any_confident = false;
    for (int d = 0; d < kNumDims; ++d) {
        const Dim dim = static_cast<Dim>(d);
        const auto& p = scores.p[d];
        const auto best = std::max_element(p.begin(), p.end());
        const int cls = static_cast<int>(best - p.begin());
        if (*best >= reject_threshold)
            any_confident = true;
        box = apply_shift(box, dim, spec.center(dim, cls));
        log_conf += std::log(std::max(*best, 1e-300));
    }
    if (!any_confident)
        return std::nullopt;

    return Refined{box, std::exp(log_conf / kNumDims) * det_score};
}

DeltaStats compute_delta_stats(const std::vector<std::pair<Box3D, Box3D>>& pairs) {
    DeltaStats s;
    s.count = pairs.size();
    if (pairs.empty())
        return s;

    std::array<double, kNumDims> sum{}, sumsq{};
    for (int d = 0; d < kNumDims; ++d) {
        s.min[d] = std::numeric_limits<double>::infinity();
        s.max[d] = -s.min[d];
    }
    for (const auto& [guidance, gt] : pairs) {
        const auto deltas = raw_deltas(guidance, gt);
        for (int d = 0; d < kNumDims; ++d) {
            sum[d] += deltas[d];
            sumsq[d] += deltas[d] * deltas[d];
            s.min[d] = std::min(s.min[d], deltas[d]);
            s.max[d] = std::max(s.max[d], deltas[d]);
        }
    }
    const double n = static_cast<double>(pairs.size());
    for (int d = 0; d < kNumDims; ++d) {
        s.mean[d] = sum[d] / n;
        const double var = std::max(sumsq[d] / n - s.mean[d] * s.mean[d], 0.0);
        s.stddev[d] = std::sqrt(var);
    }
    return s;
}

IntervalSpec spec_from_stats(const DeltaStats& stats) {
    IntervalSpec spec;
    for (int d = 0; d < kNumDims; ++d) {
        const double sigma = stats.stddev[d] > 0 ? stats.stddev[d] : 1.0;
        const double reach = std::max(std::abs(stats.min[d]), std::abs(stats.max[d]));
        const int n = static_cast<int>(std::ceil(reach / sigma));
        spec.dims[d] = {sigma, std::clamp(n, 1, 10)};
    }
    return spec;
}

}  // namespace m3d
