#include "m3d/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace m3d {

const char* difficulty_name(Difficulty d) {
    switch (d) {
        case Difficulty::Easy: return "easy";
        case Difficulty::Moderate: return "moderate";
        case Difficulty::Hard: return "hard";
        case Difficulty::Ignored: return "ignored";
    }
    return "?";
}

namespace {

constexpr double kClipTol = 1e-9;

double cross2(const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

double polygon_area(const std::vector<Vec2>& poly) {
    double acc = 0;
    const size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % n];
        acc += p.x() * q.y() - q.x() * p.y();
    }
    return std::abs(acc) / 2;
}

double signed_area(const std::vector<Vec2>& poly) {
    double acc = 0;
    for (size_t i = 0; i < poly.size(); ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % poly.size()];
        acc += p.x() * q.y() - q.x() * p.y();
    }
    return acc / 2;
}

Vec2 segment_intersection(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const double a1 = b.y() - a.y();
    const double b1 = a.x() - b.x();
    const double c1 = a1 * a.x() + b1 * a.y();
    const double a2 = d.y() - c.y();
    const double b2 = c.x() - d.x();
    const double c2 = a2 * c.x() + b2 * c.y();
    const double det = a1 * b2 - a2 * b1;
    return Vec2((b2 * c1 - b1 * c2) / det, (a1 * c2 - a2 * c1) / det);
}

}  // namespace

std::array<Vec2, 4> bev_rect(const Box3D& box) {
    const auto c = corners3d(box);
    return {Vec2(c[0].x(), c[0].z()), Vec2(c[1].x(), c[1].z()),
            Vec2(c[2].x(), c[2].z()), Vec2(c[3].x(), c[3].z())};
}

double bev_intersection_area(const std::array<Vec2, 4>& rect_a,
                             const std::array<Vec2, 4>& rect_b) {
    std::vector<Vec2> subject(rect_a.begin(), rect_a.end());
    std::vector<Vec2> clip(rect_b.begin(), rect_b.end());
    if (signed_area(clip) < 0)
        std::reverse(clip.begin(), clip.end());

    // Sutherland-Hodgman: clip the subject polygon by each edge of the
    // (now counter-clockwise) clip polygon. Collinear vertices are kept.
    for (size_t e = 0; e < clip.size() && !subject.empty(); ++e) {
        const Vec2& ce0 = clip[e];
        const Vec2& ce1 = clip[(e + 1) % clip.size()];
        std::vector<Vec2> output;
        output.reserve(subject.size() + 4);
        for (size_t i = 0; i < subject.size(); ++i) {
            const Vec2& cur = subject[i];
            const Vec2& nxt = subject[(i + 1) % subject.size()];
            const bool cur_in = cross2(ce0, ce1, cur) >= -kClipTol;
            const bool nxt_in = cross2(ce0, ce1, nxt) >= -kClipTol;
            if (cur_in) {
                output.push_back(cur);
                if (!nxt_in)
                    output.push_back(segment_intersection(ce0, ce1, cur, nxt));
            } else if (nxt_in) {
                output.push_back(segment_intersection(ce0, ce1, cur, nxt));
            }
        }
        subject = std::move(output);
    }
    if (subject.size() < 3)
        return 0;
    return polygon_area(subject);
}

double iou3d(const Box3D& a, const Box3D& b) {
    const double inter_area = bev_intersection_area(bev_rect(a), bev_rect(b));
    const double y_overlap =
        std::min(a.y, b.y) - std::max(a.y - a.h, b.y - b.h);
    if (inter_area <= 0 || y_overlap <= 0)
        return 0;
    const double inter = inter_area * y_overlap;
    const double union_vol = a.w * a.h * a.l + b.w * b.h * b.l - inter;
    if (union_vol <= 0)
        return 0;
    return std::clamp(inter / union_vol, 0.0, 1.0);
}

double iou2d(const Box2D& a, const Box2D& b) {
    const double iw = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
    const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
    if (iw <= 0 || ih <= 0)
        return 0;
    const double inter = iw * ih;
    return inter / (a.w2d * a.h2d + b.w2d * b.h2d - inter);
}

Difficulty difficulty_of(const GroundTruth& gt, const DifficultyThresholds& thr) {
    for (int level = 0; level < 3; ++level) {
        if (gt.box2d.h2d >= thr.min_height[level] &&
            gt.occlusion <= thr.max_occlusion[level] &&
            gt.truncation <= thr.max_truncation[level])
            return static_cast<Difficulty>(level);
    }
    return Difficulty::Ignored;
}

namespace {

/// One generic greedy evaluator behind AP_3D / ALP / AOS. `affinity` must
/// be higher-is-better; a ground truth is matchable when affinity >=
/// min_affinity. `tp_weight` is the per-TP contribution to the similarity
/// numerator (1 for plain AP).
struct MatcherSpec {
    std::function<double(const DetectionResult&, const GroundTruth&)> affinity;
    double min_affinity = 0;
    std::function<double(const DetectionResult&, const GroundTruth&)> tp_weight;
};

bool gt_is_counted(const GroundTruth& gt, const EvalOptions& opt) {
    if (!opt.apply_difficulty)
        return true;
    const Difficulty d = difficulty_of(gt, opt.thresholds);
    return d != Difficulty::Ignored &&
           static_cast<int>(d) <= static_cast<int>(opt.difficulty);
}

ApResult evaluate(const FrameDets& dets, const FrameGts& gts, const EvalOptions& opt,
                  const MatcherSpec& spec) {
    struct DetRef {
        size_t frame;
        const DetectionResult* det;
        size_t order;  // input order, tie-break
    };
    std::vector<DetRef> all;
    size_t n_gt = 0;
    const size_t frames = std::max(dets.size(), gts.size());

    std::vector<std::vector<const GroundTruth*>> frame_gts(frames);
    std::vector<std::vector<bool>> counted(frames), matched(frames);
    for (size_t f = 0; f < frames; ++f) {
        if (f < gts.size()) {
            for (const auto& gt : gts[f]) {
                if (gt.class_name != opt.class_name)
                    continue;
                frame_gts[f].push_back(&gt);
                const bool c = gt_is_counted(gt, opt);
                counted[f].push_back(c);
                matched[f].push_back(false);
                if (c) ++n_gt;
            }
        }
        if (f < dets.size()) {
            for (const auto& det : dets[f]) {
                if (det.class_name != opt.class_name)
                    continue;
                all.push_back({f, &det, all.size()});
            }
        }
    }

    std::sort(all.begin(), all.end(), [](const DetRef& a, const DetRef& b) {
        if (a.det->score != b.det->score)
            return a.det->score > b.det->score;
        return a.order < b.order;
    });

    // Greedy matching in score order; each ground truth is consumable once.
    // A detection whose only match is an ignored ground truth is dropped
    // from the curve entirely.
    std::vector<double> scores, weights;
    std::vector<bool> is_tp;
    for (const auto& ref : all) {
        int best = -1;
        double best_aff = -std::numeric_limits<double>::infinity();
        bool best_counted = false;
        const auto& fgts = frame_gts[ref.frame];
        for (size_t i = 0; i < fgts.size(); ++i) {
            if (matched[ref.frame][i])
                continue;
            const double aff = spec.affinity(*ref.det, *fgts[i]);
            if (aff < spec.min_affinity)
                continue;
            const bool c = counted[ref.frame][i];
            if (best < 0 || (c && !best_counted) || (c == best_counted && aff > best_aff)) {
                best = static_cast<int>(i);
                best_aff = aff;
                best_counted = c;
            }
        }
        if (best >= 0 && !best_counted)
            continue;  // matched an ignored ground truth
        scores.push_back(ref.det->score);
        if (best >= 0) {
            matched[ref.frame][best] = true;
            is_tp.push_back(true);
            weights.push_back(spec.tp_weight ? spec.tp_weight(*ref.det, *frame_gts[ref.frame][best])
                                             : 1.0);
        } else {
            is_tp.push_back(false);
            weights.push_back(0.0);
        }
    }

    ApResult result;
    if (n_gt == 0)
        return result;

    double tp = 0, fp = 0, sim = 0;
    for (size_t i = 0; i < scores.size(); ++i) {
        if (is_tp[i]) {
            tp += 1;
            sim += weights[i];
        } else {
            fp += 1;
        }
        result.curve.recall.push_back(tp / static_cast<double>(n_gt));
        result.curve.precision.push_back(tp / (tp + fp));
        result.curve.similarity.push_back(sim / (tp + fp));
    }

    // Interpolated AP over a fixed recall grid; precision at recall r is the
    // maximum over all samples with recall >= r. The 11-point grid includes
    // r = 0; the 40-point grid starts at 1/40.
    std::vector<double> grid;
    if (opt.forty_point) {
        for (int i = 1; i <= 40; ++i) grid.push_back(i / 40.0);
    } else {
        for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
    }

    double acc = 0;
    for (const double r : grid) {
        double best = 0;
        for (size_t i = 0; i < result.curve.recall.size(); ++i)
            if (result.curve.recall[i] >= r - 1e-12)
                best = std::max(best, result.curve.similarity[i]);
        acc += best;
    }
    result.ap = acc / static_cast<double>(grid.size());
    return result;
}

}  // namespace

ApResult average_precision(const FrameDets& dets, const FrameGts& gts,
                           double iou_threshold, const EvalOptions& opt) {
    MatcherSpec spec;
    spec.affinity = [](const DetectionResult& d, const GroundTruth& g) {
        return iou3d(d.box3d, g.box3d);
    };
    spec.min_affinity = iou_threshold;
    return evaluate(dets, gts, opt, spec);
}

ApResult alp(const FrameDets& dets, const FrameGts& gts, double distance_threshold_m,
             const EvalOptions& opt) {
    MatcherSpec spec;
    spec.affinity = [](const DetectionResult& d, const GroundTruth& g) {
        const Vec3 a(d.box3d.x, d.box3d.y, d.box3d.z);
        const Vec3 b(g.box3d.x, g.box3d.y, g.box3d.z);
        return -(a - b).norm();  // higher is better
    };
    spec.min_affinity = -distance_threshold_m;
    return evaluate(dets, gts, opt, spec);
}

ApResult aos(const FrameDets& dets, const FrameGts& gts, double iou2d_threshold,
             const EvalOptions& opt) {
    MatcherSpec spec;
    spec.affinity = [](const DetectionResult& d, const GroundTruth& g) {
        return iou2d(d.box2d, g.box2d);
    };
    spec.min_affinity = iou2d_threshold;
    spec.tp_weight = [](const DetectionResult& d, const GroundTruth& g) {
        return (1 + std::cos(d.alpha - g.alpha)) / 2;
    };
    return evaluate(dets, gts, opt, spec);
}

namespace {

double recall_generic(const FrameBoxes& guidances, const FrameGts& gts,
                      const EvalOptions& opt,
                      const std::function<bool(const Box3D&, const Box3D&)>& hit) {
    size_t n_gt = 0, recalled = 0;
    const size_t frames = std::max(guidances.size(), gts.size());
    for (size_t f = 0; f < frames; ++f) {
        if (f >= gts.size())
            continue;
        for (const auto& gt : gts[f]) {
            if (gt.class_name != opt.class_name || !gt_is_counted(gt, opt))
                continue;
            ++n_gt;
            if (f >= guidances.size())
                continue;
            for (const auto& g : guidances[f]) {
                if (hit(g, gt.box3d)) {
                    ++recalled;
                    break;
                }
            }
        }
    }
    if (n_gt == 0)
        return 0;
    return static_cast<double>(recalled) / static_cast<double>(n_gt);
}

}  // namespace

double recall_loc(const FrameBoxes& guidances, const FrameGts& gts, double threshold_m,
                  const EvalOptions& opt) {
    return recall_generic(guidances, gts, opt, [&](const Box3D& g, const Box3D& t) {
        const Vec3 a(g.x, g.y, g.z);
        const Vec3 b(t.x, t.y, t.z);
        return (a - b).norm() <= threshold_m;
    });
}

double recall_3d(const FrameBoxes& guidances, const FrameGts& gts, double iou_threshold,
                 const EvalOptions& opt) {
    return recall_generic(guidances, gts, opt, [&](const Box3D& g, const Box3D& t) {
        return iou3d(g, t) >= iou_threshold;
    });
}

}  // namespace m3d
