#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "m3d/geometry.hpp"

namespace m3d {

/// Box descriptor dimensions, in the fixed order used everywhere
/// (interval specs, label vectors, score files).
enum class Dim { W = 0, H, L, X, Y, Z, Theta };
constexpr int kNumDims = 7;
extern const std::array<const char*, kNumDims> kDimNames;

/// Encoded residual between a candidate box and a ground truth:
/// x/y normalized by the ground-plane diagonal, z by the height,
/// sizes as log ratios, theta as a wrapped difference.
struct Residual {
    double dx = 0, dy = 0, dz = 0;
    double dl = 0, dw = 0, dh = 0;
    double dtheta = 0;
};

struct DimInterval {
    double sigma = 1.0;  // interval length, raw units of the dimension
    int n_half = 1;      // N: centers at 0, +-sigma, ..., +-N*sigma
};

/// Per-dimension interval grid for the classification formulation.
struct IntervalSpec {
    std::array<DimInterval, kNumDims> dims;

    /// Sigmas and N values measured on the reference training data:
    /// sigma = (w 0.10, h 0.13, l 0.41, x 0.48, y 0.10, z 1.65, theta 0.05),
    /// N = 5 for w,h,l,y,theta and N = 10 for x,z.
    static IntervalSpec defaults();

    const DimInterval& dim(Dim d) const { return dims[static_cast<int>(d)]; }
    int num_classes(Dim d) const { return 2 * dim(d).n_half + 1; }
    double center(Dim d, int cls) const {
        return (cls - dim(d).n_half) * dim(d).sigma;
    }
    int total_classes() const;
};

/// Soft classification targets, one vector of q in [0,1] per dimension.
/// All zeros when the guidance matched no ground truth.
struct IntervalLabels {
    std::array<std::vector<double>, kNumDims> q;
    bool matched = false;
};

/// Predicted per-interval confidences.
struct IntervalScores {
    std::array<std::vector<double>, kNumDims> p;
};

Residual encode_residual(const Box3D& guidance, const Box3D& gt);
Box3D decode_residual(const Box3D& guidance, const Residual& r);

/// Plain per-dimension differences d_gt - d_guidance; theta wrapped.
std::array<double, kNumDims> raw_deltas(const Box3D& guidance, const Box3D& gt);

/// Index of the interval whose center is nearest to delta; values beyond
/// the grid clamp to the extreme classes.
int classify_delta(const IntervalSpec& spec, double delta, Dim d);

/// Copy of `box` with dimension `d` shifted by `amount` (raw units; theta
/// wrapped, sizes floored at a small positive value).
Box3D apply_shift(const Box3D& box, Dim d, double amount);

/// Per dimension, one candidate box per interval center.
std::array<std::vector<Box3D>, kNumDims> shifted_candidates(const Box3D& guidance,
                                                            const IntervalSpec& spec);

/// Quality-aware target from 3D overlap:
///   q = 1 for ov > 0.75, 0 for ov < 0.25, else 2*ov - 0.5.
/// Throws OutOfRange unless ov is in [0, 1].
double quality_label(double ov);

/// Binary cross entropy -[q log p + (1-q) log(1-p)], with p clipped to
/// [eps, 1-eps], eps = 1e-7.
double quality_bce(double p, double q);

/// Analytic derivative dL/dp at the clipped p, for verification.
double quality_bce_dp(double p, double q);

/// Training labels for one guidance. With a matched ground truth the label
/// for every shifted candidate is quality_label(iou3d(candidate, gt));
/// without one, everything is zero.
IntervalLabels make_interval_labels(
    const Box3D& guidance, const std::optional<Box3D>& gt, const IntervalSpec& spec,
    const std::function<double(const Box3D&, const Box3D&)>& iou3d_fn);

struct Refined {
    Box3D box;
    double confidence = 0;
};

/// Inference decoding: per-dimension argmax over interval confidences,
/// guidance shifted by the winning centers. The combined confidence is the
/// geometric mean of the 7 winning confidences times det_score. Returns
/// nullopt (background) when every dimension's best confidence is below
/// reject_threshold. Throws ShapeMismatch on wrong score vector lengths.
std::optional<Refined> decode_prediction(const Box3D& guidance,
                                         const IntervalScores& scores,
                                         const IntervalSpec& spec,
                                         double reject_threshold,
                                         double det_score = 1.0);

/// Sample statistics of raw deltas over matched guidance/ground-truth
/// pairs, the procedure behind the interval-spec defaults.
struct DeltaStats {
    std::array<double, kNumDims> mean{};
    std::array<double, kNumDims> stddev{};
    std::array<double, kNumDims> min{};
    std::array<double, kNumDims> max{};
    size_t count = 0;
};

DeltaStats compute_delta_stats(const std::vector<std::pair<Box3D, Box3D>>& guidance_gt_pairs);

/// Interval spec derived from measured stats: sigma = stddev, N from the
/// range-over-std ratio, clamped to [1, 10].
IntervalSpec spec_from_stats(const DeltaStats& stats);

}  // namespace m3d
