#pragma once

#include <string>
#include <vector>

#include "m3d/geometry.hpp"

namespace m3d {

enum class Difficulty { Easy = 0, Moderate = 1, Hard = 2, Ignored = 3 };

const char* difficulty_name(Difficulty d);

/// KITTI-devkit style difficulty cutoffs, indexed Easy/Moderate/Hard.
struct DifficultyThresholds {
    std::array<double, 3> min_height = {40.0, 25.0, 25.0};   // 2D box height [px]
    std::array<int, 3> max_occlusion = {0, 1, 2};
    std::array<double, 3> max_truncation = {0.15, 0.30, 0.50};
};

struct GroundTruth {
    Box3D box3d;
    Box2D box2d;
    double alpha = 0;
    std::string class_name;
    double truncation = 0;  // [0,1]
    int occlusion = 0;      // {0,1,2,3}
};

struct DetectionResult {
    Box3D box3d;
    Box2D box2d;
    double alpha = 0;
    std::string class_name;
    double score = 1.0;
};

/// Sampled precision/recall curve; `similarity` carries the orientation
/// weighted precision when produced by aos(), otherwise mirrors precision.
struct PRCurve {
    std::vector<double> recall;
    std::vector<double> precision;
    std::vector<double> similarity;
};

struct ApResult {
    double ap = 0;
    PRCurve curve;
};

struct EvalOptions {
    std::string class_name = "Car";
    Difficulty difficulty = Difficulty::Moderate;
    bool apply_difficulty = true;  // when false all ground truths count
    bool forty_point = false;      // 40-point interpolation instead of 11
    DifficultyThresholds thresholds{};
};

using FrameDets = std::vector<std::vector<DetectionResult>>;
using FrameGts = std::vector<std::vector<GroundTruth>>;
using FrameBoxes = std::vector<std::vector<Box3D>>;

/// Rotated 3D IoU: bird's-eye-view convex polygon intersection times the
/// vertical overlap of [y-h, y]. Disjoint boxes give 0.
double iou3d(const Box3D& a, const Box3D& b);

/// Intersection area of two convex quadrilaterals (Sutherland-Hodgman
/// clipping followed by the shoelace formula).
double bev_intersection_area(const std::array<Vec2, 4>& rect_a,
                             const std::array<Vec2, 4>& rect_b);

/// BEV footprint of a box: its 4 bottom corners as (x, z) points.
std::array<Vec2, 4> bev_rect(const Box3D& box);

double iou2d(const Box2D& a, const Box2D& b);

Difficulty difficulty_of(const GroundTruth& gt, const DifficultyThresholds& thr = {});

/// 3D average precision: greedy score-ordered matching at the given 3D IoU
/// threshold, interpolated AP (11-point by default).
ApResult average_precision(const FrameDets& dets, const FrameGts& gts,
                           double iou_threshold, const EvalOptions& opt = {});

/// AP with the TP criterion replaced by bottom-center distance <= threshold.
ApResult alp(const FrameDets& dets, const FrameGts& gts, double distance_threshold_m,
             const EvalOptions& opt = {});

/// Average orientation similarity: 2D-IoU matching, each TP weighted by
/// (1 + cos(alpha_det - alpha_gt)) / 2.
ApResult aos(const FrameDets& dets, const FrameGts& gts, double iou2d_threshold = 0.5,
             const EvalOptions& opt = {});

/// Fraction of ground truths with a guidance bottom-center within
/// threshold_m.
double recall_loc(const FrameBoxes& guidances, const FrameGts& gts, double threshold_m,
                  const EvalOptions& opt = {});

/// Fraction of ground truths with a guidance at iou3d >= threshold.
double recall_3d(const FrameBoxes& guidances, const FrameGts& gts, double iou_threshold,
                 const EvalOptions& opt = {});

}  // namespace m3d
