#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "m3d/guidance.hpp"
#include "m3d/metrics.hpp"
#include "m3d/refine.hpp"

namespace m3d {

/// Seedable, portable generator: mt19937_64 raw draws turned into doubles
/// with a fixed 53-bit ldexp mapping and Box-Muller gaussians, so fixtures
/// reproduce bit-identically across platforms and standard libraries.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next() { return engine_(); }
    double uniform(double lo, double hi);
    double gaussian(double mean, double stddev);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0;
};

struct SceneSpec {
    uint64_t seed = 1;
    int count = 100;  // boxes per scene
    double depth_min = 5, depth_max = 60;
    double lateral_min = -3, lateral_max = 3;

    enum class YawMode { Fixed, Uniform };
    YawMode yaw_mode = YawMode::Uniform;
    double yaw_value = 0;  // used in Fixed mode

    enum class SizeMode { FixedAtPrior, Gaussian };
    SizeMode size_mode = SizeMode::FixedAtPrior;
    double size_std_w = 0, size_std_h = 0, size_std_l = 0;

    double camera_height = 1.65;  // ground plane y, camera frame
    SizePrior prior{"Car"};       // defaults to the car prior
    CameraModel camera = CameraModel::from_intrinsics(721.5377, 721.5377, 609.5593, 172.854);
};

/// Deterministic ground-truth fleet on the ground plane; truncation and
/// occlusion are zero.
std::vector<GroundTruth> generate_scene(const SceneSpec& spec);

enum class DetectionMode {
    /// 2D box built so the guidance round-trip is exact: top midpoint is the
    /// projected 3D top center and the bottom edge satisfies the lambda
    /// convention.
    ExactLambda,
    /// Tight axis-aligned box over the projected corners (realistic).
    TightBbox,
};

std::vector<Detection2D> perfect_detections(const std::vector<GroundTruth>& scene,
                                            const CameraModel& cam, DetectionMode mode,
                                            double lambda);

/// Idealized classifier output: one-hot at the interval of the true raw
/// residual, per dimension. Upper-bounds achievable refinement.
IntervalScores oracle_scores(const Box3D& guidance, const Box3D& gt,
                             const IntervalSpec& spec);

}  // namespace m3d
