#include "m3d/synth.hpp"

#include <cmath>

namespace m3d {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double Rng::uniform(double lo, double hi) {
    // 53-bit mantissa draw in [0, 1).
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

double Rng::gaussian(double mean, double stddev) {
    if (has_spare_) {
        has_spare_ = false;
        return mean + stddev * spare_;
    }
    double u1, u2;
    do {
        u1 = uniform(0.0, 1.0);
    } while (u1 <= 0.0);
    u2 = uniform(0.0, 1.0);
    const double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(2 * kPi * u2);
    has_spare_ = true;
    return mean + stddev * mag * std::cos(2 * kPi * u2);
}

std::vector<GroundTruth> generate_scene(const SceneSpec& spec) {
    Rng rng(spec.seed);
    std::vector<GroundTruth> out;
    out.reserve(spec.count);
    for (int i = 0; i < spec.count; ++i) {
        Box3D box;
        box.z = rng.uniform(spec.depth_min, spec.depth_max);
        box.x = rng.uniform(spec.lateral_min, spec.lateral_max);
        box.y = spec.camera_height;
        box.theta = spec.yaw_mode == SceneSpec::YawMode::Uniform
                        ? wrap_angle(rng.uniform(-kPi, kPi))
                        : wrap_angle(spec.yaw_value);
        if (spec.size_mode == SceneSpec::SizeMode::Gaussian) {
            box.w = std::max(rng.gaussian(spec.prior.w_bar, spec.size_std_w), 0.2);
            box.h = std::max(rng.gaussian(spec.prior.h_bar, spec.size_std_h), 0.2);
            box.l = std::max(rng.gaussian(spec.prior.l_bar, spec.size_std_l), 0.2);
        } else {
            box.w = spec.prior.w_bar;
            box.h = spec.prior.h_bar;
            box.l = spec.prior.l_bar;
        }

        GroundTruth gt;
        gt.box3d = box;
        gt.box2d = project_box(spec.camera, box);
        gt.alpha = theta_to_alpha(box.theta, box.x, box.z);
        gt.class_name = spec.prior.class_name.empty() ? "Car" : spec.prior.class_name;
        out.push_back(std::move(gt));
    }
    return out;
}

std::vector<Detection2D> perfect_detections(const std::vector<GroundTruth>& scene,
                                            const CameraModel& cam, DetectionMode mode,
                                            double lambda) {
    std::vector<Detection2D> out;
    out.reserve(scene.size());
    for (const auto& gt : scene) {
        const Box3D& b = gt.box3d;
        Detection2D det;
        det.class_name = gt.class_name;
        det.score = 1.0;
        det.alpha = theta_to_alpha(b.theta, b.x, b.z);

        if (mode == DetectionMode::TightBbox) {
            det.box = project_box(cam, b);
        } else {
            // Invert the midpoint construction: the box's top midpoint is the
            // projected top center, and the projected bottom center sits
            // lambda * h2d above the bottom edge.
            const Vec2 top_px = project(cam, Vec3(b.x, b.y - b.h, b.z));
            const Vec2 bottom_px = project(cam, Vec3(b.x, b.y, b.z));
            const double h2d = (bottom_px.y() - top_px.y()) / (1.0 - lambda);
            const Box2D tight = project_box(cam, b);
            det.box.cx = top_px.x();
            det.box.cy = top_px.y() + h2d / 2;
            det.box.h2d = h2d;
            det.box.w2d = tight.w2d;
        }
        out.push_back(std::move(det));
    }
    return out;
}

IntervalScores oracle_scores(const Box3D& guidance, const Box3D& gt,
                             const IntervalSpec& spec) {
    const auto deltas = raw_deltas(guidance, gt);
    IntervalScores scores;
    for (int d = 0; d < kNumDims; ++d) {
        const Dim dim = static_cast<Dim>(d);
        scores.p[d].assign(spec.num_classes(dim), 0.0);
        scores.p[d][classify_delta(spec, deltas[d], dim)] = 1.0;
    }
    return scores;
}

}  // namespace m3d
