#pragma once

#include <map>
#include <string>
#include <utility>

#include "m3d/geometry.hpp"

namespace m3d {

/// Per-class mean dimensions plus the bottom-center shift fraction lambda.
struct SizePrior {
    std::string class_name;
    double w_bar = 1.62;
    double h_bar = 1.53;
    double l_bar = 3.89;
    double lambda = 0.07;
};

/// Lookup table of size priors, keyed by class name.
class PriorTable {
public:
    PriorTable() = default;

    void add(const SizePrior& prior) { priors_[prior.class_name] = prior; }

    /// Throws UnknownClass if the class has no prior.
    const SizePrior& find(const std::string& class_name) const;

    bool contains(const std::string& class_name) const {
        return priors_.count(class_name) > 0;
    }

    const std::map<std::string, SizePrior>& all() const { return priors_; }

    /// Car prior only, with the default constants above.
    static PriorTable defaults();

private:
    std::map<std::string, SizePrior> priors_;
};

/// A 2D detection with its observation angle, as produced by a 2D detector
/// with an orientation head.
struct Detection2D {
    Box2D box;
    double alpha = 0;  // rad, (-pi, pi]
    std::string class_name;
    double score = 1.0;
};

/// Coarse cuboid generated from a 2D detection, plus provenance.
struct Guidance {
    Box3D box;
    Detection2D source;
    Vec2 normalized_bottom;  // (x_b~, y_b~) from back-projection
    double depth = 0;        // m
};

/// Top midpoint and lambda-shifted bottom point of a 2D box, as homogeneous
/// pixel coordinates:
///   C_t = (cx, cy - h/2, 1),  C_b = (cx, cy + (1/2 - lambda) h, 1).
std::pair<Vec3, Vec3> midpoints(const Box2D& box, double lambda);

/// K^-1 * pixel, scaled so the third component is 1.
Vec3 backproject_normalized(const CameraModel& cam, const Vec3& pixel_homog);

struct LocationEstimate {
    Vec3 location;           // bottom center (x_g, y_g, z_g), camera frame
    double depth = 0;        // d = h_bar / h~
    Vec2 normalized_bottom;  // (x_b~, y_b~)
};

/// Recovers the bottom-center location from the normalized height:
/// d = h_bar / (y_b~ - y_t~), location = d * C_b~ - t_cam.
/// Throws DegenerateHeight when y_b~ - y_t~ <= eps.
LocationEstimate estimate_location(const CameraModel& cam, const Box2D& box,
                                   const SizePrior& prior, double eps = 1e-6);

/// Full guidance generation: prior size, estimated location, and
/// theta = alpha + atan2(x_g, z_g).
Guidance generate_guidance(const CameraModel& cam, const Detection2D& det,
                           const PriorTable& priors);

}  // namespace m3d
