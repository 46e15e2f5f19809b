#include "m3d/guidance.hpp"

namespace m3d {

const SizePrior& PriorTable::find(const std::string& class_name) const {
    auto it = priors_.find(class_name);
    if (it == priors_.end())
        throw UnknownClass(class_name);
    return it->second;
}

PriorTable PriorTable::defaults() {
    PriorTable t;
    t.add(SizePrior{"Car", 1.62, 1.53, 3.89, 0.07});
    return t;
}

std::pair<Vec3, Vec3> midpoints(const Box2D& box, double lambda) {
    const Vec3 top(box.cx, box.cy - box.h2d / 2, 1.0);
    const Vec3 bottom(box.cx, box.cy + (0.5 - lambda) * box.h2d, 1.0);
    return {top, bottom};
}

Vec3 backproject_normalized(const CameraModel& cam, const Vec3& pixel_homog) {
    Vec3 p = cam.K_inv() * pixel_homog;
    if (std::abs(p.z()) < 1e-12)
        throw SingularIntrinsics("back-projected point has zero depth component");
    return p / p.z();
}

LocationEstimate estimate_location(const CameraModel& cam, const Box2D& box,
                                   const SizePrior& prior, double eps) {
    const auto [top_px, bottom_px] = midpoints(box, prior.lambda);
    const Vec3 top_n = backproject_normalized(cam, top_px);
    const Vec3 bottom_n = backproject_normalized(cam, bottom_px);

    const double h_norm = bottom_n.y() - top_n.y();
    if (h_norm <= eps)
        throw DegenerateHeight();

    const double depth = prior.h_bar / h_norm;
    // The translation column of P acts as a camera-frame offset; undo it so
    // the location is in true camera coordinates.
    const Vec3 location = depth * bottom_n - cam.t_cam();
    return LocationEstimate{location, depth, Vec2(bottom_n.x(), bottom_n.y())};
}

Guidance generate_guidance(const CameraModel& cam, const Detection2D& det,
                           const PriorTable& priors) {
    const SizePrior& prior = priors.find(det.class_name);
    const LocationEstimate loc = estimate_location(cam, det.box, prior);

    Box3D box;
    box.w = prior.w_bar;
    box.h = prior.h_bar;
    box.l = prior.l_bar;
    box.x = loc.location.x();
    box.y = loc.location.y();
    box.z = loc.location.z();
    box.theta = alpha_to_theta(det.alpha, box.x, box.z);

    return Guidance{box, det, loc.normalized_bottom, loc.depth};
}

}  // namespace m3d
