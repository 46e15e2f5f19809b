#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "m3d/errors.hpp"

namespace m3d {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat34 = Eigen::Matrix<double, 3, 4>;

/// Wraps an angle to (-pi, pi]. The boundary pi maps to itself.
double wrap_angle(double a);

/// Oriented 3D box in camera coordinates (x right, y down, z forward).
/// (x, y, z) is the center of the *bottom* face; theta is the yaw about
/// the y axis. Only the yaw rotation is modeled.
struct Box3D {
    double w = 0;  // width  [m]
    double h = 0;  // height [m]
    double l = 0;  // length [m]
    double x = 0;
    double y = 0;
    double z = 0;
    double theta = 0;  // rad, in (-pi, pi]
};

/// Axis-aligned image-plane box, center + extents in pixels.
struct Box2D {
    double cx = 0;
    double cy = 0;
    double w2d = 0;
    double h2d = 0;

    double left() const { return cx - w2d / 2; }
    double right() const { return cx + w2d / 2; }
    double top() const { return cy - h2d / 2; }
    double bottom() const { return cy + h2d / 2; }

    static Box2D from_corners(double left, double top, double right, double bottom) {
        return Box2D{(left + right) / 2, (top + bottom) / 2, right - left, bottom - top};
    }
};

/// Pinhole camera given as a 3x4 projection matrix P = K [I | K^-1 p4].
/// The translation column of KITTI-style matrices is kept as a camera-frame
/// offset t_cam so that back-projection can undo it.
class CameraModel {
public:
    explicit CameraModel(const Mat34& P);

    static CameraModel from_intrinsics(double fx, double fy, double cx, double cy);

    const Mat34& P() const { return P_; }
    const Mat3& K() const { return K_; }
    const Mat3& K_inv() const { return K_inv_; }
    const Vec3& t_cam() const { return t_; }

private:
    Mat34 P_;
    Mat3 K_;
    Mat3 K_inv_;
    Vec3 t_;
};

enum class Surface { Top, Front, Back, LeftSide, RightSide };

const char* surface_name(Surface s);

struct SurfaceQuad {
    Surface tag;
    std::array<Vec3, 4> corners;  // ordered, consistent winding
};

/// Visible surfaces in fixed order: Top, then Front or Back (if any),
/// then exactly one of LeftSide / RightSide.
using SurfaceSet = std::vector<SurfaceQuad>;

/// The 8 cuboid corners. Bottom face first, counter-clockwise seen from
/// above, starting at the front-left corner; then the top face in the
/// same order. In the box frame the length runs along local x (heading)
/// and the width along local z, with "left" at +z.
std::array<Vec3, 8> corners3d(const Box3D& box);

/// Projects a camera-frame point to pixels. Throws PointBehindCamera when
/// the homogeneous scale is <= 1e-9.
Vec2 project(const CameraModel& cam, const Vec3& point);

/// Tight axis-aligned 2D bounding box over the 8 projected corners.
Box2D project_box(const CameraModel& cam, const Box3D& box);

/// theta = alpha + atan2(x, z), wrapped to (-pi, pi]. Throws InvalidDepth
/// if z <= 0.
double alpha_to_theta(double alpha, double x, double z);

/// Inverse of alpha_to_theta up to (-pi, pi] wrapping.
double theta_to_alpha(double theta, double x, double z);

/// Surface visibility from the observation angle:
///   Top is always visible (the bottom never is);
///   Front iff alpha > 0, Back iff alpha < 0;
///   RightSide iff -pi/2 < alpha < pi/2, otherwise LeftSide.
SurfaceSet visible_surfaces(const Box3D& box, double alpha);

}  // namespace m3d
