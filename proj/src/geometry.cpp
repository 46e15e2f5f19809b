#include "m3d/geometry.hpp"

#include <cmath>
#include <limits>

namespace m3d {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kHomogeneousEps = 1e-9;
}  // namespace

double wrap_angle(double a) {
    // Map to (-pi, pi]; pi stays pi.
    a = std::fmod(a, 2 * kPi);
    if (a <= -kPi) a += 2 * kPi;
    if (a > kPi) a -= 2 * kPi;
    return a;
}

CameraModel::CameraModel(const Mat34& P) {
    P_ = P;
    if (std::abs(P_(2, 2)) < kHomogeneousEps)
        throw SingularIntrinsics("P[2][2] is zero, cannot normalize");
    P_ /= P_(2, 2);
    K_ = P_.leftCols<3>();
    if (std::abs(K_.determinant()) < 1e-12)
        throw SingularIntrinsics();
    if (K_(0, 0) <= 0 || K_(1, 1) <= 0)
        throw SingularIntrinsics("focal lengths must be positive");
    K_inv_ = K_.inverse();
    t_ = K_inv_ * P_.col(3);
}

CameraModel CameraModel::from_intrinsics(double fx, double fy, double cx, double cy) {
    Mat34 P = Mat34::Zero();
    P(0, 0) = fx;
    P(1, 1) = fy;
    P(0, 2) = cx;
    P(1, 2) = cy;
    P(2, 2) = 1;
    return CameraModel(P);
}

const char* surface_name(Surface s) {
    switch (s) {
        case Surface::Top: return "top";
        case Surface::Front: return "front";
        case Surface::Back: return "back";
        case Surface::LeftSide: return "left";
        case Surface::RightSide: return "right";
    }
    return "?";
}

std::array<Vec3, 8> corners3d(const Box3D& box) {
    const double c = std::cos(box.theta);
    const double s = std::sin(box.theta);
    // Local corner layout: x along length, z along width, left side at +z.
    const double hl = box.l / 2;
    const double hw = box.w / 2;
    const double lx[4] = {hl, hl, -hl, -hl};
    const double lz[4] = {hw, -hw, -hw, hw};

    std::array<Vec3, 8> out;
    for (int i = 0; i < 4; ++i) {
        const double wx = lx[i] * c + lz[i] * s;
        const double wz = -lx[i] * s + lz[i] * c;
        out[i] = Vec3(box.x + wx, box.y, box.z + wz);
        out[i + 4] = Vec3(box.x + wx, box.y - box.h, box.z + wz);
    }
    return out;
}

Vec2 project(const CameraModel& cam, const Vec3& point) {
    Eigen::Vector4d hp(point.x(), point.y(), point.z(), 1.0);
    const Vec3 px = cam.P() * hp;
    if (px.z() <= kHomogeneousEps)
        throw PointBehindCamera();
    return Vec2(px.x() / px.z(), px.y() / px.z());
}

Box2D project_box(const CameraModel& cam, const Box3D& box) {
    const auto corners = corners3d(box);
    double lo_x = std::numeric_limits<double>::infinity();
    double lo_y = lo_x;
    double hi_x = -lo_x;
    double hi_y = -lo_x;
    for (const auto& c : corners) {
        const Vec2 p = project(cam, c);
        lo_x = std::min(lo_x, p.x());
        hi_x = std::max(hi_x, p.x());
        lo_y = std::min(lo_y, p.y());
        hi_y = std::max(hi_y, p.y());
    }
    return Box2D::from_corners(lo_x, lo_y, hi_x, hi_y);
}

double alpha_to_theta(double alpha, double x, double z) {
    if (z <= 0) throw InvalidDepth();
    return wrap_angle(alpha + std::atan2(x, z));
}

double theta_to_alpha(double theta, double x, double z) {
    if (z <= 0) throw InvalidDepth();
    return wrap_angle(theta - std::atan2(x, z));
}

SurfaceSet visible_surfaces(const Box3D& box, double alpha) {
    const auto c = corners3d(box);
    SurfaceSet out;
    // Winding is counter-clockwise viewed from outside each face
    // (outward normal by the right-hand rule).
    out.push_back({Surface::Top, {c[4], c[7], c[6], c[5]}});
    if (alpha > 0)
        out.push_back({Surface::Front, {c[1], c[0], c[4], c[5]}});
    else if (alpha < 0)
        out.push_back({Surface::Back, {c[3], c[2], c[6], c[7]}});
    if (alpha > -kPi / 2 && alpha < kPi / 2)
        out.push_back({Surface::RightSide, {c[2], c[1], c[5], c[6]}});
    else
        out.push_back({Surface::LeftSide, {c[0], c[3], c[7], c[4]}});
    return out;
}

}  // namespace m3d
