#include "m3d/warp.hpp"

#include <cmath>

namespace m3d {

FeatureMap FeatureMap::zeros(int channels, int height, int width, double stride) {
    FeatureMap fm;
    fm.channels = channels;
    fm.height = height;
    fm.width = width;
    fm.stride = stride;
    fm.data.assign(static_cast<size_t>(channels) * height * width, 0.0);
    return fm;
}

Homography solve_homography(const Quad2D& src, const Quad2D& dst) {
    // 8 equations in the 8 unknowns h11..h32 with h33 fixed to 1.
    Eigen::Matrix<double, 8, 8> A = Eigen::Matrix<double, 8, 8>::Zero();
    Eigen::Matrix<double, 8, 1> b;
    for (int i = 0; i < 4; ++i) {
        const double sx = src.pts[i].x(), sy = src.pts[i].y();
        const double dx = dst.pts[i].x(), dy = dst.pts[i].y();
        A.row(2 * i) << sx, sy, 1, 0, 0, 0, -sx * dx, -sy * dx;
        A.row(2 * i + 1) << 0, 0, 0, sx, sy, 1, -sx * dy, -sy * dy;
        b(2 * i) = dx;
        b(2 * i + 1) = dy;
    }

    Eigen::FullPivLU<Eigen::Matrix<double, 8, 8>> lu(A);
    if (!lu.isInvertible())
        throw DegenerateQuad("homography system is rank-deficient");
    const Eigen::Matrix<double, 8, 1> h = lu.solve(b);

    Mat3 H;
    H << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), 1.0;
    if (std::abs(H.determinant()) <= 1e-12)
        throw DegenerateQuad("homography is singular");
    return Homography{H};
}

namespace {

/// Bilinear sample with zero padding; out-of-bounds taps contribute 0
/// through their partial weights.
double sample_bilinear(const FeatureMap& fm, int c, double u, double v) {
    const int x0 = static_cast<int>(std::floor(u));
    const int y0 = static_cast<int>(std::floor(v));
    const double fx = u - x0;
    const double fy = v - y0;

    double acc = 0;
    for (int dy = 0; dy <= 1; ++dy) {
        for (int dx = 0; dx <= 1; ++dx) {
            const int x = x0 + dx;
            const int y = y0 + dy;
            if (x < 0 || x >= fm.width || y < 0 || y >= fm.height) continue;
            const double w = (dx ? fx : 1 - fx) * (dy ? fy : 1 - fy);
            acc += w * fm.at(c, y, x);
        }
    }
    return acc;
}

}  // namespace

FeatureMap warp_region(const FeatureMap& fm, const Quad2D& quad_image, int gh, int gw) {
    Quad2D src;
    for (int i = 0; i < 4; ++i)
        src.pts[i] = quad_image.pts[i] / fm.stride;

    Quad2D dst;
    dst.pts[0] = Vec2(0, 0);
    dst.pts[1] = Vec2(gw - 1, 0);
    dst.pts[2] = Vec2(gw - 1, gh - 1);
    dst.pts[3] = Vec2(0, gh - 1);

    const Homography fwd = solve_homography(src, dst);
    const Mat3 Hinv = fwd.H.inverse();

    FeatureMap out = FeatureMap::zeros(fm.channels, gh, gw, 1.0);
    for (int i = 0; i < gh; ++i) {
        for (int j = 0; j < gw; ++j) {
            const Vec3 back = Hinv * Vec3(j, i, 1.0);
            if (std::abs(back.z()) < 1e-12)
                throw DegenerateQuad("back-mapped point at infinity");
            const double u = back.x() / back.z();
            const double v = back.y() / back.z();
            for (int c = 0; c < fm.channels; ++c)
                out.at(c, i, j) = sample_bilinear(fm, c, u, v);
        }
    }
    return out;
}

std::vector<WarpedSurface> extract_surface_features(const FeatureMap& fm,
                                                    const CameraModel& cam,
                                                    const SurfaceSet& surfaces,
                                                    int gh, int gw) {
    std::vector<WarpedSurface> out;
    out.reserve(surfaces.size());
    for (const auto& surf : surfaces) {
        Quad2D quad;
        for (int i = 0; i < 4; ++i)
            quad.pts[i] = project(cam, surf.corners[i]);
        out.push_back({surf.tag, warp_region(fm, quad, gh, gw)});
    }
    return out;
}

}  // namespace m3d
