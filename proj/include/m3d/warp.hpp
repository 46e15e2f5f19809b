#pragma once

#include <vector>

#include "m3d/geometry.hpp"

namespace m3d {

/// Dense channel-major feature grid with a network stride. Raw image
/// channels are just the stride-1 case.
struct FeatureMap {
    int channels = 0;
    int height = 0;
    int width = 0;
    double stride = 1.0;  // image pixels per feature cell
    std::vector<double> data;  // [c][y][x]

    static FeatureMap zeros(int channels, int height, int width, double stride = 1.0);

    double& at(int c, int y, int x) {
        return data[(static_cast<size_t>(c) * height + y) * width + x];
    }
    double at(int c, int y, int x) const {
        return data[(static_cast<size_t>(c) * height + y) * width + x];
    }
};

/// Four ordered 2D points (pixels or feature cells).
struct Quad2D {
    std::array<Vec2, 4> pts;
};

/// 3x3 perspective transform, normalized so H[2][2] = 1.
struct Homography {
    Mat3 H;
};

/// Direct linear transform from 4 point correspondences: the returned H
/// maps each src corner onto its dst corner. Throws DegenerateQuad when
/// the 8x8 system is rank-deficient.
Homography solve_homography(const Quad2D& src, const Quad2D& dst);

/// Warps the quadrilateral region of `fm` into a gh x gw grid. The quad is
/// given in image pixels and scaled by 1/stride into feature cells. Output
/// cell (i, j) back-maps through the inverse transform and samples the map
/// bilinearly; samples outside the map contribute zero.
/// Grid corners align to quad corners: cell (0,0) maps to quad corner 0,
/// (0,gw-1) to corner 1, (gh-1,gw-1) to corner 2, (gh-1,0) to corner 3.
FeatureMap warp_region(const FeatureMap& fm, const Quad2D& quad_image, int gh, int gw);

struct WarpedSurface {
    Surface tag;
    FeatureMap grid;
};

/// Projects each visible surface into the image and warps its region.
/// The output order follows the SurfaceSet order (Top, Front-or-Back, Side)
/// so downstream consumers can concatenate consistently.
std::vector<WarpedSurface> extract_surface_features(const FeatureMap& fm,
                                                    const CameraModel& cam,
                                                    const SurfaceSet& surfaces,
                                                    int gh, int gw);

}  // namespace m3d
