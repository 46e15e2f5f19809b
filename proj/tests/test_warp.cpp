#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "m3d/warp.hpp"

using namespace m3d;

namespace {

/// Independent DLT oracle: SVD null-space of the 8x9 homogeneous system,
/// normalized to H[2][2] = 1. A completely different solve path from the
/// library's 8x8 inhomogeneous formulation.
Mat3 dlt_oracle(const Quad2D& src, const Quad2D& dst) {
    Eigen::Matrix<double, 8, 9> A = Eigen::Matrix<double, 8, 9>::Zero();
    for (int i = 0; i < 4; ++i) {
        const double sx = src.pts[i].x(), sy = src.pts[i].y();
        const double dx = dst.pts[i].x(), dy = dst.pts[i].y();
        A.row(2 * i) << sx, sy, 1, 0, 0, 0, -dx * sx, -dx * sy, -dx;
        A.row(2 * i + 1) << 0, 0, 0, sx, sy, 1, -dy * sx, -dy * sy, -dy;
    }
    Eigen::JacobiSVD<Eigen::Matrix<double, 8, 9>> svd(A, Eigen::ComputeFullV);
    const Eigen::Matrix<double, 9, 1> h = svd.matrixV().col(8);
    Mat3 H;
    H << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
    return H / H(2, 2);
}

Vec2 apply_h(const Mat3& H, const Vec2& p) {
    const Vec3 q = H * Vec3(p.x(), p.y(), 1.0);
    return Vec2(q.x() / q.z(), q.y() / q.z());
}

/// Scalar reference warp: independent inverse-mapping + bilinear sampler
/// written directly from the definition (zero padding outside the map).
double reference_sample(const FeatureMap& fm, int c, double u, double v) {
    const int x0 = static_cast<int>(std::floor(u));
    const int y0 = static_cast<int>(std::floor(v));
    auto tap = [&](int x, int y) -> double {
        if (x < 0 || x >= fm.width || y < 0 || y >= fm.height) return 0.0;
        return fm.at(c, y, x);
    };
    const double fx = u - x0, fy = v - y0;
    return (1 - fx) * (1 - fy) * tap(x0, y0) + fx * (1 - fy) * tap(x0 + 1, y0) +
           (1 - fx) * fy * tap(x0, y0 + 1) + fx * fy * tap(x0 + 1, y0 + 1);
}

FeatureMap reference_warp(const FeatureMap& fm, const Quad2D& quad_image, int gh, int gw) {
    Quad2D src;
    for (int i = 0; i < 4; ++i) src.pts[i] = quad_image.pts[i] / fm.stride;
    Quad2D dst;
    dst.pts = {Vec2(0, 0), Vec2(gw - 1, 0), Vec2(gw - 1, gh - 1), Vec2(0, gh - 1)};
    const Mat3 Hinv = dlt_oracle(dst, src);  // grid -> feature cells directly

    FeatureMap out = FeatureMap::zeros(fm.channels, gh, gw, 1.0);
    for (int i = 0; i < gh; ++i)
        for (int j = 0; j < gw; ++j) {
            const Vec2 uv = apply_h(Hinv, Vec2(j, i));
            for (int c = 0; c < fm.channels; ++c)
                out.at(c, i, j) = reference_sample(fm, c, uv.x(), uv.y());
        }
    return out;
}

Quad2D random_quad(std::mt19937& rng, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::uniform_real_distribution<double> jitter(2.0, 8.0);
    const double cx = d(rng), cy = d(rng);
    // Convex-ish quad around a center: corner order TL, TR, BR, BL.
    Quad2D q;
    q.pts[0] = Vec2(cx - jitter(rng), cy - jitter(rng));
    q.pts[1] = Vec2(cx + jitter(rng), cy - jitter(rng));
    q.pts[2] = Vec2(cx + jitter(rng), cy + jitter(rng));
    q.pts[3] = Vec2(cx - jitter(rng), cy + jitter(rng));
    return q;
}

FeatureMap random_map(std::mt19937& rng, int c, int h, int w, double stride = 1.0) {
    FeatureMap fm = FeatureMap::zeros(c, h, w, stride);
    std::uniform_real_distribution<double> d(-10, 10);
    for (auto& v : fm.data) v = d(rng);
    return fm;
}

}  // namespace

TEST_CASE("solve_homography maps each corner exactly") {
    std::mt19937 rng(31);
    for (int t = 0; t < 50; ++t) {
        const Quad2D src = random_quad(rng, 10, 50);
        const Quad2D dst = random_quad(rng, 0, 20);
        const Homography h = solve_homography(src, dst);
        CHECK(h.H(2, 2) == doctest::Approx(1.0));
        for (int i = 0; i < 4; ++i)
            CHECK((apply_h(h.H, src.pts[i]) - dst.pts[i]).norm() ==
                  doctest::Approx(0).epsilon(1e-9));
    }
}

TEST_CASE("solve_homography agrees with the SVD null-space oracle") {
    std::mt19937 rng(37);
    for (int t = 0; t < 50; ++t) {
        const Quad2D src = random_quad(rng, 5, 60);
        const Quad2D dst = random_quad(rng, 0, 30);
        const Mat3 ours = solve_homography(src, dst).H;
        const Mat3 oracle = dlt_oracle(src, dst);
        // Compare the transforms by their action on points: the matrix
        // entries themselves are less well conditioned than the mapping.
        std::uniform_real_distribution<double> interp(0.0, 1.0);
        for (int k = 0; k < 10; ++k) {
            const double u = interp(rng), v = interp(rng);
            const Vec2 p = (1 - u) * ((1 - v) * src.pts[0] + v * src.pts[3]) +
                           u * ((1 - v) * src.pts[1] + v * src.pts[2]);
            CHECK((apply_h(ours, p) - apply_h(oracle, p)).norm() ==
                  doctest::Approx(0).epsilon(1e-7));
        }
    }
}

TEST_CASE("homography identity and composition properties") {
    std::mt19937 rng(41);
    for (int t = 0; t < 20; ++t) {
        const Quad2D q = random_quad(rng, 0, 40);
        const Mat3 I = solve_homography(q, q).H;
        CHECK((I - Mat3::Identity()).norm() == doctest::Approx(0).epsilon(1e-12));

        const Quad2D p = random_quad(rng, 10, 50);
        const Mat3 fwd = solve_homography(q, p).H;
        const Mat3 bwd = solve_homography(p, q).H;
        Mat3 comp = fwd * bwd;
        comp /= comp(2, 2);
        CHECK((comp - Mat3::Identity()).norm() == doctest::Approx(0).epsilon(1e-9));
    }
}

TEST_CASE("degenerate quads are rejected") {
    Quad2D collinear;
    collinear.pts = {Vec2(0, 0), Vec2(1, 1), Vec2(2, 2), Vec2(3, 3)};
    Quad2D square;
    square.pts = {Vec2(0, 0), Vec2(4, 0), Vec2(4, 4), Vec2(0, 4)};
    CHECK_THROWS_AS(solve_homography(collinear, square), DegenerateQuad);

    Quad2D repeated = square;
    repeated.pts[1] = repeated.pts[0];
    CHECK_THROWS_AS(solve_homography(repeated, square), DegenerateQuad);
}

TEST_CASE("warp of an axis-aligned grid-aligned quad is an exact crop") {
    std::mt19937 rng(43);
    FeatureMap fm = random_map(rng, 2, 20, 30);
    Quad2D quad;
    quad.pts = {Vec2(5, 3), Vec2(9, 3), Vec2(9, 7), Vec2(5, 7)};
    const FeatureMap out = warp_region(fm, quad, 5, 5);
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j)
                CHECK(out.at(c, i, j) == doctest::Approx(fm.at(c, 3 + i, 5 + j)));
}

TEST_CASE("constant map warps to constant output") {
    FeatureMap fm = FeatureMap::zeros(1, 15, 15);
    for (auto& v : fm.data) v = 3.25;
    Quad2D quad;  // interior quad, away from the zero-padded border
    quad.pts = {Vec2(4, 4), Vec2(11, 5), Vec2(10, 11), Vec2(3, 10)};
    const FeatureMap out = warp_region(fm, quad, 7, 7);
    for (const auto v : out.data) CHECK(v == doctest::Approx(3.25).epsilon(1e-12));
}

TEST_CASE("warp_region matches the per-pixel reference oracle") {
    std::mt19937 rng(47);
    for (int t = 0; t < 50; ++t) {
        const FeatureMap fm = random_map(rng, 3, 24, 32, t % 2 ? 2.0 : 1.0);
        const Quad2D quad = random_quad(rng, 8, 40);
        const FeatureMap a = warp_region(fm, quad, 6, 5);
        const FeatureMap b = reference_warp(fm, quad, 6, 5);
        REQUIRE(a.data.size() == b.data.size());
        for (size_t i = 0; i < a.data.size(); ++i)
            CHECK(a.data[i] == doctest::Approx(b.data[i]).epsilon(1e-6));
    }
}

TEST_CASE("warp_region is linear in the feature values") {
    std::mt19937 rng(53);
    const Quad2D quad = random_quad(rng, 5, 25);
    const FeatureMap f1 = random_map(rng, 2, 20, 20);
    FeatureMap f2 = random_map(rng, 2, 20, 20);
    const double a = 2.5, b = -1.25;

    FeatureMap combo = f1;
    for (size_t i = 0; i < combo.data.size(); ++i)
        combo.data[i] = a * f1.data[i] + b * f2.data[i];

    const FeatureMap wc = warp_region(combo, quad, 7, 7);
    const FeatureMap w1 = warp_region(f1, quad, 7, 7);
    const FeatureMap w2 = warp_region(f2, quad, 7, 7);
    for (size_t i = 0; i < wc.data.size(); ++i)
        CHECK(std::abs(wc.data[i] - (a * w1.data[i] + b * w2.data[i])) <= 1e-9);
}

TEST_CASE("quads fully outside the map produce zeros") {
    std::mt19937 rng(59);
    const FeatureMap fm = random_map(rng, 1, 10, 10);
    Quad2D quad;
    quad.pts = {Vec2(100, 100), Vec2(110, 100), Vec2(110, 110), Vec2(100, 110)};
    const FeatureMap out = warp_region(fm, quad, 4, 4);
    for (const auto v : out.data) CHECK(v == 0.0);
}

TEST_CASE("extract_surface_features: tags, order, and ramp monotonicity") {
    const auto cam = CameraModel::from_intrinsics(721.5377, 721.5377, 609.5593, 172.854);
    const Box3D box{1.62, 1.53, 3.89, 0.0, 1.65, 12.0, 0.0};
    const double alpha = 0.7853981633974483;  // pi/4 -> Top, Front, RightSide

    FeatureMap ramp = FeatureMap::zeros(1, 375, 1242);
    for (int y = 0; y < ramp.height; ++y)
        for (int x = 0; x < ramp.width; ++x) ramp.at(0, y, x) = x;

    const SurfaceSet surfaces = visible_surfaces(box, alpha);
    const auto warped = extract_surface_features(ramp, cam, surfaces, 5, 5);
    REQUIRE(warped.size() == 3);
    CHECK(warped[0].tag == Surface::Top);
    CHECK(warped[1].tag == Surface::Front);
    CHECK(warped[2].tag == Surface::RightSide);

    // An x-coordinate ramp stays monotone along every warped row: the warp
    // is projective, so each output row samples x at monotone positions.
    for (const auto& ws : warped)
        for (int i = 0; i < 5; ++i) {
            const bool inc = ws.grid.at(0, i, 4) >= ws.grid.at(0, i, 0);
            for (int j = 0; j + 1 < 5; ++j) {
                const double d = ws.grid.at(0, i, j + 1) - ws.grid.at(0, i, j);
                CHECK((inc ? d : -d) >= -1e-9);
            }
        }
}

TEST_CASE("stride scales the sampling lattice") {
    // A stride-2 map sampled at image quad [0,8]x[0,8] must equal a
    // stride-1 map of half resolution sampled at cell quad [0,4]x[0,4].
    std::mt19937 rng(61);
    FeatureMap half = random_map(rng, 1, 6, 6, 2.0);
    FeatureMap same = half;
    same.stride = 1.0;

    Quad2D image_quad;
    image_quad.pts = {Vec2(0, 0), Vec2(8, 0), Vec2(8, 8), Vec2(0, 8)};
    Quad2D cell_quad;
    cell_quad.pts = {Vec2(0, 0), Vec2(4, 0), Vec2(4, 4), Vec2(0, 4)};

    const FeatureMap a = warp_region(half, image_quad, 5, 5);
    const FeatureMap b = warp_region(same, cell_quad, 5, 5);
    for (size_t i = 0; i < a.data.size(); ++i)
        CHECK(a.data[i] == doctest::Approx(b.data[i]).epsilon(1e-12));
}
