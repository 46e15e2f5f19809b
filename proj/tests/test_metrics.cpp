#include <doctest.h>

#include <cmath>
#include <random>

#include "m3d/metrics.hpp"

using namespace m3d;

namespace {
constexpr double kPi = 3.14159265358979323846;

/// Monte-Carlo IoU oracle: sample the union's bounding volume and test
/// membership in each box by transforming into its local frame.
bool inside(const Box3D& b, const Vec3& p) {
    const double dx = p.x() - b.x;
    const double dz = p.z() - b.z;
    const double c = std::cos(b.theta), s = std::sin(b.theta);
    // Inverse of the yaw rotation used by corners3d.
    const double lx = dx * c - dz * s;
    const double lz = dx * s + dz * c;
    return std::abs(lx) <= b.l / 2 && std::abs(lz) <= b.w / 2 && p.y() <= b.y &&
           p.y() >= b.y - b.h;
}

double mc_iou(const Box3D& a, const Box3D& b, int n, uint32_t seed) {
    double lo[3] = {1e18, 1e18, 1e18}, hi[3] = {-1e18, -1e18, -1e18};
    for (const Box3D* box : {&a, &b}) {
        for (const auto& c : corners3d(*box)) {
            for (int k = 0; k < 3; ++k) {
                lo[k] = std::min(lo[k], c[k]);
                hi[k] = std::max(hi[k], c[k]);
            }
        }
    }
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> ux(lo[0], hi[0]), uy(lo[1], hi[1]),
        uz(lo[2], hi[2]);
    int in_a = 0, in_b = 0, in_both = 0;
    for (int i = 0; i < n; ++i) {
        const Vec3 p(ux(rng), uy(rng), uz(rng));
        const bool ia = inside(a, p), ib = inside(b, p);
        in_a += ia;
        in_b += ib;
        in_both += ia && ib;
    }
    const int uni = in_a + in_b - in_both;
    return uni == 0 ? 0.0 : static_cast<double>(in_both) / uni;
}

GroundTruth make_gt(const Box3D& box, double h2d = 80, double trunc = 0, int occ = 0) {
    GroundTruth gt;
    gt.box3d = box;
    gt.box2d = Box2D{600, 200, 60, h2d};
    gt.class_name = "Car";
    gt.truncation = trunc;
    gt.occlusion = occ;
    return gt;
}

DetectionResult make_det(const Box3D& box, double score) {
    DetectionResult det;
    det.box3d = box;
    det.box2d = Box2D{600, 200, 60, 80};
    det.class_name = "Car";
    det.score = score;
    return det;
}

}  // namespace

TEST_CASE("iou3d: identity, disjoint, and symmetry") {
    const Box3D a{1.6, 1.5, 3.9, 2.0, 1.65, 20.0, 0.7};
    CHECK(iou3d(a, a) == doctest::Approx(1.0));

    Box3D far = a;
    far.x += 100;
    CHECK(iou3d(a, far) == 0.0);
    Box3D above = a;
    above.y -= 10;  // vertically disjoint
    CHECK(iou3d(a, above) == 0.0);

    std::mt19937 rng(97);
    std::uniform_real_distribution<double> d(-2, 2), ang(-kPi, kPi);
    for (int t = 0; t < 100; ++t) {
        Box3D b = a;
        b.x += d(rng);
        b.z += d(rng);
        b.theta = ang(rng);
        CHECK(iou3d(a, b) == doctest::Approx(iou3d(b, a)).epsilon(1e-12));
        CHECK(iou3d(a, b) >= 0.0);
        CHECK(iou3d(a, b) <= 1.0);
    }
}

TEST_CASE("iou3d: axis-aligned interval-product oracle is exact") {
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> size(0.5, 4.0), off(-3, 3);
    for (int t = 0; t < 200; ++t) {
        const Box3D a{size(rng), size(rng), size(rng), off(rng), 1.65, 20 + off(rng), 0.0};
        const Box3D b{size(rng), size(rng), size(rng), off(rng), 1.65 + off(rng) / 4,
                      20 + off(rng), 0.0};
        auto overlap = [](double alo, double ahi, double blo, double bhi) {
            return std::max(0.0, std::min(ahi, bhi) - std::max(alo, blo));
        };
        // theta = 0: length along x, width along z, height along -y.
        const double ix = overlap(a.x - a.l / 2, a.x + a.l / 2, b.x - b.l / 2, b.x + b.l / 2);
        const double iz = overlap(a.z - a.w / 2, a.z + a.w / 2, b.z - b.w / 2, b.z + b.w / 2);
        const double iy = overlap(a.y - a.h, a.y, b.y - b.h, b.y);
        const double inter = ix * iy * iz;
        const double uni = a.w * a.h * a.l + b.w * b.h * b.l - inter;
        const double expect = inter > 0 ? inter / uni : 0.0;
        CHECK(iou3d(a, b) == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("iou3d: rotating by pi preserves the footprint") {
    const Box3D a{1.6, 1.5, 3.9, 0.0, 1.65, 20.0, 0.4};
    Box3D flipped = a;
    flipped.theta = wrap_angle(a.theta + kPi);
    CHECK(iou3d(a, flipped) == doctest::Approx(1.0).epsilon(1e-9));
    // A square footprint is invariant under 90-degree yaw.
    const Box3D sq{2.0, 1.5, 2.0, 0.0, 1.65, 20.0, 0.0};
    Box3D sq90 = sq;
    sq90.theta = kPi / 2;
    CHECK(iou3d(sq, sq90) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("iou3d agrees with a Monte-Carlo volume oracle on rotated pairs") {
    std::mt19937 rng(103);
    std::uniform_real_distribution<double> d(-1.5, 1.5), ang(-kPi, kPi);
    for (int t = 0; t < 20; ++t) {
        const Box3D a{1.62, 1.53, 3.89, 0.0, 1.65, 20.0, ang(rng)};
        Box3D b = a;
        b.x += d(rng);
        b.z += d(rng);
        b.y += d(rng) / 4;
        b.theta = ang(rng);
        const double mc = mc_iou(a, b, 200000, 1000 + t);
        CHECK(iou3d(a, b) == doctest::Approx(mc).epsilon(0.03).scale(1.0));
    }
}

TEST_CASE("bev_intersection_area handles containment and swaps") {
    // Small rect fully inside a big one.
    const Box3D big{10, 1, 10, 0, 0, 0, 0.3};
    const Box3D small{1, 1, 1, 0, 0, 0, 1.2};
    CHECK(bev_intersection_area(bev_rect(big), bev_rect(small)) == doctest::Approx(1.0));
    CHECK(bev_intersection_area(bev_rect(small), bev_rect(big)) == doctest::Approx(1.0));
}

TEST_CASE("iou2d hand cases") {
    const Box2D a = Box2D::from_corners(0, 0, 10, 10);
    const Box2D b = Box2D::from_corners(5, 0, 15, 10);
    CHECK(iou2d(a, b) == doctest::Approx(50.0 / 150.0));
    CHECK(iou2d(a, a) == doctest::Approx(1.0));
    const Box2D c = Box2D::from_corners(20, 20, 30, 30);
    CHECK(iou2d(a, c) == 0.0);
}

TEST_CASE("difficulty_of follows the devkit thresholds") {
    const Box3D box{1.6, 1.5, 3.9, 0, 1.65, 20, 0};
    CHECK(difficulty_of(make_gt(box, 45, 0.0, 0)) == Difficulty::Easy);
    CHECK(difficulty_of(make_gt(box, 39, 0.0, 0)) == Difficulty::Moderate);
    CHECK(difficulty_of(make_gt(box, 45, 0.0, 1)) == Difficulty::Moderate);
    CHECK(difficulty_of(make_gt(box, 45, 0.2, 0)) == Difficulty::Moderate);
    CHECK(difficulty_of(make_gt(box, 30, 0.4, 2)) == Difficulty::Hard);
    CHECK(difficulty_of(make_gt(box, 20, 0.0, 0)) == Difficulty::Ignored);
    CHECK(difficulty_of(make_gt(box, 45, 0.6, 0)) == Difficulty::Ignored);
    CHECK(difficulty_of(make_gt(box, 45, 0.0, 3)) == Difficulty::Ignored);
}

TEST_CASE("average_precision: perfect detections score 1") {
    const Box3D b1{1.6, 1.5, 3.9, 0, 1.65, 20, 0.2};
    const Box3D b2{1.6, 1.5, 3.9, -4, 1.65, 35, -1.0};
    FrameGts gts = {{make_gt(b1), make_gt(b2)}};
    FrameDets dets = {{make_det(b1, 0.9), make_det(b2, 0.8)}};

    EvalOptions opt;
    CHECK(average_precision(dets, gts, 0.5, opt).ap == doctest::Approx(1.0));
    opt.forty_point = true;
    CHECK(average_precision(dets, gts, 0.5, opt).ap == doctest::Approx(1.0));
}

TEST_CASE("average_precision: hand-enumerated mixed case equals 28/33") {
    // 2 ground truths; detections in score order: TP, FP, TP.
    // PR samples: (0.5, 1), (0.5, 0.5), (1.0, 2/3).
    // 11-point AP = (6 * 1 + 5 * 2/3) / 11 = 28/33.
    const Box3D b1{1.6, 1.5, 3.9, 0, 1.65, 20, 0.0};
    const Box3D b2{1.6, 1.5, 3.9, -4, 1.65, 35, 0.0};
    Box3D far = b1;
    far.x += 50;

    FrameGts gts = {{make_gt(b1), make_gt(b2)}};
    FrameDets dets = {{make_det(b1, 0.9), make_det(far, 0.8), make_det(b2, 0.7)}};

    const ApResult res = average_precision(dets, gts, 0.5, EvalOptions{});
    CHECK(res.ap == doctest::Approx(28.0 / 33.0).epsilon(1e-12));
    REQUIRE(res.curve.recall.size() == 3);
    CHECK(res.curve.recall[0] == doctest::Approx(0.5));
    CHECK(res.curve.precision[1] == doctest::Approx(0.5));
    CHECK(res.curve.precision[2] == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("duplicate detections of one ground truth count as false positives") {
    const Box3D b1{1.6, 1.5, 3.9, 0, 1.65, 20, 0.0};
    FrameGts gts = {{make_gt(b1)}};
    FrameDets dets = {{make_det(b1, 0.9), make_det(b1, 0.8)}};
    const ApResult res = average_precision(dets, gts, 0.5, EvalOptions{});
    // Curve: (1.0, 1.0) then (1.0, 0.5); interpolated precision stays 1.
    CHECK(res.ap == doctest::Approx(1.0));
    CHECK(res.curve.precision[1] == doctest::Approx(0.5));
}

TEST_CASE("ignored ground truths neither count nor absorb false positives") {
    const Box3D b1{1.6, 1.5, 3.9, 0, 1.65, 20, 0.0};
    const Box3D b2{1.6, 1.5, 3.9, -4, 1.65, 35, 0.0};
    FrameGts gts = {{make_gt(b1), make_gt(b2, 45, 0.9, 0)}};  // b2 ignored
    FrameDets dets = {{make_det(b1, 0.9), make_det(b2, 0.8)}};

    // The b2 detection matches only an ignored ground truth: it must be
    // dropped, not counted as FP; b2 itself must not be an FN.
    const ApResult res = average_precision(dets, gts, 0.5, EvalOptions{});
    CHECK(res.ap == doctest::Approx(1.0));
    CHECK(res.curve.recall.back() == doctest::Approx(1.0));
}

TEST_CASE("difficulty filter: harder ground truths are ignored, not missed") {
    const Box3D b1{1.6, 1.5, 3.9, 0, 1.65, 20, 0.0};
    const Box3D b2{1.6, 1.5, 3.9, -4, 1.65, 35, 0.0};
    // b1 easy, b2 hard (occlusion 2).
    FrameGts gts = {{make_gt(b1, 45, 0, 0), make_gt(b2, 45, 0, 2)}};
    FrameDets dets = {{make_det(b1, 0.9)}};

    EvalOptions easy;
    easy.difficulty = Difficulty::Easy;
    CHECK(average_precision(dets, gts, 0.5, easy).ap == doctest::Approx(1.0));

    EvalOptions hard;
    hard.difficulty = Difficulty::Hard;
    // At hard, b2 counts and is missed: recall tops out at 0.5.
    const ApResult res = average_precision(dets, gts, 0.5, hard);
    CHECK(res.curve.recall.back() == doctest::Approx(0.5));
    CHECK(res.ap == doctest::Approx(6.0 / 11.0));
}

TEST_CASE("alp: distance-based matching") {
    const Box3D b1{1.6, 1.5, 3.9, 0, 1.65, 20, 0.0};
    Box3D off = b1;
    off.x += 0.8;  // within 1 m
    FrameGts gts = {{make_gt(b1)}};
    CHECK(alp({{make_det(off, 0.9)}}, gts, 1.0, EvalOptions{}).ap == doctest::Approx(1.0));

    off.x = b1.x + 1.5;  // beyond 1 m
    CHECK(alp({{make_det(off, 0.9)}}, gts, 1.0, EvalOptions{}).ap == doctest::Approx(0.0));
    CHECK(alp({{make_det(off, 0.9)}}, gts, 2.0, EvalOptions{}).ap == doctest::Approx(1.0));
}

TEST_CASE("aos: exact orientations reproduce AP, opposite ones contribute zero") {
    const Box3D b1{1.6, 1.5, 3.9, 0, 1.65, 20, 0.0};
    GroundTruth gt = make_gt(b1);
    gt.alpha = 0.5;

    DetectionResult det = make_det(b1, 0.9);
    det.alpha = 0.5;
    CHECK(aos({{det}}, {{gt}}, 0.5, EvalOptions{}).ap == doctest::Approx(1.0));

    det.alpha = 0.5 + kPi;  // (1 + cos(pi)) / 2 = 0
    CHECK(aos({{det}}, {{gt}}, 0.5, EvalOptions{}).ap == doctest::Approx(0.0));

    det.alpha = 0.5 + kPi / 2;  // weight 0.5
    const double half = aos({{det}}, {{gt}}, 0.5, EvalOptions{}).ap;
    CHECK(half == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("recall_loc and recall_3d") {
    const Box3D b1{1.6, 1.5, 3.9, 0, 1.65, 20, 0.0};
    const Box3D b2{1.6, 1.5, 3.9, -4, 1.65, 35, 0.0};
    FrameGts gts = {{make_gt(b1), make_gt(b2)}};

    Box3D near1 = b1;
    near1.x += 0.5;
    FrameBoxes guid = {{near1}};  // only covers b1

    EvalOptions opt;
    CHECK(recall_loc(guid, gts, 1.0, opt) == doctest::Approx(0.5));
    CHECK(recall_loc(guid, gts, 0.1, opt) == doctest::Approx(0.0));
    CHECK(recall_loc({{b1, b2}}, gts, 1.0, opt) == doctest::Approx(1.0));
    CHECK(recall_3d({{b1, b2}}, gts, 0.99, opt) == doctest::Approx(1.0));
    CHECK(recall_3d(guid, gts, 0.9, opt) == doctest::Approx(0.0));
}

TEST_CASE("class filter: other classes are invisible to the evaluation") {
    const Box3D b1{1.6, 1.5, 3.9, 0, 1.65, 20, 0.0};
    GroundTruth ped = make_gt(b1);
    ped.class_name = "Pedestrian";
    FrameGts gts = {{make_gt(b1), ped}};
    FrameDets dets = {{make_det(b1, 0.9)}};
    CHECK(average_precision(dets, gts, 0.5, EvalOptions{}).ap == doctest::Approx(1.0));
}

TEST_CASE("40-point and 11-point grids differ on partial recall") {
    const Box3D b1{1.6, 1.5, 3.9, 0, 1.65, 20, 0.0};
    const Box3D b2{1.6, 1.5, 3.9, -4, 1.65, 35, 0.0};
    const Box3D b3{1.6, 1.5, 3.9, 4, 1.65, 50, 0.0};
    FrameGts gts = {{make_gt(b1), make_gt(b2), make_gt(b3)}};
    FrameDets dets = {{make_det(b1, 0.9)}};  // recall 1/3, precision 1

    EvalOptions opt;
    // 11-point: grid points 0, 0.1, 0.2, 0.3 reach precision 1 -> 4/11.
    CHECK(average_precision(dets, gts, 0.5, opt).ap == doctest::Approx(4.0 / 11.0));
    opt.forty_point = true;
    // 40-point: r = 1/40 .. 13/40 (13 points <= 1/3) -> 13/40.
    CHECK(average_precision(dets, gts, 0.5, opt).ap == doctest::Approx(13.0 / 40.0));
}
