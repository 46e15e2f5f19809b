// Python bindings for the monocular-3D toolkit core.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "m3d/config.hpp"
#include "m3d/guidance.hpp"
#include "m3d/kitti_io.hpp"
#include "m3d/metrics.hpp"
#include "m3d/refine.hpp"
#include "m3d/synth.hpp"
#include "m3d/warp.hpp"

namespace py = pybind11;
using namespace m3d;

PYBIND11_MODULE(_mono3dkit, m) {
    m.doc() = "Monocular 3D detection toolkit: guidance cuboids, surface warps, "
              "interval-classification refinement, and 3D detection metrics";

    // Errors map onto ValueError so python callers get idiomatic exceptions.
    py::register_exception<Error>(m, "ToolkitError", PyExc_ValueError);

    // -- geometry ------------------------------------------------------------
    py::class_<Box3D>(m, "Box3D")
        .def(py::init<>())
        .def(py::init([](double w, double h, double l, double x, double y, double z,
                         double theta) {
                 return Box3D{w, h, l, x, y, z, theta};
             }),
             py::arg("w"), py::arg("h"), py::arg("l"), py::arg("x"), py::arg("y"),
             py::arg("z"), py::arg("theta"))
        .def_readwrite("w", &Box3D::w)
        .def_readwrite("h", &Box3D::h)
        .def_readwrite("l", &Box3D::l)
        .def_readwrite("x", &Box3D::x)
        .def_readwrite("y", &Box3D::y)
        .def_readwrite("z", &Box3D::z)
        .def_readwrite("theta", &Box3D::theta)
        .def("__repr__", [](const Box3D& b) {
            return "Box3D(w=" + std::to_string(b.w) + ", h=" + std::to_string(b.h) +
                   ", l=" + std::to_string(b.l) + ", x=" + std::to_string(b.x) +
                   ", y=" + std::to_string(b.y) + ", z=" + std::to_string(b.z) +
                   ", theta=" + std::to_string(b.theta) + ")";
        });

    py::class_<Box2D>(m, "Box2D")
        .def(py::init<>())
        .def(py::init([](double cx, double cy, double w, double h) {
                 return Box2D{cx, cy, w, h};
             }),
             py::arg("cx"), py::arg("cy"), py::arg("w"), py::arg("h"))
        .def_static("from_corners", &Box2D::from_corners, py::arg("left"), py::arg("top"),
                    py::arg("right"), py::arg("bottom"))
        .def_readwrite("cx", &Box2D::cx)
        .def_readwrite("cy", &Box2D::cy)
        .def_readwrite("w2d", &Box2D::w2d)
        .def_readwrite("h2d", &Box2D::h2d)
        .def("left", &Box2D::left)
        .def("right", &Box2D::right)
        .def("top", &Box2D::top)
        .def("bottom", &Box2D::bottom);

    py::class_<CameraModel>(m, "CameraModel")
        .def(py::init<const Mat34&>(), py::arg("P"))
        .def_static("from_intrinsics", &CameraModel::from_intrinsics, py::arg("fx"),
                    py::arg("fy"), py::arg("cx"), py::arg("cy"))
        .def_property_readonly("P", &CameraModel::P)
        .def_property_readonly("K", &CameraModel::K)
        .def_property_readonly("K_inv", &CameraModel::K_inv)
        .def_property_readonly("t_cam", &CameraModel::t_cam);

    py::enum_<Surface>(m, "Surface")
        .value("Top", Surface::Top)
        .value("Front", Surface::Front)
        .value("Back", Surface::Back)
        .value("LeftSide", Surface::LeftSide)
        .value("RightSide", Surface::RightSide);

    py::class_<SurfaceQuad>(m, "SurfaceQuad")
        .def_readonly("tag", &SurfaceQuad::tag)
        .def_property_readonly("corners", [](const SurfaceQuad& q) {
            return std::vector<Vec3>(q.corners.begin(), q.corners.end());
        });

    m.def("wrap_angle", &wrap_angle, py::arg("angle"));
    m.def("corners3d",
          [](const Box3D& b) {
              const auto c = corners3d(b);
              return std::vector<Vec3>(c.begin(), c.end());
          },
          py::arg("box"));
    m.def("project", &project, py::arg("camera"), py::arg("point"));
    m.def("project_box", &project_box, py::arg("camera"), py::arg("box"));
    m.def("alpha_to_theta", &alpha_to_theta, py::arg("alpha"), py::arg("x"), py::arg("z"));
    m.def("theta_to_alpha", &theta_to_alpha, py::arg("theta"), py::arg("x"), py::arg("z"));
    m.def("visible_surfaces", &visible_surfaces, py::arg("box"), py::arg("alpha"));

    // -- guidance ------------------------------------------------------------
    py::class_<SizePrior>(m, "SizePrior")
        .def(py::init<>())
        .def(py::init([](std::string cls, double w, double h, double l, double lambda) {
                 return SizePrior{std::move(cls), w, h, l, lambda};
             }),
             py::arg("class_name"), py::arg("w"), py::arg("h"), py::arg("l"),
             py::arg("lambda_"))
        .def_readwrite("class_name", &SizePrior::class_name)
        .def_readwrite("w_bar", &SizePrior::w_bar)
        .def_readwrite("h_bar", &SizePrior::h_bar)
        .def_readwrite("l_bar", &SizePrior::l_bar)
        .def_readwrite("lambda_", &SizePrior::lambda);

    py::class_<PriorTable>(m, "PriorTable")
        .def(py::init<>())
        .def_static("defaults", &PriorTable::defaults)
        .def("add", &PriorTable::add, py::arg("prior"))
        .def("find", &PriorTable::find, py::arg("class_name"),
             py::return_value_policy::copy)
        .def("contains", &PriorTable::contains, py::arg("class_name"));

    py::class_<Detection2D>(m, "Detection2D")
        .def(py::init<>())
        .def_readwrite("box", &Detection2D::box)
        .def_readwrite("alpha", &Detection2D::alpha)
        .def_readwrite("class_name", &Detection2D::class_name)
        .def_readwrite("score", &Detection2D::score);

    py::class_<Guidance>(m, "Guidance")
        .def_readonly("box", &Guidance::box)
        .def_readonly("source", &Guidance::source)
        .def_readonly("normalized_bottom", &Guidance::normalized_bottom)
        .def_readonly("depth", &Guidance::depth);

    m.def("generate_guidance", &generate_guidance, py::arg("camera"), py::arg("detection"),
          py::arg("priors"));

    // -- warp ----------------------------------------------------------------
    py::class_<FeatureMap>(m, "FeatureMap")
        .def(py::init<>())
        .def_static("zeros", &FeatureMap::zeros, py::arg("channels"), py::arg("height"),
                    py::arg("width"), py::arg("stride") = 1.0)
        .def_readonly("channels", &FeatureMap::channels)
        .def_readonly("height", &FeatureMap::height)
        .def_readonly("width", &FeatureMap::width)
        .def_readwrite("stride", &FeatureMap::stride)
        .def("get", [](const FeatureMap& fm, int c, int y, int x) { return fm.at(c, y, x); })
        .def("set", [](FeatureMap& fm, int c, int y, int x, double v) { fm.at(c, y, x) = v; });

    py::class_<Quad2D>(m, "Quad2D")
        .def(py::init([](const std::vector<Vec2>& pts) {
                 if (pts.size() != 4) throw ShapeMismatch("a quad needs 4 points");
                 Quad2D q;
                 std::copy(pts.begin(), pts.end(), q.pts.begin());
                 return q;
             }),
             py::arg("points"))
        .def_property_readonly("points", [](const Quad2D& q) {
            return std::vector<Vec2>(q.pts.begin(), q.pts.end());
        });

    py::class_<Homography>(m, "Homography").def_readonly("H", &Homography::H);

    py::class_<WarpedSurface>(m, "WarpedSurface")
        .def_readonly("tag", &WarpedSurface::tag)
        .def_readonly("grid", &WarpedSurface::grid);

    m.def("solve_homography", &solve_homography, py::arg("src"), py::arg("dst"));
    m.def("warp_region", &warp_region, py::arg("feature_map"), py::arg("quad"),
          py::arg("grid_height"), py::arg("grid_width"));
    m.def("extract_surface_features", &extract_surface_features, py::arg("feature_map"),
          py::arg("camera"), py::arg("surfaces"), py::arg("grid_height"),
          py::arg("grid_width"));

    // -- refinement ------------------------------------------------------------
    py::enum_<Dim>(m, "Dim")
        .value("W", Dim::W)
        .value("H", Dim::H)
        .value("L", Dim::L)
        .value("X", Dim::X)
        .value("Y", Dim::Y)
        .value("Z", Dim::Z)
        .value("Theta", Dim::Theta);

    py::class_<Residual>(m, "Residual")
        .def_readwrite("dx", &Residual::dx)
        .def_readwrite("dy", &Residual::dy)
        .def_readwrite("dz", &Residual::dz)
        .def_readwrite("dl", &Residual::dl)
        .def_readwrite("dw", &Residual::dw)
        .def_readwrite("dh", &Residual::dh)
        .def_readwrite("dtheta", &Residual::dtheta);

    py::class_<DimInterval>(m, "DimInterval")
        .def_readwrite("sigma", &DimInterval::sigma)
        .def_readwrite("n_half", &DimInterval::n_half);

    py::class_<IntervalSpec>(m, "IntervalSpec")
        .def(py::init<>())
        .def_static("defaults", &IntervalSpec::defaults)
        .def_property_readonly("dims",
                               [](const IntervalSpec& s) {
                                   return std::vector<DimInterval>(s.dims.begin(),
                                                                   s.dims.end());
                               })
        .def("num_classes", &IntervalSpec::num_classes, py::arg("dim"))
        .def("center", &IntervalSpec::center, py::arg("dim"), py::arg("cls"))
        .def("total_classes", &IntervalSpec::total_classes);

    py::class_<IntervalScores>(m, "IntervalScores")
        .def(py::init<>())
        .def_property(
            "p",
            [](const IntervalScores& s) {
                return std::vector<std::vector<double>>(s.p.begin(), s.p.end());
            },
            [](IntervalScores& s, const std::vector<std::vector<double>>& p) {
                if (p.size() != kNumDims)
                    throw ShapeMismatch("expected 7 score vectors");
                std::copy(p.begin(), p.end(), s.p.begin());
            });

    py::class_<IntervalLabels>(m, "IntervalLabels")
        .def_readonly("matched", &IntervalLabels::matched)
        .def_property_readonly("q", [](const IntervalLabels& l) {
            return std::vector<std::vector<double>>(l.q.begin(), l.q.end());
        });

    py::class_<Refined>(m, "Refined")
        .def_readonly("box", &Refined::box)
        .def_readonly("confidence", &Refined::confidence);

    m.def("encode_residual", &encode_residual, py::arg("guidance"), py::arg("gt"));
    m.def("decode_residual", &decode_residual, py::arg("guidance"), py::arg("residual"));
    m.def("raw_deltas",
          [](const Box3D& g, const Box3D& gt) {
              const auto d = raw_deltas(g, gt);
              return std::vector<double>(d.begin(), d.end());
          },
          py::arg("guidance"), py::arg("gt"));
    m.def("classify_delta", &classify_delta, py::arg("spec"), py::arg("delta"),
          py::arg("dim"));
    m.def("apply_shift", &apply_shift, py::arg("box"), py::arg("dim"), py::arg("amount"));
    m.def("quality_label", &quality_label, py::arg("overlap"));
    m.def("quality_bce", &quality_bce, py::arg("p"), py::arg("q"));
    m.def("quality_bce_dp", &quality_bce_dp, py::arg("p"), py::arg("q"));
    m.def("make_interval_labels",
          [](const Box3D& g, const std::optional<Box3D>& gt, const IntervalSpec& spec) {
              return make_interval_labels(g, gt, spec, iou3d);
          },
          py::arg("guidance"), py::arg("gt"), py::arg("spec"));
    m.def("decode_prediction", &decode_prediction, py::arg("guidance"), py::arg("scores"),
          py::arg("spec"), py::arg("reject_threshold"), py::arg("det_score") = 1.0);

    // -- metrics ----------------------------------------------------------------
    py::enum_<Difficulty>(m, "Difficulty")
        .value("Easy", Difficulty::Easy)
        .value("Moderate", Difficulty::Moderate)
        .value("Hard", Difficulty::Hard)
        .value("Ignored", Difficulty::Ignored);

    py::class_<GroundTruth>(m, "GroundTruth")
        .def(py::init<>())
        .def_readwrite("box3d", &GroundTruth::box3d)
        .def_readwrite("box2d", &GroundTruth::box2d)
        .def_readwrite("alpha", &GroundTruth::alpha)
        .def_readwrite("class_name", &GroundTruth::class_name)
        .def_readwrite("truncation", &GroundTruth::truncation)
        .def_readwrite("occlusion", &GroundTruth::occlusion);

    py::class_<DetectionResult>(m, "DetectionResult")
        .def(py::init<>())
        .def_readwrite("box3d", &DetectionResult::box3d)
        .def_readwrite("box2d", &DetectionResult::box2d)
        .def_readwrite("alpha", &DetectionResult::alpha)
        .def_readwrite("class_name", &DetectionResult::class_name)
        .def_readwrite("score", &DetectionResult::score);

    py::class_<PRCurve>(m, "PRCurve")
        .def_readonly("recall", &PRCurve::recall)
        .def_readonly("precision", &PRCurve::precision)
        .def_readonly("similarity", &PRCurve::similarity);

    py::class_<ApResult>(m, "ApResult")
        .def_readonly("ap", &ApResult::ap)
        .def_readonly("curve", &ApResult::curve);

    py::class_<EvalOptions>(m, "EvalOptions")
        .def(py::init<>())
        .def_readwrite("class_name", &EvalOptions::class_name)
        .def_readwrite("difficulty", &EvalOptions::difficulty)
        .def_readwrite("apply_difficulty", &EvalOptions::apply_difficulty)
        .def_readwrite("forty_point", &EvalOptions::forty_point);

    m.def("iou3d", &iou3d, py::arg("a"), py::arg("b"));
    m.def("iou2d", &iou2d, py::arg("a"), py::arg("b"));
    m.def("difficulty_of", [](const GroundTruth& gt) { return difficulty_of(gt); },
          py::arg("gt"));
    m.def("average_precision", &average_precision, py::arg("detections"), py::arg("gts"),
          py::arg("iou_threshold"), py::arg("options") = EvalOptions{});
    m.def("alp", &alp, py::arg("detections"), py::arg("gts"), py::arg("distance_m"),
          py::arg("options") = EvalOptions{});
    m.def("aos", &aos, py::arg("detections"), py::arg("gts"),
          py::arg("iou2d_threshold") = 0.5, py::arg("options") = EvalOptions{});
    m.def("recall_loc", &recall_loc, py::arg("guidances"), py::arg("gts"),
          py::arg("threshold_m"), py::arg("options") = EvalOptions{});
    m.def("recall_3d", &recall_3d, py::arg("guidances"), py::arg("gts"),
          py::arg("iou_threshold"), py::arg("options") = EvalOptions{});

    // -- synthetic fixtures -------------------------------------------------------
    py::class_<SceneSpec>(m, "SceneSpec")
        .def(py::init<>())
        .def_readwrite("seed", &SceneSpec::seed)
        .def_readwrite("count", &SceneSpec::count)
        .def_readwrite("depth_min", &SceneSpec::depth_min)
        .def_readwrite("depth_max", &SceneSpec::depth_max)
        .def_readwrite("camera_height", &SceneSpec::camera_height)
        .def_readwrite("prior", &SceneSpec::prior)
        .def_readwrite("camera", &SceneSpec::camera);

    py::enum_<DetectionMode>(m, "DetectionMode")
        .value("ExactLambda", DetectionMode::ExactLambda)
        .value("TightBbox", DetectionMode::TightBbox);

    m.def("generate_scene", &generate_scene, py::arg("spec"));
    m.def("perfect_detections", &perfect_detections, py::arg("scene"), py::arg("camera"),
          py::arg("mode"), py::arg("lambda_"));
    m.def("oracle_scores", &oracle_scores, py::arg("guidance"), py::arg("gt"),
          py::arg("spec"));

    // -- dataset I/O ---------------------------------------------------------------
    m.def("parse_calib_text",
          [](const std::string& text) {
              const CalibFile calib = parse_calib(text);
              std::map<std::string, Mat34> out;
              for (const auto& [k, v] : calib.entries()) out[k] = v;
              return out;
          },
          py::arg("text"));
    m.def("parse_config_text", &parse_config, py::arg("json_text"));

    py::class_<ToolkitConfig>(m, "ToolkitConfig")
        .def(py::init<>())
        .def_readwrite("camera_height", &ToolkitConfig::camera_height)
        .def_readwrite("reject_threshold", &ToolkitConfig::reject_threshold)
        .def_readwrite("priors", &ToolkitConfig::priors)
        .def_readwrite("intervals", &ToolkitConfig::intervals)
        .def_readwrite("forty_point", &ToolkitConfig::forty_point);
}
