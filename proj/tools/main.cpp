// Command-line front end: guidance generation, refinement decoding,
// evaluation, residual statistics, synthetic scenes, and warp demos.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "m3d/config.hpp"
#include "m3d/kitti_io.hpp"
#include "m3d/metrics.hpp"
#include "m3d/refine.hpp"
#include "m3d/synth.hpp"
#include "m3d/warp.hpp"

namespace fs = std::filesystem;
using namespace m3d;

namespace {

// Exit codes: 0 success, 1 usage, 2 data error, 3 internal invariant failure.
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

std::string fmt(double v, int prec = 4) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
    return buf;
}

std::string frame_name(int i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%06d", i);
    return buf;
}

/// Runs fn(i) for i in [0, n) on `jobs` threads; rethrows the first error.
void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn) {
    jobs = std::max(1, jobs);
    if (jobs == 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

CameraModel load_camera(const std::string& calib_path) {
    const CalibFile calib = parse_calib(read_text_file(calib_path));
    return CameraModel(calib.matrix("P2"));
}

FrameGts load_gt_frames(const std::string& dir, const std::vector<std::string>& ids) {
    FrameGts out(ids.size());
    for (size_t i = 0; i < ids.size(); ++i)
        for (const auto& rec : parse_labels(read_text_file(dir + "/" + ids[i] + ".txt")))
            out[i].push_back(to_ground_truth(rec));
    return out;
}

FrameDets load_det_frames(const std::string& dir, const std::vector<std::string>& ids) {
    FrameDets out(ids.size());
    for (size_t i = 0; i < ids.size(); ++i) {
        const std::string path = dir + "/" + ids[i] + ".txt";
        if (!fs::exists(path))
            continue;  // a frame with no detections is legal
        for (const auto& rec : parse_labels(read_text_file(path)))
            out[i].push_back(to_detection_result(rec));
    }
    return out;
}

// ---------------------------------------------------------------------------

struct GuideArgs {
    std::string calib_dir, det_dir, config_path, out_dir;
    int jobs = 1;
    bool strict = false;
};

int run_guide(const GuideArgs& args) {
    const ToolkitConfig cfg =
        args.config_path.empty() ? ToolkitConfig{} : load_config(args.config_path);
    const auto ids = list_frame_ids(args.det_dir);
    std::mutex log_mutex;

    parallel_for(ids.size(), args.jobs, [&](size_t i) {
        const std::string& id = ids[i];
        const CameraModel cam = load_camera(args.calib_dir + "/" + id + ".txt");
        const auto dets = read_detections(read_text_file(args.det_dir + "/" + id + ".txt"));

        std::vector<LabelRecord> records;
        std::string meta = "index,x_norm,y_norm,depth\n";
        for (size_t d = 0; d < dets.size(); ++d) {
            try {
                const Guidance g = generate_guidance(cam, dets[d], cfg.priors);
                records.push_back(to_label_record(g.box, dets[d].class_name, dets[d].alpha,
                                                  dets[d].box, dets[d].score));
                meta += std::to_string(d) + "," + fmt(g.normalized_bottom.x(), 9) + "," +
                        fmt(g.normalized_bottom.y(), 9) + "," + fmt(g.depth, 6) + "\n";
            } catch (const Error& e) {
                if (args.strict) throw;
                std::lock_guard lock(log_mutex);
                std::cerr << "warning: frame " << id << " detection " << d << ": "
                          << e.what() << " (skipped)\n";
            }
        }
        write_text_file(args.out_dir + "/" + id + ".txt", write_results(records));
        write_text_file(args.out_dir + "/" + id + ".meta.csv", meta);
    });
    std::cout << "wrote guidance for " << ids.size() << " frames to " << args.out_dir << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct RefineArgs {
    std::string guidance_dir, score_dir, config_path, out_dir;
    double reject_threshold = -1;  // <0: take from config
    int jobs = 1;
};

int run_refine(const RefineArgs& args) {
    const ToolkitConfig cfg =
        args.config_path.empty() ? ToolkitConfig{} : load_config(args.config_path);
    const double reject =
        args.reject_threshold >= 0 ? args.reject_threshold : cfg.reject_threshold;
    const auto ids = list_frame_ids(args.guidance_dir);

    std::atomic<size_t> kept{0}, rejected{0};
    parallel_for(ids.size(), args.jobs, [&](size_t i) {
        const std::string& id = ids[i];
        const auto guidances =
            parse_labels(read_text_file(args.guidance_dir + "/" + id + ".txt"));
        const std::string score_path = args.score_dir + "/" + id + ".txt";
        std::vector<std::pair<int, IntervalScores>> rows;
        if (fs::exists(score_path))
            rows = read_interval_scores(read_text_file(score_path), cfg.intervals);

        std::vector<LabelRecord> out;
        for (const auto& [idx, scores] : rows) {
            if (idx < 0 || idx >= static_cast<int>(guidances.size()))
                throw ShapeMismatch("frame " + id + ": guidance index " +
                                    std::to_string(idx) + " out of range");
            const LabelRecord& rec = guidances[idx];
            const Box3D box = to_box3d(rec);
            const auto refined =
                decode_prediction(box, scores, cfg.intervals, reject, rec.score.value_or(1.0));
            if (!refined) {
                ++rejected;
                continue;
            }
            ++kept;
            LabelRecord r = rec;
            const Box3D& b = refined->box;
            r.width = b.w;
            r.height = b.h;
            r.length = b.l;
            r.x = b.x;
            r.y = b.y;
            r.z = b.z;
            r.rotation_y = b.theta;
            r.alpha = theta_to_alpha(b.theta, b.x, b.z);
            r.score = refined->confidence;
            out.push_back(std::move(r));
        }
        write_text_file(args.out_dir + "/" + id + ".txt", write_results(out));
    });
    std::cout << "refined " << kept.load() << " boxes, rejected " << rejected.load()
              << " as background\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
    std::string gt_dir, results_dir, metric = "ap3d", csv_path, class_name = "Car";
    std::string config_path;
    double iou = 0.5;
    double dist = 1.0;
    std::vector<std::string> difficulties = {"easy", "moderate", "hard"};
    bool forty_point = false;
    bool no_difficulty_filter = false;
};

Difficulty parse_difficulty(const std::string& name) {
    if (name == "easy") return Difficulty::Easy;
    if (name == "moderate") return Difficulty::Moderate;
    if (name == "hard") return Difficulty::Hard;
    throw Error("unknown difficulty '" + name + "'");
}

int run_eval(const EvalArgs& args) {
    const ToolkitConfig cfg =
        args.config_path.empty() ? ToolkitConfig{} : load_config(args.config_path);
    const auto ids = list_frame_ids(args.gt_dir);
    const FrameGts gts = load_gt_frames(args.gt_dir, ids);
    const FrameDets dets = load_det_frames(args.results_dir, ids);

    EvalOptions opt;
    opt.class_name = args.class_name;
    opt.forty_point = args.forty_point || cfg.forty_point;
    opt.apply_difficulty = !args.no_difficulty_filter;
    opt.thresholds = cfg.difficulty;

    std::string csv = "metric,difficulty,threshold,value\n";
    const std::string head = args.metric == "ap3d" ? "AP_3D (IoU=" + fmt(args.iou, 2) + ")"
                             : args.metric == "alp" ? "ALP (dist=" + fmt(args.dist, 2) + "m)"
                             : args.metric == "aos" ? "AOS (2D IoU=" + fmt(args.iou, 2) + ")"
                                                    : "Recall";
    std::cout << head << ", class " << args.class_name << "\n";

    if (args.metric == "recall") {
        FrameBoxes boxes(dets.size());
        for (size_t f = 0; f < dets.size(); ++f)
            for (const auto& d : dets[f])
                if (d.class_name == args.class_name)
                    boxes[f].push_back(d.box3d);
        std::cout << "difficulty  loc@2m  loc@1m  3d@" << fmt(args.iou, 2) << "\n";
        for (const auto& dn : args.difficulties) {
            opt.difficulty = parse_difficulty(dn);
            const double r2 = recall_loc(boxes, gts, 2.0, opt);
            const double r1 = recall_loc(boxes, gts, 1.0, opt);
            const double r3d = recall_3d(boxes, gts, args.iou, opt);
            std::cout << dn << "  " << fmt(r2) << "  " << fmt(r1) << "  " << fmt(r3d) << "\n";
            csv += "recall_loc," + dn + ",2.0," + fmt(r2, 6) + "\n";
            csv += "recall_loc," + dn + ",1.0," + fmt(r1, 6) + "\n";
            csv += "recall_3d," + dn + "," + fmt(args.iou, 2) + "," + fmt(r3d, 6) + "\n";
        }
    } else {
        std::cout << "difficulty  value\n";
        std::string curve_csv = "difficulty,recall,precision,similarity\n";
        for (const auto& dn : args.difficulties) {
            opt.difficulty = parse_difficulty(dn);
            ApResult res;
            if (args.metric == "ap3d")
                res = average_precision(dets, gts, args.iou, opt);
            else if (args.metric == "alp")
                res = alp(dets, gts, args.dist, opt);
            else if (args.metric == "aos")
                res = aos(dets, gts, args.iou, opt);
            else
                throw Error("unknown metric '" + args.metric + "'");
            std::cout << dn << "  " << fmt(res.ap) << "\n";
            csv += args.metric + "," + dn + "," + fmt(args.metric == "alp" ? args.dist : args.iou, 2) +
                   "," + fmt(res.ap, 6) + "\n";
            for (size_t i = 0; i < res.curve.recall.size(); ++i)
                curve_csv += dn + "," + fmt(res.curve.recall[i], 6) + "," +
                             fmt(res.curve.precision[i], 6) + "," +
                             fmt(res.curve.similarity[i], 6) + "\n";
        }
        if (!args.csv_path.empty())
            write_text_file(fs::path(args.csv_path).replace_extension(".curve.csv").string(),
                            curve_csv);
    }
    if (!args.csv_path.empty())
        write_text_file(args.csv_path, csv);
    return 0;
}

// ---------------------------------------------------------------------------

struct StatsArgs {
    std::string gt_dir, guidance_dir, calib_dir, out_path, config_path;
    double match_iou = 0.5;
};

int run_stats(const StatsArgs& args) {
    ToolkitConfig cfg =
        args.config_path.empty() ? ToolkitConfig{} : load_config(args.config_path);
    const auto ids = list_frame_ids(args.gt_dir);

    std::vector<std::pair<Box3D, Box3D>> pairs;  // (guidance, gt)
    std::vector<double> lambdas;
    std::map<std::string, std::array<double, 4>> size_acc;  // sum w,h,l + count

    for (const auto& id : ids) {
        const auto gt_recs = parse_labels(read_text_file(args.gt_dir + "/" + id + ".txt"));
        std::vector<LabelRecord> guid_recs;
        const std::string gpath = args.guidance_dir + "/" + id + ".txt";
        if (fs::exists(gpath))
            guid_recs = parse_labels(read_text_file(gpath));

        // Greedy guidance-to-gt matching on 2D IoU.
        std::vector<bool> taken(gt_recs.size(), false);
        for (const auto& g : guid_recs) {
            const Box2D gb = Box2D::from_corners(g.left, g.top, g.right, g.bottom);
            int best = -1;
            double best_iou = args.match_iou;
            for (size_t i = 0; i < gt_recs.size(); ++i) {
                if (taken[i] || gt_recs[i].type != g.type)
                    continue;
                const Box2D tb = Box2D::from_corners(gt_recs[i].left, gt_recs[i].top,
                                                     gt_recs[i].right, gt_recs[i].bottom);
                const double v = iou2d(gb, tb);
                if (v >= best_iou) {
                    best_iou = v;
                    best = static_cast<int>(i);
                }
            }
            if (best >= 0) {
                taken[best] = true;
                pairs.emplace_back(to_box3d(g), to_box3d(gt_recs[best]));
            }
        }

        for (const auto& gt : gt_recs) {
            auto& acc = size_acc[gt.type];
            acc[0] += gt.width;
            acc[1] += gt.height;
            acc[2] += gt.length;
            acc[3] += 1;
        }

        if (!args.calib_dir.empty()) {
            const CameraModel cam = load_camera(args.calib_dir + "/" + id + ".txt");
            for (const auto& gt : gt_recs) {
                try {
                    const Vec2 bc = project(cam, Vec3(gt.x, gt.y, gt.z));
                    const double h2d = gt.bottom - gt.top;
                    if (h2d > 1)
                        lambdas.push_back((gt.bottom - bc.y()) / h2d);
                } catch (const PointBehindCamera&) {
                }
            }
        }
    }

    const DeltaStats stats = compute_delta_stats(pairs);
    std::cout << "matched pairs: " << stats.count << "\n";
    std::cout << "dimension  std      mean     min      max\n";
    for (int d = 0; d < kNumDims; ++d)
        std::cout << kDimNames[d] << "  " << fmt(stats.stddev[d]) << "  " << fmt(stats.mean[d])
                  << "  " << fmt(stats.min[d]) << "  " << fmt(stats.max[d]) << "\n";

    if (stats.count > 0)
        cfg.intervals = spec_from_stats(stats);

    // Per-class mean sizes; lambda as the median bottom-center shift
    // fraction (robust against the long near-range tail).
    double lambda = -1;
    if (!lambdas.empty()) {
        std::sort(lambdas.begin(), lambdas.end());
        lambda = lambdas[lambdas.size() / 2];
        std::cout << "lambda (median): " << fmt(lambda) << "\n";
    }
    PriorTable priors;
    for (const auto& [cls, acc] : size_acc) {
        if (acc[3] < 1) continue;
        SizePrior p;
        p.class_name = cls;
        p.w_bar = acc[0] / acc[3];
        p.h_bar = acc[1] / acc[3];
        p.l_bar = acc[2] / acc[3];
        p.lambda = lambda >= 0 ? std::clamp(lambda, 0.0, 0.49)
                               : cfg.priors.contains(cls) ? cfg.priors.find(cls).lambda : 0.07;
        priors.add(p);
        std::cout << cls << " mean size (w,h,l): " << fmt(p.w_bar) << ", " << fmt(p.h_bar)
                  << ", " << fmt(p.l_bar) << "\n";
    }
    if (!priors.all().empty())
        cfg.priors = priors;

    if (!args.out_path.empty()) {
        write_text_file(args.out_path, config_to_json(cfg));
        std::cout << "wrote config to " << args.out_path << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
    std::string spec_path, out_dir, detections_mode;
};

std::string calib_text(const CameraModel& cam) {
    std::string line = "P2:";
    char buf[32];
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 4; ++c) {
            std::snprintf(buf, sizeof(buf), " %.8e", cam.P()(r, c));
            line += buf;
        }
    }
    return line + "\n";
}

int run_synth(const SynthArgs& args) {
    const std::string spec_text = read_text_file(args.spec_path);
    SceneSpec spec = parse_scene_spec(spec_text);
    const int frames = scene_spec_frames(spec_text);
    const uint64_t base_seed = spec.seed;

    for (int f = 0; f < frames; ++f) {
        spec.seed = base_seed + static_cast<uint64_t>(f);
        const auto scene = generate_scene(spec);
        const std::string id = frame_name(f);

        write_text_file(args.out_dir + "/calib/" + id + ".txt", calib_text(spec.camera));
        std::vector<LabelRecord> labels;
        for (const auto& gt : scene)
            labels.push_back(
                to_label_record(gt.box3d, gt.class_name, gt.alpha, gt.box2d));
        write_text_file(args.out_dir + "/label_2/" + id + ".txt", write_results(labels));

        if (!args.detections_mode.empty()) {
            const DetectionMode mode = args.detections_mode == "exact_lambda"
                                           ? DetectionMode::ExactLambda
                                           : DetectionMode::TightBbox;
            std::vector<LabelRecord> det_recs;
            for (const auto& det :
                 perfect_detections(scene, spec.camera, mode, spec.prior.lambda)) {
                LabelRecord rec;
                rec.type = det.class_name;
                rec.alpha = det.alpha;
                rec.left = det.box.left();
                rec.top = det.box.top();
                rec.right = det.box.right();
                rec.bottom = det.box.bottom();
                rec.score = det.score;
                // 3D fields are intentionally zero: detections carry no 3D box.
                rec.height = rec.width = rec.length = 0.001;
                rec.z = 0.001;
                det_recs.push_back(std::move(rec));
            }
            write_text_file(args.out_dir + "/detections/" + id + ".txt",
                            write_results(det_recs));
        }
    }
    std::cout << "wrote " << frames << " synthetic frames to " << args.out_dir << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct WarpDemoArgs {
    std::string calib_path, box_params, feature_path, out_dir;
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double stride = 1.0;
    int grid = 5;
};

FeatureMap load_feature_csv(const std::string& path, double stride) {
    const std::string text = read_text_file(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::istringstream ss(text);
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ','))
            row.push_back(std::stod(cell));
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError("ragged CSV row", static_cast<int>(rows.size()) + 1);
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw ParseError("empty feature CSV", 1);
    FeatureMap fm = FeatureMap::zeros(1, static_cast<int>(rows.size()),
                                      static_cast<int>(rows.front().size()), stride);
    for (int y = 0; y < fm.height; ++y)
        for (int x = 0; x < fm.width; ++x)
            fm.at(0, y, x) = rows[y][x];
    return fm;
}

std::string grid_csv(const FeatureMap& fm) {
    std::string out;
    for (int c = 0; c < fm.channels; ++c) {
        if (c) out += "\n";
        for (int y = 0; y < fm.height; ++y) {
            for (int x = 0; x < fm.width; ++x) {
                if (x) out += ",";
                out += fmt(fm.at(c, y, x), 6);
            }
            out += "\n";
        }
    }
    return out;
}

int run_warp_demo(const WarpDemoArgs& args) {
    const CameraModel cam = load_camera(args.calib_path);

    std::vector<double> p;
    std::istringstream ss(args.box_params);
    std::string cell;
    while (std::getline(ss, cell, ','))
        p.push_back(std::stod(cell));
    if (p.size() != 7)
        throw Error("--box expects 7 comma-separated values w,h,l,x,y,z,theta");
    const Box3D box{p[0], p[1], p[2], p[3], p[4], p[5], wrap_angle(p[6])};

    const double alpha = std::isnan(args.alpha)
                             ? theta_to_alpha(box.theta, box.x, box.z)
                             : args.alpha;

    FeatureMap fm;
    if (!args.feature_path.empty()) {
        fm = load_feature_csv(args.feature_path, args.stride);
    } else {
        // Synthetic x/y coordinate ramp, image-sized.
        const int w = static_cast<int>(std::ceil(1242 / args.stride));
        const int h = static_cast<int>(std::ceil(375 / args.stride));
        fm = FeatureMap::zeros(2, h, w, args.stride);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                fm.at(0, y, x) = x;
                fm.at(1, y, x) = y;
            }
    }

    const SurfaceSet surfaces = visible_surfaces(box, alpha);
    const auto warped = extract_surface_features(fm, cam, surfaces, args.grid, args.grid);
    for (const auto& ws : warped) {
        const std::string path =
            args.out_dir + "/" + surface_name(ws.tag) + ".csv";
        write_text_file(path, grid_csv(ws.grid));
        std::cout << surface_name(ws.tag) << " -> " << path << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monocular 3D detection toolkit: guidance cuboids, surface warps, "
                 "classification-based refinement, and 3D detection metrics"};
    app.require_subcommand(1);

    GuideArgs guide;
    auto* cmd_guide = app.add_subcommand("guide", "Generate guidance cuboids from 2D detections");
    cmd_guide->add_option("--calib", guide.calib_dir, "Calibration directory")->required();
    cmd_guide->add_option("--detections", guide.det_dir, "2D detection directory")->required();
    cmd_guide->add_option("--priors,--config", guide.config_path, "Toolkit config (JSON)");
    cmd_guide->add_option("--out", guide.out_dir, "Output directory")->required();
    cmd_guide->add_option("--jobs", guide.jobs, "Worker threads");
    cmd_guide->add_flag("--strict", guide.strict, "Turn per-detection warnings into failures");

    RefineArgs refine;
    auto* cmd_refine = app.add_subcommand("refine", "Decode interval scores into refined boxes");
    cmd_refine->add_option("--guidances", refine.guidance_dir, "Guidance directory")->required();
    cmd_refine->add_option("--scores", refine.score_dir, "Interval score directory")->required();
    cmd_refine->add_option("--spec,--config", refine.config_path, "Toolkit config (JSON)");
    cmd_refine->add_option("--reject-threshold", refine.reject_threshold,
                           "Background rejection threshold");
    cmd_refine->add_option("--out", refine.out_dir, "Output directory")->required();
    cmd_refine->add_option("--jobs", refine.jobs, "Worker threads");

    EvalArgs eval;
    auto* cmd_eval = app.add_subcommand("eval", "Evaluate results against ground truth");
    cmd_eval->add_option("--gt", eval.gt_dir, "Ground-truth label directory")->required();
    cmd_eval->add_option("--results", eval.results_dir, "Results directory")->required();
    cmd_eval->add_option("--metric", eval.metric, "ap3d | alp | aos | recall");
    cmd_eval->add_option("--iou", eval.iou, "IoU threshold");
    cmd_eval->add_option("--dist", eval.dist, "Distance threshold [m] (alp)");
    cmd_eval->add_option("--difficulty", eval.difficulties, "easy moderate hard");
    cmd_eval->add_option("--csv", eval.csv_path, "CSV export path");
    cmd_eval->add_option("--class", eval.class_name, "Object class");
    cmd_eval->add_option("--config", eval.config_path, "Toolkit config (JSON)");
    cmd_eval->add_flag("--forty-point", eval.forty_point, "40-point AP interpolation");
    cmd_eval->add_flag("--no-difficulty-filter", eval.no_difficulty_filter,
                       "Count every ground truth regardless of difficulty");

    StatsArgs stats;
    auto* cmd_stats = app.add_subcommand("stats", "Residual statistics and config generation");
    cmd_stats->add_option("--gt", stats.gt_dir, "Ground-truth label directory")->required();
    cmd_stats->add_option("--guidances", stats.guidance_dir, "Guidance directory")->required();
    cmd_stats->add_option("--calib", stats.calib_dir, "Calibration directory (enables lambda)");
    cmd_stats->add_option("--out", stats.out_path, "Write derived config JSON here");
    cmd_stats->add_option("--config", stats.config_path, "Base config (JSON)");
    cmd_stats->add_option("--match-iou", stats.match_iou, "2D IoU matching threshold");

    SynthArgs synth;
    auto* cmd_synth = app.add_subcommand("synth", "Generate synthetic scenes");
    cmd_synth->add_option("--spec", synth.spec_path, "Scene spec (JSON)")->required();
    cmd_synth->add_option("--out", synth.out_dir, "Output directory")->required();
    cmd_synth->add_option("--detections", synth.detections_mode,
                          "Also write perfect detections: exact_lambda | tight_bbox")
        ->check(CLI::IsMember({"exact_lambda", "tight_bbox"}));

    WarpDemoArgs warp;
    auto* cmd_warp = app.add_subcommand("warp-demo", "Warp visible surfaces of a box");
    cmd_warp->add_option("--calib", warp.calib_path, "Calibration file")->required();
    cmd_warp->add_option("--box", warp.box_params, "w,h,l,x,y,z,theta")->required();
    cmd_warp->add_option("--alpha", warp.alpha, "Observation angle (default: from theta)");
    cmd_warp->add_option("--feature", warp.feature_path, "Feature map CSV (default: ramp)");
    cmd_warp->add_option("--stride", warp.stride, "Feature map stride");
    cmd_warp->add_option("--grid", warp.grid, "Output grid size");
    cmd_warp->add_option("--out", warp.out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
        if (cmd_guide->parsed()) return run_guide(guide);
        if (cmd_refine->parsed()) return run_refine(refine);
        if (cmd_eval->parsed()) return run_eval(eval);
        if (cmd_stats->parsed()) return run_stats(stats);
        if (cmd_synth->parsed()) return run_synth(synth);
        if (cmd_warp->parsed()) return run_warp_demo(warp);
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
