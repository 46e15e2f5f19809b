#include "m3d/config.hpp"

#include <json.hpp>

#include "m3d/kitti_io.hpp"

namespace m3d {

using nlohmann::json;

namespace {

json parse_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw ParseError("invalid JSON", 1);
    return j;
}

void read_intervals(const json& j, IntervalSpec& spec) {
    for (int d = 0; d < kNumDims; ++d) {
        const std::string name = kDimNames[d];
        if (j.contains("sigma") && j["sigma"].contains(name))
            spec.dims[d].sigma = j["sigma"][name].get<double>();
        if (j.contains("n") && j["n"].contains(name))
            spec.dims[d].n_half = j["n"][name].get<int>();
        if (spec.dims[d].sigma <= 0)
            throw ParseError("interval sigma for '" + name + "' must be positive", 1);
        if (spec.dims[d].n_half < 1)
            throw ParseError("interval n for '" + name + "' must be >= 1", 1);
    }
}

}  // namespace

ToolkitConfig parse_config(const std::string& json_text) {
    ToolkitConfig cfg;
    const json j = parse_json(json_text);

    cfg.camera_height = j.value("camera_height", cfg.camera_height);
    cfg.reject_threshold = j.value("reject_threshold", cfg.reject_threshold);
    cfg.forty_point = j.value("forty_point", cfg.forty_point);

    if (j.contains("priors")) {
        PriorTable table;
        for (const auto& [cls, p] : j["priors"].items()) {
            SizePrior prior;
            prior.class_name = cls;
            prior.w_bar = p.at("w").get<double>();
            prior.h_bar = p.at("h").get<double>();
            prior.l_bar = p.at("l").get<double>();
            prior.lambda = p.at("lambda").get<double>();
            if (prior.w_bar <= 0 || prior.h_bar <= 0 || prior.l_bar <= 0)
                throw ParseError("prior sizes for '" + cls + "' must be positive", 1);
            if (prior.lambda < 0 || prior.lambda >= 0.5)
                throw ParseError("lambda for '" + cls + "' must be in [0, 0.5)", 1);
            table.add(prior);
        }
        cfg.priors = table;
    }

    if (j.contains("intervals"))
        read_intervals(j["intervals"], cfg.intervals);

    if (j.contains("difficulty")) {
        const json& d = j["difficulty"];
        const char* names[3] = {"easy", "moderate", "hard"};
        for (int i = 0; i < 3; ++i) {
            if (!d.contains(names[i]))
                continue;
            const json& lvl = d[names[i]];
            cfg.difficulty.min_height[i] = lvl.value("min_height", cfg.difficulty.min_height[i]);
            cfg.difficulty.max_occlusion[i] =
                lvl.value("max_occlusion", cfg.difficulty.max_occlusion[i]);
            cfg.difficulty.max_truncation[i] =
                lvl.value("max_truncation", cfg.difficulty.max_truncation[i]);
        }
    }
    return cfg;
}

ToolkitConfig load_config(const std::string& path) {
    return parse_config(read_text_file(path));
}

std::string config_to_json(const ToolkitConfig& cfg) {
    json j;
    j["camera_height"] = cfg.camera_height;
    j["reject_threshold"] = cfg.reject_threshold;
    j["forty_point"] = cfg.forty_point;
    for (const auto& [cls, p] : cfg.priors.all()) {
        j["priors"][cls] = {{"w", p.w_bar}, {"h", p.h_bar}, {"l", p.l_bar},
                            {"lambda", p.lambda}};
    }
    for (int d = 0; d < kNumDims; ++d) {
        j["intervals"]["sigma"][kDimNames[d]] = cfg.intervals.dims[d].sigma;
        j["intervals"]["n"][kDimNames[d]] = cfg.intervals.dims[d].n_half;
    }
    const char* names[3] = {"easy", "moderate", "hard"};
    for (int i = 0; i < 3; ++i) {
        j["difficulty"][names[i]] = {{"min_height", cfg.difficulty.min_height[i]},
                                     {"max_occlusion", cfg.difficulty.max_occlusion[i]},
                                     {"max_truncation", cfg.difficulty.max_truncation[i]}};
    }
    return j.dump(2) + "\n";
}

SceneSpec parse_scene_spec(const std::string& json_text) {
    const json j = parse_json(json_text);
    SceneSpec spec;
    spec.seed = j.value("seed", spec.seed);
    spec.count = j.value("count", spec.count);
    if (j.contains("depth")) {
        spec.depth_min = j["depth"].at(0).get<double>();
        spec.depth_max = j["depth"].at(1).get<double>();
    }
    if (j.contains("lateral")) {
        spec.lateral_min = j["lateral"].at(0).get<double>();
        spec.lateral_max = j["lateral"].at(1).get<double>();
    }
    if (spec.depth_min <= 0 || spec.depth_max < spec.depth_min)
        throw ParseError("depth range must be positive and non-empty", 1);
    if (spec.lateral_max < spec.lateral_min)
        throw ParseError("lateral range must be non-empty", 1);

    if (j.contains("yaw")) {
        const std::string mode = j["yaw"].value("mode", "uniform");
        if (mode == "fixed") {
            spec.yaw_mode = SceneSpec::YawMode::Fixed;
            spec.yaw_value = j["yaw"].value("value", 0.0);
        } else if (mode == "uniform") {
            spec.yaw_mode = SceneSpec::YawMode::Uniform;
        } else {
            throw ParseError("unknown yaw mode '" + mode + "'", 1);
        }
    }
    if (j.contains("size")) {
        const std::string mode = j["size"].value("mode", "fixed");
        if (mode == "gaussian") {
            spec.size_mode = SceneSpec::SizeMode::Gaussian;
            if (j["size"].contains("std")) {
                spec.size_std_w = j["size"]["std"].at(0).get<double>();
                spec.size_std_h = j["size"]["std"].at(1).get<double>();
                spec.size_std_l = j["size"]["std"].at(2).get<double>();
            }
        } else if (mode != "fixed") {
            throw ParseError("unknown size mode '" + mode + "'", 1);
        }
    }
    spec.camera_height = j.value("camera_height", spec.camera_height);
    if (j.contains("prior")) {
        const json& p = j["prior"];
        spec.prior.class_name = p.value("class", std::string("Car"));
        spec.prior.w_bar = p.value("w", spec.prior.w_bar);
        spec.prior.h_bar = p.value("h", spec.prior.h_bar);
        spec.prior.l_bar = p.value("l", spec.prior.l_bar);
        spec.prior.lambda = p.value("lambda", spec.prior.lambda);
    }
    if (j.contains("camera")) {
        const json& c = j["camera"];
        if (c.contains("P")) {
            Mat34 P;
            for (int i = 0; i < 12; ++i)
                P(i / 4, i % 4) = c["P"].at(i).get<double>();
            spec.camera = CameraModel(P);
        } else {
            spec.camera = CameraModel::from_intrinsics(
                c.value("fx", 721.5377), c.value("fy", 721.5377),
                c.value("cx", 609.5593), c.value("cy", 172.854));
        }
    }
    return spec;
}

SceneSpec load_scene_spec(const std::string& path) {
    return parse_scene_spec(read_text_file(path));
}

int scene_spec_frames(const std::string& json_text) {
    return parse_json(json_text).value("frames", 1);
}

}  // namespace m3d
