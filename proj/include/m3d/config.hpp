#pragma once

#include <string>

#include "m3d/guidance.hpp"
#include "m3d/metrics.hpp"
#include "m3d/refine.hpp"
#include "m3d/synth.hpp"

namespace m3d {

/// All tunable constants of the toolkit, loadable from one JSON file.
/// Every field has the documented default, so a partial (or absent) file
/// works.
struct ToolkitConfig {
    double camera_height = 1.65;
    double reject_threshold = 0.1;
    PriorTable priors = PriorTable::defaults();
    IntervalSpec intervals = IntervalSpec::defaults();
    DifficultyThresholds difficulty{};
    bool forty_point = false;
};

ToolkitConfig parse_config(const std::string& json_text);
ToolkitConfig load_config(const std::string& path);
std::string config_to_json(const ToolkitConfig& cfg);

SceneSpec parse_scene_spec(const std::string& json_text);
SceneSpec load_scene_spec(const std::string& path);
/// Number of frames requested alongside the per-frame spec (default 1).
int scene_spec_frames(const std::string& json_text);

}  // namespace m3d
