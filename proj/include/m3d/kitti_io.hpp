#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "m3d/guidance.hpp"
#include "m3d/metrics.hpp"
#include "m3d/refine.hpp"

namespace m3d {

/// Parsed calibration file: named 3x4 matrices in original line order.
class CalibFile {
public:
    void add(const std::string& key, const Mat34& m) { entries_.emplace_back(key, m); }
    bool has(const std::string& key) const;
    /// Throws UnknownMatrixKey when absent.
    const Mat34& matrix(const std::string& key) const;
    const std::vector<std::pair<std::string, Mat34>>& entries() const { return entries_; }

private:
    std::vector<std::pair<std::string, Mat34>> entries_;
};

/// One object annotation line. Field order and units follow the dataset
/// convention: dimensions stored as (height, width, length), location is
/// the bottom center, rotation_y the yaw.
struct LabelRecord {
    std::string type;
    double truncated = 0;
    int occluded = 0;
    double alpha = 0;
    double left = 0, top = 0, right = 0, bottom = 0;
    double height = 0, width = 0, length = 0;
    double x = 0, y = 0, z = 0;
    double rotation_y = 0;
    std::optional<double> score;
};

/// Strict parser: every line must be "KEY: v0 ... v11". Raises ParseError
/// with 1-based line/field location; blank lines are allowed.
CalibFile parse_calib(const std::string& text);

/// Strict label parser: 15 or 16 whitespace-separated fields per line.
std::vector<LabelRecord> parse_labels(const std::string& text);

/// Fixed-format writer, 6 decimals on every numeric field.
std::string write_results(const std::vector<LabelRecord>& records);

/// Dataset (h, w, l) order maps onto the toolkit's (w, h, l). This is the
/// single place where the swap happens.
Box3D to_box3d(const LabelRecord& rec);
LabelRecord to_label_record(const Box3D& box, const std::string& type, double alpha,
                            const Box2D& box2d, std::optional<double> score = std::nullopt);

GroundTruth to_ground_truth(const LabelRecord& rec);
DetectionResult to_detection_result(const LabelRecord& rec);

/// Detections use the label format with a mandatory score field.
std::vector<Detection2D> read_detections(const std::string& text);

/// One line per guidance: integer guidance id followed by the interval
/// confidences in the fixed (dimension, class) order of the spec. Throws
/// ShapeMismatch when the count disagrees with the spec.
std::vector<std::pair<int, IntervalScores>> read_interval_scores(const std::string& text,
                                                                 const IntervalSpec& spec);
std::string write_interval_scores(const std::vector<std::pair<int, IntervalScores>>& rows,
                                  const IntervalSpec& spec);

// Small filesystem helpers shared by the CLI and the test fixtures.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
/// Sorted stems of all "*.txt" files in a directory.
std::vector<std::string> list_frame_ids(const std::string& dir);

}  // namespace m3d
