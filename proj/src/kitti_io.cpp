#include "m3d/kitti_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace m3d {

namespace {

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char ch : text) {
        if (ch == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    if (!cur.empty())
        lines.push_back(cur);
    return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        if (i > start)
            fields.push_back(line.substr(start, i - start));
    }
    return fields;
}

bool is_blank(const std::string& line) {
    return line.find_first_not_of(" \t") == std::string::npos;
}

// Locale-independent numeric parsing.
double parse_double(const std::string& s, int line, int field) {
    double value = 0;
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw ParseError("invalid number '" + s + "'", line, field);
    return value;
}

int parse_int(const std::string& s, int line, int field) {
    int value = 0;
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw ParseError("invalid integer '" + s + "'", line, field);
    return value;
}

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

bool CalibFile::has(const std::string& key) const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [&](const auto& e) { return e.first == key; });
}

const Mat34& CalibFile::matrix(const std::string& key) const {
    for (const auto& [k, m] : entries_)
        if (k == key)
            return m;
    throw UnknownMatrixKey(key);
}

CalibFile parse_calib(const std::string& text) {
    CalibFile out;
    const auto lines = split_lines(text);
    for (size_t li = 0; li < lines.size(); ++li) {
        const int line_no = static_cast<int>(li) + 1;
        if (is_blank(lines[li]))
            continue;
        auto fields = split_fields(lines[li]);
        if (fields[0].empty() || fields[0].back() != ':')
            throw ParseError("expected 'KEY:' prefix", line_no, 1);
        const std::string key = fields[0].substr(0, fields[0].size() - 1);
        if (fields.size() != 13)
            throw ParseError("matrix '" + key + "' needs 12 numeric fields, got " +
                                 std::to_string(fields.size() - 1),
                             line_no, static_cast<int>(fields.size()));
        Mat34 m;
        for (int i = 0; i < 12; ++i)
            m(i / 4, i % 4) = parse_double(fields[i + 1], line_no, i + 2);
        out.add(key, m);
    }
    return out;
}

std::vector<LabelRecord> parse_labels(const std::string& text) {
    std::vector<LabelRecord> out;
    const auto lines = split_lines(text);
    for (size_t li = 0; li < lines.size(); ++li) {
        const int line_no = static_cast<int>(li) + 1;
        if (is_blank(lines[li]))
            continue;
        const auto f = split_fields(lines[li]);
        if (f.size() != 15 && f.size() != 16)
            throw ParseError("expected 15 or 16 fields, got " + std::to_string(f.size()),
                             line_no, static_cast<int>(f.size()) + 1);
        LabelRecord rec;
        rec.type = f[0];
        rec.truncated = parse_double(f[1], line_no, 2);
        rec.occluded = parse_int(f[2], line_no, 3);
        rec.alpha = parse_double(f[3], line_no, 4);
        rec.left = parse_double(f[4], line_no, 5);
        rec.top = parse_double(f[5], line_no, 6);
        rec.right = parse_double(f[6], line_no, 7);
        rec.bottom = parse_double(f[7], line_no, 8);
        rec.height = parse_double(f[8], line_no, 9);
        rec.width = parse_double(f[9], line_no, 10);
        rec.length = parse_double(f[10], line_no, 11);
        rec.x = parse_double(f[11], line_no, 12);
        rec.y = parse_double(f[12], line_no, 13);
        rec.z = parse_double(f[13], line_no, 14);
        rec.rotation_y = parse_double(f[14], line_no, 15);
        if (f.size() == 16)
            rec.score = parse_double(f[15], line_no, 16);
        if (rec.right <= rec.left)
            throw ParseError("bbox right must exceed left", line_no, 7);
        if (rec.bottom <= rec.top)
            throw ParseError("bbox bottom must exceed top", line_no, 8);
        out.push_back(std::move(rec));
    }
    return out;
}

std::string write_results(const std::vector<LabelRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        out += r.type;
        out += ' ' + fmt6(r.truncated);
        out += ' ' + std::to_string(r.occluded);
        for (double v : {r.alpha, r.left, r.top, r.right, r.bottom, r.height, r.width,
                         r.length, r.x, r.y, r.z, r.rotation_y})
            out += ' ' + fmt6(v);
        if (r.score)
            out += ' ' + fmt6(*r.score);
        out += '\n';
    }
    return out;
}

Box3D to_box3d(const LabelRecord& rec) {
    return Box3D{rec.width, rec.height, rec.length,
                 rec.x, rec.y, rec.z, wrap_angle(rec.rotation_y)};
}

LabelRecord to_label_record(const Box3D& box, const std::string& type, double alpha,
                            const Box2D& box2d, std::optional<double> score) {
    LabelRecord rec;
    rec.type = type;
    rec.alpha = alpha;
    rec.left = box2d.left();
    rec.top = box2d.top();
    rec.right = box2d.right();
    rec.bottom = box2d.bottom();
    rec.height = box.h;
    rec.width = box.w;
    rec.length = box.l;
    rec.x = box.x;
    rec.y = box.y;
    rec.z = box.z;
    rec.rotation_y = box.theta;
    rec.score = score;
    return rec;
}

GroundTruth to_ground_truth(const LabelRecord& rec) {
    GroundTruth gt;
    gt.box3d = to_box3d(rec);
    gt.box2d = Box2D::from_corners(rec.left, rec.top, rec.right, rec.bottom);
    gt.alpha = rec.alpha;
    gt.class_name = rec.type;
    gt.truncation = rec.truncated;
    gt.occlusion = rec.occluded;
    return gt;
}

DetectionResult to_detection_result(const LabelRecord& rec) {
    DetectionResult det;
    det.box3d = to_box3d(rec);
    det.box2d = Box2D::from_corners(rec.left, rec.top, rec.right, rec.bottom);
    det.alpha = rec.alpha;
    det.class_name = rec.type;
    det.score = rec.score.value_or(1.0);
    return det;
}

std::vector<Detection2D> read_detections(const std::string& text) {
    std::vector<Detection2D> out;
    for (const auto& rec : parse_labels(text)) {
        Detection2D det;
        det.box = Box2D::from_corners(rec.left, rec.top, rec.right, rec.bottom);
        det.alpha = rec.alpha;
        det.class_name = rec.type;
        det.score = rec.score.value_or(1.0);
        out.push_back(std::move(det));
    }
    return out;
}

std::vector<std::pair<int, IntervalScores>> read_interval_scores(const std::string& text,
                                                                 const IntervalSpec& spec) {
    std::vector<std::pair<int, IntervalScores>> out;
    const auto lines = split_lines(text);
    const int expected = spec.total_classes();
    for (size_t li = 0; li < lines.size(); ++li) {
        const int line_no = static_cast<int>(li) + 1;
        if (is_blank(lines[li]))
            continue;
        const auto f = split_fields(lines[li]);
        if (static_cast<int>(f.size()) != expected + 1)
            throw ShapeMismatch("score line " + std::to_string(line_no) + " has " +
                                std::to_string(f.size() - 1) + " confidences, expected " +
                                std::to_string(expected));
        IntervalScores scores;
        int pos = 1;
        for (int d = 0; d < kNumDims; ++d) {
            const int n = spec.num_classes(static_cast<Dim>(d));
            scores.p[d].resize(n);
            for (int c = 0; c < n; ++c) {
                scores.p[d][c] = parse_double(f[pos], line_no, pos + 1);
                ++pos;
            }
        }
        out.emplace_back(parse_int(f[0], line_no, 1), std::move(scores));
    }
    return out;
}

std::string write_interval_scores(const std::vector<std::pair<int, IntervalScores>>& rows,
                                  const IntervalSpec& spec) {
    std::string out;
    for (const auto& [id, scores] : rows) {
        out += std::to_string(id);
        for (int d = 0; d < kNumDims; ++d) {
            const int n = spec.num_classes(static_cast<Dim>(d));
            if (static_cast<int>(scores.p[d].size()) != n)
                throw ShapeMismatch("score vector length mismatch on write");
            for (int c = 0; c < n; ++c)
                out += ' ' + fmt6(scores.p[d][c]);
        }
        out += '\n';
    }
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path p(path);
    if (p.has_parent_path())
        fs::create_directories(p.parent_path());
    // Write to a temp file first so readers never see a partial file.
    const fs::path tmp = p.parent_path() / (p.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error("cannot write file: " + path);
        out << content;
    }
    fs::rename(tmp, p);
}

std::vector<std::string> list_frame_ids(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir))
        throw Error("not a directory: " + dir);
    std::vector<std::string> ids;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt")
            ids.push_back(entry.path().stem().string());
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

}  // namespace m3d
