#pragma once

#include <stdexcept>
#include <string>

namespace m3d {

/// Base class for every error the toolkit raises on its own.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PointBehindCamera : Error {
    PointBehindCamera() : Error("point is behind the camera") {}
    explicit PointBehindCamera(const std::string& msg) : Error(msg) {}
};

struct InvalidDepth : Error {
    InvalidDepth() : Error("depth must be positive") {}
    explicit InvalidDepth(const std::string& msg) : Error(msg) {}
};

struct SingularIntrinsics : Error {
    SingularIntrinsics() : Error("intrinsic matrix is singular") {}
    explicit SingularIntrinsics(const std::string& msg) : Error(msg) {}
};

struct DegenerateHeight : Error {
    DegenerateHeight() : Error("normalized box height is degenerate") {}
    explicit DegenerateHeight(const std::string& msg) : Error(msg) {}
};

struct UnknownClass : Error {
    explicit UnknownClass(const std::string& cls)
        : Error("no size prior for class '" + cls + "'") {}
};

struct DegenerateQuad : Error {
    DegenerateQuad() : Error("quadrilateral is degenerate") {}
    explicit DegenerateQuad(const std::string& msg) : Error(msg) {}
};

struct OutOfRange : Error {
    explicit OutOfRange(const std::string& msg) : Error(msg) {}
};

struct ShapeMismatch : Error {
    explicit ShapeMismatch(const std::string& msg) : Error(msg) {}
};

/// Parse failure with 1-based line and field location.
struct ParseError : Error {
    int line;
    int field;
    ParseError(const std::string& msg, int line_, int field_ = 0)
        : Error(msg + " (line " + std::to_string(line_) +
                (field_ > 0 ? ", field " + std::to_string(field_) : "") + ")"),
          line(line_), field(field_) {}
};

struct UnknownMatrixKey : Error {
    explicit UnknownMatrixKey(const std::string& key)
        : Error("calibration matrix '" + key + "' not present") {}
};

}  // namespace m3d
