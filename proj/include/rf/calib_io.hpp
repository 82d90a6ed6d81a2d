#pragma once

#include <string>

#include "rf/camera.hpp"

namespace rf {

/// Parses the whitespace-separated calibration layout:
///   rgb:   width height / fx fy / cx cy
///   depth: width height / fx fy / cx cy
///   3x4 extrinsic matrix mapping depth coords into RGB coords (row major)
///   depth affine pair: scale offset
/// Throws std::runtime_error naming the missing/offending section and line.
RgbdCalib parse_calibration(const std::string& text);

RgbdCalib load_calibration(const std::string& path);

/// Exact inverse of parse_calibration: parse(render(c)) == c bitwise.
std::string render_calibration(const RgbdCalib& calib);

void save_calibration(const RgbdCalib& calib, const std::string& path);

}  // namespace rf
