#pragma once

#include <vector>

#include "rf/camera.hpp"
#include "rf/image.hpp"

namespace rf {

constexpr float kInvalidDepth = -1.f;  // consumers test depth > 0

struct ViewBuildOptions {
  bool bilateral = false;
  int levels = 3;
};

struct ViewLevel {
  Image<float> depth;      // metres, invalid < 0
  Image<float> intensity;  // [0,1], empty when no rgb
  Intrinsics intr;
};

/// One calibrated RGB-D frame plus everything derived from it.
struct View {
  RgbdCalib calib;
  Image<std::uint16_t> depth_raw;
  Image<float> depth_m;                 // level-0 depth (after optional filtering)
  Image<Rgb8> rgb;                      // empty when the stream has no colour
  Image<float> intensity;               // empty when no colour
  Image<Eigen::Vector4f> normals;       // camera-frame unit normals, w < 0 invalid
  std::vector<ViewLevel> pyramid;       // [0] is full resolution

  bool hasColour() const { return !rgb.empty(); }
};

/// Converts raw depth, optionally smooths it, and builds the pyramids.
/// Throws std::invalid_argument on a dimension mismatch with the calibration.
View build_view(const Image<std::uint16_t>& rawDepth, const Image<Rgb8>& rgb, const RgbdCalib& calib,
                const ViewBuildOptions& opts = {});

/// Per-pixel normals from central differences of backprojected points.
/// Invalid wherever any of the four neighbours is invalid.
Image<Eigen::Vector4f> compute_normals(const Image<float>& depthM, const Intrinsics& intr);

/// Edge-preserving 5x5 bilateral filter; identity on constant images.
/// rangeSigma is in metres.
Image<float> bilateral_filter(const Image<float>& depthM, float spatialSigma, float rangeSigma);

/// 2x2 half-resolution depth; invalid pixels are excluded from the average.
Image<float> downsample_depth(const Image<float>& depthM);

/// Plain 2x2 box downsample (intensity images).
Image<float> downsample_intensity(const Image<float>& img);

Image<float> rgb_to_intensity(const Image<Rgb8>& rgb);

}  // namespace rf
