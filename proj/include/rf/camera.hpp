#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>

#include "rf/pose.hpp"

namespace rf {

/// Pinhole camera model, pixel units.
struct Intrinsics {
  int width = 0;
  int height = 0;
  float fx = 0, fy = 0;
  float cx = 0, cy = 0;

  Eigen::Vector2f project(const Eigen::Vector3f& pCam) const {
    return {fx * pCam.x() / pCam.z() + cx, fy * pCam.y() / pCam.z() + cy};
  }

  Eigen::Vector3f backproject(float u, float v, float z) const {
    return {(u - cx) / fx * z, (v - cy) / fy * z, z};
  }

  /// Unit-z ray direction through pixel centre (u, v), camera frame.
  Eigen::Vector3f rayDir(float u, float v) const { return {(u - cx) / fx, (v - cy) / fy, 1.f}; }

  bool inImage(const Eigen::Vector2f& px, float border = 0.f) const {
    return px.x() >= border && px.y() >= border && px.x() <= width - 1 - border && px.y() <= height - 1 - border;
  }

  /// Pyramid level L: dimensions floor(dims / 2^L), focal and principal
  /// point scaled by 2^-L.
  Intrinsics atLevel(int level) const {
    Intrinsics out = *this;
    const float s = std::ldexp(1.f, -level);
    out.width = width >> level;
    out.height = height >> level;
    out.fx = fx * s;
    out.fy = fy * s;
    out.cx = cx * s;
    out.cy = cy * s;
    return out;
  }
};

/// Affine map from raw 16-bit sensor units to metres: m = raw*scale + offset.
struct DepthAffine {
  float scale = 1.f / 1000.f;
  float offset = 0.f;

  float toMetres(std::uint16_t raw) const { return raw * scale + offset; }

  std::uint16_t toRaw(float metres) const {
    const float r = std::round((metres - offset) / scale);
    if (!(r > 0.f)) return 0;
    if (r > 65535.f) return 65535;
    return static_cast<std::uint16_t>(r);
  }
};

struct RgbdCalib {
  Intrinsics intrinsics_rgb;
  Intrinsics intrinsics_d;
  Pose extrinsics_d_to_rgb;  // depth-camera coords -> RGB-camera coords
  DepthAffine depth_affine;
};

}  // namespace rf
