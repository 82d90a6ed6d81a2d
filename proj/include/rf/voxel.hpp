#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "rf/image.hpp"

namespace rf {

constexpr int kBlockSize = 8;  // voxels per block edge
constexpr int kBlockSize3 = kBlockSize * kBlockSize * kBlockSize;

constexpr std::int16_t kSdfStoredOne = 32767;

inline float sdfToLogical(std::int16_t stored) { return stored / float(kSdfStoredOne); }

inline std::int16_t sdfFromLogical(float logical) {
  const float c = std::clamp(logical, -1.f, 1.f);
  return static_cast<std::int16_t>(std::lround(c * kSdfStoredOne));
}

/// 16-bit TSDF voxel with colour (the default, fully wired variant).
struct VoxelSRgb {
  std::int16_t sdf = kSdfStoredOne;  // stored; logical range [-1, 1]
  std::uint8_t w_depth = 0;
  Rgb8 clr{0, 0, 0};
  std::uint8_t w_color = 0;

  static constexpr bool hasColour = true;

  float logicalSdf() const { return sdfToLogical(sdf); }
  void setLogicalSdf(float f) { sdf = sdfFromLogical(f); }
};

/// Float-sdf variant without colour; selectable via RF_VOXEL_FLOAT.
/// Only the s_rgb variant is wired through the full pipeline and tests.
struct VoxelF {
  float sdf = 1.f;
  std::uint8_t w_depth = 0;

  static constexpr bool hasColour = false;

  float logicalSdf() const { return sdf; }
  void setLogicalSdf(float f) { sdf = std::clamp(f, -1.f, 1.f); }
};

#ifdef RF_VOXEL_FLOAT
using Voxel = VoxelF;
#else
using Voxel = VoxelSRgb;
#endif

}  // namespace rf
