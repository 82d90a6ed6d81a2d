#pragma once

#include <functional>
#include <vector>

#include "rf/view.hpp"
#include "rf/voxel_block_map.hpp"

namespace rf {

struct SceneParams {
  float voxelSize = 0.005f;  // metres
  float mu = 0.02f;          // truncation band half-width, metres
  int maxW = 100;
  float viewFrustum_min = 0.2f;
  float viewFrustum_max = 6.f;
  bool stopIntegratingAtMaxW = false;

  float blockSizeMetres() const { return voxelSize * kBlockSize; }
};

struct AllocationStats {
  int requested = 0;      // blocks marked by the depth pass
  int allocated = 0;      // new blocks reserved this frame
  int allocFailures = 0;  // reservation failures (VBA / excess exhausted)
  int visibleCount = 0;
};

/// Exact semantics of the per-voxel depth update: projects the voxel centre
/// into the depth image, returns -1 behind the camera / outside the margin /
/// on invalid depth, returns eta untouched when the voxel is more than mu
/// behind the surface, otherwise folds min(1, eta/mu) into the running
/// weighted average (weight clamped to maxW).
float update_voxel_depth(Voxel& voxel, const Eigen::Vector3f& ptModel, const Pose& M_d, const Intrinsics& proj,
                         float mu, int maxW, const Image<float>& depth, bool stopAtMaxW = false);

/// Colour running average, gated the same way as the depth update.
void update_voxel_colour(Voxel& voxel, const Eigen::Vector3f& ptModel, const Pose& M_rgb, const Intrinsics& proj,
                         int maxW, const Image<Rgb8>& rgb);

/// Visits exactly the blocks stabbed by the segment [a, b] (block units):
/// Amanatides-Woo traversal, both endpoints included.
void traverse_blocks(const Eigen::Vector3f& a, const Eigen::Vector3f& b,
                     const std::function<void(const Eigen::Vector3i&)>& visit);

bool block_in_frustum(const Eigen::Vector3i& blockPos, const Pose& pose, const Intrinsics& intr,
                      const SceneParams& params, float marginPx = 0.f);

/// Per-frame allocation and TSDF integration. Holds the per-entry scratch
/// arrays ("allocation and visibility arrays" of the same size as the hash
/// table), so reuse one engine per map.
class FusionEngine {
 public:
  struct Options {
    bool swappingEnabled = false;
    float swapMarginPx = 8.f;  // boundary band for swap-in marking
  };

  /// Stage 1: mark blocks stabbed by each pixel's d+-mu segment.
  /// Stage 2: reserve marked blocks (intra-frame bucket collisions keep one).
  /// Stage 3: rebuild the visible list from this frame's marks plus the
  /// previously visible entries, frustum-tested.
  AllocationStats allocate_from_depth(VoxelBlockMap& map, const View& view, const Pose& pose,
                                      const SceneParams& params, const Options& opts);
  AllocationStats allocate_from_depth(VoxelBlockMap& map, const View& view, const Pose& pose,
                                      const SceneParams& params) {
    return allocate_from_depth(map, view, pose, params, Options{});
  }

  /// Applies the voxel update to all voxels of every visible resident block.
  void integrate_frame(VoxelBlockMap& map, const View& view, const Pose& pose, const SceneParams& params);

 private:
  void ensureScratch(const VoxelBlockMap& map);

  std::vector<std::uint8_t> allocType_;        // 0 none, 1 bucket, 2 excess
  std::vector<Eigen::Vector3i> blockCoords_;
  std::vector<std::uint8_t> marked_;           // visibility marks from stages 1-2
};

}  // namespace rf
