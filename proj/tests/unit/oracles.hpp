#pragma once

// Test-only oracles, independent of the implementation paths they check:
// brute-force voxelisation, dense ray marching, reference associative maps,
// and analytic TSDF construction from exact signed distances.

#include <Eigen/Core>

#include <cmath>
#include <set>
#include <tuple>
#include <vector>

#include "doctest.h"

#include "rf/fusion.hpp"
#include "rf/synth.hpp"
#include "rf/voxel_block_map.hpp"

namespace rf::test {

using BlockSet = std::set<std::tuple<int, int, int>>;

inline std::tuple<int, int, int> key(const Eigen::Vector3i& v) { return {v.x(), v.y(), v.z()}; }

/// Brute-force segment voxelisation: dense sampling at a small fraction of
/// the cell size. Independent of the DDA used by the allocator.
inline BlockSet bruteForceSegmentBlocks(const Eigen::Vector3f& a, const Eigen::Vector3f& b, float step = 1.f / 64.f) {
  BlockSet blocks;
  const float len = (b - a).norm();
  const int n = std::max(2, static_cast<int>(std::ceil(len / step)) + 1);
  for (int i = 0; i < n; ++i) {
    const float t = float(i) / (n - 1);
    const Eigen::Vector3f p = a + t * (b - a);
    blocks.insert(key({static_cast<int>(std::floor(p.x())), static_cast<int>(std::floor(p.y())),
                       static_cast<int>(std::floor(p.z()))}));
  }
  return blocks;
}

/// Fills the map with the exact truncated signed distance of an analytic
/// scene: blocks near the band are allocated and every voxel in them gets
/// sdf = clamp(d/mu, -1, 1) with weight 1.
inline void buildAnalyticTsdf(VoxelBlockMap& map, const SyntheticScene& scene, const Eigen::Vector3f& loM,
                              const Eigen::Vector3f& hiM, float voxelSize, float mu) {
  const float bs = voxelSize * kBlockSize;
  const Eigen::Vector3i lo(static_cast<int>(std::floor(loM.x() / bs)), static_cast<int>(std::floor(loM.y() / bs)),
                           static_cast<int>(std::floor(loM.z() / bs)));
  const Eigen::Vector3i hi(static_cast<int>(std::ceil(hiM.x() / bs)), static_cast<int>(std::ceil(hiM.y() / bs)),
                           static_cast<int>(std::ceil(hiM.z() / bs)));
  const float blockRadius = 0.5f * bs * std::sqrt(3.f);
  for (int z = lo.z(); z <= hi.z(); ++z) {
    for (int y = lo.y(); y <= hi.y(); ++y) {
      for (int x = lo.x(); x <= hi.x(); ++x) {
        const Eigen::Vector3i blockPos(x, y, z);
        const Eigen::Vector3f centre = (blockPos.cast<float>() + Eigen::Vector3f::Constant(0.5f)) * bs;
        if (std::abs(scene.signedDistance(centre)) > mu + blockRadius) continue;
        const auto entry = map.allocateBlock(blockPos);
        REQUIRE(entry.has_value());
        Voxel* block = map.blockData(map.entry(*entry).ptr);
        for (int lz = 0; lz < kBlockSize; ++lz)
          for (int ly = 0; ly < kBlockSize; ++ly)
            for (int lx = 0; lx < kBlockSize; ++lx) {
              const Eigen::Vector3f p =
                  (blockPos * kBlockSize + Eigen::Vector3i(lx, ly, lz)).cast<float>() * voxelSize;
              Voxel& v = block[lx + ly * kBlockSize + lz * kBlockSize * kBlockSize];
              v.setLogicalSdf(std::clamp(scene.signedDistance(p) / mu, -1.f, 1.f));
              v.w_depth = 1;
            }
      }
    }
  }
}

/// Dense uniform ray march at quarter-voxel steps; hit = first trilinear
/// sign change with a valid read. The conservative-stepping oracle.
inline std::optional<float> denseMarchHit(const VoxelBlockMap& map, const Eigen::Vector3f& originM,
                                          const Eigen::Vector3f& dirUnit, float tMinM, float tMaxM,
                                          float voxelSize) {
  const float step = 0.25f * voxelSize;
  BlockCache cache;
  float prevSdf = 0.f;
  bool havePrev = false;
  float prevT = 0.f;
  for (float t = tMinM; t <= tMaxM; t += step) {
    const Eigen::Vector3f p = (originM + t * dirUnit) / voxelSize;
    bool ok = false;
    const float sdf = map.readSdfTrilinear(p, ok);
    if (!ok) {
      havePrev = false;
      continue;
    }
    if (havePrev && prevSdf > 0.f && sdf <= 0.f) {
      // linear interpolation of the crossing
      const float alpha = prevSdf / (prevSdf - sdf);
      return prevT + alpha * (t - prevT);
    }
    prevSdf = sdf;
    prevT = t;
    havePrev = true;
  }
  return std::nullopt;
}

/// Compares sdf and weight of every voxel in a block range (colour ignored).
inline bool sameVoxelContents(const VoxelBlockMap& a, const VoxelBlockMap& b, const Eigen::Vector3i& loBlock,
                              const Eigen::Vector3i& hiBlock) {
  for (int z = loBlock.z(); z <= hiBlock.z(); ++z)
    for (int y = loBlock.y(); y <= hiBlock.y(); ++y)
      for (int x = loBlock.x(); x <= hiBlock.x(); ++x)
        for (int v = 0; v < kBlockSize3; ++v) {
          const Eigen::Vector3i voxel = Eigen::Vector3i(x, y, z) * kBlockSize +
                                        Eigen::Vector3i(v % kBlockSize, (v / kBlockSize) % kBlockSize,
                                                        v / (kBlockSize * kBlockSize));
          bool fa = false, fb = false;
          const Voxel va = a.findVoxel(voxel, fa);
          const Voxel vb = b.findVoxel(voxel, fb);
          if (fa != fb) return false;
          if (!fa) continue;
          if (va.sdf != vb.sdf || va.w_depth != vb.w_depth) return false;
        }
  return true;
}

}  // namespace rf::test
