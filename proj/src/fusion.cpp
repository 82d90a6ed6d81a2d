#include "rf/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace rf {

float update_voxel_depth(Voxel& voxel, const Eigen::Vector3f& ptModel, const Pose& M_d, const Intrinsics& proj,
                         float mu, int maxW, const Image<float>& depth, bool stopAtMaxW) {
  const Eigen::Vector3f ptCamera = M_d.apply(ptModel);
  if (ptCamera.z() <= 0.f) return -1.f;

  const float px = proj.fx * ptCamera.x() / ptCamera.z() + proj.cx;
  const float py = proj.fy * ptCamera.y() / ptCamera.z() + proj.cy;
  if (px < 1 || px > depth.width() - 2 || py < 1 || py > depth.height() - 2) return -1.f;

  const float depthMeasure = depth(static_cast<int>(px + 0.5f), static_cast<int>(py + 0.5f));
  if (depthMeasure <= 0.f) return -1.f;

  const float eta = depthMeasure - ptCamera.z();
  if (eta < -mu) return eta;

  const float oldF = voxel.logicalSdf();
  const int oldW = voxel.w_depth;
  if (stopAtMaxW && oldW >= maxW) return eta;

  const float newF = std::min(1.f, eta / mu);
  int newW = 1;
  const float merged = (oldW * oldF + newW * newF) / (oldW + newW);
  newW = std::min(oldW + newW, maxW);

  voxel.setLogicalSdf(merged);
  voxel.w_depth = static_cast<std::uint8_t>(newW);
  return eta;
}

void update_voxel_colour(Voxel& voxel, const Eigen::Vector3f& ptModel, const Pose& M_rgb, const Intrinsics& proj,
                         int maxW, const Image<Rgb8>& rgb) {
  if constexpr (!Voxel::hasColour) {
    (void)voxel;
    (void)ptModel;
    (void)M_rgb;
    (void)proj;
    (void)maxW;
    (void)rgb;
  } else {
    const Eigen::Vector3f ptCamera = M_rgb.apply(ptModel);
    if (ptCamera.z() <= 0.f) return;
    const float px = proj.fx * ptCamera.x() / ptCamera.z() + proj.cx;
    const float py = proj.fy * ptCamera.y() / ptCamera.z() + proj.cy;
    if (px < 1 || px > rgb.width() - 2 || py < 1 || py > rgb.height() - 2) return;

    // bilinear sample of the colour image
    const int x0 = static_cast<int>(std::floor(px)), y0 = static_cast<int>(std::floor(py));
    const float fx = px - x0, fy = py - y0;
    Eigen::Vector3f sample = Eigen::Vector3f::Zero();
    const float w00 = (1 - fx) * (1 - fy), w10 = fx * (1 - fy), w01 = (1 - fx) * fy, w11 = fx * fy;
    const Rgb8 &c00 = rgb(x0, y0), &c10 = rgb(x0 + 1, y0), &c01 = rgb(x0, y0 + 1), &c11 = rgb(x0 + 1, y0 + 1);
    for (int k = 0; k < 3; ++k)
      sample[k] = w00 * c00[k] + w10 * c10[k] + w01 * c01[k] + w11 * c11[k];

    const int oldW = voxel.w_color;
    const Eigen::Vector3f oldC(voxel.clr[0], voxel.clr[1], voxel.clr[2]);
    const Eigen::Vector3f merged = (oldW * oldC + sample) / (oldW + 1);
    for (int k = 0; k < 3; ++k)
      voxel.clr[k] = static_cast<std::uint8_t>(std::clamp(std::lround(merged[k]), 0L, 255L));
    voxel.w_color = static_cast<std::uint8_t>(std::min(oldW + 1, maxW));
  }
}

void traverse_blocks(const Eigen::Vector3f& a, const Eigen::Vector3f& b,
                     const std::function<void(const Eigen::Vector3i&)>& visit) {
  Eigen::Vector3i cell(static_cast<int>(std::floor(a.x())), static_cast<int>(std::floor(a.y())),
                       static_cast<int>(std::floor(a.z())));
  const Eigen::Vector3i endCell(static_cast<int>(std::floor(b.x())), static_cast<int>(std::floor(b.y())),
                                static_cast<int>(std::floor(b.z())));
  visit(cell);
  if (cell == endCell) return;

  const Eigen::Vector3f d = b - a;
  Eigen::Vector3i step;
  Eigen::Vector3f tMax, tDelta;
  for (int k = 0; k < 3; ++k) {
    if (d[k] > 0.f) {
      step[k] = 1;
      tMax[k] = (cell[k] + 1 - a[k]) / d[k];
      tDelta[k] = 1.f / d[k];
    } else if (d[k] < 0.f) {
      step[k] = -1;
      tMax[k] = (cell[k] - a[k]) / d[k];
      tDelta[k] = -1.f / d[k];
    } else {
      step[k] = 0;
      tMax[k] = std::numeric_limits<float>::max();
      tDelta[k] = std::numeric_limits<float>::max();
    }
  }

  // bounded walk; the +8 tolerates endpoints exactly on cell boundaries
  const int maxSteps = (endCell - cell).cwiseAbs().sum() + 8;
  for (int i = 0; i < maxSteps; ++i) {
    int axis = 0;
    if (tMax.y() < tMax.x()) axis = 1;
    if (tMax.z() < tMax[axis]) axis = 2;
    if (tMax[axis] > 1.f) break;  // segment exhausted
    cell[axis] += step[axis];
    tMax[axis] += tDelta[axis];
    visit(cell);
    if (cell == endCell) break;
  }
  // endpoint guaranteed even under accumulated rounding
  if (cell != endCell) visit(endCell);
}

bool block_in_frustum(const Eigen::Vector3i& blockPos, const Pose& pose, const Intrinsics& intr,
                      const SceneParams& params, float marginPx) {
  const float bs = params.blockSizeMetres();
  for (int c = 0; c < 8; ++c) {
    const Eigen::Vector3f corner =
        (blockPos.cast<float>() + Eigen::Vector3f(c & 1, (c >> 1) & 1, (c >> 2) & 1)) * bs;
    const Eigen::Vector3f pc = pose.apply(corner);
    if (pc.z() < params.viewFrustum_min || pc.z() > params.viewFrustum_max) continue;
    const Eigen::Vector2f px = intr.project(pc);
    if (px.x() >= -marginPx && px.y() >= -marginPx && px.x() <= intr.width - 1 + marginPx &&
        px.y() <= intr.height - 1 + marginPx)
      return true;
  }
  return false;
}

void FusionEngine::ensureScratch(const VoxelBlockMap& map) {
  const std::size_t n = map.totalEntries();
  if (allocType_.size() != n) {
    allocType_.assign(n, 0);
    blockCoords_.assign(n, Eigen::Vector3i::Zero());
    marked_.assign(n, 0);
  } else {
    std::fill(allocType_.begin(), allocType_.end(), 0);
    std::fill(marked_.begin(), marked_.end(), 0);
  }
}

AllocationStats FusionEngine::allocate_from_depth(VoxelBlockMap& map, const View& view, const Pose& pose,
                                                  const SceneParams& params, const Options& opts) {
  AllocationStats stats;
  ensureScratch(map);

  const Image<float>& depth = view.depth_m;
  const Intrinsics& intr = view.calib.intrinsics_d;
  const Pose camToWorld = pose.inverse();
  const float invBlock = 1.f / params.blockSizeMetres();

  // Stage 1: mark the blocks stabbed by each valid pixel's d+-mu segment.
  auto markBlock = [&](const Eigen::Vector3i& blockPos) {
    int idx = static_cast<int>(hash_index(blockPos, map.hashMask()));
    const HashEntry* e = &map.entry(idx);
    if (e->allocated()) {
      while (true) {
        if (e->pos == blockPos) {
          marked_[idx] = e->inMemory() ? std::uint8_t(Visibility::kVisible) : std::uint8_t(Visibility::kVisibleSwapped);
          return;
        }
        if (e->offset < 1) break;
        idx = static_cast<int>(map.bucketCount()) + e->offset - 1;
        e = &map.entry(idx);
      }
      // chain tail: request an excess allocation linked from entry idx.
      // Intra-frame collisions overwrite each other; the loser is dropped
      // this frame and re-requested next frame.
      allocType_[idx] = 2;
      blockCoords_[idx] = blockPos;
    } else {
      allocType_[idx] = 1;
      blockCoords_[idx] = blockPos;
    }
  };

  for (int y = 0; y < depth.height(); ++y) {
    for (int x = 0; x < depth.width(); ++x) {
      const float d = depth(x, y);
      if (d <= 0.f || d < params.viewFrustum_min || d > params.viewFrustum_max) continue;
      const Eigen::Vector3f nearPt = camToWorld.apply(intr.backproject(float(x), float(y), d - params.mu));
      const Eigen::Vector3f farPt = camToWorld.apply(intr.backproject(float(x), float(y), d + params.mu));
      traverse_blocks(nearPt * invBlock, farPt * invBlock, markBlock);
    }
  }

  // Stage 2: perform the reservations recorded in the scratch arrays.
  const int total = static_cast<int>(map.totalEntries());
  for (int idx = 0; idx < total; ++idx) {
    if (allocType_[idx] == 0) continue;
    ++stats.requested;
    const auto entryIdx = map.allocateBlock(blockCoords_[idx]);
    if (!entryIdx) {
      ++stats.allocFailures;  // exhausted; the pixel re-requests next frame
      continue;
    }
    ++stats.allocated;
    marked_[*entryIdx] = std::uint8_t(Visibility::kVisible);
  }

  // Stage 3: visible list = frustum-tested union of this frame's marks and
  // the previously visible entries.
  std::vector<int> candidates;
  candidates.reserve(map.visibleList().size() + 256);
  for (int idx = 0; idx < total; ++idx)
    if (marked_[idx]) candidates.push_back(idx);
  for (int idx : map.visibleList())
    if (!marked_[idx]) candidates.push_back(idx);

  auto& visibility = map.visibilityTypes();
  std::fill(visibility.begin(), visibility.end(), std::uint8_t(Visibility::kInvisible));
  std::vector<int> visible;
  visible.reserve(candidates.size());

  for (int idx : candidates) {
    const HashEntry& e = map.entry(idx);
    if (!e.allocated()) continue;
    std::uint8_t type = 0;
    if (block_in_frustum(e.pos, pose, intr, params)) {
      type = e.inMemory() ? std::uint8_t(Visibility::kVisible) : std::uint8_t(Visibility::kVisibleSwapped);
    } else if (opts.swappingEnabled && block_in_frustum(e.pos, pose, intr, params, opts.swapMarginPx)) {
      type = std::uint8_t(Visibility::kBoundary);
    }
    if (type != 0) {
      visibility[idx] = type;
      visible.push_back(idx);
    }
  }
  std::sort(visible.begin(), visible.end());
  map.visibleList() = std::move(visible);
  stats.visibleCount = static_cast<int>(map.visibleList().size());
  return stats;
}

void FusionEngine::integrate_frame(VoxelBlockMap& map, const View& view, const Pose& pose,
                                   const SceneParams& params) {
  const Intrinsics& intrD = view.calib.intrinsics_d;
  const Intrinsics& intrRgb = view.calib.intrinsics_rgb;
  const Pose M_rgb = view.calib.extrinsics_d_to_rgb * pose;
  const bool useColour = Voxel::hasColour && view.hasColour();

  for (int idx : map.visibleList()) {
    const HashEntry& e = map.entry(idx);
    if (!e.inMemory()) continue;
    Voxel* block = map.blockData(e.ptr);
    const Eigen::Vector3i origin = e.pos * kBlockSize;
    for (int z = 0; z < kBlockSize; ++z) {
      for (int y = 0; y < kBlockSize; ++y) {
        for (int x = 0; x < kBlockSize; ++x) {
          Voxel& v = block[x + y * kBlockSize + z * kBlockSize * kBlockSize];
          const Eigen::Vector3f ptModel =
              (origin + Eigen::Vector3i(x, y, z)).cast<float>() * params.voxelSize;
          const float eta = update_voxel_depth(v, ptModel, pose, intrD, params.mu, params.maxW, view.depth_m,
                                               params.stopIntegratingAtMaxW);
          if (useColour && eta >= -params.mu)
            update_voxel_colour(v, ptModel, M_rgb, intrRgb, params.maxW, view.rgb);
        }
      }
    }
  }
}

}  // namespace rf
