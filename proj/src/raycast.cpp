#include "rf/raycast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rf {

void RenderState::resize(const Intrinsics& intrinsics) {
  if (points.width() == intrinsics.width && points.height() == intrinsics.height) return;
  const Eigen::Vector4f invalid(0, 0, 0, -1);
  expectedRange = Image<Eigen::Vector2f>(intrinsics.width, intrinsics.height,
                                         Eigen::Vector2f(std::numeric_limits<float>::max(), -1.f));
  raycastResult = Image<Eigen::Vector4f>(intrinsics.width, intrinsics.height, invalid);
  points = Image<Eigen::Vector4f>(intrinsics.width, intrinsics.height, invalid);
  normals = Image<Eigen::Vector4f>(intrinsics.width, intrinsics.height, invalid);
  colour = Image<Rgb8>(intrinsics.width, intrinsics.height, Rgb8{0, 0, 0});
  hasRaycast = false;
}

std::optional<Eigen::Vector3f> cast_ray(const VoxelBlockMap& map, const Eigen::Vector3f& originM,
                                        const Eigen::Vector3f& dirUnit, const Eigen::Vector2f& rangeM, float mu,
                                        float voxelSize) {
  MapField field(map);
  return cast_ray_field(field, originM, dirUnit, rangeM.x(), rangeM.y(), mu, voxelSize);
}

namespace {

constexpr int kFragmentSize = 16;

struct BlockBounds {
  int x0, y0, x1, y1;  // inclusive pixel rect
  float zMin, zMax;
  bool valid = false;
};

BlockBounds projectBlock(const Eigen::Vector3i& blockPos, const Pose& pose, const Intrinsics& intr,
                         const SceneParams& params) {
  BlockBounds b;
  const float bs = params.blockSizeMetres();
  float x0 = std::numeric_limits<float>::max(), y0 = x0;
  float x1 = -x0, y1 = -x0;
  float zMin = std::numeric_limits<float>::max(), zMax = 0.f;
  int valid = 0;
  for (int c = 0; c < 8; ++c) {
    const Eigen::Vector3f corner =
        (blockPos.cast<float>() + Eigen::Vector3f(c & 1, (c >> 1) & 1, (c >> 2) & 1)) * bs;
    const Eigen::Vector3f pc = pose.apply(corner);
    if (pc.z() < 1e-6f) continue;
    const Eigen::Vector2f px = intr.project(pc);
    x0 = std::min(x0, px.x());
    y0 = std::min(y0, px.y());
    x1 = std::max(x1, px.x());
    y1 = std::max(y1, px.y());
    zMin = std::min(zMin, pc.z());
    zMax = std::max(zMax, pc.z());
    ++valid;
  }
  if (valid == 0) return b;
  b.x0 = std::max(0, static_cast<int>(std::floor(x0)));
  b.y0 = std::max(0, static_cast<int>(std::floor(y0)));
  b.x1 = std::min(intr.width - 1, static_cast<int>(std::ceil(x1)));
  b.y1 = std::min(intr.height - 1, static_cast<int>(std::ceil(y1)));
  if (b.x0 > b.x1 || b.y0 > b.y1) return b;
  b.zMin = std::max(zMin, params.viewFrustum_min);
  b.zMax = std::min(zMax, params.viewFrustum_max);
  if (b.zMin > b.zMax) return b;
  b.valid = true;
  return b;
}

int fragmentCount(const BlockBounds& b) {
  const int fx = (b.x1 - b.x0) / kFragmentSize + 1;
  const int fy = (b.y1 - b.y0) / kFragmentSize + 1;
  return fx * fy;
}

struct Fragment {
  int x0, y0, x1, y1;
  float zMin, zMax;
};

}  // namespace

void render_expected_ranges(const VoxelBlockMap& map, const Pose& pose, const Intrinsics& intr,
                            const SceneParams& params, RenderState& state) {
  state.resize(intr);
  state.expectedRange.fill(Eigen::Vector2f(std::numeric_limits<float>::max(), -1.f));

  // pass 1: project blocks, count fragments, prefix-sum the offsets
  std::vector<BlockBounds> bounds;
  bounds.reserve(map.visibleList().size());
  for (int idx : map.visibleList()) {
    const HashEntry& e = map.entry(idx);
    if (!e.allocated()) continue;
    bounds.push_back(projectBlock(e.pos, pose, intr, params));
  }
  std::vector<int> offsets(bounds.size() + 1, 0);
  for (std::size_t i = 0; i < bounds.size(); ++i)
    offsets[i + 1] = offsets[i] + (bounds[i].valid ? fragmentCount(bounds[i]) : 0);

  // pass 2: emit fragments
  std::vector<Fragment> fragments(offsets.back());
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    const BlockBounds& b = bounds[i];
    if (!b.valid) continue;
    int out = offsets[i];
    for (int fy = b.y0; fy <= b.y1; fy += kFragmentSize) {
      for (int fx = b.x0; fx <= b.x1; fx += kFragmentSize) {
        fragments[out++] = {fx, fy, std::min(b.x1, fx + kFragmentSize - 1), std::min(b.y1, fy + kFragmentSize - 1),
                            b.zMin, b.zMax};
      }
    }
  }

  // pass 3: per-fragment min/max merge (commutative, block order irrelevant)
  for (const Fragment& f : fragments) {
    for (int y = f.y0; y <= f.y1; ++y) {
      for (int x = f.x0; x <= f.x1; ++x) {
        Eigen::Vector2f& r = state.expectedRange(x, y);
        r.x() = std::min(r.x(), f.zMin);
        r.y() = std::max(r.y(), f.zMax);
      }
    }
  }
}

void render_maps(const VoxelBlockMap& map, const Pose& pose, const Intrinsics& intr, const SceneParams& params,
                 RenderMode mode, RenderState& state, const std::vector<Eigen::Vector2i>* missingOnly) {
  MapField field(map);
  auto colourAt = [&](const Eigen::Vector3f& hitVoxel) {
    const Eigen::Vector3f c = map.readColourTrilinear(hitVoxel);
    return Rgb8{static_cast<std::uint8_t>(std::clamp(c.x(), 0.f, 255.f)),
                static_cast<std::uint8_t>(std::clamp(c.y(), 0.f, 255.f)),
                static_cast<std::uint8_t>(std::clamp(c.z(), 0.f, 255.f))};
  };
  render_maps_field(field, pose, intr, params, mode, state, colourAt, missingOnly);
}

std::vector<Eigen::Vector2i> forward_project(RenderState& state, const Pose& newPose, const Intrinsics& intr,
                                             float voxelSize) {
  std::vector<Eigen::Vector2i> missing;
  const Eigen::Vector4f invalid(0, 0, 0, -1);

  if (!state.hasRaycast) {
    state.resize(intr);
    missing.reserve(static_cast<std::size_t>(intr.width) * intr.height);
    for (int y = 0; y < intr.height; ++y)
      for (int x = 0; x < intr.width; ++x) missing.emplace_back(x, y);
    return missing;
  }

  const Image<Eigen::Vector4f> prev = state.raycastResult;  // copy: scatter target aliases
  Image<float> depthBuf(intr.width, intr.height, std::numeric_limits<float>::max());
  for (int y = 0; y < intr.height; ++y)
    for (int x = 0; x < intr.width; ++x) {
      state.raycastResult(x, y) = invalid;
      state.points(x, y) = invalid;
      state.normals(x, y) = invalid;
    }

  for (int y = 0; y < prev.height(); ++y) {
    for (int x = 0; x < prev.width(); ++x) {
      const Eigen::Vector4f& r = prev(x, y);
      if (r.w() <= 0.f) continue;
      const Eigen::Vector3f world = r.head<3>() * voxelSize;
      const Eigen::Vector3f pc = newPose.apply(world);
      if (pc.z() <= 0.f) continue;
      const Eigen::Vector2f px = intr.project(pc);
      const int ix = static_cast<int>(std::lround(px.x()));
      const int iy = static_cast<int>(std::lround(px.y()));
      if (ix < 0 || iy < 0 || ix >= intr.width || iy >= intr.height) continue;
      if (pc.z() >= depthBuf(ix, iy)) continue;  // keep the nearest point
      depthBuf(ix, iy) = pc.z();
      state.raycastResult(ix, iy) = r;
      state.points(ix, iy) = Eigen::Vector4f(world.x(), world.y(), world.z(), 1.f);
    }
  }

  for (int y = 0; y < intr.height; ++y)
    for (int x = 0; x < intr.width; ++x)
      if (state.raycastResult(x, y).w() <= 0.f) missing.emplace_back(x, y);

  state.pose = newPose;
  state.intr = intr;
  return missing;
}

}  // namespace rf
