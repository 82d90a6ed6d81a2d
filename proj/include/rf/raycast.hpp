#pragma once

#include <optional>
#include <vector>

#include "rf/fusion.hpp"
#include "rf/view.hpp"
#include "rf/voxel_block_map.hpp"

namespace rf {

/// Ray-march state machine (see cast_ray_field).
enum class RayState { kSearchBlockCoarse, kSearchBlockFine, kSearchSurface, kBehindSurface, kWrongSide };

struct RenderState {
  Image<Eigen::Vector2f> expectedRange;  // (min, max) camera-z metres; max < min means unset
  Image<Eigen::Vector4f> raycastResult;  // xyz = voxel coords, w > 0 hit
  Image<Eigen::Vector4f> points;         // world metres, w > 0 valid
  Image<Eigen::Vector4f> normals;        // world unit normals, w > 0 valid
  Image<Rgb8> colour;
  Pose pose;  // world -> camera used for the last render
  Intrinsics intr;
  bool hasRaycast = false;

  void resize(const Intrinsics& intrinsics);
};

enum class RenderMode { kIcpMaps, kColour, kGrey };

/// Field abstraction over "a TSDF addressable in voxel coordinates":
/// the plain map and the multi-submap blend both satisfy it.
struct MapField {
  const VoxelBlockMap* map;
  mutable BlockCache cache;

  explicit MapField(const VoxelBlockMap& m) : map(&m) {}

  bool resident(const Eigen::Vector3f& p) const {
    const Eigen::Vector3i voxel(static_cast<int>(std::floor(p.x())), static_cast<int>(std::floor(p.y())),
                                static_cast<int>(std::floor(p.z())));
    return map->blockResident(voxelToBlock(voxel), &cache);
  }
  float sdfNearest(const Eigen::Vector3f& p, bool& ok) const { return map->readSdfNearest(p, ok, &cache); }
  float sdfTrilinear(const Eigen::Vector3f& p, bool& ok) const { return map->readSdfTrilinear(p, ok, &cache); }
};

/// Conservative sdf-stepped ray march. Distances are metres along the unit
/// direction; the returned hit is in voxel coordinates. Coarse search steps
/// one block at a time; after entering allocated space it steps one block
/// back and continues at the truncation-band step; positive readings switch
/// to sdf-scaled stepping; a sign change refines the crossing with two
/// trilinear steps. A negative first reading in fine search means the ray
/// entered the scene from behind (WRONG_SIDE): no hit.
template <class Field>
std::optional<Eigen::Vector3f> cast_ray_field(const Field& field, const Eigen::Vector3f& originM,
                                              const Eigen::Vector3f& dirUnit, float tMinM, float tMaxM, float mu,
                                              float voxelSize) {
  const float coarseStep = kBlockSize * voxelSize;
  const float fineStep = mu;
  const float stepScale = mu;  // metres per unit logical sdf

  const Eigen::Vector3f originV = originM / voxelSize;
  const Eigen::Vector3f dirV = dirUnit / voxelSize;  // voxel coords per metre
  auto at = [&](float t) { return originV + t * dirV; };

  float t = tMinM;
  RayState state = field.resident(at(t)) ? RayState::kSearchBlockFine : RayState::kSearchBlockCoarse;

  while (t <= tMaxM) {
    const Eigen::Vector3f p = at(t);

    if (state == RayState::kSearchBlockCoarse) {
      if (field.resident(p)) {
        state = RayState::kSearchBlockFine;
        t = std::max(tMinM, t - coarseStep);
      } else {
        t += coarseStep;
      }
      continue;
    }

    bool ok = false;
    float sdf = field.sdfNearest(p, ok);
    if (!ok) {
      if (state == RayState::kSearchSurface) state = RayState::kSearchBlockFine;
      t += fineStep;
      continue;
    }
    if (sdf <= 0.1f) {
      bool okTri = false;
      const float tri = field.sdfTrilinear(p, okTri);
      if (okTri) sdf = tri;
    }

    if (state == RayState::kSearchBlockFine) {
      if (sdf < 0.f) return std::nullopt;  // WRONG_SIDE
      state = RayState::kSearchSurface;
    }

    // SEARCH_SURFACE
    if (sdf <= 0.f) {
      // BEHIND_SURFACE: locate the crossing with two trilinear steps
      float tHit = t + sdf * stepScale;
      bool okR = false;
      const float f1 = field.sdfTrilinear(at(tHit), okR);
      if (okR) tHit += f1 * stepScale;
      return at(tHit);
    }
    t += std::max(sdf * stepScale, voxelSize);
  }
  return std::nullopt;
}

std::optional<Eigen::Vector3f> cast_ray(const VoxelBlockMap& map, const Eigen::Vector3f& originM,
                                        const Eigen::Vector3f& dirUnit, const Eigen::Vector2f& rangeM, float mu,
                                        float voxelSize);

/// Expected-range pass: projects every visible block's bounding box, covers
/// its clipped 2D bounding box with 16x16-pixel fragments (sized by a count
/// + prefix-sum pass), then min/max-merges each fragment into the range
/// image. Unset pixels keep max < min.
void render_expected_ranges(const VoxelBlockMap& map, const Pose& pose, const Intrinsics& intr,
                            const SceneParams& params, RenderState& state);

/// Full per-pixel raycast producing point/normal (and optionally colour)
/// maps. `missingOnly` restricts the work to the listed pixels (the
/// approximate-raycast path).
void render_maps(const VoxelBlockMap& map, const Pose& pose, const Intrinsics& intr, const SceneParams& params,
                 RenderMode mode, RenderState& state, const std::vector<Eigen::Vector2i>* missingOnly = nullptr);

/// Reprojects the previous raycast into a new pose; returns the pixels that
/// received no point and must be raycast afresh.
std::vector<Eigen::Vector2i> forward_project(RenderState& state, const Pose& newPose, const Intrinsics& intr,
                                             float voxelSize);

/// Normal + (for grey/colour modes) shaded output at a hit point.
template <class Field>
inline bool field_normal(const Field& field, const Eigen::Vector3f& hitVoxel, Eigen::Vector3f& normal) {
  bool ok[6];
  const float d = 1.f;
  Eigen::Vector3f g;
  g.x() = field.sdfTrilinear(hitVoxel + Eigen::Vector3f(d, 0, 0), ok[0]) -
          field.sdfTrilinear(hitVoxel - Eigen::Vector3f(d, 0, 0), ok[1]);
  g.y() = field.sdfTrilinear(hitVoxel + Eigen::Vector3f(0, d, 0), ok[2]) -
          field.sdfTrilinear(hitVoxel - Eigen::Vector3f(0, d, 0), ok[3]);
  g.z() = field.sdfTrilinear(hitVoxel + Eigen::Vector3f(0, 0, d), ok[4]) -
          field.sdfTrilinear(hitVoxel - Eigen::Vector3f(0, 0, d), ok[5]);
  if (!(ok[0] && ok[1] && ok[2] && ok[3] && ok[4] && ok[5])) return false;
  const float len = g.norm();
  if (len < 1e-12f) return false;
  normal = g / len;
  return true;
}

/// Shared per-pixel render loop over an arbitrary field; colour is looked
/// up by the caller-provided sampler when mode == kColour.
template <class Field, class ColourFn>
void render_maps_field(const Field& field, const Pose& pose, const Intrinsics& intr, const SceneParams& params,
                       RenderMode mode, RenderState& state, ColourFn&& colourAt,
                       const std::vector<Eigen::Vector2i>* missingOnly) {
  state.resize(intr);
  state.pose = pose;
  state.intr = intr;
  const Pose camToWorld = pose.inverse();
  const Eigen::Vector3f origin = camToWorld.translation();

  auto doPixel = [&](int x, int y) {
    const Eigen::Vector4f invalid(0, 0, 0, -1);
    state.raycastResult(x, y) = invalid;
    state.points(x, y) = invalid;
    state.normals(x, y) = invalid;
    if (mode != RenderMode::kIcpMaps) state.colour(x, y) = Rgb8{0, 0, 0};

    const Eigen::Vector2f range = state.expectedRange(x, y);
    if (!(range.y() >= range.x())) return;

    const Eigen::Vector3f dirCam = intr.rayDir(float(x), float(y));
    const float norm = dirCam.norm();
    const Eigen::Vector3f dirWorld = (camToWorld.rotation() * dirCam) / norm;
    const auto hit =
        cast_ray_field(field, origin, dirWorld, range.x() * norm, range.y() * norm, params.mu, params.voxelSize);
    if (!hit) return;

    const Eigen::Vector3f world = *hit * params.voxelSize;
    state.raycastResult(x, y) = Eigen::Vector4f(hit->x(), hit->y(), hit->z(), 1.f);
    state.points(x, y) = Eigen::Vector4f(world.x(), world.y(), world.z(), 1.f);
    Eigen::Vector3f n = Eigen::Vector3f::Zero();
    const bool hasNormal = field_normal(field, *hit, n);
    if (hasNormal) state.normals(x, y) = Eigen::Vector4f(n.x(), n.y(), n.z(), 1.f);

    if (mode == RenderMode::kColour) {
      state.colour(x, y) = colourAt(*hit);
    } else if (mode == RenderMode::kGrey && hasNormal) {
      const float shade = std::abs(n.dot(dirWorld));
      const auto g = static_cast<std::uint8_t>(std::clamp(shade, 0.f, 1.f) * 255.f);
      state.colour(x, y) = Rgb8{g, g, g};
    }
  };

  if (missingOnly) {
    for (const auto& px : *missingOnly) doPixel(px.x(), px.y());
  } else {
    for (int y = 0; y < intr.height; ++y)
      for (int x = 0; x < intr.width; ++x) doPixel(x, y);
  }
  state.hasRaycast = true;
}

}  // namespace rf
