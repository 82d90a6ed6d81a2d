#pragma once

#include <optional>
#include <random>
#include <vector>

#include "rf/camera.hpp"
#include "rf/image.hpp"
#include "rf/pose.hpp"

namespace rf {

/// Analytic test scenes: exact ray intersections and exact signed distance,
/// used as the ground-truth oracle for fusion, raycasting and tracking.
struct SynthPlane {
  Eigen::Vector3f normal;  // unit, points into free space
  float d;                 // plane: normal . x = d
  Rgb8 colour{200, 200, 200};
  bool checker = false;
  float checkerSize = 0.1f;  // metres
  Rgb8 colour2{40, 40, 40};
};

struct SynthSphere {
  Eigen::Vector3f centre;
  float radius;
  Rgb8 colour{180, 120, 80};
};

struct SynthBox {
  Eigen::Vector3f centre;
  Eigen::Vector3f halfExtents;
  Rgb8 colour{120, 160, 200};
};

struct SyntheticScene {
  std::vector<SynthPlane> planes;
  std::vector<SynthSphere> spheres;
  std::vector<SynthBox> boxes;

  /// Signed distance of the union: positive in free space, negative inside.
  float signedDistance(const Eigen::Vector3f& p) const;

  /// Nearest intersection along origin + t*dir for t in (tMin, tMax];
  /// returns t and the hit colour. dir need not be unit length.
  std::optional<float> raycast(const Eigen::Vector3f& origin, const Eigen::Vector3f& dir, float tMin, float tMax,
                               Rgb8* colour = nullptr, Eigen::Vector3f* normal = nullptr) const;
};

SyntheticScene make_sphere_scene(float radius = 0.5f, const Eigen::Vector3f& centre = {0, 0, 1.5f});
/// Sphere plus floor and back wall; enough geometry to constrain all 6 DoF.
SyntheticScene make_sphere_in_room_scene();
/// Textured plane facing the camera (checkerboard), for photometric tests.
SyntheticScene make_checker_wall_scene(float z = 1.f, float checkerSize = 0.1f);

struct SynthRender {
  Image<std::uint16_t> depth_raw;
  Image<float> depth_m;  // exact, before quantisation
  Image<Rgb8> rgb;
};

/// Renders exact per-pixel z-depth of the scene from `pose` (world->camera).
/// Optional zero-mean Gaussian noise (sigma metres, seeded) is added before
/// conversion to raw units via the inverse depth affine.
SynthRender synth_render_depth(const SyntheticScene& scene, const Pose& pose, const Intrinsics& intr,
                               const DepthAffine& affine, float noiseSigma = 0.f, std::uint32_t seed = 0,
                               bool renderRgb = true);

/// Camera orbit around `target`: poses are world->camera, looking at target.
std::vector<Pose> orbit_trajectory(const Eigen::Vector3f& target, float distance, int frames,
                                   float maxAngleRad = 0.5f);

}  // namespace rf
