#include "rf/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rf {

namespace {

float planeSdf(const SynthPlane& pl, const Eigen::Vector3f& p) { return pl.normal.dot(p) - pl.d; }

float sphereSdf(const SynthSphere& s, const Eigen::Vector3f& p) { return (p - s.centre).norm() - s.radius; }

float boxSdf(const SynthBox& b, const Eigen::Vector3f& p) {
  const Eigen::Vector3f q = (p - b.centre).cwiseAbs() - b.halfExtents;
  const Eigen::Vector3f qpos = q.cwiseMax(0.f);
  const float outside = qpos.norm();
  const float inside = std::min(q.maxCoeff(), 0.f);
  return outside + inside;
}

Rgb8 planeColour(const SynthPlane& pl, const Eigen::Vector3f& p) {
  if (!pl.checker) return pl.colour;
  // checker by the two dominant tangent axes
  Eigen::Vector3f u = pl.normal.unitOrthogonal();
  Eigen::Vector3f v = pl.normal.cross(u);
  const int iu = static_cast<int>(std::floor(u.dot(p) / pl.checkerSize));
  const int iv = static_cast<int>(std::floor(v.dot(p) / pl.checkerSize));
  return ((iu + iv) & 1) ? pl.colour2 : pl.colour;
}

}  // namespace

float SyntheticScene::signedDistance(const Eigen::Vector3f& p) const {
  float d = std::numeric_limits<float>::max();
  for (const auto& pl : planes) d = std::min(d, planeSdf(pl, p));
  for (const auto& s : spheres) d = std::min(d, sphereSdf(s, p));
  for (const auto& b : boxes) d = std::min(d, boxSdf(b, p));
  return d;
}

std::optional<float> SyntheticScene::raycast(const Eigen::Vector3f& origin, const Eigen::Vector3f& dir, float tMin,
                                             float tMax, Rgb8* colour, Eigen::Vector3f* normal) const {
  float best = tMax;
  bool hit = false;
  Rgb8 bestColour{0, 0, 0};
  Eigen::Vector3f bestNormal = Eigen::Vector3f::Zero();

  for (const auto& pl : planes) {
    const float denom = pl.normal.dot(dir);
    if (std::abs(denom) < 1e-12f) continue;
    const float t = (pl.d - pl.normal.dot(origin)) / denom;
    if (t > tMin && t < best) {
      best = t;
      hit = true;
      bestColour = planeColour(pl, origin + t * dir);
      bestNormal = pl.normal;
    }
  }
  for (const auto& s : spheres) {
    const Eigen::Vector3f oc = origin - s.centre;
    const float a = dir.squaredNorm();
    const float b = 2.f * oc.dot(dir);
    const float c = oc.squaredNorm() - s.radius * s.radius;
    const float disc = b * b - 4 * a * c;
    if (disc < 0.f) continue;
    const float sq = std::sqrt(disc);
    for (const float t : {(-b - sq) / (2 * a), (-b + sq) / (2 * a)}) {
      if (t > tMin && t < best) {
        best = t;
        hit = true;
        bestColour = s.colour;
        bestNormal = (origin + t * dir - s.centre).normalized();
        break;
      }
    }
  }
  for (const auto& bx : boxes) {
    // slab test
    float t0 = tMin, t1 = best;
    bool ok = true;
    int hitAxis = -1;
    for (int a = 0; a < 3 && ok; ++a) {
      const float lo = bx.centre[a] - bx.halfExtents[a], hi = bx.centre[a] + bx.halfExtents[a];
      if (std::abs(dir[a]) < 1e-12f) {
        ok = origin[a] >= lo && origin[a] <= hi;
      } else {
        float ta = (lo - origin[a]) / dir[a];
        float tb = (hi - origin[a]) / dir[a];
        if (ta > tb) std::swap(ta, tb);
        if (ta > t0) {
          t0 = ta;
          hitAxis = a;
        }
        t1 = std::min(t1, tb);
        ok = t0 <= t1;
      }
    }
    if (ok && t0 > tMin && t0 < best && hitAxis >= 0) {
      best = t0;
      hit = true;
      bestColour = bx.colour;
      bestNormal = Eigen::Vector3f::Zero();
      bestNormal[hitAxis] = dir[hitAxis] > 0 ? -1.f : 1.f;
    }
  }

  if (!hit) return std::nullopt;
  if (colour) *colour = bestColour;
  if (normal) *normal = bestNormal;
  return best;
}

SyntheticScene make_sphere_scene(float radius, const Eigen::Vector3f& centre) {
  SyntheticScene s;
  s.spheres.push_back({centre, radius, Rgb8{180, 120, 80}});
  return s;
}

SyntheticScene make_sphere_in_room_scene() {
  SyntheticScene s;
  s.spheres.push_back({{0.f, 0.15f, 1.4f}, 0.3f, Rgb8{180, 120, 80}});
  // back wall at z = 2.2 facing the camera, floor at y = 0.45 (y points down)
  s.planes.push_back({{0, 0, -1}, -2.2f, Rgb8{190, 190, 190}, true, 0.25f, Rgb8{90, 90, 90}});
  s.planes.push_back({{0, -1, 0}, -0.45f, Rgb8{150, 170, 150}, false, 0.1f, Rgb8{0, 0, 0}});
  return s;
}

SyntheticScene make_checker_wall_scene(float z, float checkerSize) {
  SyntheticScene s;
  s.planes.push_back({{0, 0, -1}, -z, Rgb8{230, 230, 230}, true, checkerSize, Rgb8{30, 30, 30}});
  return s;
}

SynthRender synth_render_depth(const SyntheticScene& scene, const Pose& pose, const Intrinsics& intr,
                               const DepthAffine& affine, float noiseSigma, std::uint32_t seed, bool renderRgb) {
  SynthRender out;
  out.depth_raw = Image<std::uint16_t>(intr.width, intr.height, 0);
  out.depth_m = Image<float>(intr.width, intr.height, -1.f);
  if (renderRgb) out.rgb = Image<Rgb8>(intr.width, intr.height, Rgb8{0, 0, 0});

  const Pose camToWorld = pose.inverse();
  const Eigen::Vector3f origin = camToWorld.translation();
  std::mt19937 rng(seed);
  std::normal_distribution<float> noise(0.f, noiseSigma);

  for (int y = 0; y < intr.height; ++y) {
    for (int x = 0; x < intr.width; ++x) {
      // unit-z camera ray: the parameter t is exactly the camera-frame depth
      const Eigen::Vector3f dirWorld = camToWorld.rotation() * intr.rayDir(float(x), float(y));
      Rgb8 colour{0, 0, 0};
      Eigen::Vector3f n;
      const auto t = scene.raycast(origin, dirWorld, 1e-4f, 100.f, &colour, &n);
      if (!t) continue;
      float z = *t;
      out.depth_m(x, y) = z;
      if (noiseSigma > 0.f) z += noise(rng);
      out.depth_raw(x, y) = affine.toRaw(z);
      if (renderRgb) {
        // simple Lambertian shading against the view direction
        const float lambert = std::abs(n.dot(dirWorld.normalized()));
        const float shade = 0.35f + 0.65f * lambert;
        Rgb8 c;
        for (int k = 0; k < 3; ++k) c[k] = static_cast<std::uint8_t>(std::min(255.f, colour[k] * shade));
        out.rgb(x, y) = c;
      }
    }
  }
  return out;
}

std::vector<Pose> orbit_trajectory(const Eigen::Vector3f& target, float distance, int frames, float maxAngleRad) {
  std::vector<Pose> poses;
  poses.reserve(frames);
  for (int i = 0; i < frames; ++i) {
    const float a = frames > 1 ? maxAngleRad * (2.f * i / (frames - 1) - 1.f) : 0.f;
    const float b = frames > 1 ? 0.4f * maxAngleRad * std::sin(3.f * float(i) / frames) : 0.f;
    const Eigen::Vector3f offset(std::sin(a) * std::cos(b), std::sin(b), -std::cos(a) * std::cos(b));
    const Eigen::Vector3f camPos = target + distance * offset;
    // look-at: camera z toward target, x right, y down
    const Eigen::Vector3f zAxis = (target - camPos).normalized();
    Eigen::Vector3f up(0, 1, 0);
    if (std::abs(up.dot(zAxis)) > 0.99f) up = Eigen::Vector3f(1, 0, 0);
    const Eigen::Vector3f xAxis = up.cross(zAxis).normalized() * -1.f;  // y-down convention
    const Eigen::Vector3f yAxis = zAxis.cross(xAxis);
    Eigen::Matrix3f Rcw;  // camera->world columns
    Rcw.col(0) = xAxis;
    Rcw.col(1) = yAxis;
    Rcw.col(2) = zAxis;
    const Pose camToWorld(Rcw, camPos);
    poses.push_back(camToWorld.inverse());
  }
  return poses;
}

}  // namespace rf
