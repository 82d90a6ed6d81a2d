#include <random>

#include "doctest.h"
#include "rf/pose.hpp"
#include "rf/synth.hpp"
#include "rf/view.hpp"

using namespace rf;

namespace {

Pose randomPose(std::mt19937& rng, float maxAngle = 2.f, float maxTrans = 2.f) {
  std::uniform_real_distribution<float> u(-1.f, 1.f);
  Eigen::Matrix<float, 6, 1> tau;
  for (int i = 0; i < 3; ++i) tau[i] = u(rng) * maxAngle;
  for (int i = 3; i < 6; ++i) tau[i] = u(rng) * maxTrans;
  return Pose::exp(tau);
}

RgbdCalib simpleCalib(int w, int h, float f) {
  RgbdCalib c;
  c.intrinsics_d = {w, h, f, f, w / 2.f - 0.5f, h / 2.f - 0.5f};
  c.intrinsics_rgb = c.intrinsics_d;
  c.depth_affine = {1.f / 1000.f, 0.f};
  return c;
}

}  // namespace

TEST_CASE("pose: rotation stays orthonormal with unit determinant") {
  std::mt19937 rng(7);
  for (int i = 0; i < 50; ++i) {
    const Pose p = randomPose(rng);
    const Eigen::Matrix3f R = p.rotation();
    CHECK((R * R.transpose() - Eigen::Matrix3f::Identity()).cwiseAbs().maxCoeff() < 1e-6f);
    CHECK(R.determinant() == doctest::Approx(1.f).epsilon(1e-5));
  }
}

TEST_CASE("pose: compose with inverse is identity within 1e-6") {
  std::mt19937 rng(11);
  for (int i = 0; i < 50; ++i) {
    const Pose p = randomPose(rng);
    const Pose id = p * p.inverse();
    CHECK((id.rotation() - Eigen::Matrix3f::Identity()).cwiseAbs().maxCoeff() < 1e-6f);
    CHECK(id.translation().cwiseAbs().maxCoeff() < 1e-6f);
  }
}

TEST_CASE("pose_apply examples") {
  const Pose id;
  CHECK(id.apply({1, 2, 3}) == Eigen::Vector3f(1, 2, 3));

  const Pose trans(Eigen::Matrix3f::Identity(), Eigen::Vector3f(0, 0, 1));
  CHECK(trans.apply({0, 0, 0}) == Eigen::Vector3f(0, 0, 1));

  std::mt19937 rng(3);
  for (int i = 0; i < 20; ++i) {
    const Pose p = randomPose(rng);
    const Eigen::Vector3f x(0.3f, -1.2f, 2.5f);
    CHECK(((p * p.inverse()).apply(x) - x).cwiseAbs().maxCoeff() < 1e-5f);
  }
}

TEST_CASE("pose: exp/log round trip") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<float> u(-1.f, 1.f);
  for (int i = 0; i < 50; ++i) {
    Eigen::Matrix<float, 6, 1> tau;
    for (int k = 0; k < 6; ++k) tau[k] = u(rng);
    const auto back = Pose::exp(tau).log();
    CHECK((back - tau).cwiseAbs().maxCoeff() < 1e-4f);
  }
}

TEST_CASE("build_view: affine depth conversion") {
  RgbdCalib calib = simpleCalib(8, 8, 10.f);
  Image<std::uint16_t> raw(8, 8, std::uint16_t(1000));
  const View v = build_view(raw, {}, calib, {false, 1});
  CHECK(v.depth_m(4, 4) == doctest::Approx(1.0f));
}

TEST_CASE("build_view: zero raw depth is invalid") {
  RgbdCalib calib = simpleCalib(8, 8, 10.f);
  Image<std::uint16_t> raw(8, 8, std::uint16_t(0));
  const View v = build_view(raw, {}, calib, {false, 1});
  CHECK(v.depth_m(3, 3) < 0.f);
}

TEST_CASE("build_view: grey intensity weights sum to one") {
  RgbdCalib calib = simpleCalib(4, 4, 10.f);
  Image<std::uint16_t> raw(4, 4, std::uint16_t(1000));
  Image<Rgb8> rgb(4, 4, Rgb8{100, 100, 100});
  const View v = build_view(raw, rgb, calib, {false, 1});
  CHECK(v.intensity(1, 1) == doctest::Approx(100.f / 255.f).epsilon(1e-6));
}

TEST_CASE("build_view: pyramid dimensions and intrinsics") {
  RgbdCalib calib = simpleCalib(640, 480, 525.f);
  Image<std::uint16_t> raw(640, 480, std::uint16_t(2000));
  const View v = build_view(raw, {}, calib, {false, 3});
  REQUIRE(v.pyramid.size() == 3);
  CHECK(v.pyramid[0].depth.width() == 640);
  CHECK(v.pyramid[1].depth.width() == 320);
  CHECK(v.pyramid[1].depth.height() == 240);
  CHECK(v.pyramid[2].depth.width() == 160);
  CHECK(v.pyramid[2].depth.height() == 120);

  // projecting a fixed point at level L then scaling by 2^L matches level 0
  const Eigen::Vector3f p(0.3f, -0.2f, 2.f);
  const Eigen::Vector2f px0 = v.pyramid[0].intr.project(p);
  for (int l = 1; l < 3; ++l) {
    const Eigen::Vector2f pxl = v.pyramid[l].intr.project(p) * std::ldexp(1.f, l);
    CHECK((pxl - px0).cwiseAbs().maxCoeff() < 0.5f);
  }
}

TEST_CASE("build_view: dimension mismatch rejected") {
  RgbdCalib calib = simpleCalib(8, 8, 10.f);
  Image<std::uint16_t> raw(4, 4, std::uint16_t(1000));
  CHECK_THROWS_AS((void)build_view(raw, {}, calib, {false, 1}), std::invalid_argument);
}

TEST_CASE("bilateral filter is identity on constant depth") {
  Image<float> depth(16, 16, 1.5f);
  const Image<float> out = bilateral_filter(depth, 2.f, 0.01f);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) CHECK(out(x, y) == doctest::Approx(1.5f).epsilon(1e-6));
}

TEST_CASE("compute_normals: fronto-parallel plane faces the camera") {
  const Intrinsics intr{64, 48, 60.f, 60.f, 31.5f, 23.5f};
  SyntheticScene scene;
  scene.planes.push_back({{0, 0, -1}, -2.f});
  const auto render = synth_render_depth(scene, Pose::Identity(), intr, {1.f / 5000.f, 0.f}, 0.f, 0, false);
  const auto normals = compute_normals(render.depth_m, intr);
  const Eigen::Vector4f n = normals(32, 24);
  REQUIRE(n.w() > 0.f);
  CHECK((n.head<3>() - Eigen::Vector3f(0, 0, -1)).norm() < 1e-4f);
  CHECK(std::abs(n.head<3>().norm() - 1.f) < 1e-5f);
}

TEST_CASE("compute_normals: 45 degree plane") {
  const Intrinsics intr{64, 48, 60.f, 60.f, 31.5f, 23.5f};
  SyntheticScene scene;
  const Eigen::Vector3f n0 = Eigen::Vector3f(-1, 0, -1).normalized();
  scene.planes.push_back({n0, n0.dot(Eigen::Vector3f(0, 0, 1.5f))});
  const auto render = synth_render_depth(scene, Pose::Identity(), intr, {1.f / 5000.f, 0.f}, 0.f, 0, false);
  const auto normals = compute_normals(render.depth_m, intr);
  const Eigen::Vector4f n = normals(32, 24);
  REQUIRE(n.w() > 0.f);
  CHECK((n.head<3>() - n0).norm() < 1e-3f);
}

TEST_CASE("compute_normals: isolated pixel is invalid") {
  Image<float> depth(8, 8, kInvalidDepth);
  depth(4, 4) = 1.f;
  const Intrinsics intr{8, 8, 10.f, 10.f, 3.5f, 3.5f};
  const auto normals = compute_normals(depth, intr);
  CHECK(normals(4, 4).w() < 0.f);
}

TEST_CASE("pyramid depth downsampling ignores invalid pixels") {
  Image<float> depth(4, 4, kInvalidDepth);
  depth(0, 0) = 1.f;  // single valid pixel in the top-left 2x2
  const auto half = downsample_depth(depth);
  CHECK(half(0, 0) == doctest::Approx(1.f));
  CHECK(half(1, 1) < 0.f);
}
