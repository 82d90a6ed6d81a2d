#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "rf/calib_io.hpp"
#include "rf/image_io.hpp"
#include "rf/mesh_io.hpp"
#include "rf/synth.hpp"

using namespace rf;

namespace {

// The reference calibration layout (Kinect-style numbers).
const char* kExampleCalib = R"(640 480
504.261 503.905
352.457 272.202

640 480
573.71 574.394
346.471 249.031

0.999749 0.00518867 0.0217975 0.0243073
-0.0051649 0.999986 -0.0011465 -0.000166518
-0.0218031 0.00103363 0.999762 0.0151706

1135.09 0.0819141
)";

std::filesystem::path tempDir() {
  auto dir = std::filesystem::temp_directory_path() / "rf_io_test";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("parse_calibration: reference example parses to the listed numbers") {
  const RgbdCalib c = parse_calibration(kExampleCalib);
  CHECK(c.intrinsics_rgb.width == 640);
  CHECK(c.intrinsics_rgb.height == 480);
  CHECK(c.intrinsics_rgb.fx == doctest::Approx(504.261f));
  CHECK(c.intrinsics_rgb.fy == doctest::Approx(503.905f));
  CHECK(c.intrinsics_rgb.cx == doctest::Approx(352.457f));
  CHECK(c.intrinsics_rgb.cy == doctest::Approx(272.202f));
  CHECK(c.intrinsics_d.fx == doctest::Approx(573.71f));
  CHECK(c.intrinsics_d.fy == doctest::Approx(574.394f));
  CHECK(c.intrinsics_d.cx == doctest::Approx(346.471f));
  CHECK(c.intrinsics_d.cy == doctest::Approx(249.031f));
  CHECK(c.extrinsics_d_to_rgb.rotation()(0, 0) == doctest::Approx(0.999749f));
  CHECK(c.extrinsics_d_to_rgb.translation().x() == doctest::Approx(0.0243073f));
  CHECK(c.depth_affine.scale == doctest::Approx(1135.09f));
  CHECK(c.depth_affine.offset == doctest::Approx(0.0819141f));
}

TEST_CASE("parse_calibration: identity extrinsics block") {
  std::string text =
      "4 4\n1 1\n2 2\n\n4 4\n1 1\n2 2\n\n"
      "1 0 0 0\n0 1 0 0\n0 0 1 0\n\n0.001 0\n";
  const RgbdCalib c = parse_calibration(text);
  CHECK((c.extrinsics_d_to_rgb.rotation() - Eigen::Matrix3f::Identity()).cwiseAbs().maxCoeff() == 0.f);
  CHECK(c.extrinsics_d_to_rgb.translation().cwiseAbs().maxCoeff() == 0.f);
}

TEST_CASE("parse_calibration: truncated file names the missing section") {
  std::string text = "640 480\n504.261 503.905\n352.457 272.202\n";
  CHECK_THROWS_WITH_AS((void)parse_calibration(text),
                       doctest::Contains("depth intrinsics"), std::runtime_error);
}

TEST_CASE("parse_calibration: non-numeric token reports the line") {
  std::string text = "640 480\n504.261 bogus\n";
  CHECK_THROWS_WITH_AS((void)parse_calibration(text), doctest::Contains("line 2"), std::runtime_error);
}

TEST_CASE("calibration round trip is exact") {
  const RgbdCalib c = parse_calibration(kExampleCalib);
  const RgbdCalib c2 = parse_calibration(render_calibration(c));
  CHECK(c2.intrinsics_rgb.fx == c.intrinsics_rgb.fx);
  CHECK(c2.intrinsics_rgb.fy == c.intrinsics_rgb.fy);
  CHECK(c2.intrinsics_d.cx == c.intrinsics_d.cx);
  CHECK(c2.depth_affine.scale == c.depth_affine.scale);
  CHECK(c2.depth_affine.offset == c.depth_affine.offset);
  CHECK((c2.extrinsics_d_to_rgb.matrix34() - c.extrinsics_d_to_rgb.matrix34()).cwiseAbs().maxCoeff() == 0.f);
}

TEST_CASE("ppm/pgm round trips are bit-exact") {
  auto dir = tempDir();
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> byte(0, 255), word(0, 65535);

  Image<Rgb8> rgb(37, 23);
  for (int y = 0; y < rgb.height(); ++y)
    for (int x = 0; x < rgb.width(); ++x)
      rgb(x, y) = Rgb8{std::uint8_t(byte(rng)), std::uint8_t(byte(rng)), std::uint8_t(byte(rng))};
  write_ppm(rgb, (dir / "t.ppm").string());
  const auto rgb2 = read_ppm((dir / "t.ppm").string());
  REQUIRE(rgb2.sameSize(rgb));
  for (int y = 0; y < rgb.height(); ++y)
    for (int x = 0; x < rgb.width(); ++x) CHECK(rgb2(x, y) == rgb(x, y));

  Image<std::uint16_t> depth(37, 23);
  for (int y = 0; y < depth.height(); ++y)
    for (int x = 0; x < depth.width(); ++x) depth(x, y) = std::uint16_t(word(rng));
  write_pgm16(depth, (dir / "t.pgm").string());
  const auto depth2 = read_pgm16((dir / "t.pgm").string());
  REQUIRE(depth2.sameSize(depth));
  for (int y = 0; y < depth.height(); ++y)
    for (int x = 0; x < depth.width(); ++x) CHECK(depth2(x, y) == depth(x, y));
}

TEST_CASE("image stream: yields frames in order, stops at the first gap") {
  auto dir = tempDir() / "stream";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  Image<std::uint16_t> depth(4, 4, std::uint16_t(1234));
  for (int i : {0, 1, 2, 4}) {  // frame 3 missing
    char name[64];
    std::snprintf(name, sizeof(name), "%04d.pgm", i);
    write_pgm16(depth, (dir / name).string());
  }
  ImageStream stream((dir / "%04d").string(), 0);
  int n = 0;
  while (auto f = stream.next()) {
    CHECK(f->index == n);
    CHECK(f->rgb.empty());
    ++n;
  }
  CHECK(n == 3);
}

TEST_CASE("synth render: plane depth is exact at the centre pixel") {
  const Intrinsics intr{64, 48, 60.f, 60.f, 31.5f, 23.5f};
  SyntheticScene scene;
  scene.planes.push_back({{0, 0, -1}, -1.f});
  const auto r = synth_render_depth(scene, Pose::Identity(), intr, {1.f / 5000.f, 0.f}, 0.f, 0, false);
  // principal ray: dir (0.5/60, 0.5/60, 1) ~ not exactly the axis; use the
  // analytic expectation for that off-axis ray (still exactly 1.0 in z).
  CHECK(r.depth_m(31, 23) == doctest::Approx(1.0f).epsilon(1e-6));
  CHECK(r.depth_raw(31, 23) == 5000);
}

TEST_CASE("synth render: sphere behind camera is invalid everywhere") {
  const Intrinsics intr{32, 24, 30.f, 30.f, 15.5f, 11.5f};
  SyntheticScene scene = make_sphere_scene(0.3f, {0, 0, -2.f});
  const auto r = synth_render_depth(scene, Pose::Identity(), intr, {1.f / 5000.f, 0.f}, 0.f, 0, false);
  for (int y = 0; y < 24; ++y)
    for (int x = 0; x < 32; ++x) CHECK(r.depth_m(x, y) < 0.f);
}

TEST_CASE("synth render: sphere centre ray depth = distance minus radius") {
  Intrinsics intr{64, 48, 60.f, 60.f, 32.f, 24.f};  // centre pixel exactly on axis
  SyntheticScene scene = make_sphere_scene(0.4f, {0, 0, 2.f});
  const auto r = synth_render_depth(scene, Pose::Identity(), intr, {1.f / 5000.f, 0.f}, 0.f, 0, false);
  CHECK(r.depth_m(32, 24) == doctest::Approx(1.6f).epsilon(1e-6));
}

TEST_CASE("write_mesh: empty, single triangle, and obj round trip") {
  auto dir = tempDir();
  Mesh empty;
  write_mesh(empty, (dir / "empty.obj").string(), MeshFormat::kObj);
  const Mesh emptyBack = read_obj((dir / "empty.obj").string());
  CHECK(emptyBack.vertices.empty());
  CHECK(emptyBack.triangles.empty());

  Mesh tri;
  tri.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  tri.triangles = {{0, 1, 2}};
  write_mesh(tri, (dir / "tri.obj").string(), MeshFormat::kObj);

  std::ifstream in((dir / "tri.obj").string());
  int vLines = 0, fLines = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("v ", 0) == 0) ++vLines;
    if (line.rfind("f ", 0) == 0) ++fLines;
  }
  CHECK(vLines == 3);
  CHECK(fLines == 1);

  const Mesh back = read_obj((dir / "tri.obj").string());
  REQUIRE(back.vertices.size() == 3);
  REQUIRE(back.triangles.size() == 1);
  CHECK(back.vertices[1] == Eigen::Vector3f(1, 0, 0));
  CHECK(back.triangles[0] == std::array<std::uint32_t, 3>{0, 1, 2});

  write_mesh(tri, (dir / "tri.stl").string(), MeshFormat::kStl);
  CHECK(std::filesystem::file_size(dir / "tri.stl") == 84 + 50);
}
