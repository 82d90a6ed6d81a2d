#include "rf/view.hpp"

#include <cmath>
#include <stdexcept>

namespace rf {

Image<float> rgb_to_intensity(const Image<Rgb8>& rgb) {
  Image<float> out(rgb.width(), rgb.height());
  for (int y = 0; y < rgb.height(); ++y)
    for (int x = 0; x < rgb.width(); ++x) {
      const Rgb8& c = rgb(x, y);
      out(x, y) = (0.299f * c[0] + 0.587f * c[1] + 0.114f * c[2]) / 255.f;
    }
  return out;
}

Image<float> bilateral_filter(const Image<float>& depthM, float spatialSigma, float rangeSigma) {
  const int radius = 2;  // 5x5 window
  Image<float> out(depthM.width(), depthM.height(), kInvalidDepth);
  const float invS2 = 1.f / (2.f * spatialSigma * spatialSigma);
  const float invR2 = 1.f / (2.f * rangeSigma * rangeSigma);
  for (int y = 0; y < depthM.height(); ++y) {
    for (int x = 0; x < depthM.width(); ++x) {
      const float centre = depthM(x, y);
      if (centre <= 0.f) continue;
      float sum = 0.f, wsum = 0.f;
      for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (!depthM.contains(nx, ny)) continue;
          const float d = depthM(nx, ny);
          if (d <= 0.f) continue;
          const float dr = d - centre;
          const float w = std::exp(-(dx * dx + dy * dy) * invS2 - dr * dr * invR2);
          sum += w * d;
          wsum += w;
        }
      }
      out(x, y) = sum / wsum;
    }
  }
  return out;
}

Image<Eigen::Vector4f> compute_normals(const Image<float>& depthM, const Intrinsics& intr) {
  const Eigen::Vector4f invalid(0, 0, 0, -1);
  Image<Eigen::Vector4f> out(depthM.width(), depthM.height(), invalid);
  for (int y = 1; y + 1 < depthM.height(); ++y) {
    for (int x = 1; x + 1 < depthM.width(); ++x) {
      const float dc = depthM(x, y);
      const float dxm = depthM(x - 1, y), dxp = depthM(x + 1, y);
      const float dym = depthM(x, y - 1), dyp = depthM(x, y + 1);
      if (dc <= 0.f || dxm <= 0.f || dxp <= 0.f || dym <= 0.f || dyp <= 0.f) continue;
      const Eigen::Vector3f px = intr.backproject(x + 1.f, y, dxp) - intr.backproject(x - 1.f, y, dxm);
      const Eigen::Vector3f py = intr.backproject(x, y + 1.f, dyp) - intr.backproject(x, y - 1.f, dym);
      Eigen::Vector3f n = px.cross(py);
      const float len = n.norm();
      if (len < 1e-12f) continue;
      n /= len;
      // orient toward the camera
      if (n.dot(intr.backproject(float(x), float(y), dc)) > 0.f) n = -n;
      out(x, y) = Eigen::Vector4f(n.x(), n.y(), n.z(), 1.f);
    }
  }
  return out;
}

Image<float> downsample_depth(const Image<float>& depthM) {
  const int w = depthM.width() / 2, h = depthM.height() / 2;
  Image<float> out(w, h, kInvalidDepth);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      float sum = 0.f;
      int n = 0;
      for (int dy = 0; dy < 2; ++dy)
        for (int dx = 0; dx < 2; ++dx) {
          const float d = depthM(2 * x + dx, 2 * y + dy);
          if (d > 0.f) {
            sum += d;
            ++n;
          }
        }
      if (n > 0) out(x, y) = sum / n;
    }
  }
  return out;
}

Image<float> downsample_intensity(const Image<float>& img) {
  const int w = img.width() / 2, h = img.height() / 2;
  Image<float> out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      out(x, y) =
          0.25f * (img(2 * x, 2 * y) + img(2 * x + 1, 2 * y) + img(2 * x, 2 * y + 1) + img(2 * x + 1, 2 * y + 1));
  return out;
}

View build_view(const Image<std::uint16_t>& rawDepth, const Image<Rgb8>& rgb, const RgbdCalib& calib,
                const ViewBuildOptions& opts) {
  if (rawDepth.width() != calib.intrinsics_d.width || rawDepth.height() != calib.intrinsics_d.height)
    throw std::invalid_argument("build_view: depth image size does not match calibration");
  if (!rgb.empty() && (rgb.width() != calib.intrinsics_rgb.width || rgb.height() != calib.intrinsics_rgb.height))
    throw std::invalid_argument("build_view: rgb image size does not match calibration");
  if (opts.levels < 1) throw std::invalid_argument("build_view: levels must be >= 1");

  View v;
  v.calib = calib;
  v.depth_raw = rawDepth;

  v.depth_m = Image<float>(rawDepth.width(), rawDepth.height(), kInvalidDepth);
  for (int y = 0; y < rawDepth.height(); ++y)
    for (int x = 0; x < rawDepth.width(); ++x) {
      const std::uint16_t raw = rawDepth(x, y);
      if (raw == 0) continue;
      const float m = calib.depth_affine.toMetres(raw);
      v.depth_m(x, y) = m > 0.f ? m : kInvalidDepth;
    }

  if (opts.bilateral) {
    // range sigma tied to the sensor quantisation step
    const float rangeSigma = 10.f * std::abs(calib.depth_affine.scale);
    v.depth_m = bilateral_filter(v.depth_m, 2.f, rangeSigma);
  }

  if (!rgb.empty()) {
    v.rgb = rgb;
    v.intensity = rgb_to_intensity(rgb);
  }

  v.normals = compute_normals(v.depth_m, calib.intrinsics_d);

  v.pyramid.resize(opts.levels);
  v.pyramid[0].depth = v.depth_m;
  v.pyramid[0].intensity = v.intensity;
  v.pyramid[0].intr = calib.intrinsics_d;
  for (int l = 1; l < opts.levels; ++l) {
    v.pyramid[l].depth = downsample_depth(v.pyramid[l - 1].depth);
    if (!v.intensity.empty()) v.pyramid[l].intensity = downsample_intensity(v.pyramid[l - 1].intensity);
    v.pyramid[l].intr = calib.intrinsics_d.atLevel(l);
  }
  return v;
}

}  // namespace rf
