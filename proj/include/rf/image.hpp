#pragma once

#include <Eigen/Core>

#include <cassert>
#include <cstdint>
#include <vector>

namespace rf {

using Rgb8 = Eigen::Matrix<std::uint8_t, 3, 1>;

/// Row-major 2D pixel container. Cheap to copy-construct empty, movable.
template <typename T>
class Image {
 public:
  Image() = default;
  Image(int width, int height) : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height) {}
  Image(int width, int height, const T& fill)
      : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  bool contains(int x, int y) const { return x >= 0 && x < width_ && y >= 0 && y < height_; }

  T& operator()(int x, int y) {
    assert(contains(x, y));
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  const T& operator()(int x, int y) const {
    assert(contains(x, y));
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  void fill(const T& v) { std::fill(data_.begin(), data_.end(), v); }

  bool sameSize(const Image& o) const { return width_ == o.width_ && height_ == o.height_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// Bilinear sample of a float image at (x, y); no bounds check beyond the
/// 2x2 support. Caller guarantees 0 <= x <= w-2 etc. (use inInterior).
inline float sampleBilinear(const Image<float>& img, float x, float y) {
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const float fx = x - x0, fy = y - y0;
  const float v00 = img(x0, y0), v10 = img(x0 + 1, y0);
  const float v01 = img(x0, y0 + 1), v11 = img(x0 + 1, y0 + 1);
  return (1 - fy) * ((1 - fx) * v00 + fx * v10) + fy * ((1 - fx) * v01 + fx * v11);
}

inline bool inInterior(const Image<float>& img, float x, float y, float border = 0.f) {
  return x >= border && y >= border && x <= img.width() - 1 - border && y <= img.height() - 1 - border;
}

}  // namespace rf
