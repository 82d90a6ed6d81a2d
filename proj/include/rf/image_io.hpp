#pragma once

#include <optional>
#include <string>

#include "rf/image.hpp"

namespace rf {

/// Binary PPM (P6, maxval 255).
void write_ppm(const Image<Rgb8>& img, const std::string& path);
Image<Rgb8> read_ppm(const std::string& path);

/// Binary PGM (P5); depth uses maxval 65535, stored big-endian per Netpbm.
void write_pgm16(const Image<std::uint16_t>& img, const std::string& path);
Image<std::uint16_t> read_pgm16(const std::string& path);

struct RawFrame {
  Image<std::uint16_t> depth;
  Image<Rgb8> rgb;  // empty when the ppm is absent
  int index = 0;
};

/// Frame streams are printf-style path templates without an extension;
/// frame i is read from <pattern%i>.pgm (depth, required) and
/// <pattern%i>.ppm (colour, optional). The stream ends at the first
/// missing depth file.
class ImageStream {
 public:
  ImageStream(const std::string& patternNoExt, int startIndex);

  std::optional<RawFrame> next();
  int nextIndex() const { return index_; }

 private:
  std::string pattern_;
  int index_;
};

}  // namespace rf
