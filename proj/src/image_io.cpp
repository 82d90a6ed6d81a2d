#include "rf/image_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace rf {

namespace {

// Netpbm header token: skips whitespace and '#' comment lines.
std::string pnmToken(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (!std::isspace(c)) {
      tok.push_back(static_cast<char>(c));
      break;
    }
  }
  while ((c = in.get()) != EOF && !std::isspace(c)) tok.push_back(static_cast<char>(c));
  if (tok.empty()) throw std::runtime_error("pnm: unexpected end of header");
  return tok;
}

int pnmInt(std::istream& in) { return std::stoi(pnmToken(in)); }

std::string instantiate(const std::string& pattern, int index) {
  char buf[1024];
  std::snprintf(buf, sizeof(buf), pattern.c_str(), index);
  return buf;
}

}  // namespace

void write_ppm(const Image<Rgb8>& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "P6\n" << img.width() << " " << img.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data()), std::streamsize(img.size() * 3));
  if (!out) throw std::runtime_error("short write: " + path);
}

Image<Rgb8> read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  if (pnmToken(in) != "P6") throw std::runtime_error("not a binary PPM (P6): " + path);
  const int w = pnmInt(in), h = pnmInt(in), maxval = pnmInt(in);
  if (maxval != 255) throw std::runtime_error("unsupported PPM maxval (want 255): " + path);
  Image<Rgb8> img(w, h);
  in.read(reinterpret_cast<char*>(img.data()), std::streamsize(img.size() * 3));
  if (in.gcount() != std::streamsize(img.size() * 3)) throw std::runtime_error("truncated PPM: " + path);
  return img;
}

void write_pgm16(const Image<std::uint16_t>& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "P5\n" << img.width() << " " << img.height() << "\n65535\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(img.width()) * 2);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const std::uint16_t v = img(x, y);
      row[2 * x] = static_cast<unsigned char>(v >> 8);  // big-endian
      row[2 * x + 1] = static_cast<unsigned char>(v & 0xFF);
    }
    out.write(reinterpret_cast<const char*>(row.data()), std::streamsize(row.size()));
  }
  if (!out) throw std::runtime_error("short write: " + path);
}

Image<std::uint16_t> read_pgm16(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  if (pnmToken(in) != "P5") throw std::runtime_error("not a binary PGM (P5): " + path);
  const int w = pnmInt(in), h = pnmInt(in), maxval = pnmInt(in);
  if (maxval != 65535) throw std::runtime_error("unsupported PGM maxval (want 65535): " + path);
  Image<std::uint16_t> img(w, h);
  std::vector<unsigned char> row(static_cast<std::size_t>(w) * 2);
  for (int y = 0; y < h; ++y) {
    in.read(reinterpret_cast<char*>(row.data()), std::streamsize(row.size()));
    if (in.gcount() != std::streamsize(row.size())) throw std::runtime_error("truncated PGM: " + path);
    for (int x = 0; x < w; ++x)
      img(x, y) = static_cast<std::uint16_t>((row[2 * x] << 8) | row[2 * x + 1]);
  }
  return img;
}

ImageStream::ImageStream(const std::string& patternNoExt, int startIndex)
    : pattern_(patternNoExt), index_(startIndex) {}

std::optional<RawFrame> ImageStream::next() {
  const std::string base = instantiate(pattern_, index_);
  const std::string depthPath = base + ".pgm";
  if (!std::filesystem::exists(depthPath)) return std::nullopt;
  RawFrame f;
  f.index = index_;
  f.depth = read_pgm16(depthPath);
  const std::string rgbPath = base + ".ppm";
  if (std::filesystem::exists(rgbPath)) f.rgb = read_ppm(rgbPath);
  ++index_;
  return f;
}

}  // namespace rf
