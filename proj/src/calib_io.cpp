#include "rf/calib_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace rf {

namespace {

struct TokenReader {
  std::vector<std::pair<float, int>> tokens;  // value, 1-based line number
  std::size_t next = 0;

  explicit TokenReader(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
      ++lineNo;
      std::istringstream ls(line);
      std::string tok;
      while (ls >> tok) {
        try {
          std::size_t used = 0;
          const float v = std::stof(tok, &used);
          if (used != tok.size()) throw std::invalid_argument(tok);
          tokens.emplace_back(v, lineNo);
        } catch (const std::exception&) {
          throw std::runtime_error("calibration: non-numeric token '" + tok + "' on line " + std::to_string(lineNo));
        }
      }
    }
  }

  float take(const char* section) {
    if (next >= tokens.size())
      throw std::runtime_error(std::string("calibration: truncated file, missing section: ") + section);
    return tokens[next++].first;
  }
};

Intrinsics readIntrinsics(TokenReader& r, const char* section) {
  Intrinsics i;
  i.width = static_cast<int>(r.take(section));
  i.height = static_cast<int>(r.take(section));
  i.fx = r.take(section);
  i.fy = r.take(section);
  i.cx = r.take(section);
  i.cy = r.take(section);
  return i;
}

std::string formatFloat(float v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(v));
  return buf;
}

}  // namespace

RgbdCalib parse_calibration(const std::string& text) {
  TokenReader r(text);
  RgbdCalib c;
  c.intrinsics_rgb = readIntrinsics(r, "rgb intrinsics");
  c.intrinsics_d = readIntrinsics(r, "depth intrinsics");
  Eigen::Matrix<float, 3, 4> m;
  for (int row = 0; row < 3; ++row)
    for (int col = 0; col < 4; ++col) m(row, col) = r.take("depth-to-rgb extrinsics");
  c.extrinsics_d_to_rgb = Pose::fromMatrix34(m);
  c.depth_affine.scale = r.take("depth affine");
  c.depth_affine.offset = r.take("depth affine");
  return c;
}

RgbdCalib load_calibration(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open calibration file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_calibration(ss.str());
}

std::string render_calibration(const RgbdCalib& c) {
  std::ostringstream out;
  auto intr = [&](const Intrinsics& i) {
    out << i.width << " " << i.height << "\n"
        << formatFloat(i.fx) << " " << formatFloat(i.fy) << "\n"
        << formatFloat(i.cx) << " " << formatFloat(i.cy) << "\n\n";
  };
  intr(c.intrinsics_rgb);
  intr(c.intrinsics_d);
  const auto m = c.extrinsics_d_to_rgb.matrix34();
  for (int row = 0; row < 3; ++row) {
    out << formatFloat(m(row, 0)) << " " << formatFloat(m(row, 1)) << " " << formatFloat(m(row, 2)) << " "
        << formatFloat(m(row, 3)) << "\n";
  }
  out << "\n" << formatFloat(c.depth_affine.scale) << " " << formatFloat(c.depth_affine.offset) << "\n";
  return out.str();
}

void save_calibration(const RgbdCalib& calib, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write calibration file: " + path);
  out << render_calibration(calib);
}

}  // namespace rf
