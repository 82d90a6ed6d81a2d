#include "rf/mesh_io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rf {

namespace {

void writeObj(const Mesh& mesh, std::ostream& out) {
  char buf[128];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "v %.9g %.9g %.9g\n", double(v.x()), double(v.y()), double(v.z()));
    out << buf;
  }
  for (const auto& t : mesh.triangles) out << "f " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
}

void writeStl(const Mesh& mesh, std::ostream& out) {
  char header[80] = {0};
  std::strncpy(header, "binary stl", sizeof(header) - 1);
  out.write(header, 80);
  const auto n = static_cast<std::uint32_t>(mesh.triangles.size());
  out.write(reinterpret_cast<const char*>(&n), 4);
  for (const auto& t : mesh.triangles) {
    const Eigen::Vector3f &a = mesh.vertices[t[0]], &b = mesh.vertices[t[1]], &c = mesh.vertices[t[2]];
    Eigen::Vector3f normal = (b - a).cross(c - a);
    const float len = normal.norm();
    if (len > 1e-20f) normal /= len;
    float rec[12] = {normal.x(), normal.y(), normal.z(), a.x(), a.y(), a.z(),
                     b.x(),      b.y(),      b.z(),      c.x(), c.y(), c.z()};
    out.write(reinterpret_cast<const char*>(rec), sizeof(rec));
    const std::uint16_t attr = 0;
    out.write(reinterpret_cast<const char*>(&attr), 2);
  }
}

}  // namespace

void write_mesh(const Mesh& mesh, const std::string& path, MeshFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write mesh file: " + path);
  if (format == MeshFormat::kObj)
    writeObj(mesh, out);
  else
    writeStl(mesh, out);
  if (!out) throw std::runtime_error("short write: " + path);
}

Mesh read_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mesh file: " + path);
  Mesh mesh;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      Eigen::Vector3f v;
      ls >> v.x() >> v.y() >> v.z();
      mesh.vertices.push_back(v);
    } else if (tag == "f") {
      std::array<std::uint32_t, 3> t{};
      for (auto& i : t) {
        std::string tok;
        ls >> tok;
        i = static_cast<std::uint32_t>(std::stoul(tok.substr(0, tok.find('/')))) - 1;
      }
      mesh.triangles.push_back(t);
    }
  }
  return mesh;
}

}  // namespace rf
