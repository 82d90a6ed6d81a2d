#include "rf/meshing.hpp"

#include <cmath>
#include <unordered_map>

namespace rf {

namespace detail {

namespace {

// Corner numbering: v0..v3 on z=0 ccw, v4..v7 above them.
constexpr int kCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                               {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};

constexpr int kEdge[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
                              {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};

// Faces as corner loops.
constexpr int kFace[6][4] = {{0, 1, 2, 3}, {4, 5, 6, 7}, {0, 1, 5, 4},
                             {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7}};

int edgeBetween(int a, int b) {
  for (int e = 0; e < 12; ++e)
    if ((kEdge[e][0] == a && kEdge[e][1] == b) || (kEdge[e][0] == b && kEdge[e][1] == a)) return e;
  return -1;
}

std::array<std::vector<std::array<int, 3>>, 256> buildTable() {
  std::array<std::vector<std::array<int, 3>>, 256> table;

  for (int mask = 0; mask < 256; ++mask) {
    auto inside = [&](int c) { return (mask >> c) & 1; };
    auto crossed = [&](int e) { return inside(kEdge[e][0]) != inside(kEdge[e][1]); };

    // Pair crossed edges per face. Each crossed edge lies on two faces, so
    // the pairings chain into closed cycles. Ambiguous faces (4 crossings)
    // are resolved by pairing the two edges adjacent to each inside corner;
    // the rule depends only on the face's sign pattern, so the two cells
    // sharing a face always agree and the mesh stays watertight.
    std::vector<std::array<int, 2>> partner(12, {-1, -1});  // up to two partners per edge
    auto link = [&](int e1, int e2) {
      for (int s = 0; s < 2; ++s)
        if (partner[e1][s] < 0) {
          partner[e1][s] = e2;
          break;
        }
      for (int s = 0; s < 2; ++s)
        if (partner[e2][s] < 0) {
          partner[e2][s] = e1;
          break;
        }
    };

    for (const auto& face : kFace) {
      int faceEdges[4];
      int nCrossed = 0;
      int crossedEdges[4];
      for (int i = 0; i < 4; ++i) {
        faceEdges[i] = edgeBetween(face[i], face[(i + 1) % 4]);
        if (crossed(faceEdges[i])) crossedEdges[nCrossed++] = faceEdges[i];
      }
      if (nCrossed == 2) {
        link(crossedEdges[0], crossedEdges[1]);
      } else if (nCrossed == 4) {
        for (int i = 0; i < 4; ++i) {
          const int c = face[i];
          if (!inside(c)) continue;
          link(edgeBetween(face[(i + 3) % 4], c), edgeBetween(c, face[(i + 1) % 4]));
        }
      }
    }

    // Extract cycles.
    std::array<bool, 12> used{};
    for (int start = 0; start < 12; ++start) {
      if (!crossed(start) || used[start]) continue;
      std::vector<int> cycle;
      int cur = start, prev = -1;
      while (true) {
        cycle.push_back(cur);
        used[cur] = true;
        const int nxt = (partner[cur][0] != prev) ? partner[cur][0] : partner[cur][1];
        prev = cur;
        cur = nxt;
        if (cur == start) break;
      }
      if (cycle.size() < 3) continue;

      // Orient so triangle normals point from inside (sdf<0) to outside.
      auto edgeMid = [&](int e) {
        Eigen::Vector3f a(kCorner[kEdge[e][0]][0], kCorner[kEdge[e][0]][1], kCorner[kEdge[e][0]][2]);
        Eigen::Vector3f b(kCorner[kEdge[e][1]][0], kCorner[kEdge[e][1]][1], kCorner[kEdge[e][1]][2]);
        return Eigen::Vector3f(0.5f * (a + b));
      };
      Eigen::Vector3f newell = Eigen::Vector3f::Zero();
      for (std::size_t i = 0; i < cycle.size(); ++i) {
        const Eigen::Vector3f a = edgeMid(cycle[i]);
        const Eigen::Vector3f b = edgeMid(cycle[(i + 1) % cycle.size()]);
        newell += a.cross(b);
      }
      // Per-cycle inside->outside direction: every crossed edge joins one
      // inside and one outside corner, and that direction is the local
      // field gradient (toward positive sdf).
      Eigen::Vector3f ref = Eigen::Vector3f::Zero();
      for (int e : cycle) {
        const int a = kEdge[e][0], b = kEdge[e][1];
        const int in = inside(a) ? a : b;
        const int out = inside(a) ? b : a;
        ref += Eigen::Vector3f(kCorner[out][0] - kCorner[in][0], kCorner[out][1] - kCorner[in][1],
                               kCorner[out][2] - kCorner[in][2]);
      }
      if (ref.squaredNorm() > 1e-12f && newell.dot(ref) < 0.f) std::reverse(cycle.begin(), cycle.end());

      for (std::size_t i = 1; i + 1 < cycle.size(); ++i)
        table[mask].push_back({cycle[0], cycle[i], cycle[i + 1]});
    }
  }
  return table;
}

}  // namespace

const std::array<std::vector<std::array<int, 3>>, 256>& marchingCubesTable() {
  static const auto table = buildTable();
  return table;
}

}  // namespace detail

namespace {

// A cell edge is a unit lattice edge: lower endpoint + axis.
std::uint64_t edgeKey(const Eigen::Vector3i& lo, int axis) {
  constexpr std::int64_t kBias = 1 << 19;
  const std::uint64_t x = static_cast<std::uint64_t>(lo.x() + kBias) & 0xFFFFF;
  const std::uint64_t y = static_cast<std::uint64_t>(lo.y() + kBias) & 0xFFFFF;
  const std::uint64_t z = static_cast<std::uint64_t>(lo.z() + kBias) & 0xFFFFF;
  return (((x << 20) | y) << 20 | z) << 2 | static_cast<std::uint64_t>(axis);
}

}  // namespace

Mesh extract_mesh(const VoxelBlockMap& map, float voxelSize) {
  using detail::marchingCubesTable;
  const auto& table = marchingCubesTable();

  constexpr int kCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                 {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
  constexpr int kEdge[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
                                {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};

  Mesh mesh;
  std::unordered_map<std::uint64_t, std::uint32_t> vertexOfEdge;
  BlockCache cache;

  for (std::uint32_t idx = 0; idx < map.totalEntries(); ++idx) {
    const HashEntry& e = map.entry(static_cast<int>(idx));
    if (!e.inMemory()) continue;
    const Eigen::Vector3i blockOrigin = e.pos * kBlockSize;

    for (int lz = 0; lz < kBlockSize; ++lz) {
      for (int ly = 0; ly < kBlockSize; ++ly) {
        for (int lx = 0; lx < kBlockSize; ++lx) {
          const Eigen::Vector3i cell = blockOrigin + Eigen::Vector3i(lx, ly, lz);

          float sdf[8];
          bool observed = true;
          for (int c = 0; c < 8 && observed; ++c) {
            const Eigen::Vector3i vc = cell + Eigen::Vector3i(kCorner[c][0], kCorner[c][1], kCorner[c][2]);
            bool found = false;
            const Voxel v = map.findVoxel(vc, found, &cache);
            observed = found && v.w_depth > 0;
            sdf[c] = v.logicalSdf();
          }
          if (!observed) continue;

          int mask = 0;
          for (int c = 0; c < 8; ++c)
            if (sdf[c] < 0.f) mask |= 1 << c;
          const auto& tris = table[mask];
          if (tris.empty()) continue;

          auto vertexOnEdge = [&](int edge) -> std::uint32_t {
            const int a = kEdge[edge][0], b = kEdge[edge][1];
            Eigen::Vector3i va = cell + Eigen::Vector3i(kCorner[a][0], kCorner[a][1], kCorner[a][2]);
            Eigen::Vector3i vb = cell + Eigen::Vector3i(kCorner[b][0], kCorner[b][1], kCorner[b][2]);
            float fa = sdf[a], fb = sdf[b];
            int axis = 0;
            if (va.x() != vb.x()) axis = 0;
            else if (va.y() != vb.y()) axis = 1;
            else axis = 2;
            if (va[axis] > vb[axis]) {
              std::swap(va, vb);
              std::swap(fa, fb);
            }
            const std::uint64_t key = edgeKey(va, axis);
            auto it = vertexOfEdge.find(key);
            if (it != vertexOfEdge.end()) return it->second;
            const float denom = fa - fb;
            const float t = std::abs(denom) < 1e-12f ? 0.5f : fa / denom;
            Eigen::Vector3f p = va.cast<float>();
            p[axis] += t;
            const auto id = static_cast<std::uint32_t>(mesh.vertices.size());
            mesh.vertices.push_back(p * voxelSize);
            vertexOfEdge.emplace(key, id);
            return id;
          };

          for (const auto& tri : tris)
            mesh.triangles.push_back({vertexOnEdge(tri[0]), vertexOnEdge(tri[1]), vertexOnEdge(tri[2])});
        }
      }
    }
  }
  return mesh;
}

}  // namespace rf
