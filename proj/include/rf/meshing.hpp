#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <vector>

#include "rf/voxel_block_map.hpp"

namespace rf {

struct Mesh {
  std::vector<Eigen::Vector3f> vertices;                 // metres
  std::vector<std::array<std::uint32_t, 3>> triangles;   // indices, normals toward positive sdf
};

/// Marching cubes over the allocated blocks of the map. Cells with any
/// unobserved corner (unallocated block or zero integration weight) are
/// skipped; vertices lie on cell edges by linear interpolation between
/// voxel centres.
Mesh extract_mesh(const VoxelBlockMap& map, float voxelSize);

namespace detail {
/// Per-case triangulation: triples of cell-edge indices (0..11), built once
/// by pairing crossed edges around each face and fanning the cycles.
const std::array<std::vector<std::array<int, 3>>, 256>& marchingCubesTable();
}  // namespace detail

}  // namespace rf
