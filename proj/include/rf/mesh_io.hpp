#pragma once

#include <string>

#include "rf/meshing.hpp"

namespace rf {

enum class MeshFormat { kObj, kStl };

void write_mesh(const Mesh& mesh, const std::string& path, MeshFormat format);

/// Minimal OBJ reader (v/f lines only), used for round-trip checks.
Mesh read_obj(const std::string& path);

}  // namespace rf
