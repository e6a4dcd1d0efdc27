#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cardio/mesh.hpp"

namespace cardio {

/// Legacy ASCII VTK unstructured grid (cell type 12) with named scalar point
/// fields.
void write_vtk_snapshot(const HexMesh& mesh,
                        const std::vector<std::pair<std::string, std::span<const double>>>& fields,
                        const std::string& path);

}  // namespace cardio
