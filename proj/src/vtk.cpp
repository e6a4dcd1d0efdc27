#include "cardio/vtk.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace cardio {

void write_vtk_snapshot(const HexMesh& mesh,
                        const std::vector<std::pair<std::string, std::span<const double>>>& fields,
                        const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);

  out << "# vtk DataFile Version 3.0\n";
  out << "bidomain snapshot\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";

  char buf[128];
  out << "POINTS " << mesh.n_nodes() << " double\n";
  for (const Vec3& p : mesh.nodes) {
    std::snprintf(buf, sizeof buf, "%.9g %.9g %.9g\n", p.x, p.y, p.z);
    out << buf;
  }

  out << "CELLS " << mesh.n_elements() << " " << 9 * mesh.n_elements() << "\n";
  for (const auto& el : mesh.elements) {
    out << 8;
    for (int a = 0; a < 8; ++a) out << " " << el[a];
    out << "\n";
  }
  out << "CELL_TYPES " << mesh.n_elements() << "\n";
  for (std::size_t e = 0; e < mesh.n_elements(); ++e) out << "12\n";

  if (!fields.empty()) {
    out << "POINT_DATA " << mesh.n_nodes() << "\n";
    for (const auto& [name, values] : fields) {
      if (values.size() != mesh.n_nodes())
        throw std::invalid_argument("vtk field '" + name + "' has wrong length");
      out << "SCALARS " << name << " double 1\n";
      out << "LOOKUP_TABLE default\n";
      for (double v : values) {
        std::snprintf(buf, sizeof buf, "%.9g\n", v);
        out << buf;
      }
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace cardio
