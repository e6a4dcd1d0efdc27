#include "cardio/mesh.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace cardio {

namespace {

constexpr char kBinaryMagic[8] = {'C', 'A', 'M', 'E', 'S', 'H', '0', '1'};
constexpr char kTextMagic[] = "cardio-mesh-text";
constexpr std::uint32_t kFileVersion = 1;

// reference vertex signs, bottom quad counterclockwise then top
constexpr double kRef[8][3] = {{-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},
                               {-1, -1, 1},  {1, -1, 1},  {1, 1, 1},  {-1, 1, 1}};

double det3(const double j[3][3]) {
  return j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) -
         j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0]) +
         j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
}

}  // namespace

double FiberFrame::orthonormality_defect() const {
  double d = 0.0;
  d = std::max(d, std::abs(a_l.norm() - 1.0));
  d = std::max(d, std::abs(a_t.norm() - 1.0));
  d = std::max(d, std::abs(a_n.norm() - 1.0));
  d = std::max(d, std::abs(a_l.dot(a_t)));
  d = std::max(d, std::abs(a_l.dot(a_n)));
  d = std::max(d, std::abs(a_t.dot(a_n)));
  return d;
}

void EllipsoidParams::validate() const {
  if (!(a1 > 0 && a2 > a1)) throw std::invalid_argument("ellipsoid: need a2 > a1 > 0");
  if (!(b1 > 0 && b2 > b1)) throw std::invalid_argument("ellipsoid: need b2 > b1 > 0");
  if (!(c1 > 0 && c2 > c1)) throw std::invalid_argument("ellipsoid: need c2 > c1 > 0");
  if (!(theta_max > theta_min)) throw std::invalid_argument("ellipsoid: need theta_max > theta_min");
  if (!(phi_max > phi_min)) throw std::invalid_argument("ellipsoid: need phi_max > phi_min");
}

std::array<double, 3> hex_gauss_point(int g) {
  const double q = 1.0 / std::sqrt(3.0);
  return {kRef[g][0] * q, kRef[g][1] * q, kRef[g][2] * q};
}

double hex_shape_value(int a, const std::array<double, 3>& xi) {
  return 0.125 * (1.0 + kRef[a][0] * xi[0]) * (1.0 + kRef[a][1] * xi[1]) *
         (1.0 + kRef[a][2] * xi[2]);
}

std::array<double, 3> hex_shape_gradient(int a, const std::array<double, 3>& xi) {
  return {0.125 * kRef[a][0] * (1.0 + kRef[a][1] * xi[1]) * (1.0 + kRef[a][2] * xi[2]),
          0.125 * kRef[a][1] * (1.0 + kRef[a][0] * xi[0]) * (1.0 + kRef[a][2] * xi[2]),
          0.125 * kRef[a][2] * (1.0 + kRef[a][0] * xi[0]) * (1.0 + kRef[a][1] * xi[1])};
}

std::array<Vec3, 8> HexMesh::element_corners(std::size_t e) const {
  std::array<Vec3, 8> c;
  for (int a = 0; a < 8; ++a) c[a] = nodes[elements[e][a]];
  return c;
}

double HexMesh::jacobian_det(std::size_t e, int gauss_point) const {
  const auto corners = element_corners(e);
  const auto xi = hex_gauss_point(gauss_point);
  double j[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  for (int a = 0; a < 8; ++a) {
    const auto g = hex_shape_gradient(a, xi);
    j[0][0] += corners[a].x * g[0];
    j[0][1] += corners[a].x * g[1];
    j[0][2] += corners[a].x * g[2];
    j[1][0] += corners[a].y * g[0];
    j[1][1] += corners[a].y * g[1];
    j[1][2] += corners[a].y * g[2];
    j[2][0] += corners[a].z * g[0];
    j[2][1] += corners[a].z * g[1];
    j[2][2] += corners[a].z * g[2];
  }
  return det3(j);
}

double HexMesh::volume() const {
  double v = 0.0;
  for (std::size_t e = 0; e < elements.size(); ++e)
    for (int g = 0; g < 8; ++g) v += std::abs(jacobian_det(e, g));
  return v;
}

void HexMesh::validate() const {
  const std::int32_t n = static_cast<std::int32_t>(nodes.size());
  if (element_fibers.size() != elements.size())
    throw std::invalid_argument("mesh: element_fibers size mismatch");
  for (std::size_t e = 0; e < elements.size(); ++e) {
    const auto& el = elements[e];
    for (int a = 0; a < 8; ++a) {
      if (el[a] < 0 || el[a] >= n)
        throw std::invalid_argument("mesh: element " + std::to_string(e) +
                                    " references node " + std::to_string(el[a]) +
                                    " out of range");
      for (int b = a + 1; b < 8; ++b)
        if (el[a] == el[b])
          throw std::invalid_argument("mesh: element " + std::to_string(e) +
                                      " has duplicate vertices");
    }
    for (int g = 0; g < 8; ++g) {
      const double det = jacobian_det(e, g);
      if (!(det > 0.0))
        throw GeometryError("mesh: element " + std::to_string(e) +
                            " has non-positive Jacobian (" + std::to_string(det) +
                            ") at Gauss point " + std::to_string(g));
    }
  }
}

namespace {

// Shared lattice -> mesh wiring for both structured generators.
void build_lattice_elements(HexMesh& mesh, int n1, int n2, int n3) {
  const auto node_id = [&](int i, int j, int k) {
    return static_cast<std::int32_t>(i + (n1 + 1) * (j + static_cast<std::int64_t>(n2 + 1) * k));
  };
  mesh.elements.reserve(static_cast<std::size_t>(n1) * n2 * n3);
  for (int k = 0; k < n3; ++k)
    for (int j = 0; j < n2; ++j)
      for (int i = 0; i < n1; ++i)
        mesh.elements.push_back({node_id(i, j, k), node_id(i + 1, j, k), node_id(i + 1, j + 1, k),
                                 node_id(i, j + 1, k), node_id(i, j, k + 1), node_id(i + 1, j, k + 1),
                                 node_id(i + 1, j + 1, k + 1), node_id(i, j + 1, k + 1)});
}

struct LatticeIndex {
  int i, j, k;
};

LatticeIndex element_lattice_index(const MeshInfo& info, std::size_t e) {
  const int n1 = info.cells[0], n2 = info.cells[1];
  const int i = static_cast<int>(e % n1);
  const int j = static_cast<int>((e / n1) % n2);
  const int k = static_cast<int>(e / (static_cast<std::size_t>(n1) * n2));
  return {i, j, k};
}

}  // namespace

HexMesh generate_box_mesh(const std::array<double, 3>& lengths, const std::array<int, 3>& n) {
  for (double l : lengths)
    if (!(l > 0.0)) throw std::invalid_argument("box mesh: lengths must be positive");
  for (int c : n)
    if (c < 1) throw std::invalid_argument("box mesh: counts must be >= 1");

  HexMesh mesh;
  mesh.info.kind = MeshKind::Box;
  mesh.info.box_lengths = lengths;
  mesh.info.cells = n;

  mesh.nodes.reserve(static_cast<std::size_t>(n[0] + 1) * (n[1] + 1) * (n[2] + 1));
  for (int k = 0; k <= n[2]; ++k)
    for (int j = 0; j <= n[1]; ++j)
      for (int i = 0; i <= n[0]; ++i)
        mesh.nodes.push_back({lengths[0] * i / n[0], lengths[1] * j / n[1], lengths[2] * k / n[2]});

  build_lattice_elements(mesh, n[0], n[1], n[2]);
  assign_fibers(mesh, 0.0, 0.0);  // default frame = global axes
  mesh.validate();
  return mesh;
}

HexMesh generate_ellipsoid_mesh(const EllipsoidParams& params, int n_theta, int n_phi, int n_r) {
  params.validate();
  if (n_theta < 1 || n_phi < 1 || n_r < 1)
    throw std::invalid_argument("ellipsoid mesh: counts must be >= 1");

  HexMesh mesh;
  mesh.info.kind = MeshKind::Ellipsoid;
  mesh.info.ellipsoid = params;
  mesh.info.cells = {n_theta, n_phi, n_r};

  const double dtheta = (params.theta_max - params.theta_min) / n_theta;
  const double dphi = (params.phi_max - params.phi_min) / n_phi;
  mesh.nodes.reserve(static_cast<std::size_t>(n_theta + 1) * (n_phi + 1) * (n_r + 1));
  for (int k = 0; k <= n_r; ++k) {
    const double r = static_cast<double>(k) / n_r;
    const double a = params.a1 + r * (params.a2 - params.a1);
    const double b = params.b1 + r * (params.b2 - params.b1);
    const double c = params.c1 + r * (params.c2 - params.c1);
    for (int j = 0; j <= n_phi; ++j) {
      const double phi = params.phi_min + j * dphi;
      for (int i = 0; i <= n_theta; ++i) {
        const double theta = params.theta_min + i * dtheta;
        mesh.nodes.push_back({a * std::cos(phi) * std::cos(theta),
                              b * std::cos(phi) * std::sin(theta), c * std::sin(phi)});
      }
    }
  }

  build_lattice_elements(mesh, n_theta, n_phi, n_r);
  assign_fibers(mesh, 60.0 * M_PI / 180.0, -60.0 * M_PI / 180.0);
  mesh.validate();
  return mesh;
}

void assign_fibers(HexMesh& mesh, double endo_angle, double epi_angle) {
  if (mesh.info.kind == MeshKind::External || mesh.info.cells[0] < 1)
    throw std::invalid_argument(
        "assign_fibers: mesh carries no transmural parameter (not a structured box/ellipsoid "
        "mesh)");

  mesh.element_fibers.resize(mesh.elements.size());
  const auto& info = mesh.info;
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const auto [i, j, k] = element_lattice_index(info, e);
    const double r = (k + 0.5) / info.cells[2];

    Vec3 circ, normal;
    if (info.kind == MeshKind::Box) {
      circ = {1, 0, 0};
      normal = {0, 0, 1};
    } else {
      const auto& p = info.ellipsoid;
      const double theta = p.theta_min + (i + 0.5) * (p.theta_max - p.theta_min) / info.cells[0];
      const double phi = p.phi_min + (j + 0.5) * (p.phi_max - p.phi_min) / info.cells[1];
      const double a = p.a1 + r * (p.a2 - p.a1);
      const double b = p.b1 + r * (p.b2 - p.b1);
      const double c = p.c1 + r * (p.c2 - p.c1);
      const Vec3 d_theta{-a * std::cos(phi) * std::sin(theta), b * std::cos(phi) * std::cos(theta),
                         0.0};
      const Vec3 d_phi{-a * std::sin(phi) * std::cos(theta), -b * std::sin(phi) * std::sin(theta),
                       c * std::cos(phi)};
      const Vec3 d_r{(p.a2 - p.a1) * std::cos(phi) * std::cos(theta),
                     (p.b2 - p.b1) * std::cos(phi) * std::sin(theta),
                     (p.c2 - p.c1) * std::sin(phi)};
      circ = d_theta.normalized();
      Vec3 n_raw = d_theta.cross(d_phi);
      if (n_raw.dot(d_r) < 0.0) n_raw = n_raw * -1.0;
      normal = n_raw.normalized();
    }

    const Vec3 up = normal.cross(circ);  // unit: normal orthogonal to circ by construction
    const double alpha = endo_angle * (1.0 - r) + epi_angle * r;
    FiberFrame f;
    f.a_l = circ * std::cos(alpha) + up * std::sin(alpha);
    f.a_n = normal;
    f.a_t = f.a_n.cross(f.a_l);
    mesh.element_fibers[e] = f;
  }
}

// --- file I/O --------------------------------------------------------------

namespace {

void write_raw(std::ofstream& out, const void* p, std::size_t n) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void read_raw(std::ifstream& in, void* p, std::size_t n, const std::string& what) {
  in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n)
    throw MeshIoError("mesh file truncated while reading " + what);
}

void save_mesh_binary(const HexMesh& mesh, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MeshIoError("cannot open for writing: " + path);
  write_raw(out, kBinaryMagic, 8);
  const std::uint32_t version = kFileVersion;
  const std::uint32_t kind = static_cast<std::uint32_t>(mesh.info.kind);
  write_raw(out, &version, 4);
  write_raw(out, &kind, 4);
  const auto& p = mesh.info.ellipsoid;
  const double params[10] = {p.a1, p.a2, p.b1, p.b2, p.c1, p.c2, p.theta_min, p.theta_max,
                             p.phi_min, p.phi_max};
  write_raw(out, params, sizeof params);
  write_raw(out, mesh.info.box_lengths.data(), 3 * sizeof(double));
  const std::int32_t cells[3] = {mesh.info.cells[0], mesh.info.cells[1], mesh.info.cells[2]};
  write_raw(out, cells, sizeof cells);
  const std::uint64_t nn = mesh.nodes.size(), ne = mesh.elements.size();
  write_raw(out, &nn, 8);
  write_raw(out, &ne, 8);
  write_raw(out, mesh.nodes.data(), nn * sizeof(Vec3));
  write_raw(out, mesh.elements.data(), ne * 8 * sizeof(std::int32_t));
  write_raw(out, mesh.element_fibers.data(), ne * sizeof(FiberFrame));
  if (!out) throw MeshIoError("write failed: " + path);
}

HexMesh load_mesh_binary(std::ifstream& in) {
  HexMesh mesh;
  std::uint32_t version = 0, kind = 0;
  read_raw(in, &version, 4, "version");
  if (version != kFileVersion)
    throw MeshIoError("mesh file version " + std::to_string(version) + " not supported (expected " +
                      std::to_string(kFileVersion) + ")");
  read_raw(in, &kind, 4, "kind");
  if (kind > 2) throw MeshIoError("mesh file: unknown kind " + std::to_string(kind));
  mesh.info.kind = static_cast<MeshKind>(kind);
  double params[10];
  read_raw(in, params, sizeof params, "parameters");
  auto& p = mesh.info.ellipsoid;
  p.a1 = params[0];
  p.a2 = params[1];
  p.b1 = params[2];
  p.b2 = params[3];
  p.c1 = params[4];
  p.c2 = params[5];
  p.theta_min = params[6];
  p.theta_max = params[7];
  p.phi_min = params[8];
  p.phi_max = params[9];
  read_raw(in, mesh.info.box_lengths.data(), 3 * sizeof(double), "box lengths");
  std::int32_t cells[3];
  read_raw(in, cells, sizeof cells, "cells");
  mesh.info.cells = {cells[0], cells[1], cells[2]};
  std::uint64_t nn = 0, ne = 0;
  read_raw(in, &nn, 8, "node count");
  read_raw(in, &ne, 8, "element count");
  mesh.nodes.resize(nn);
  mesh.elements.resize(ne);
  mesh.element_fibers.resize(ne);
  read_raw(in, mesh.nodes.data(), nn * sizeof(Vec3), "node coordinates");
  read_raw(in, mesh.elements.data(), ne * 8 * sizeof(std::int32_t), "element connectivity");
  read_raw(in, mesh.element_fibers.data(), ne * sizeof(FiberFrame), "fiber frames");
  return mesh;
}

void save_mesh_text(const HexMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MeshIoError("cannot open for writing: " + path);
  char buf[256];
  out << kTextMagic << " " << kFileVersion << "\n";
  const char* kind_name = mesh.info.kind == MeshKind::Box ? "box"
                          : mesh.info.kind == MeshKind::Ellipsoid ? "ellipsoid"
                                                                  : "external";
  out << "kind " << kind_name << "\n";
  const auto& p = mesh.info.ellipsoid;
  std::snprintf(buf, sizeof buf,
                "ellipsoid %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n", p.a1,
                p.a2, p.b1, p.b2, p.c1, p.c2, p.theta_min, p.theta_max, p.phi_min, p.phi_max);
  out << buf;
  std::snprintf(buf, sizeof buf, "box %.17g %.17g %.17g\n", mesh.info.box_lengths[0],
                mesh.info.box_lengths[1], mesh.info.box_lengths[2]);
  out << buf;
  out << "cells " << mesh.info.cells[0] << " " << mesh.info.cells[1] << " " << mesh.info.cells[2]
      << "\n";
  out << "nodes " << mesh.nodes.size() << "\n";
  for (const Vec3& v : mesh.nodes) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", v.x, v.y, v.z);
    out << buf;
  }
  out << "elements " << mesh.elements.size() << "\n";
  for (const auto& el : mesh.elements) {
    out << el[0];
    for (int a = 1; a < 8; ++a) out << " " << el[a];
    out << "\n";
  }
  out << "fibers " << mesh.element_fibers.size() << "\n";
  for (const FiberFrame& f : mesh.element_fibers) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n",
                  f.a_l.x, f.a_l.y, f.a_l.z, f.a_t.x, f.a_t.y, f.a_t.z, f.a_n.x, f.a_n.y, f.a_n.z);
    out << buf;
  }
  out << "end\n";
  if (!out) throw MeshIoError("write failed: " + path);
}

class TextReader {
 public:
  explicit TextReader(std::ifstream& in) : in_(in) {}

  std::istringstream next_line(const std::string& what) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line[0] != '#') return std::istringstream(line);
    }
    throw MeshIoError("mesh text file truncated: expected " + what + " after line " +
                      std::to_string(line_no_));
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw MeshIoError("mesh text file parse error at line " + std::to_string(line_no_) + ": " +
                      what);
  }

  int line_no() const { return line_no_; }

 private:
  std::ifstream& in_;
  int line_no_ = 0;
};

HexMesh load_mesh_text(std::ifstream& in) {
  TextReader reader(in);
  HexMesh mesh;
  {
    auto l = reader.next_line("header");
    std::string magic;
    std::uint32_t version = 0;
    if (!(l >> magic >> version) || magic != kTextMagic) reader.fail("bad header");
    if (version != kFileVersion)
      throw MeshIoError("mesh file version " + std::to_string(version) + " not supported");
  }
  {
    auto l = reader.next_line("kind");
    std::string key, kind;
    if (!(l >> key >> kind) || key != "kind") reader.fail("expected 'kind'");
    if (kind == "box")
      mesh.info.kind = MeshKind::Box;
    else if (kind == "ellipsoid")
      mesh.info.kind = MeshKind::Ellipsoid;
    else if (kind == "external")
      mesh.info.kind = MeshKind::External;
    else
      reader.fail("unknown mesh kind '" + kind + "'");
  }
  {
    auto l = reader.next_line("ellipsoid parameters");
    std::string key;
    auto& p = mesh.info.ellipsoid;
    if (!(l >> key >> p.a1 >> p.a2 >> p.b1 >> p.b2 >> p.c1 >> p.c2 >> p.theta_min >> p.theta_max >>
          p.phi_min >> p.phi_max) ||
        key != "ellipsoid")
      reader.fail("expected 'ellipsoid' parameter line");
  }
  {
    auto l = reader.next_line("box lengths");
    std::string key;
    if (!(l >> key >> mesh.info.box_lengths[0] >> mesh.info.box_lengths[1] >>
          mesh.info.box_lengths[2]) ||
        key != "box")
      reader.fail("expected 'box' length line");
  }
  {
    auto l = reader.next_line("cells");
    std::string key;
    if (!(l >> key >> mesh.info.cells[0] >> mesh.info.cells[1] >> mesh.info.cells[2]) ||
        key != "cells")
      reader.fail("expected 'cells' line");
  }
  std::size_t nn = 0, ne = 0;
  {
    auto l = reader.next_line("node count");
    std::string key;
    if (!(l >> key >> nn) || key != "nodes") reader.fail("expected 'nodes N'");
  }
  mesh.nodes.resize(nn);
  for (std::size_t i = 0; i < nn; ++i) {
    auto l = reader.next_line("node coordinates");
    if (!(l >> mesh.nodes[i].x >> mesh.nodes[i].y >> mesh.nodes[i].z))
      reader.fail("bad node coordinate line");
  }
  {
    auto l = reader.next_line("element count");
    std::string key;
    if (!(l >> key >> ne) || key != "elements") reader.fail("expected 'elements M'");
  }
  mesh.elements.resize(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    auto l = reader.next_line("element connectivity");
    for (int a = 0; a < 8; ++a)
      if (!(l >> mesh.elements[e][a])) reader.fail("bad element connectivity line");
  }
  {
    auto l = reader.next_line("fiber count");
    std::string key;
    std::size_t nf = 0;
    if (!(l >> key >> nf) || key != "fibers" || nf != ne) reader.fail("expected 'fibers M'");
  }
  mesh.element_fibers.resize(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    auto l = reader.next_line("fiber frame");
    FiberFrame& f = mesh.element_fibers[e];
    if (!(l >> f.a_l.x >> f.a_l.y >> f.a_l.z >> f.a_t.x >> f.a_t.y >> f.a_t.z >> f.a_n.x >>
          f.a_n.y >> f.a_n.z))
      reader.fail("bad fiber frame line");
  }
  {
    auto l = reader.next_line("end marker");
    std::string key;
    if (!(l >> key) || key != "end") reader.fail("expected 'end'");
  }
  return mesh;
}

}  // namespace

void save_mesh(const HexMesh& mesh, const std::string& path, MeshFileFormat format) {
  if (format == MeshFileFormat::Binary)
    save_mesh_binary(mesh, path);
  else
    save_mesh_text(mesh, path);
}

HexMesh load_mesh(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MeshIoError("cannot open: " + path);
  char magic[8] = {};
  in.read(magic, 8);
  if (in.gcount() == 8 && std::memcmp(magic, kBinaryMagic, 8) == 0) {
    HexMesh mesh = load_mesh_binary(in);
    mesh.validate();
    return mesh;
  }
  in.clear();
  in.seekg(0);
  HexMesh mesh = load_mesh_text(in);
  mesh.validate();
  return mesh;
}

}  // namespace cardio
