#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cardio/mesh.hpp"

using namespace cardio;

namespace {
const double kDeg = M_PI / 180.0;

std::filesystem::path tmp_path(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}
}  // namespace

TEST_CASE("box mesh node and element counts") {
  const HexMesh m = generate_box_mesh({1, 1, 1}, {16, 16, 16});
  CHECK(m.n_nodes() == 4913);  // (16+1)^3
  CHECK(m.n_elements() == 16 * 16 * 16);
}

TEST_CASE("single-cell box: 8 nodes, unit volume, positive Jacobians") {
  const HexMesh m = generate_box_mesh({1, 1, 1}, {1, 1, 1});
  CHECK(m.n_nodes() == 8);
  CHECK(m.n_elements() == 1);
  for (int g = 0; g < 8; ++g) CHECK(m.jacobian_det(0, g) > 0.0);
  CHECK(m.volume() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("box element edge lengths follow the requested spacing") {
  const HexMesh m = generate_box_mesh({2, 1, 1}, {2, 1, 1});
  const auto c = m.element_corners(0);
  CHECK((c[1] - c[0]).norm() == doctest::Approx(1.0).epsilon(1e-15));  // x edge
  CHECK((c[3] - c[0]).norm() == doctest::Approx(1.0).epsilon(1e-15));  // y edge
  CHECK((c[4] - c[0]).norm() == doctest::Approx(1.0).epsilon(1e-15));  // z edge
}

TEST_CASE("box quadrature volume equals the analytic volume") {
  const HexMesh m = generate_box_mesh({1.7, 0.9, 2.3}, {5, 3, 4});
  const double exact = 1.7 * 0.9 * 2.3;
  CHECK(std::abs(m.volume() - exact) <= 1e-10 * exact);
}

TEST_CASE("ellipsoid mesh reproduces the published lattice sizes") {
  const EllipsoidParams params;  // idealized LV geometry
  const HexMesh m = generate_ellipsoid_mesh(params, 32, 32, 16);
  CHECK(m.n_nodes() == 18513);           // 33*33*17
  CHECK(2 * m.n_nodes() == 37026);       // two unknowns per node
  CHECK(m.n_elements() == 32 * 32 * 16);
}

TEST_CASE("ellipsoid single-cell mesh is valid on a partial angular range") {
  EllipsoidParams p;
  p.theta_min = 0.0;
  p.theta_max = 0.25 * M_PI;
  const HexMesh m = generate_ellipsoid_mesh(p, 1, 1, 1);
  CHECK(m.n_nodes() == 8);
  CHECK(m.n_elements() == 1);
  for (int g = 0; g < 8; ++g) CHECK(m.jacobian_det(0, g) > 0.0);
}

TEST_CASE("single cell spanning the full circumference is degenerate") {
  // theta covers 2*pi, so the cell's theta ends coincide: geometry error
  CHECK_THROWS_WITH_AS(generate_ellipsoid_mesh({}, 1, 4, 1), doctest::Contains("element"),
                       GeometryError);
}

TEST_CASE("ellipsoid Jacobians are positive everywhere") {
  const HexMesh m = generate_ellipsoid_mesh({}, 12, 10, 4);
  for (std::size_t e = 0; e < m.n_elements(); ++e)
    for (int g = 0; g < 8; ++g) CHECK(m.jacobian_det(e, g) > 0.0);
}

TEST_CASE("degenerate geometry is rejected with the offending element") {
  HexMesh m = generate_box_mesh({1, 1, 1}, {2, 1, 1});
  std::swap(m.elements[1][0], m.elements[1][1]);  // invert element 1
  CHECK_THROWS_WITH_AS(m.validate(), doctest::Contains("element 1"), GeometryError);
}

TEST_CASE("invalid ellipsoid parameters are rejected") {
  EllipsoidParams p;
  p.a2 = p.a1;  // violates a2 > a1
  CHECK_THROWS_AS(generate_ellipsoid_mesh(p, 2, 2, 2), std::invalid_argument);
}

TEST_CASE("zero rotation aligns fibers with the circumferential direction") {
  HexMesh m = generate_ellipsoid_mesh({}, 8, 6, 2);
  assign_fibers(m, 0.0, 0.0);
  const auto& p = m.info.ellipsoid;
  for (std::size_t e = 0; e < m.n_elements(); ++e) {
    const int i = static_cast<int>(e % 8);
    const int j = static_cast<int>((e / 8) % 6);
    const double theta = p.theta_min + (i + 0.5) * (p.theta_max - p.theta_min) / 8;
    const double phi = p.phi_min + (j + 0.5) * (p.phi_max - p.phi_min) / 6;
    const int k = static_cast<int>(e / (8 * 6));
    const double r = (k + 0.5) / 2;
    const double a = p.a1 + r * (p.a2 - p.a1), b = p.b1 + r * (p.b2 - p.b1);
    const Vec3 circ = Vec3{-a * std::cos(phi) * std::sin(theta),
                           b * std::cos(phi) * std::cos(theta), 0.0}
                          .normalized();
    CHECK(m.element_fibers[e].a_l.dot(circ) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("symmetric endo/epi angles cancel at mid-wall") {
  HexMesh m = generate_ellipsoid_mesh({}, 6, 6, 3);  // odd n_r: middle layer sits at r = 0.5
  assign_fibers(m, 60.0 * kDeg, -60.0 * kDeg);
  HexMesh ref = m;
  assign_fibers(ref, 0.0, 0.0);
  const std::size_t layer = 6 * 6;
  for (std::size_t e = layer; e < 2 * layer; ++e) {
    // angle between unit vectors via the cross product (well conditioned at 0)
    const double s = m.element_fibers[e].a_l.cross(ref.element_fibers[e].a_l).norm();
    CHECK(s <= 1e-12);
    CHECK(m.element_fibers[e].a_l.dot(ref.element_fibers[e].a_l) > 0.0);
  }
}

TEST_CASE("fiber frames are orthonormal after any assignment") {
  HexMesh m = generate_ellipsoid_mesh({}, 9, 7, 3);
  assign_fibers(m, 77.0 * kDeg, -41.0 * kDeg);
  for (const FiberFrame& f : m.element_fibers) CHECK(f.orthonormality_defect() <= 1e-12);
  // right-handedness
  for (const FiberFrame& f : m.element_fibers)
    CHECK((f.a_l.cross(f.a_t) - f.a_n).norm() <= 1e-12);

  HexMesh b = generate_box_mesh({1, 2, 1}, {3, 3, 4});
  assign_fibers(b, 30.0 * kDeg, -45.0 * kDeg);
  for (const FiberFrame& f : b.element_fibers) CHECK(f.orthonormality_defect() <= 1e-12);
}

TEST_CASE("box default fiber frame is the global axes") {
  const HexMesh m = generate_box_mesh({1, 1, 1}, {2, 2, 2});
  for (const FiberFrame& f : m.element_fibers) {
    CHECK((f.a_l - Vec3{1, 0, 0}).norm() == 0.0);
    CHECK((f.a_t - Vec3{0, 1, 0}).norm() == 0.0);
    CHECK((f.a_n - Vec3{0, 0, 1}).norm() == 0.0);
  }
}

TEST_CASE("assign_fibers refuses meshes without a transmural parameter") {
  HexMesh m = generate_box_mesh({1, 1, 1}, {2, 2, 2});
  m.info.kind = MeshKind::External;
  CHECK_THROWS_AS(assign_fibers(m, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("binary mesh round trip is bit exact") {
  const HexMesh m = generate_ellipsoid_mesh({}, 7, 5, 3);
  const auto path = tmp_path("cardio_mesh_rt.cmesh");
  save_mesh(m, path.string(), MeshFileFormat::Binary);
  const HexMesh r = load_mesh(path.string());
  REQUIRE(r.n_nodes() == m.n_nodes());
  REQUIRE(r.n_elements() == m.n_elements());
  for (std::size_t i = 0; i < m.n_nodes(); ++i) {
    CHECK(r.nodes[i].x == m.nodes[i].x);
    CHECK(r.nodes[i].y == m.nodes[i].y);
    CHECK(r.nodes[i].z == m.nodes[i].z);
  }
  CHECK(r.elements == m.elements);
  for (std::size_t e = 0; e < m.n_elements(); ++e) {
    CHECK((r.element_fibers[e].a_l - m.element_fibers[e].a_l).norm() == 0.0);
    CHECK((r.element_fibers[e].a_t - m.element_fibers[e].a_t).norm() == 0.0);
    CHECK((r.element_fibers[e].a_n - m.element_fibers[e].a_n).norm() == 0.0);
  }
  CHECK(r.info.kind == m.info.kind);
  CHECK(r.info.cells == m.info.cells);
  std::filesystem::remove(path);
}

TEST_CASE("text mesh round trip preserves all values") {
  const HexMesh m = generate_box_mesh({1.25, 0.75, 2.0}, {3, 2, 2});
  const auto path = tmp_path("cardio_mesh_rt.txt");
  save_mesh(m, path.string(), MeshFileFormat::Text);
  const HexMesh r = load_mesh(path.string());
  REQUIRE(r.n_nodes() == m.n_nodes());
  for (std::size_t i = 0; i < m.n_nodes(); ++i) {
    CHECK(r.nodes[i].x == m.nodes[i].x);
    CHECK(r.nodes[i].y == m.nodes[i].y);
    CHECK(r.nodes[i].z == m.nodes[i].z);
  }
  CHECK(r.elements == m.elements);
  CHECK(r.info.box_lengths == m.info.box_lengths);
  std::filesystem::remove(path);
}

TEST_CASE("truncated binary file raises a parse error, no partial mesh") {
  const HexMesh m = generate_box_mesh({1, 1, 1}, {2, 2, 2});
  const auto path = tmp_path("cardio_mesh_trunc.cmesh");
  save_mesh(m, path.string(), MeshFileFormat::Binary);
  const auto full = std::filesystem::file_size(path);
  std::filesystem::resize_file(path, full / 2);
  CHECK_THROWS_AS(load_mesh(path.string()), MeshIoError);
  std::filesystem::remove(path);
}

TEST_CASE("truncated text file raises a parse error with a line number") {
  const HexMesh m = generate_box_mesh({1, 1, 1}, {1, 1, 1});
  const auto path = tmp_path("cardio_mesh_trunc.txt");
  save_mesh(m, path.string(), MeshFileFormat::Text);
  // drop the trailing fiber + end lines
  std::ifstream in(path);
  std::string contents((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  contents.resize(contents.size() * 2 / 3);
  std::ofstream out(path, std::ios::trunc);
  out << contents;
  out.close();
  CHECK_THROWS_WITH_AS(load_mesh(path.string()), doctest::Contains("line"), MeshIoError);
  std::filesystem::remove(path);
}

TEST_CASE("out-of-range element index in a mesh file is a validation error") {
  const auto path = tmp_path("cardio_mesh_badidx.txt");
  {
    std::ofstream out(path);
    out << "cardio-mesh-text 1\n"
        << "kind box\n"
        << "ellipsoid 2.2 3.3 2.2 3.3 5.9 6.4 -4.71 1.57 -1.18 0.39\n"
        << "box 1 1 1\n"
        << "cells 1 1 1\n"
        << "nodes 8\n";
    const double coords[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                 {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
    for (auto& c : coords) out << c[0] << " " << c[1] << " " << c[2] << "\n";
    out << "elements 1\n0 1 2 3 4 5 6 99\n";  // node 99 does not exist
    out << "fibers 1\n1 0 0 0 1 0 0 0 1\nend\n";
  }
  CHECK_THROWS_WITH_AS(load_mesh(path.string()), doctest::Contains("out of range"),
                       std::invalid_argument);
  std::filesystem::remove(path);
}

TEST_CASE("mesh file version mismatch is an explicit error") {
  const HexMesh m = generate_box_mesh({1, 1, 1}, {1, 1, 1});
  const auto path = tmp_path("cardio_mesh_ver.cmesh");
  save_mesh(m, path.string(), MeshFileFormat::Binary);
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(8);
    const std::uint32_t bad_version = 99;
    f.write(reinterpret_cast<const char*>(&bad_version), 4);
  }
  CHECK_THROWS_WITH_AS(load_mesh(path.string()), doctest::Contains("version"), MeshIoError);
  std::filesystem::remove(path);
}
