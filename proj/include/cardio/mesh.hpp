#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cardio {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 normalized() const {
    const double n = norm();
    if (n == 0.0) throw std::runtime_error("cannot normalize zero vector");
    return {x / n, y / n, z / n};
  }
};

/// Orthonormal local material frame: a_l along the fiber, a_t in-sheet
/// transverse, a_n sheet-normal (transmural). Right-handed: a_l x a_t = a_n.
struct FiberFrame {
  Vec3 a_l{1, 0, 0};
  Vec3 a_t{0, 1, 0};
  Vec3 a_n{0, 0, 1};

  // max deviation from orthonormality (unit norms, pairwise orthogonality)
  double orthonormality_defect() const;
};

/// Truncated-ellipsoid shell: inner surface at r=0 with semi-axes
/// (a1, b1, c1), outer at r=1 with (a2, b2, c2); theta is the circumferential
/// angle, phi the latitudinal one.
struct EllipsoidParams {
  double a1 = 2.2, a2 = 3.3;
  double b1 = 2.2, b2 = 3.3;
  double c1 = 5.9, c2 = 6.4;
  double theta_min = -1.5 * M_PI, theta_max = 0.5 * M_PI;
  double phi_min = -0.375 * M_PI, phi_max = 0.125 * M_PI;

  void validate() const;
};

enum class MeshKind : std::uint32_t { Box = 0, Ellipsoid = 1, External = 2 };

/// Generation parameters kept with the mesh; structured kinds retain the
/// lattice dimensions so a transmural coordinate can be recovered per element.
struct MeshInfo {
  MeshKind kind = MeshKind::External;
  EllipsoidParams ellipsoid;
  std::array<double, 3> box_lengths = {1, 1, 1};
  std::array<int, 3> cells = {0, 0, 0};
};

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MeshIoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Trilinear hexahedral mesh. Element vertex order: bottom quad
/// counterclockwise, then top quad counterclockwise (VTK hexahedron order).
struct HexMesh {
  std::vector<Vec3> nodes;
  std::vector<std::array<std::int32_t, 8>> elements;
  std::vector<FiberFrame> element_fibers;
  MeshInfo info;

  std::size_t n_nodes() const { return nodes.size(); }
  std::size_t n_elements() const { return elements.size(); }

  std::array<Vec3, 8> element_corners(std::size_t e) const;

  /// det J at one of the 8 (2x2x2) Gauss points of element e.
  double jacobian_det(std::size_t e, int gauss_point) const;

  /// Sum of |det J| over all Gauss points and elements (the quadrature
  /// volume; equals the exact volume for affine-image elements).
  double volume() const;

  /// Index bounds, duplicate vertices, positive Jacobians. Throws
  /// GeometryError / std::invalid_argument with the offending element.
  void validate() const;
};

// Reference-element machinery shared with the assembly module.
// Gauss points are the 8 points (+-1/sqrt(3))^3 indexed like the vertices.
std::array<double, 3> hex_gauss_point(int g);
double hex_shape_value(int a, const std::array<double, 3>& xi);
std::array<double, 3> hex_shape_gradient(int a, const std::array<double, 3>& xi);

HexMesh generate_box_mesh(const std::array<double, 3>& lengths, const std::array<int, 3>& n);

HexMesh generate_ellipsoid_mesh(const EllipsoidParams& params, int n_theta, int n_phi, int n_r);

/// Rotates the fiber direction from endo_angle at r=0 to epi_angle at r=1
/// within the local tangent plane; angles in radians. Requires a structured
/// mesh kind (box or ellipsoid) so the transmural coordinate exists.
void assign_fibers(HexMesh& mesh, double endo_angle, double epi_angle);

enum class MeshFileFormat { Binary, Text };

void save_mesh(const HexMesh& mesh, const std::string& path,
               MeshFileFormat format = MeshFileFormat::Binary);

/// Auto-detects binary vs text by the leading magic bytes.
HexMesh load_mesh(const std::string& path);

}  // namespace cardio
