#include "cardio/assembly.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cardio {

void ConductivitySet::validate() const {
  for (double s : {sigma_l_i, sigma_t_i, sigma_n_i, sigma_l_e, sigma_t_e, sigma_n_e})
    if (!(s > 0.0)) throw std::invalid_argument("conductivities must be strictly positive");
}

Mat3 conductivity_tensor(const FiberFrame& frame, const std::array<double, 3>& sigmas) {
  if (frame.orthonormality_defect() > 1e-12)
    throw std::invalid_argument("conductivity_tensor: fiber frame is not orthonormal");
  for (double s : sigmas)
    if (!(s > 0.0)) throw std::invalid_argument("conductivity_tensor: sigmas must be positive");

  const double dl = sigmas[0] - sigmas[1];
  const double dn = sigmas[2] - sigmas[1];
  const double l[3] = {frame.a_l.x, frame.a_l.y, frame.a_l.z};
  const double n[3] = {frame.a_n.x, frame.a_n.y, frame.a_n.z};
  Mat3 d{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) d[r][c] = dl * l[r] * l[c] + dn * n[r] * n[c];
  for (int r = 0; r < 3; ++r) d[r][r] += sigmas[1];
  return d;
}

namespace {

struct ElementGeometry {
  // physical shape gradients and weighted determinant per Gauss point
  std::array<std::array<std::array<double, 3>, 8>, 8> grad;
  std::array<double, 8> det;
};

ElementGeometry element_geometry(const HexMesh& mesh, std::size_t e) {
  const auto corners = mesh.element_corners(e);
  ElementGeometry geo;
  for (int g = 0; g < 8; ++g) {
    const auto xi = hex_gauss_point(g);
    double j[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    for (int a = 0; a < 8; ++a) {
      const auto gr = hex_shape_gradient(a, xi);
      const double x[3] = {corners[a].x, corners[a].y, corners[a].z};
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) j[r][c] += x[r] * gr[c];
    }
    const double det = j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) -
                       j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0]) +
                       j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
    if (!(det > 0.0))
      throw GeometryError("assembly: element " + std::to_string(e) +
                          " has non-positive Jacobian at Gauss point " + std::to_string(g));
    geo.det[g] = det;
    // inv^T (rows of J^{-T}): physical gradient = J^{-T} ref gradient
    double invt[3][3];
    invt[0][0] = (j[1][1] * j[2][2] - j[1][2] * j[2][1]) / det;
    invt[1][0] = (j[0][2] * j[2][1] - j[0][1] * j[2][2]) / det;
    invt[2][0] = (j[0][1] * j[1][2] - j[0][2] * j[1][1]) / det;
    invt[0][1] = (j[1][2] * j[2][0] - j[1][0] * j[2][2]) / det;
    invt[1][1] = (j[0][0] * j[2][2] - j[0][2] * j[2][0]) / det;
    invt[2][1] = (j[0][2] * j[1][0] - j[0][0] * j[1][2]) / det;
    invt[0][2] = (j[1][0] * j[2][1] - j[1][1] * j[2][0]) / det;
    invt[1][2] = (j[0][1] * j[2][0] - j[0][0] * j[2][1]) / det;
    invt[2][2] = (j[0][0] * j[1][1] - j[0][1] * j[1][0]) / det;
    for (int a = 0; a < 8; ++a) {
      const auto gr = hex_shape_gradient(a, xi);
      for (int r = 0; r < 3; ++r)
        geo.grad[g][a][r] = invt[r][0] * gr[0] + invt[r][1] * gr[1] + invt[r][2] * gr[2];
    }
  }
  return geo;
}

}  // namespace

CsrMatrix assemble_stiffness(const HexMesh& mesh, const std::array<double, 3>& sigmas) {
  if (mesh.element_fibers.size() != mesh.n_elements())
    throw std::invalid_argument("assemble_stiffness: mesh has no fiber frames");

  const index_t n = static_cast<index_t>(mesh.n_nodes());
  TripletBuilder builder(n, n);
  builder.reserve(mesh.n_elements() * 64);

  for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
    const Mat3 d = conductivity_tensor(mesh.element_fibers[e], sigmas);
    const ElementGeometry geo = element_geometry(mesh, e);

    double ke[8][8] = {};
    for (int g = 0; g < 8; ++g) {
      // 2x2x2 Gauss weights are all 1 on [-1,1]^3
      std::array<std::array<double, 3>, 8> dg;  // D * grad
      for (int a = 0; a < 8; ++a)
        for (int r = 0; r < 3; ++r)
          dg[a][r] = d[r][0] * geo.grad[g][a][0] + d[r][1] * geo.grad[g][a][1] +
                     d[r][2] * geo.grad[g][a][2];
      for (int a = 0; a < 8; ++a)
        for (int b = 0; b < 8; ++b)
          ke[a][b] += geo.det[g] * (geo.grad[g][a][0] * dg[b][0] + geo.grad[g][a][1] * dg[b][1] +
                                    geo.grad[g][a][2] * dg[b][2]);
    }

    const auto& el = mesh.elements[e];
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b < 8; ++b) builder.add(el[a], el[b], ke[a][b]);
  }
  return builder.build();
}

LumpedMass assemble_lumped_mass(const HexMesh& mesh) {
  LumpedMass m;
  m.diag.assign(mesh.n_nodes(), 0.0);
  for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
    const ElementGeometry geo = element_geometry(mesh, e);
    const auto& el = mesh.elements[e];
    for (int g = 0; g < 8; ++g) {
      const auto xi = hex_gauss_point(g);
      // row-sum lumping: sum_b int N_a N_b = int N_a since the shapes
      // partition unity
      for (int a = 0; a < 8; ++a) m.diag[el[a]] += hex_shape_value(a, xi) * geo.det[g];
    }
  }
  return m;
}

double LumpedMass::total() const { return std::accumulate(diag.begin(), diag.end(), 0.0); }

}  // namespace cardio
