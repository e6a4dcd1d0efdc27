#pragma once

#include <array>

#include "cardio/csr.hpp"
#include "cardio/mesh.hpp"

namespace cardio {

/// Conductivities (mS/cm) along fiber (l), in-sheet transverse (t) and
/// sheet-normal (n) directions for the intra- and extracellular media.
struct ConductivitySet {
  double sigma_l_i = 3.0;
  double sigma_t_i = 0.31525;
  double sigma_n_i = 0.031525;
  double sigma_l_e = 2.0;
  double sigma_t_e = 1.3514;
  double sigma_n_e = 0.6757;

  void validate() const;
  std::array<double, 3> intra() const { return {sigma_l_i, sigma_t_i, sigma_n_i}; }
  std::array<double, 3> extra() const { return {sigma_l_e, sigma_t_e, sigma_n_e}; }
};

using Mat3 = std::array<std::array<double, 3>, 3>;

/// D = sigma_t I + (sigma_l - sigma_t) a_l a_l^T + (sigma_n - sigma_t) a_n a_n^T.
/// The frame vectors are eigenvectors of D with eigenvalues (sigma_l, sigma_t,
/// sigma_n).
Mat3 conductivity_tensor(const FiberFrame& frame, const std::array<double, 3>& sigmas);

/// Row-sum lumped mass; entries are the nodal volumes (cm^3) and their sum is
/// the mesh volume.
struct LumpedMass {
  std::vector<double> diag;
  double total() const;
};

/// Stiffness matrix for one medium: entries int D grad(phi_j) . grad(phi_p)
/// over trilinear shapes with 2x2x2 Gauss quadrature. Pure Neumann: rows sum
/// to zero and the constant vector spans the null space.
CsrMatrix assemble_stiffness(const HexMesh& mesh, const std::array<double, 3>& sigmas);

LumpedMass assemble_lumped_mass(const HexMesh& mesh);

}  // namespace cardio
