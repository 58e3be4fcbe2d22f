#pragma once

#include <array>
#include <cstddef>

#include "photonpol/linalg.hpp"
#include "photonpol/photon_state.hpp"

namespace photonpol {

enum class Axis : std::size_t { X = 0, Y = 1, Z = 2 };

char axis_label(Axis m);

/// Decomposition of a lab-frame direction state |m> against the helicity
/// basis of momentum k: |m> = m+ |eps+> + m- |eps-> + m_l |k>.
struct TransversalPart {
  cplx plus;          ///< <eps+_k|m>
  cplx minus;         ///< <eps-_k|m>
  cplx longitudinal;  ///< <k|m>
  double weight;      ///< sqrt(|m+|^2 + |m-|^2)
  CVec3 vector;       ///< b_m(k) = m+ eps+_k + m- eps-_k
};

/// Transversal part of an arbitrary (possibly complex, unit) direction state.
TransversalPart transversal_part(const Direction& khat, const CVec3& m);
TransversalPart transversal_part(const Direction& khat, Axis m);

/// Unit vector e_m(k) = b_m / c_m: transversal to k and closest to m.
/// Throws DegenerateDirection when c_m vanishes (m parallel to k).
CVec3 closest_transversal(const Direction& khat, Axis m);

/// 3x3 Hermitian, positive semidefinite, unit-trace polarization matrix.
class PolarizationMatrix {
 public:
  PolarizationMatrix() = default;

  /// Validates within tol: Hermitian, trace 1 and eigenvalues >= -tol.
  /// Throws NotHermitian or NotDensityMatrix.
  static PolarizationMatrix from_matrix(const CMat3& m, double tol = 1e-10);

  const CMat3& matrix() const noexcept { return m_; }
  cplx operator()(Axis r, Axis c) const { return m_(static_cast<std::size_t>(r), static_cast<std::size_t>(c)); }
  cplx operator()(std::size_t r, std::size_t c) const { return m_(r, c); }
  PolarizationMatrix conj() const;
  /// Descending eigenvalues.
  std::array<double, 3> eigenvalues() const;

 private:
  explicit PolarizationMatrix(const CMat3& m) : m_(m) {}
  CMat3 m_;
};

/// rho_mn = integral dmu |f|^2 <b_m|alpha><alpha|b_n>, by direct quadrature.
PolarizationMatrix reduced_density_matrix(const PhotonWavePacket& packet);

/// <Psi|E_uu|Psi> for the physical part of the projector onto the unit
/// direction state u.
double povm_expectation(const PhotonWavePacket& packet, const CVec3& u);

/// rho_mn recovered from the four POVM expectations E_{m+n}, E_{m-in},
/// E_mm and E_nn. Throws SameAxis if m == n.
cplx reconstruct_offdiagonal(const PhotonWavePacket& packet, Axis m, Axis n);

/// Minimal error probability for discriminating two equiprobable states:
/// 1/2 - 1/4 tr|rho1 - rho2|.
double helstrom_error(const PolarizationMatrix& rho1, const PolarizationMatrix& rho2);

/// tr(rho1 rho2).
double overlap(const PolarizationMatrix& rho1, const PolarizationMatrix& rho2);

/// -tr(rho ln rho) in nats. Throws NotDensityMatrix if the trace is off by
/// more than 1e-8 or an eigenvalue is below -1e-8.
double von_neumann_entropy(const CMat3& rho);
double von_neumann_entropy(const PolarizationMatrix& rho);

}  // namespace photonpol
