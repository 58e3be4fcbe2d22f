#include "photonpol/polarization_povm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "photonpol/error.hpp"
#include "photonpol/numerics.hpp"

namespace photonpol {

namespace {

constexpr double kDegenerate = 1e-12;

// <b_u(k)|alpha(k)> in helicity components: sum_s conj(<eps_s|u>) alpha_s.
cplx projected_amplitude(const TransversalPart& b, const PolarizationField::Amplitudes& alpha) {
  return std::conj(b.plus) * alpha[0] + std::conj(b.minus) * alpha[1];
}

CVec3 combination(Axis m, Axis n, cplx coeff) {
  const double s = 1.0 / std::sqrt(2.0);
  return s * (CVec3::axis(static_cast<std::size_t>(m)) + coeff * CVec3::axis(static_cast<std::size_t>(n)));
}

}  // namespace

char axis_label(Axis m) {
  switch (m) {
    case Axis::X: return 'x';
    case Axis::Y: return 'y';
    case Axis::Z: return 'z';
  }
  return '?';
}

TransversalPart transversal_part(const Direction& khat, const CVec3& m) {
  const auto [ep, em] = helicity_vectors(khat);
  const auto n = khat.unit();
  TransversalPart b;
  b.plus = inner(ep, m);
  b.minus = inner(em, m);
  b.longitudinal = inner(CVec3::real(n[0], n[1], n[2]), m);
  b.weight = std::sqrt(std::norm(b.plus) + std::norm(b.minus));
  b.vector = b.plus * ep + b.minus * em;
  return b;
}

TransversalPart transversal_part(const Direction& khat, Axis m) {
  return transversal_part(khat, CVec3::axis(static_cast<std::size_t>(m)));
}

CVec3 closest_transversal(const Direction& khat, Axis m) {
  const TransversalPart b = transversal_part(khat, m);
  if (b.weight <= kDegenerate)
    throw Error(ErrorCode::DegenerateDirection,
                std::string("axis ") + axis_label(m) + " is parallel to the momentum");
  return cplx{1.0 / b.weight} * b.vector;
}

PolarizationMatrix PolarizationMatrix::from_matrix(const CMat3& m, double tol) {
  if (!m.is_hermitian(tol)) throw Error(ErrorCode::NotHermitian, "polarization matrix");
  const cplx tr = m.trace();
  if (std::abs(tr - 1.0) > tol)
    throw Error(ErrorCode::NotDensityMatrix, "trace " + std::to_string(tr.real()));
  const Eigen3 e = eig_herm3(m, tol);
  if (e.values[2] < -tol)
    throw Error(ErrorCode::NotDensityMatrix, "eigenvalue " + std::to_string(e.values[2]));
  return PolarizationMatrix(m);
}

PolarizationMatrix PolarizationMatrix::conj() const { return PolarizationMatrix(m_.conj()); }

std::array<double, 3> PolarizationMatrix::eigenvalues() const { return eig_herm3(m_).values; }

PolarizationMatrix reduced_density_matrix(const PhotonWavePacket& packet) {
  const auto& nodes = packet.grid().nodes();
  const auto& f = packet.amplitude().values();
  const auto& alpha = packet.polarization();

  const CMat3 rho = pairwise_sum<CMat3>(nodes.size(), [&](std::size_t i) {
    const Direction dir = nodes[i].direction();
    CVec3 g;
    for (std::size_t m = 0; m < 3; ++m)
      g[m] = projected_amplitude(transversal_part(dir, static_cast<Axis>(m)), alpha[i]);
    // <b_m|alpha><alpha|b_n> = g_m conj(g_n)
    return cplx{nodes[i].weight * std::norm(f[i])} * CMat3::outer(g, g);
  });
  return PolarizationMatrix::from_matrix(rho);
}

double povm_expectation(const PhotonWavePacket& packet, const CVec3& u) {
  const auto& nodes = packet.grid().nodes();
  const auto& f = packet.amplitude().values();
  const auto& alpha = packet.polarization();
  return pairwise_sum<double>(nodes.size(), [&](std::size_t i) {
    const TransversalPart b = transversal_part(nodes[i].direction(), u);
    return nodes[i].weight * std::norm(f[i]) * std::norm(projected_amplitude(b, alpha[i]));
  });
}

cplx reconstruct_offdiagonal(const PhotonWavePacket& packet, Axis m, Axis n) {
  if (m == n)
    throw Error(ErrorCode::SameAxis, std::string("both axes are ") + axis_label(m));
  const double emm = povm_expectation(packet, CVec3::axis(static_cast<std::size_t>(m)));
  const double enn = povm_expectation(packet, CVec3::axis(static_cast<std::size_t>(n)));
  const double sum = povm_expectation(packet, combination(m, n, 1.0));
  const double twisted = povm_expectation(packet, combination(m, n, cplx{0.0, -1.0}));
  const double mean = 0.5 * (emm + enn);
  return {sum - mean, twisted - mean};
}

double helstrom_error(const PolarizationMatrix& rho1, const PolarizationMatrix& rho2) {
  const double pe = 0.5 - 0.25 * trace_norm_diff(rho1.matrix(), rho2.matrix());
  return std::clamp(pe, 0.0, 0.5);
}

double overlap(const PolarizationMatrix& rho1, const PolarizationMatrix& rho2) {
  return std::max(0.0, (rho1.matrix() * rho2.matrix()).trace().real());
}

double von_neumann_entropy(const CMat3& rho) {
  constexpr double kTol = 1e-8;
  if (std::abs(rho.trace() - 1.0) > kTol)
    throw Error(ErrorCode::NotDensityMatrix, "trace " + std::to_string(rho.trace().real()));
  const Eigen3 e = eig_herm3(rho);
  double s = 0.0;
  for (double lambda : e.values) {
    if (lambda < -kTol)
      throw Error(ErrorCode::NotDensityMatrix, "eigenvalue " + std::to_string(lambda));
    if (lambda > 0.0) s -= lambda * std::log(lambda);
  }
  return s;
}

double von_neumann_entropy(const PolarizationMatrix& rho) { return von_neumann_entropy(rho.matrix()); }

}  // namespace photonpol
