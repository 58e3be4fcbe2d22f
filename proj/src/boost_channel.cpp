#include "photonpol/boost_channel.hpp"

#include <cmath>
#include <memory>

#include <fmt/format.h>

#include "photonpol/error.hpp"
#include "photonpol/numerics.hpp"

namespace photonpol {

namespace {

int require_helicity(const PhotonWavePacket& packet) {
  const int sign = packet.polarization().helicity_sign();
  if (sign == 0)
    throw Error(ErrorCode::UnsupportedPolarization,
                "boosts are only defined here for pure helicity packets");
  return sign;
}

PolarizationMatrix rho_at(const PhotonWavePacket& packet, const BoostMethod method,
                          const BoostParameter& b) {
  return method == BoostMethod::AmplitudeSubstitution ? boosted_rho_methodA(packet, b)
                                                      : boosted_rho_methodB(packet, b);
}

}  // namespace

PhotonWavePacket boost_packet(const PhotonWavePacket& packet, const BoostParameter& b) {
  const int sign = require_helicity(packet);
  if (!packet.amplitude().has_profile())
    throw Error(ErrorCode::NoAmplitudeProfile, "amplitude was given as raw samples");

  auto grid = std::make_shared<const MomentumGrid>(packet.grid().boosted(b));
  const double g = b.gamma();
  const double v = b.velocity();
  // f'(k) = f(Lambda^-1 k); the inverse boost maps k_z' to gamma (k_z' + v k0').
  AmplitudeProfile pulled = [f = packet.amplitude().profile(), g, v](double kz, double kr, double phi) {
    return f(g * (kz + v * std::hypot(kz, kr)), kr, phi);
  };
  MomentumAmplitude amplitude = MomentumAmplitude::from_profile(*grid, std::move(pulled));
  return helicity_packet(std::move(grid), std::move(amplitude), sign);
}

PolarizationMatrix boosted_rho_methodA(const PhotonWavePacket& packet, const BoostParameter& b) {
  return reduced_density_matrix(boost_packet(packet, b));
}

PolarizationMatrix boosted_rho_methodB(const PhotonWavePacket& packet, const BoostParameter& b) {
  require_helicity(packet);
  const auto& nodes = packet.grid().nodes();
  const auto& f = packet.amplitude().values();
  const auto& alpha = packet.polarization();

  const CMat3 rho = pairwise_sum<CMat3>(nodes.size(), [&](std::size_t i) {
    const Direction boosted = boost_null({nodes[i].k0(), nodes[i].direction()}, b).dir;
    CVec3 g;
    for (std::size_t m = 0; m < 3; ++m) {
      const TransversalPart t = transversal_part(boosted, static_cast<Axis>(m));
      g[m] = std::conj(t.plus) * alpha[i][0] + std::conj(t.minus) * alpha[i][1];
    }
    return cplx{nodes[i].weight * std::norm(f[i])} * CMat3::outer(g, g);
  });
  return PolarizationMatrix::from_matrix(rho);
}

PolarizationMatrix BoostedObserver::rho(const PhotonWavePacket& packet) const {
  return rho_at(packet, method, boost);
}

DopplerRatio doppler_error_ratio(const PhotonWavePacket& plus, const PhotonWavePacket& minus,
                                 const BoostParameter& b, BoostMethod method) {
  if (plus.grid_ptr() != minus.grid_ptr())
    throw Error(ErrorCode::InvalidArgument, "helicity pair must share a grid");
  if (require_helicity(plus) == require_helicity(minus))
    throw Error(ErrorCode::InvalidArgument, "packets must have opposite helicity");

  DopplerRatio out;
  out.pe = helstrom_error(reduced_density_matrix(plus), reduced_density_matrix(minus));
  out.pe_boosted = helstrom_error(rho_at(plus, method, b), rho_at(minus, method, b));
  out.ratio = out.pe_boosted / out.pe;
  out.analytic = b.doppler() * b.doppler();
  const double scaled = b.doppler() * effective_omega(plus);
  out.outside_small_omega = scaled * scaled > 0.01;
  return out;
}

CpWitness cp_violation_witness(const PhotonWavePacket& plus, const PhotonWavePacket& minus,
                               const BoostParameter& b) {
  const DopplerRatio rot = doppler_error_ratio(plus, minus, b, BoostMethod::RotationSubstitution);
  const double alt = helstrom_error(boosted_rho_methodA(plus, b), boosted_rho_methodA(minus, b));

  CpWitness w;
  w.pe = rot.pe;
  w.pe_boosted = rot.pe_boosted;
  w.pe_boosted_alt = alt;
  w.ratio = rot.ratio;
  w.tolerance = std::abs(alt - rot.pe_boosted) + 1e-12;
  w.violated = (w.pe - w.pe_boosted) > w.tolerance;
  return w;
}

std::string CpWitness::report() const {
  return fmt::format(
      "P_E = {:.10g}, P'_E = {:.10g} (amplitude substitution {:.10g}), ratio = {:.6g}, "
      "tolerance = {:.3g}: {}",
      pe, pe_boosted, pe_boosted_alt, ratio, tolerance,
      violated ? "distinguishability improved, map is not completely positive"
               : "no improvement beyond tolerance");
}

}  // namespace photonpol
