#pragma once

#include <string>

#include "photonpol/linalg.hpp"
#include "photonpol/photon_state.hpp"
#include "photonpol/polarization_povm.hpp"

namespace photonpol {

enum class BoostMethod {
  /// Pull the amplitude back, f'(k) = f(Lambda^-1 k), on a regridded support.
  AmplitudeSubstitution,
  /// Keep |f|^2 dmu and evaluate the helicity geometry at Lambda k.
  RotationSubstitution,
};

/// Wave packet as described in the frame of an observer moving with velocity
/// v along z. Only pure-helicity packets are supported: their Wigner phases
/// cancel in every polarization observable, so the boosted packet carries
/// alpha = (1,0) or (0,1). Throws UnsupportedPolarization otherwise and
/// NoAmplitudeProfile when the amplitude cannot be evaluated off-grid.
PhotonWavePacket boost_packet(const PhotonWavePacket& packet, const BoostParameter& b);

/// Bob's polarization matrix by amplitude substitution on the boosted grid.
PolarizationMatrix boosted_rho_methodA(const PhotonWavePacket& packet, const BoostParameter& b);

/// Bob's polarization matrix by rotation substitution on the original grid.
PolarizationMatrix boosted_rho_methodB(const PhotonWavePacket& packet, const BoostParameter& b);

struct BoostedObserver {
  BoostParameter boost;
  BoostMethod method = BoostMethod::RotationSubstitution;

  PolarizationMatrix rho(const PhotonWavePacket& packet) const;
};

struct DopplerRatio {
  double pe = 0.0;          ///< unboosted Helstrom error
  double pe_boosted = 0.0;  ///< boosted Helstrom error
  double ratio = 0.0;       ///< pe_boosted / pe
  double analytic = 0.0;    ///< (1+v)/(1-v)
  /// Set when (doppler * Omega)^2 > 0.01 and the leading-order law degrades.
  bool outside_small_omega = false;
};

/// P'_E / P_E for a +/- helicity pair sharing grid and amplitude.
DopplerRatio doppler_error_ratio(const PhotonWavePacket& plus, const PhotonWavePacket& minus,
                                 const BoostParameter& b,
                                 BoostMethod method = BoostMethod::RotationSubstitution);

struct CpWitness {
  bool violated = false;    ///< P'_E < P_E beyond tolerance
  double pe = 0.0;
  double pe_boosted = 0.0;  ///< rotation-substitution value
  double pe_boosted_alt = 0.0;  ///< amplitude-substitution value
  double ratio = 0.0;
  double tolerance = 0.0;   ///< cross-method discrepancy + floor
  std::string report() const;
};

/// Distinguishability gain under the boost witnesses a non-CP effective map.
CpWitness cp_violation_witness(const PhotonWavePacket& plus, const PhotonWavePacket& minus,
                               const BoostParameter& b);

}  // namespace photonpol
