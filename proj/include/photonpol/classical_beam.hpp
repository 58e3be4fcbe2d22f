#pragma once

#include <array>
#include <functional>
#include <vector>

#include "photonpol/linalg.hpp"

namespace photonpol::classical {

/// One Fourier component of a monochromatic beam: tilt theta, azimuth phi,
/// and the source's linear polarization angle a (all radians).
struct PlaneWaveComponent {
  double theta = 0.0;
  double phi = 0.0;
  double a = 0.0;
};

/// Linear analyzer at angle b in the detector's xy-plane.
struct DetectorSetting {
  double b = 0.0;
};

/// Electric-field Fourier component, normalised to unit length. Evaluated in
/// the frame rotated by phi (where it reads (cos a cos th, sin a, -cos a sin th))
/// and rotated back to the lab frame.
std::array<double, 3> field_fourier(const PlaneWaveComponent& c);

/// Flux through the analyzer, (E_x cos b + E_y sin b)^2. Equals 1 for the
/// ideal aligned case theta = 0, a = b.
double detected_flux(const PlaneWaveComponent& c, const DetectorSetting& d);

/// Leading-order loss for a matched analyzer: theta^2 cos^2(a - phi).
double loss_fraction(const PlaneWaveComponent& c);

/// Analyzer angle that maximises the flux: tan a' = tan a / cos theta.
double apparent_angle(double a, double theta);

enum class TiltMode { Exact, SmallAngle };

/// Tilt angle seen by an observer moving with velocity v along z.
double doppler_tilt(double theta, const BoostParameter& b, TiltMode mode);

/// Discrete angular distribution of plane-wave components, normalised to 1.
class BeamProfile {
 public:
  struct Node {
    double theta;
    double phi;
    double weight;
  };

  /// Takes nodes as given. Throws ProfileNotNormalized unless weights are
  /// nonnegative and sum to 1 within 1e-10.
  static BeamProfile from_nodes(std::vector<Node> nodes);

  /// Gauss-Legendre in theta over [0, theta_max], trapezoid in phi. The
  /// weight function is multiplied by sin(theta) (solid angle) and the
  /// result normalised.
  static BeamProfile from_weight(const std::function<double(double theta, double phi)>& weight,
                                 double theta_max, int n_theta = 64, int n_phi = 64);

  /// Truncated Gaussian exp(-theta^2 / rms^2) sin(theta), uniform in phi,
  /// cut at cutoff * rms. <theta^2> = rms^2 to leading order.
  static BeamProfile gaussian(double rms, double cutoff = 5.0, int n_theta = 64, int n_phi = 64);

  /// Single component at the given tilt.
  static BeamProfile delta(double theta = 0.0, double phi = 0.0);

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  double total_weight() const;

 private:
  explicit BeamProfile(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}
  std::vector<Node> nodes_;
};

/// Profile-weighted average of detected_flux for source angle a and analyzer b.
/// Throws ProfileNotNormalized if the profile weights do not sum to 1.
double beam_average_flux(const BeamProfile& p, double a, double b);

}  // namespace photonpol::classical
