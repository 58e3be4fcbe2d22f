#pragma once

#include <array>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "photonpol/linalg.hpp"

namespace photonpol {

/// Parameters of the cylindrical momentum grid. Momenta are in units where
/// the reference magnitude k_a defaults to 1.
struct GridSpec {
  double k_a = 1.0;
  double delta_z = 0.001;
  double delta_r = 0.01;
  int n_z = 32;
  int n_r = 32;
  int n_phi = 32;
  /// Half-width of the k_z window and radius of the k_r window, in units of
  /// delta_z and delta_r respectively.
  double truncation = 5.0;

  /// Same ranges with every node count halved (at least 2).
  GridSpec half_resolution() const;
};

struct MomentumNode {
  double kz;
  double kr;
  double phi;
  /// Quadrature weight of d^3k / ((2pi)^3 2 k0), cylindrical Jacobian included.
  double weight;

  double k0() const;
  Direction direction() const;
};

/// Quadrature over (k_z, k_r, phi): Gauss-Legendre in k_r, Gauss-Legendre in
/// k_z over a window that may depend on the k_r node, trapezoid in phi.
class MomentumGrid {
 public:
  /// Throws GridUnderflow if k_a - truncation * delta_z <= 0, InvalidArgument
  /// for non-positive sizes or node counts.
  static MomentumGrid make(const GridSpec& spec);

  /// Grid covering the image of this grid's region in the frame of an
  /// observer boosted along z. k_r and phi are preserved; every k_z window is
  /// mapped through k_z' = gamma (k_z - v k0).
  MomentumGrid boosted(const BoostParameter& b) const;

  const GridSpec& spec() const noexcept { return spec_; }
  const std::vector<MomentumNode>& nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  /// (lo, hi) of the k_z window at each k_r node.
  const std::vector<std::pair<double, double>>& kz_windows() const noexcept { return windows_; }

 private:
  MomentumGrid(GridSpec spec, std::vector<double> kr, std::vector<double> kr_w,
               std::vector<std::pair<double, double>> windows);

  GridSpec spec_;
  std::vector<double> kr_;
  std::vector<double> kr_weights_;
  std::vector<std::pair<double, double>> windows_;
  std::vector<MomentumNode> nodes_;
};

/// Amplitude as a function of (k_z, k_r, phi).
using AmplitudeProfile = std::function<cplx(double kz, double kr, double phi)>;

/// Samples of f(k) at the grid nodes. When built from a profile, the
/// normalised profile is kept so the amplitude can be re-evaluated off-grid.
class MomentumAmplitude {
 public:
  /// Evaluates the profile on the grid and scales it so that
  /// sum_i w_i |f_i|^2 = 1. Throws InvalidArgument for a zero profile.
  static MomentumAmplitude from_profile(const MomentumGrid& grid, AmplitudeProfile profile);

  /// Arbitrary per-node samples, normalised on the grid. No off-grid profile.
  static MomentumAmplitude from_samples(const MomentumGrid& grid, std::vector<cplx> values);

  const std::vector<cplx>& values() const noexcept { return values_; }
  /// Normalisation factor applied to the raw profile or samples.
  double norm_factor() const noexcept { return norm_; }
  bool has_profile() const noexcept { return static_cast<bool>(profile_); }
  /// Normalised profile; empty if built from samples.
  const AmplitudeProfile& profile() const noexcept { return profile_; }

 private:
  std::vector<cplx> values_;
  AmplitudeProfile profile_;
  double norm_ = 1.0;
};

/// f(k) = N exp(-(k_z - k_a)^2 / 2 dz^2) exp(-k_r^2 / 2 dr^2), N fixed numerically.
MomentumAmplitude gaussian_amplitude(const MomentumGrid& grid, double k_a, double delta_z,
                                     double delta_r);

/// integral dmu |f|^2 on the grid.
double norm_squared(const MomentumGrid& grid, const MomentumAmplitude& f);

/// Helicity amplitudes (alpha+, alpha-) at each node.
class PolarizationField {
 public:
  using Amplitudes = std::array<cplx, 2>;

  /// Throws InvalidArgument unless |alpha+|^2 + |alpha-|^2 = 1 within 1e-12 at every node.
  explicit PolarizationField(std::vector<Amplitudes> values);
  static PolarizationField uniform(std::size_t n, Amplitudes alpha);

  const std::vector<Amplitudes>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  const Amplitudes& operator[](std::size_t i) const { return values_[i]; }

  /// +1 or -1 when every node is a pure helicity state of that sign (phases
  /// allowed), 0 otherwise.
  int helicity_sign() const;

 private:
  std::vector<Amplitudes> values_;
};

/// One-photon wave packet: integral dmu f(k) |k, alpha(k)>.
class PhotonWavePacket {
 public:
  /// Throws InvalidArgument if the node counts disagree.
  PhotonWavePacket(std::shared_ptr<const MomentumGrid> grid, MomentumAmplitude amplitude,
                   PolarizationField polarization);

  const MomentumGrid& grid() const noexcept { return *grid_; }
  const std::shared_ptr<const MomentumGrid>& grid_ptr() const noexcept { return grid_; }
  const MomentumAmplitude& amplitude() const noexcept { return amplitude_; }
  const PolarizationField& polarization() const noexcept { return polarization_; }

  /// Geometric polarization vector alpha+ eps+_k + alpha- eps-_k at node i.
  CVec3 polarization_vector(std::size_t i) const;

  /// Full-state inner product <this|other>; requires the same grid.
  cplx overlap(const PhotonWavePacket& other) const;

 private:
  std::shared_ptr<const MomentumGrid> grid_;
  MomentumAmplitude amplitude_;
  PolarizationField polarization_;
};

/// Constant helicity state (1,0) for sign > 0, (0,1) for sign < 0.
PhotonWavePacket helicity_packet(std::shared_ptr<const MomentumGrid> grid,
                                 MomentumAmplitude amplitude, int sign);

/// Linear polarization at angle a: (alpha+, alpha-) = (e^{-ia}, e^{ia}) / sqrt(2).
PhotonWavePacket linear_packet(std::shared_ptr<const MomentumGrid> grid,
                               MomentumAmplitude amplitude, double a);

/// Radial moment estimate of Omega: sqrt(<k_r^2>) / <k_z> under |f|^2 dmu.
double effective_omega(const PhotonWavePacket& packet);

}  // namespace photonpol
