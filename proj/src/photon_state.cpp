#include "photonpol/photon_state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "photonpol/error.hpp"
#include "photonpol/numerics.hpp"

namespace photonpol {

namespace {

constexpr double kTwoPiCubed = 8.0 * kPi * kPi * kPi;

double boost_kz(double kz, double kr, const BoostParameter& b) {
  return b.gamma() * (kz - b.velocity() * std::hypot(kz, kr));
}

}  // namespace

GridSpec GridSpec::half_resolution() const {
  GridSpec half = *this;
  half.n_z = std::max(2, n_z / 2);
  half.n_r = std::max(2, n_r / 2);
  half.n_phi = std::max(2, n_phi / 2);
  return half;
}

double MomentumNode::k0() const { return std::hypot(kz, kr); }

Direction MomentumNode::direction() const { return Direction(std::atan2(kr, kz), phi); }

MomentumGrid MomentumGrid::make(const GridSpec& spec) {
  if (!(spec.k_a > 0.0) || !(spec.delta_z > 0.0) || !(spec.delta_r > 0.0) ||
      !(spec.truncation > 0.0))
    throw Error(ErrorCode::InvalidArgument, "grid needs k_a, delta_z, delta_r, truncation > 0");
  if (spec.n_z < 1 || spec.n_r < 1 || spec.n_phi < 1)
    throw Error(ErrorCode::InvalidArgument, "grid node counts must be positive");
  const double half_width = spec.truncation * spec.delta_z;
  if (spec.k_a - half_width <= 0.0)
    throw Error(ErrorCode::GridUnderflow,
                "k_z window reaches " + std::to_string(spec.k_a - half_width) + " <= 0");

  QuadratureRule r = gauss_legendre(spec.n_r, 0.0, spec.truncation * spec.delta_r);
  std::vector<std::pair<double, double>> windows(
      r.nodes.size(), {spec.k_a - half_width, spec.k_a + half_width});
  return MomentumGrid(spec, std::move(r.nodes), std::move(r.weights), std::move(windows));
}

MomentumGrid::MomentumGrid(GridSpec spec, std::vector<double> kr, std::vector<double> kr_w,
                           std::vector<std::pair<double, double>> windows)
    : spec_(spec), kr_(std::move(kr)), kr_weights_(std::move(kr_w)), windows_(std::move(windows)) {
  const QuadratureRule ph = periodic_trapezoid(spec_.n_phi);
  const QuadratureRule unit_z = gauss_legendre(spec_.n_z, -1.0, 1.0);

  nodes_.reserve(kr_.size() * unit_z.nodes.size() * ph.nodes.size());
  for (std::size_t i = 0; i < kr_.size(); ++i) {
    const auto [lo, hi] = windows_[i];
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    for (std::size_t j = 0; j < unit_z.nodes.size(); ++j) {
      const double kz = mid + half * unit_z.nodes[j];
      const double k0 = std::hypot(kz, kr_[i]);
      if (!(k0 > 0.0)) throw Error(ErrorCode::GridUnderflow, "grid node with k0 = 0");
      const double base = kr_weights_[i] * half * unit_z.weights[j] * kr_[i] / (kTwoPiCubed * 2.0 * k0);
      for (std::size_t m = 0; m < ph.nodes.size(); ++m)
        nodes_.push_back({kz, kr_[i], ph.nodes[m], base * ph.weights[m]});
    }
  }
}

MomentumGrid MomentumGrid::boosted(const BoostParameter& b) const {
  std::vector<std::pair<double, double>> windows;
  windows.reserve(windows_.size());
  for (std::size_t i = 0; i < windows_.size(); ++i) {
    // k_z' is increasing in k_z at fixed k_r, so the window maps endpoint to endpoint.
    windows.emplace_back(boost_kz(windows_[i].first, kr_[i], b),
                         boost_kz(windows_[i].second, kr_[i], b));
  }
  GridSpec spec = spec_;
  const double shift = 1.0 / b.doppler();
  spec.k_a *= shift;
  spec.delta_z *= shift;
  return MomentumGrid(spec, kr_, kr_weights_, std::move(windows));
}

MomentumAmplitude MomentumAmplitude::from_profile(const MomentumGrid& grid,
                                                  AmplitudeProfile profile) {
  if (!profile) throw Error(ErrorCode::InvalidArgument, "empty amplitude profile");
  std::vector<cplx> values;
  values.reserve(grid.size());
  for (const auto& n : grid.nodes()) values.push_back(profile(n.kz, n.kr, n.phi));

  MomentumAmplitude out = from_samples(grid, std::move(values));
  const double scale = out.norm_;
  out.profile_ = [raw = std::move(profile), scale](double kz, double kr, double phi) {
    return scale * raw(kz, kr, phi);
  };
  return out;
}

MomentumAmplitude MomentumAmplitude::from_samples(const MomentumGrid& grid,
                                                  std::vector<cplx> values) {
  if (values.size() != grid.size())
    throw Error(ErrorCode::InvalidArgument, "amplitude sample count does not match grid");
  const auto& nodes = grid.nodes();
  const double mass = pairwise_sum<double>(
      nodes.size(), [&](std::size_t i) { return nodes[i].weight * std::norm(values[i]); });
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw Error(ErrorCode::InvalidArgument, "amplitude has no normalisable mass on the grid");

  MomentumAmplitude out;
  out.norm_ = 1.0 / std::sqrt(mass);
  for (auto& v : values) v *= out.norm_;
  out.values_ = std::move(values);
  return out;
}

MomentumAmplitude gaussian_amplitude(const MomentumGrid& grid, double k_a, double delta_z,
                                     double delta_r) {
  if (!(delta_z > 0.0) || !(delta_r > 0.0))
    throw Error(ErrorCode::InvalidArgument, "Gaussian widths must be positive");
  return MomentumAmplitude::from_profile(grid, [=](double kz, double kr, double) {
    const double u = (kz - k_a) / delta_z;
    const double s = kr / delta_r;
    return cplx{std::exp(-0.5 * u * u - 0.5 * s * s)};
  });
}

double norm_squared(const MomentumGrid& grid, const MomentumAmplitude& f) {
  const auto& nodes = grid.nodes();
  const auto& v = f.values();
  return pairwise_sum<double>(nodes.size(),
                              [&](std::size_t i) { return nodes[i].weight * std::norm(v[i]); });
}

PolarizationField::PolarizationField(std::vector<Amplitudes> values) : values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double n = std::norm(values_[i][0]) + std::norm(values_[i][1]);
    if (!(std::abs(n - 1.0) <= 1e-12))
      throw Error(ErrorCode::InvalidArgument,
                  "polarization at node " + std::to_string(i) + " has norm^2 " + std::to_string(n));
  }
}

PolarizationField PolarizationField::uniform(std::size_t n, Amplitudes alpha) {
  return PolarizationField(std::vector<Amplitudes>(n, alpha));
}

int PolarizationField::helicity_sign() const {
  constexpr double kTol = 1e-12;
  const auto pure = [&](std::size_t idx) {
    return std::all_of(values_.begin(), values_.end(),
                       [&](const Amplitudes& a) { return std::abs(a[1 - idx]) <= kTol; });
  };
  if (values_.empty()) return 0;
  if (pure(0)) return +1;
  if (pure(1)) return -1;
  return 0;
}

PhotonWavePacket::PhotonWavePacket(std::shared_ptr<const MomentumGrid> grid,
                                   MomentumAmplitude amplitude, PolarizationField polarization)
    : grid_(std::move(grid)), amplitude_(std::move(amplitude)), polarization_(std::move(polarization)) {
  if (!grid_) throw Error(ErrorCode::InvalidArgument, "packet needs a grid");
  if (amplitude_.values().size() != grid_->size() || polarization_.size() != grid_->size())
    throw Error(ErrorCode::InvalidArgument, "packet grid, amplitude and polarization sizes differ");
}

CVec3 PhotonWavePacket::polarization_vector(std::size_t i) const {
  const auto [ep, em] = helicity_vectors(grid_->nodes()[i].direction());
  return polarization_[i][0] * ep + polarization_[i][1] * em;
}

cplx PhotonWavePacket::overlap(const PhotonWavePacket& other) const {
  if (grid_ != other.grid_)
    throw Error(ErrorCode::InvalidArgument, "full-state overlap needs packets on the same grid");
  const auto& nodes = grid_->nodes();
  const auto& f = amplitude_.values();
  const auto& g = other.amplitude_.values();
  return pairwise_sum<cplx>(nodes.size(), [&](std::size_t i) {
    const auto& a = polarization_[i];
    const auto& b = other.polarization_[i];
    const cplx pol = std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1];
    return nodes[i].weight * std::conj(f[i]) * g[i] * pol;
  });
}

PhotonWavePacket helicity_packet(std::shared_ptr<const MomentumGrid> grid,
                                 MomentumAmplitude amplitude, int sign) {
  const PolarizationField::Amplitudes alpha =
      sign >= 0 ? PolarizationField::Amplitudes{1.0, 0.0} : PolarizationField::Amplitudes{0.0, 1.0};
  const std::size_t n = grid ? grid->size() : 0;
  return PhotonWavePacket(std::move(grid), std::move(amplitude), PolarizationField::uniform(n, alpha));
}

PhotonWavePacket linear_packet(std::shared_ptr<const MomentumGrid> grid,
                               MomentumAmplitude amplitude, double a) {
  const double s = 1.0 / std::sqrt(2.0);
  const PolarizationField::Amplitudes alpha{s * std::polar(1.0, -a), s * std::polar(1.0, a)};
  const std::size_t n = grid ? grid->size() : 0;
  return PhotonWavePacket(std::move(grid), std::move(amplitude), PolarizationField::uniform(n, alpha));
}

double effective_omega(const PhotonWavePacket& packet) {
  const auto& nodes = packet.grid().nodes();
  const auto& f = packet.amplitude().values();
  const double kr2 = pairwise_sum<double>(nodes.size(), [&](std::size_t i) {
    return nodes[i].weight * std::norm(f[i]) * nodes[i].kr * nodes[i].kr;
  });
  const double kz = pairwise_sum<double>(nodes.size(), [&](std::size_t i) {
    return nodes[i].weight * std::norm(f[i]) * nodes[i].kz;
  });
  return std::sqrt(kr2) / kz;
}

}  // namespace photonpol
