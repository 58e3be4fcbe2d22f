#include "photonpol/classical_beam.hpp"

#include <cmath>
#include <string>

#include "photonpol/error.hpp"
#include "photonpol/numerics.hpp"

namespace photonpol::classical {

namespace {

constexpr double kNormTol = 1e-10;

void check_normalized(double total) {
  if (!(std::abs(total - 1.0) <= kNormTol))
    throw Error(ErrorCode::ProfileNotNormalized,
                "beam profile weights sum to " + std::to_string(total));
}

}  // namespace

std::array<double, 3> field_fourier(const PlaneWaveComponent& c) {
  const double a = c.a - c.phi;
  const double ex = std::cos(a) * std::cos(c.theta);
  const double ey = std::sin(a);
  const double ez = -std::cos(a) * std::sin(c.theta);
  const double cp = std::cos(c.phi);
  const double sp = std::sin(c.phi);
  return {cp * ex - sp * ey, sp * ex + cp * ey, ez};
}

double detected_flux(const PlaneWaveComponent& c, const DetectorSetting& d) {
  const double a = c.a - c.phi;
  const double b = d.b - c.phi;
  const double amp = std::cos(a) * std::cos(b) * std::cos(c.theta) + std::sin(a) * std::sin(b);
  return amp * amp;
}

double loss_fraction(const PlaneWaveComponent& c) {
  const double ca = std::cos(c.a - c.phi);
  return c.theta * c.theta * ca * ca;
}

double apparent_angle(double a, double theta) {
  if (std::abs(a) == kPi / 2) return a;
  return std::atan(std::tan(a) / std::cos(theta));
}

double doppler_tilt(double theta, const BoostParameter& b, TiltMode mode) {
  if (mode == TiltMode::SmallAngle) return theta * b.doppler();
  const double v = b.velocity();
  const double denom = 1.0 - v * std::cos(theta);
  const double s = std::sin(theta) / (b.gamma() * denom);
  const double c = (std::cos(theta) - v) / denom;
  return std::atan2(s, c);
}

BeamProfile BeamProfile::from_nodes(std::vector<Node> nodes) {
  for (const auto& n : nodes) {
    if (!(n.weight >= 0.0))
      throw Error(ErrorCode::ProfileNotNormalized, "negative beam profile weight");
  }
  BeamProfile p(std::move(nodes));
  check_normalized(p.total_weight());
  return p;
}

BeamProfile BeamProfile::from_weight(const std::function<double(double, double)>& weight,
                                     double theta_max, int n_theta, int n_phi) {
  if (!(theta_max > 0.0) || theta_max >= kPi / 2)
    throw Error(ErrorCode::InvalidArgument, "theta_max must lie in (0, pi/2)");
  const QuadratureRule th = gauss_legendre(n_theta, 0.0, theta_max);
  const QuadratureRule ph = periodic_trapezoid(n_phi);

  std::vector<Node> nodes;
  nodes.reserve(th.nodes.size() * ph.nodes.size());
  for (std::size_t i = 0; i < th.nodes.size(); ++i) {
    for (std::size_t j = 0; j < ph.nodes.size(); ++j) {
      const double t = th.nodes[i];
      const double w = weight(t, ph.nodes[j]) * std::sin(t) * th.weights[i] * ph.weights[j];
      if (!(w >= 0.0)) throw Error(ErrorCode::ProfileNotNormalized, "negative beam profile weight");
      nodes.push_back({t, ph.nodes[j], w});
    }
  }
  const double total =
      pairwise_sum<double>(nodes.size(), [&](std::size_t k) { return nodes[k].weight; });
  if (!(total > 0.0)) throw Error(ErrorCode::ProfileNotNormalized, "beam profile has zero weight");
  for (auto& n : nodes) n.weight /= total;
  return BeamProfile(std::move(nodes));
}

BeamProfile BeamProfile::gaussian(double rms, double cutoff, int n_theta, int n_phi) {
  if (!(rms > 0.0) || !(cutoff > 0.0))
    throw Error(ErrorCode::InvalidArgument, "Gaussian profile needs rms > 0 and cutoff > 0");
  return from_weight([rms](double t, double) { return std::exp(-(t * t) / (rms * rms)); },
                     cutoff * rms, n_theta, n_phi);
}

BeamProfile BeamProfile::delta(double theta, double phi) {
  return BeamProfile({Node{theta, phi, 1.0}});
}

double BeamProfile::total_weight() const {
  return pairwise_sum<double>(nodes_.size(), [&](std::size_t k) { return nodes_[k].weight; });
}

double beam_average_flux(const BeamProfile& p, double a, double b) {
  check_normalized(p.total_weight());
  const auto& nodes = p.nodes();
  const DetectorSetting d{b};
  return pairwise_sum<double>(nodes.size(), [&](std::size_t k) {
    const auto& n = nodes[k];
    return n.weight * detected_flux({n.theta, n.phi, a}, d);
  });
}

}  // namespace photonpol::classical
