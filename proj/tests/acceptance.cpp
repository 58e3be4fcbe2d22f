// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "oracles.hpp"
#include "photonpol/boost_channel.hpp"
#include "photonpol/classical_beam.hpp"
#include "photonpol/polarization_povm.hpp"

using namespace photonpol;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

struct Pair {
  PhotonWavePacket plus;
  PhotonWavePacket minus;
};

GridSpec default_spec(double omega) {
  GridSpec s;
  s.delta_r = omega;
  s.delta_z = omega / 10.0;
  return s;
}

Pair helicity_pair(double omega) {
  auto grid = std::make_shared<const MomentumGrid>(MomentumGrid::make(default_spec(omega)));
  const auto f = gaussian_amplitude(*grid, 1.0, omega / 10.0, omega);
  return {helicity_packet(grid, f, +1), helicity_packet(grid, f, -1)};
}

PhotonWavePacket random_packet(oracle::Gen& g) {
  const double omega = g.uniform(0.01, 0.1);
  auto grid = std::make_shared<const MomentumGrid>(MomentumGrid::make(default_spec(omega)));
  const auto f = gaussian_amplitude(*grid, 1.0, omega / 10.0, omega);
  const auto a = g.amplitudes();
  return PhotonWavePacket(grid, f, PolarizationField::uniform(grid->size(), {a[0], a[1]}));
}

double argmax_flux(double a, double theta) {
  const classical::PlaneWaveComponent c{theta, 0.0, a};
  double lo = a - 0.8, hi = a + 0.8;
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
  double f1 = classical::detected_flux(c, {x1}), f2 = classical::detected_flux(c, {x2});
  while (hi - lo > 1e-12) {
    if (f1 < f2) {
      lo = x1, x1 = x2, f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = classical::detected_flux(c, {x2});
    } else {
      hi = x2, x2 = x1, f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = classical::detected_flux(c, {x1});
    }
  }
  return 0.5 * (lo + hi);
}

Verdict malus_limit() {
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    for (int j = 0; j < 100; ++j) {
      const double a = -kPi / 2 + kPi * i / 100, b = -kPi / 2 + kPi * j / 100;
      const double c = std::cos(a - b);
      worst = std::max(worst, std::abs(classical::detected_flux({0.0, 0.0, a}, {b}) - c * c));
    }
  }
  return {worst <= 4 * DBL_EPSILON, fmt::format("max |flux - cos^2(a-b)| = {:.3g} over 100x100", worst)};
}

Verdict classical_loss() {
  bool ok = true;
  double worst = 0.0;
  for (double th : {0.1, 0.05, 0.025}) {
    for (int i = 0; i < 12; ++i) {
      const double a = kPi * i / 12;
      const double loss = 1.0 - classical::detected_flux({th, 0.0, a}, {a});
      const double dev = std::abs(loss - th * th * std::cos(a) * std::cos(a));
      ok = ok && dev <= 2 * std::pow(th, 4);
      worst = std::max(worst, dev / std::pow(th, 4));
    }
  }
  return {ok, fmt::format("max |loss - theta^2 cos^2 a| / theta^4 = {:.4f} (limit 2)", worst)};
}

Verdict apparent_angle() {
  oracle::Gen g(301);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double a = g.uniform(-1.5, 1.5), th = g.uniform(0.0, 1.2);
    worst = std::max(worst, std::abs(argmax_flux(a, th) - std::atan(std::tan(a) / std::cos(th))));
  }
  return {worst <= 1e-6, fmt::format("max |argmax_b - atan(tan a / cos theta)| = {:.3g} rad on 200 samples", worst)};
}

Verdict doppler_tilt() {
  using classical::TiltMode;
  bool ok = true;
  double worst = 0.0, worst_v = 0.0, worst_t = 0.0;
  for (double t : {1e-3, 1e-4, 1e-5}) {
    for (int k = -9; k <= 9; ++k) {
      const BoostParameter b(0.1 * k);
      const double ex = classical::doppler_tilt(t, b, TiltMode::Exact);
      const double sm = classical::doppler_tilt(t, b, TiltMode::SmallAngle);
      const double rel = std::abs(ex - sm) / std::abs(ex);
      if (rel / (t * t) > worst) worst = rel / (t * t), worst_v = 0.1 * k, worst_t = t;
      ok = ok && rel < t * t;
    }
  }
  const double ratio = classical::doppler_tilt(1e-3, BoostParameter(0.6), TiltMode::Exact) / 1e-3;
  ok = ok && std::abs(ratio - 2.0) <= 1e-4;
  return {ok, fmt::format("max rel error / theta^2 = {:.4f} at v = {:.1f}, theta = {:g} (limit 1); "
                          "theta'/theta at v = 0.6 is {:.7f}",
                          worst, worst_v, worst_t, ratio)};
}

Verdict rho_structure() {
  const double omega = 0.02;
  const auto p = helicity_pair(omega);
  const auto rp = reduced_density_matrix(p.plus), rm = reduced_density_matrix(p.minus);
  const auto ref = oracle::leading_rho(+1, omega);
  double dev = 0.0;
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) dev = std::max(dev, std::abs(rp(r, c) - ref[r][c]));
  const double conj_dev = rm.matrix().max_abs_diff(rp.matrix().conj());
  return {dev <= 5 * std::pow(omega, 4) && conj_dev <= 1e-10,
          fmt::format("max entry deviation {:.3g} (limit {:.3g}); |rho- - conj(rho+)| = {:.3g}", dev,
                      5 * std::pow(omega, 4), conj_dev)};
}

Verdict error_probability() {
  bool ok = true;
  std::string detail;
  for (double omega : {0.01, 0.02, 0.05}) {
    const auto p = helicity_pair(omega);
    const double pe = helstrom_error(reduced_density_matrix(p.plus), reduced_density_matrix(p.minus));
    const double rel = pe / (omega * omega / 4) - 1.0;
    ok = ok && std::abs(rel) <= 0.02;
    detail += fmt::format("{}Omega={}: P_E/(Omega^2/4) = {:.5f}", detail.empty() ? "" : "; ", omega, 1.0 + rel);
  }
  return {ok, detail};
}

Verdict doppler_scaling() {
  const auto p = helicity_pair(0.01);
  bool ok = true;
  double worst = 0.0;
  for (double v : {-0.5, -0.2, 0.2, 0.5}) {
    const DopplerRatio r = doppler_error_ratio(p.plus, p.minus, BoostParameter(v));
    const double rel = std::abs(r.ratio / r.analytic - 1.0);
    worst = std::max(worst, rel);
    ok = ok && rel <= 0.02;
  }
  const double r6 = doppler_error_ratio(p.plus, p.minus, BoostParameter(0.6)).ratio;
  ok = ok && std::abs(r6 - 4.0) <= 0.08;
  return {ok, fmt::format("max relative deviation {:.3g} (limit 0.02); v = 0.6 ratio = {:.5f}", worst, r6)};
}

Verdict method_equivalence() {
  double worst = 0.0;
  for (double omega : {0.01, 0.05}) {
    const auto p = helicity_pair(omega);
    for (double v : {-0.6, -0.3, 0.3, 0.6}) {
      const BoostParameter b(v);
      for (const auto* packet : {&p.plus, &p.minus}) {
        worst = std::max(worst, boosted_rho_methodA(*packet, b).matrix().max_abs_diff(
                                    boosted_rho_methodB(*packet, b).matrix()));
      }
    }
  }
  return {worst <= 1e-8, fmt::format("max entrywise |A - B| = {:.3g}", worst)};
}

Verdict povm_completeness() {
  double worst = 0.0, worst_dir = 0.0;
  std::size_t count = 0;
  for (double omega : {0.01, 0.1}) {
    const MomentumGrid g = MomentumGrid::make(default_spec(omega));
    for (const auto& node : g.nodes()) {
      const Direction d = node.direction();
      const auto n = d.unit();
      CMat3 sum;
      for (Axis m : {Axis::X, Axis::Y, Axis::Z}) {
        const auto b = transversal_part(d, m);
        sum = sum + CMat3::outer(b.vector, b.vector);
      }
      CMat3 transverse;
      for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c) transverse(r, c) = (r == c ? 1.0 : 0.0) - n[r] * n[c];
      worst = std::max(worst, sum.max_abs_diff(transverse));
      const auto [ep, em] = helicity_vectors(d);
      const CVec3 k = CVec3::real(n[0], n[1], n[2]);
      const CMat3 full = CMat3::outer(ep, ep) + CMat3::outer(em, em) + CMat3::outer(k, k);
      worst_dir = std::max(worst_dir, full.max_abs_diff(CMat3::identity()));
      ++count;
    }
  }
  return {worst <= 1e-12 && worst_dir <= 4 * DBL_EPSILON,
          fmt::format("{} nodes: max |sum_m b_m b_m^+ - (1 - kk)| = {:.3g}, direction-state resolution {:.3g}",
                      count, worst, worst_dir)};
}

Verdict reconstruction() {
  oracle::Gen g(1001);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto p = random_packet(g);
    const auto rho = reduced_density_matrix(p);
    for (Axis m : {Axis::X, Axis::Y, Axis::Z})
      for (Axis n : {Axis::X, Axis::Y, Axis::Z})
        if (m != n) worst = std::max(worst, std::abs(reconstruct_offdiagonal(p, m, n) - rho(m, n)));
  }
  return {worst <= 1e-8, fmt::format("max |reconstructed - direct| = {:.3g} over 20 packets", worst)};
}

Verdict imperfect_distinguishability() {
  oracle::Gen g(1101);
  bool ok = true;
  double min_overlap = 1.0, min_entropy = 10.0;
  for (int i = 0; i < 20; ++i) {
    const auto a = reduced_density_matrix(random_packet(g));
    const auto b = reduced_density_matrix(random_packet(g));
    const double ov = overlap(a, b);
    const double s = std::min(von_neumann_entropy(a), von_neumann_entropy(b));
    ok = ok && ov > 0.0 && s > 0.0;
    min_overlap = std::min(min_overlap, ov);
    min_entropy = std::min(min_entropy, s);
  }
  return {ok, fmt::format("20 pairs: min overlap {:.3g}, min entropy {:.3g}", min_overlap, min_entropy)};
}

Verdict non_cp_witness() {
  const auto p = helicity_pair(0.02);
  const CpWitness w = cp_violation_witness(p.plus, p.minus, BoostParameter(-0.5));
  const bool ok = w.violated && std::abs(w.ratio * 3.0 - 1.0) <= 0.05;
  return {ok, w.report()};
}

Verdict oracle_equivalence() {
  const double omega = 0.1;
  const auto p = helicity_pair(omega);
  const auto rho = reduced_density_matrix(p.plus);
  const auto mc = oracle::mc_rho(1.0, omega / 10.0, omega, 5.0, {1.0, 0.0}, 1000000, 20240601);
  bool ok = true;
  double worst = 0.0;
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 3; ++c) {
      const cplx d = rho(r, c) - mc.mean[r][c];
      for (auto [diff, se] : {std::pair{d.real(), mc.se_re[r][c]}, std::pair{d.imag(), mc.se_im[r][c]}}) {
        if (se > 0.0) {
          worst = std::max(worst, std::abs(diff) / se);
          ok = ok && std::abs(diff) <= 3 * se;
        } else {
          ok = ok && std::abs(diff) <= 1e-15;
        }
      }
    }
  }
  return {ok, fmt::format("10^6 samples: max |quadrature - MC| / SE = {:.3f} (limit 3)", worst)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"classical ideal limit", malus_limit},
      {"classical loss", classical_loss},
      {"apparent angle", apparent_angle},
      {"doppler tilt", doppler_tilt},
      {"helicity rho structure", rho_structure},
      {"error probability", error_probability},
      {"doppler scaling", doppler_scaling},
      {"method equivalence", method_equivalence},
      {"povm completeness", povm_completeness},
      {"reconstruction consistency", reconstruction},
      {"imperfect distinguishability", imperfect_distinguishability},
      {"non-cp witness", non_cp_witness},
      {"oracle equivalence", oracle_equivalence},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += v.pass ? 0 : 1;
    std::printf("[%s] %2zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
