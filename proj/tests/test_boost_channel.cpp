#include <doctest.h>

#include <cmath>
#include <memory>

#include "oracles.hpp"
#include "photonpol/boost_channel.hpp"
#include "photonpol/error.hpp"

using namespace photonpol;

namespace {

struct Pair {
  PhotonWavePacket plus;
  PhotonWavePacket minus;
};

Pair helicity_pair(double omega, int n = 32) {
  GridSpec s;
  s.delta_r = omega;
  s.delta_z = omega / 10.0;
  s.n_z = s.n_r = s.n_phi = n;
  auto grid = std::make_shared<const MomentumGrid>(MomentumGrid::make(s));
  const auto f = gaussian_amplitude(*grid, 1.0, s.delta_z, s.delta_r);
  return {helicity_packet(grid, f, +1), helicity_packet(grid, f, -1)};
}

}  // namespace

TEST_CASE("zero boost leaves rho unchanged") {
  const auto p = helicity_pair(0.05, 16);
  const auto rho = reduced_density_matrix(p.plus);
  CHECK(boosted_rho_methodB(p.plus, BoostParameter(0.0)).matrix().max_abs_diff(rho.matrix()) < 1e-15);
  CHECK(boosted_rho_methodA(p.plus, BoostParameter(0.0)).matrix().max_abs_diff(rho.matrix()) < 1e-13);
}

TEST_CASE("amplitude and rotation substitution agree") {
  for (double omega : {0.01, 0.05}) {
    const auto p = helicity_pair(omega, 16);
    for (double v : {-0.6, 0.3}) {
      const BoostParameter b(v);
      for (const auto* packet : {&p.plus, &p.minus}) {
        const auto a = boosted_rho_methodA(*packet, b);
        const auto r = boosted_rho_methodB(*packet, b);
        CHECK(a.matrix().max_abs_diff(r.matrix()) < 1e-10);
      }
    }
  }
}

TEST_CASE("boosted rho keeps the leading-order form with a Doppler-scaled spread") {
  const double omega = 0.01;
  const auto p = helicity_pair(omega);
  for (double v : {-0.5, 0.5}) {
    const BoostParameter b(v);
    const double w = b.doppler() * omega;
    const auto rho = boosted_rho_methodB(p.plus, b);
    const auto ref = oracle::leading_rho(+1, w);
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < 3; ++c) CHECK(std::abs(rho(r, c) - ref[r][c]) <= 5 * std::pow(w, 4));
  }
}

TEST_CASE("successive boosts compose") {
  const auto p = helicity_pair(0.02, 16);
  oracle::for_all(4, 51, [&](oracle::Gen& g, int) {
    const BoostParameter b1(g.uniform(-0.5, 0.5)), b2(g.uniform(-0.5, 0.5));
    const auto twice = reduced_density_matrix(boost_packet(boost_packet(p.plus, b1), b2));
    const auto once = boosted_rho_methodB(p.plus, compose(b1, b2));
    CHECK(twice.matrix().max_abs_diff(once.matrix()) < 1e-10);
  });
}

TEST_CASE("Doppler ratio of the Helstrom error") {
  const auto p = helicity_pair(0.01);
  for (double v : {-0.5, -0.2, 0.2, 0.5, 0.6}) {
    const BoostParameter b(v);
    const DopplerRatio r = doppler_error_ratio(p.plus, p.minus, b);
    CHECK(r.analytic == doctest::Approx((1 + v) / (1 - v)));
    CHECK(r.ratio == doctest::Approx(r.analytic).epsilon(0.02));
    CHECK_FALSE(r.outside_small_omega);
    const DopplerRatio ra = doppler_error_ratio(p.plus, p.minus, b, BoostMethod::AmplitudeSubstitution);
    CHECK(ra.ratio == doctest::Approx(r.ratio).epsilon(1e-8));
  }
  const auto wide = helicity_pair(0.05, 16);
  CHECK(doppler_error_ratio(wide.plus, wide.minus, BoostParameter(0.9)).outside_small_omega);
}

TEST_CASE("boost preconditions") {
  const auto p = helicity_pair(0.02, 8);
  const double s = 1 / std::sqrt(2.0);
  const PhotonWavePacket lin(p.plus.grid_ptr(), p.plus.amplitude(),
                             PolarizationField::uniform(p.plus.grid().size(), {s, s}));
  try {
    boosted_rho_methodB(lin, BoostParameter(0.3));
    FAIL("expected UnsupportedPolarization");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedPolarization);
  }
  const PhotonWavePacket raw(p.plus.grid_ptr(),
                             MomentumAmplitude::from_samples(p.plus.grid(), p.plus.amplitude().values()),
                             p.plus.polarization());
  try {
    boost_packet(raw, BoostParameter(0.3));
    FAIL("expected NoAmplitudeProfile");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoAmplitudeProfile);
  }
  CHECK_NOTHROW(boosted_rho_methodB(raw, BoostParameter(0.3)));
  CHECK_THROWS_AS(doppler_error_ratio(p.plus, p.plus, BoostParameter(0.3)), Error);
  const auto q = helicity_pair(0.02, 8);
  CHECK_THROWS_AS(doppler_error_ratio(p.plus, q.minus, BoostParameter(0.3)), Error);
}

TEST_CASE("receding observer witnesses a non-CP map; approaching one does not") {
  const auto p = helicity_pair(0.02);
  const CpWitness w = cp_violation_witness(p.plus, p.minus, BoostParameter(-0.5));
  CHECK(w.violated);
  CHECK(w.ratio == doctest::Approx(1.0 / 3.0).epsilon(0.05));
  CHECK(w.report().find("not completely positive") != std::string::npos);
  const CpWitness n = cp_violation_witness(p.plus, p.minus, BoostParameter(0.5));
  CHECK_FALSE(n.violated);
  CHECK(n.ratio == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("BoostedObserver dispatches on method") {
  const auto p = helicity_pair(0.02, 8);
  const BoostedObserver a{BoostParameter(0.4), BoostMethod::AmplitudeSubstitution};
  const BoostedObserver b{BoostParameter(0.4)};
  CHECK(a.rho(p.plus).matrix().max_abs_diff(b.rho(p.plus).matrix()) < 1e-10);
}
