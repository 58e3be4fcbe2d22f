#include <doctest.h>

#include <cmath>
#include <memory>

#include "oracles.hpp"
#include "photonpol/error.hpp"
#include "photonpol/polarization_povm.hpp"

using namespace photonpol;

namespace {

std::shared_ptr<const MomentumGrid> make_grid(double omega, int n = 32) {
  GridSpec s;
  s.delta_r = omega;
  s.delta_z = omega / 10.0;
  s.n_z = s.n_r = s.n_phi = n;
  return std::make_shared<const MomentumGrid>(MomentumGrid::make(s));
}

PhotonWavePacket packet_with(const std::shared_ptr<const MomentumGrid>& grid, double omega,
                             PolarizationField::Amplitudes alpha) {
  return PhotonWavePacket(grid, gaussian_amplitude(*grid, 1.0, omega / 10.0, omega),
                          PolarizationField::uniform(grid->size(), alpha));
}

CMat3 from_oracle(const oracle::Mat& m) {
  CMat3 out;
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) out(r, c) = m[r][c];
  return out;
}

}  // namespace

TEST_CASE("transversal parts resolve the transversal identity") {
  oracle::for_all(300, 41, [](oracle::Gen& g, int) {
    const Direction d(g.uniform(0.0, 3.1), g.uniform(0.0, 6.28));
    const auto n = d.unit();
    CMat3 sum;
    for (Axis m : {Axis::X, Axis::Y, Axis::Z}) {
      const auto b = transversal_part(d, m);
      sum = sum + CMat3::outer(b.vector, b.vector);
      // |m> = b_m + (k.m) k, and the pieces are orthogonal.
      CHECK(std::norm(b.plus) + std::norm(b.minus) + std::norm(b.longitudinal) == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(b.longitudinal.real() == doctest::Approx(n[static_cast<std::size_t>(m)]).epsilon(1e-14).scale(1.0));
    }
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < 3; ++c)
        CHECK(std::abs(sum(r, c) - ((r == c ? 1.0 : 0.0) - n[r] * n[c])) < 1e-14);
    // Direction states: |eps+><eps+| + |eps-><eps-| + |k><k| = 1.
    const auto [ep, em] = helicity_vectors(d);
    const CVec3 k = CVec3::real(n[0], n[1], n[2]);
    const CMat3 full = CMat3::outer(ep, ep) + CMat3::outer(em, em) + CMat3::outer(k, k);
    CHECK(full.max_abs_diff(CMat3::identity()) < 1e-15);
  });
}

TEST_CASE("closest transversal vector") {
  const Direction d(0.3, 1.0);
  const CVec3 e = closest_transversal(d, Axis::X);
  CHECK(norm(e) == doctest::Approx(1.0));
  const auto n = d.unit();
  CHECK(std::abs(e[0] * n[0] + e[1] * n[1] + e[2] * n[2]) < 1e-15);
  try {
    closest_transversal(Direction(0.0, 0.0), Axis::Z);
    FAIL("expected DegenerateDirection");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::DegenerateDirection);
  }
}

TEST_CASE("helicity packet rho matches the leading-order form") {
  for (double omega : {0.01, 0.02, 0.05}) {
    auto grid = make_grid(omega);
    const auto plus = reduced_density_matrix(packet_with(grid, omega, {1.0, 0.0}));
    const auto minus = reduced_density_matrix(packet_with(grid, omega, {0.0, 1.0}));
    const CMat3 ref = from_oracle(oracle::leading_rho(+1, omega));
    CHECK(plus.matrix().max_abs_diff(ref) <= 5 * std::pow(omega, 4));
    CHECK(minus.matrix().max_abs_diff(plus.matrix().conj()) <= 1e-10);
    CHECK(std::abs(plus.matrix().trace() - 1.0) < 1e-13);
    CHECK(plus.matrix().is_hermitian(1e-15));
    // Distinguishability: P_E = omega^2 / 4 at leading order.
    CHECK(helstrom_error(plus, minus) == doctest::Approx(omega * omega / 4).epsilon(0.02));
  }
}

TEST_CASE("quadrature rho agrees with an independent Monte Carlo estimate") {
  const double omega = 0.1;
  auto grid = make_grid(omega);
  oracle::for_all(2, 42, [&](oracle::Gen& g, int) {
    const auto alpha = g.amplitudes();
    const auto rho = reduced_density_matrix(packet_with(grid, omega, alpha));
    const auto mc = oracle::mc_rho(1.0, omega / 10, omega, 5.0, alpha, 200000, 4242);
    for (std::size_t r = 0; r < 3; ++r) {
      for (std::size_t c = 0; c < 3; ++c) {
        const cplx d = rho(r, c) - mc.mean[r][c];
        CHECK(std::abs(d.real()) <= 4 * mc.se_re[r][c] + 1e-15);
        CHECK(std::abs(d.imag()) <= 4 * mc.se_im[r][c] + 1e-15);
      }
    }
  });
}

TEST_CASE("reconstruction from POVM expectations equals direct quadrature") {
  auto grid = make_grid(0.05, 12);
  oracle::for_all(10, 43, [&](oracle::Gen& g, int) {
    const auto p = packet_with(grid, 0.05, g.amplitudes());
    const auto rho = reduced_density_matrix(p);
    for (Axis m : {Axis::X, Axis::Y, Axis::Z}) {
      CHECK(povm_expectation(p, CVec3::axis(static_cast<std::size_t>(m))) ==
            doctest::Approx(rho(m, m).real()).epsilon(1e-13).scale(1e-16));
      for (Axis n : {Axis::X, Axis::Y, Axis::Z}) {
        if (m == n) continue;
        CHECK(std::abs(reconstruct_offdiagonal(p, m, n) - rho(m, n)) < 1e-12);
      }
    }
    CHECK_THROWS_AS(reconstruct_offdiagonal(p, Axis::Y, Axis::Y), Error);
  });
}

TEST_CASE("polarization matrix validation") {
  CMat3 m = CMat3::diag(0.5, 0.5, 0.0);
  CHECK_NOTHROW(PolarizationMatrix::from_matrix(m));
  m(0, 1) = cplx{0.0, 0.1};
  try {
    PolarizationMatrix::from_matrix(m);
    FAIL("expected NotHermitian");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotHermitian);
  }
  CHECK_THROWS_AS(PolarizationMatrix::from_matrix(CMat3::diag(0.5, 0.4, 0.0)), Error);
  try {
    PolarizationMatrix::from_matrix(CMat3::diag(1.2, 0.0, -0.2));
    FAIL("expected NotDensityMatrix");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotDensityMatrix);
  }
}

TEST_CASE("Helstrom error, overlap and entropy on closed-form matrices") {
  const auto a = PolarizationMatrix::from_matrix(CMat3::diag(1.0, 0.0, 0.0));
  const auto b = PolarizationMatrix::from_matrix(CMat3::diag(0.0, 1.0, 0.0));
  CHECK(helstrom_error(a, b) == doctest::Approx(0.0));
  CHECK(helstrom_error(a, a) == doctest::Approx(0.5));
  CHECK(overlap(a, b) == 0.0);
  CHECK(von_neumann_entropy(a) == doctest::Approx(0.0).scale(1.0));
  CHECK(von_neumann_entropy(CMat3::diag(1.0 / 3, 1.0 / 3, 1.0 / 3)) == doctest::Approx(std::log(3.0)));
  CHECK_THROWS_AS(von_neumann_entropy(CMat3::diag(0.5, 0.4, 0.0)), Error);

  // Leading-order helicity matrices: the transverse blocks are orthogonal, so
  // only the longitudinal corner overlaps.
  for (double omega : {0.01, 0.1}) {
    const auto p = PolarizationMatrix::from_matrix(from_oracle(oracle::leading_rho(+1, omega)));
    const auto q = PolarizationMatrix::from_matrix(from_oracle(oracle::leading_rho(-1, omega)));
    CHECK(overlap(p, q) == doctest::Approx(std::pow(omega, 4) / 4).epsilon(1e-12));
    // tr|p - q| = 2 (1 - omega^2 / 2), so P_E = omega^2 / 4 exactly here.
    CHECK(helstrom_error(p, q) == doctest::Approx(omega * omega / 4).epsilon(1e-10));
  }
}

TEST_CASE("helicity pair: symmetric and bounded invariants") {
  oracle::for_all(6, 44, [](oracle::Gen& g, int) {
    const double omega = g.uniform(0.01, 0.1);
    auto grid = make_grid(omega, 16);
    const auto pa = reduced_density_matrix(packet_with(grid, omega, g.amplitudes()));
    const auto pb = reduced_density_matrix(packet_with(grid, omega, g.amplitudes()));
    const double pe = helstrom_error(pa, pb);
    CHECK(pe >= 0.0);
    CHECK(pe <= 0.5);
    CHECK(pe == doctest::Approx(helstrom_error(pb, pa)).epsilon(1e-14));
    CHECK(overlap(pa, pb) > 0.0);
    CHECK(von_neumann_entropy(pa) > 0.0);
    const auto ev = pa.eigenvalues();
    CHECK(ev[1] > 0.0);  // rank at least two
  });
}
