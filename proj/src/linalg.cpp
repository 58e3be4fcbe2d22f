#include "photonpol/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "photonpol/error.hpp"

namespace photonpol {

CVec3 CVec3::axis(std::size_t i) {
  CVec3 u;
  u[i] = 1.0;
  return u;
}

CVec3 operator+(const CVec3& u, const CVec3& w) {
  return {{u[0] + w[0], u[1] + w[1], u[2] + w[2]}};
}

CVec3 operator-(const CVec3& u, const CVec3& w) {
  return {{u[0] - w[0], u[1] - w[1], u[2] - w[2]}};
}

CVec3 operator*(cplx s, const CVec3& u) { return {{s * u[0], s * u[1], s * u[2]}}; }

cplx inner(const CVec3& u, const CVec3& w) {
  return std::conj(u[0]) * w[0] + std::conj(u[1]) * w[1] + std::conj(u[2]) * w[2];
}

cplx dot(const CVec3& u, const CVec3& w) { return u[0] * w[0] + u[1] * w[1] + u[2] * w[2]; }

double norm(const CVec3& u) { return std::sqrt(std::norm(u[0]) + std::norm(u[1]) + std::norm(u[2])); }

CMat3 CMat3::identity() { return diag(1.0, 1.0, 1.0); }

CMat3 CMat3::diag(double d0, double d1, double d2) {
  CMat3 m;
  m(0, 0) = d0;
  m(1, 1) = d1;
  m(2, 2) = d2;
  return m;
}

CMat3 CMat3::outer(const CVec3& u, const CVec3& w) {
  CMat3 m;
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) m(r, c) = u[r] * std::conj(w[c]);
  return m;
}

CMat3 CMat3::adjoint() const {
  CMat3 m;
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) m(r, c) = std::conj((*this)(c, r));
  return m;
}

CMat3 CMat3::conj() const {
  CMat3 m;
  for (std::size_t i = 0; i < 9; ++i) m.a[i] = std::conj(a[i]);
  return m;
}

cplx CMat3::trace() const { return a[0] + a[4] + a[8]; }

bool CMat3::is_hermitian(double tol) const { return max_abs_diff(adjoint()) <= tol; }

double CMat3::max_abs_diff(const CMat3& other) const {
  double worst = 0.0;
  for (std::size_t i = 0; i < 9; ++i) worst = std::max(worst, std::abs(a[i] - other.a[i]));
  return worst;
}

CMat3 operator+(const CMat3& x, const CMat3& y) {
  CMat3 m;
  for (std::size_t i = 0; i < 9; ++i) m.a[i] = x.a[i] + y.a[i];
  return m;
}

CMat3 operator-(const CMat3& x, const CMat3& y) {
  CMat3 m;
  for (std::size_t i = 0; i < 9; ++i) m.a[i] = x.a[i] - y.a[i];
  return m;
}

CMat3 operator*(const CMat3& x, const CMat3& y) {
  CMat3 m;
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c)
      m(r, c) = x(r, 0) * y(0, c) + x(r, 1) * y(1, c) + x(r, 2) * y(2, c);
  return m;
}

CMat3 operator*(cplx s, const CMat3& x) {
  CMat3 m;
  for (std::size_t i = 0; i < 9; ++i) m.a[i] = s * x.a[i];
  return m;
}

CVec3 operator*(const CMat3& m, const CVec3& u) {
  CVec3 w;
  for (std::size_t r = 0; r < 3; ++r) w[r] = m(r, 0) * u[0] + m(r, 1) * u[1] + m(r, 2) * u[2];
  return w;
}

RMat3 RMat3::transpose() const {
  RMat3 m;
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) m(r, c) = (*this)(c, r);
  return m;
}

double RMat3::det() const {
  const RMat3& m = *this;
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
         m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

RMat3 operator*(const RMat3& x, const RMat3& y) {
  RMat3 m;
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c)
      m(r, c) = x(r, 0) * y(0, c) + x(r, 1) * y(1, c) + x(r, 2) * y(2, c);
  return m;
}

CVec3 operator*(const RMat3& m, const CVec3& u) {
  CVec3 w;
  for (std::size_t r = 0; r < 3; ++r) w[r] = m(r, 0) * u[0] + m(r, 1) * u[1] + m(r, 2) * u[2];
  return w;
}

Direction::Direction(double theta, double phi) {
  if (!std::isfinite(theta) || !std::isfinite(phi))
    throw Error(ErrorCode::InvalidDirection, "non-finite angle");
  if (theta < 0.0 || theta >= kPi)
    throw Error(ErrorCode::InvalidDirection, "theta must lie in [0, pi), got " + std::to_string(theta));
  phi = std::fmod(phi, 2.0 * kPi);
  if (phi < 0.0) phi += 2.0 * kPi;
  if (phi >= 2.0 * kPi) phi = 0.0;
  theta_ = theta;
  phi_ = phi;
}

std::array<double, 3> Direction::unit() const {
  const double st = std::sin(theta_);
  return {st * std::cos(phi_), st * std::sin(phi_), std::cos(theta_)};
}

BoostParameter::BoostParameter(double v) : v_(v) {
  if (!std::isfinite(v) || std::abs(v) >= 1.0)
    throw Error(ErrorCode::InvalidVelocity, "|v| must be < 1, got " + std::to_string(v));
}

BoostParameter BoostParameter::from_rapidity(double eta) { return BoostParameter(std::tanh(eta)); }

double BoostParameter::gamma() const { return 1.0 / std::sqrt((1.0 - v_) * (1.0 + v_)); }

double BoostParameter::doppler() const { return std::sqrt((1.0 + v_) / (1.0 - v_)); }

double BoostParameter::rapidity() const { return std::atanh(v_); }

BoostParameter compose(const BoostParameter& first, const BoostParameter& second) {
  const double v1 = first.velocity();
  const double v2 = second.velocity();
  return BoostParameter((v1 + v2) / (1.0 + v1 * v2));
}

std::array<double, 4> NullWaveVector::four_vector() const {
  const auto n = dir.unit();
  return {k0, k0 * n[0], k0 * n[1], k0 * n[2]};
}

RMat3 rotation_to(const Direction& khat) {
  const double ct = std::cos(khat.theta());
  const double st = std::sin(khat.theta());
  const double cp = std::cos(khat.phi());
  const double sp = std::sin(khat.phi());
  RMat3 r;
  r.a = {ct * cp, -sp, cp * st,
         ct * sp, cp,  sp * st,
         -st,     0.0, ct};
  return r;
}

CVec3 standard_helicity(int sign) {
  const double s = 1.0 / std::sqrt(2.0);
  return {{cplx{s}, cplx{0.0, sign >= 0 ? s : -s}, cplx{0.0}}};
}

std::pair<CVec3, CVec3> helicity_vectors(const Direction& khat) {
  const RMat3 r = rotation_to(khat);
  return {r * standard_helicity(+1), r * standard_helicity(-1)};
}

NullWaveVector boost_null(const NullWaveVector& k, const BoostParameter& b) {
  const double g = b.gamma();
  const double v = b.velocity();
  const double ct = std::cos(k.dir.theta());
  const double st = std::sin(k.dir.theta());
  // Components per unit k0: transverse part is unchanged.
  const double kz = g * (ct - v);
  const double k0 = g * (1.0 - v * ct);
  return {k.k0 * k0, Direction(std::atan2(st, kz), k.dir.phi())};
}

namespace {

double off_diagonal_mass(const CMat3& m) {
  return std::sqrt(2.0 * (std::norm(m(0, 1)) + std::norm(m(0, 2)) + std::norm(m(1, 2))));
}

double frobenius(const CMat3& m) {
  double s = 0.0;
  for (const auto& x : m.a) s += std::norm(x);
  return std::sqrt(s);
}

}  // namespace

Eigen3 eig_herm3(const CMat3& input, double hermitian_tol) {
  if (!input.is_hermitian(hermitian_tol))
    throw Error(ErrorCode::NotHermitian, "matrix deviates from its adjoint by " +
                                             std::to_string(input.max_abs_diff(input.adjoint())));

  // Symmetrise so roundoff in the input does not leak into the rotations.
  CMat3 a = 0.5 * (input + input.adjoint());
  CMat3 v = CMat3::identity();
  const double threshold = 1e-14 * std::max(frobenius(a), 1e-300);

  constexpr int kMaxSweeps = 64;
  for (int sweep = 0; sweep < kMaxSweeps && off_diagonal_mass(a) > threshold; ++sweep) {
    for (std::size_t p = 0; p < 2; ++p) {
      for (std::size_t q = p + 1; q < 3; ++q) {
        const double apq = std::abs(a(p, q));
        if (apq == 0.0) continue;
        // Phase on column q makes a(p,q) real positive, then a real rotation zeroes it.
        const cplx phase = a(p, q) / apq;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(tau * tau + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        CMat3 u = CMat3::identity();
        u(p, p) = c;
        u(p, q) = s;
        u(q, p) = -s * std::conj(phase);
        u(q, q) = c * std::conj(phase);
        a = u.adjoint() * a * u;
        v = v * u;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t i = 0; i < 3; ++i) a(i, i) = a(i, i).real();
      }
    }
  }

  std::array<std::size_t, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });

  Eigen3 out;
  for (std::size_t k = 0; k < 3; ++k) {
    const std::size_t col = order[k];
    out.values[k] = a(col, col).real();
    out.vectors[k] = {{v(0, col), v(1, col), v(2, col)}};
  }
  return out;
}

double trace_norm_diff(const CMat3& a, const CMat3& b) {
  constexpr double kTol = 1e-10;
  if (!a.is_hermitian(kTol)) throw Error(ErrorCode::NotHermitian, "first argument of trace norm");
  if (!b.is_hermitian(kTol)) throw Error(ErrorCode::NotHermitian, "second argument of trace norm");
  const Eigen3 e = eig_herm3(a - b, kTol);
  return std::abs(e.values[0]) + std::abs(e.values[1]) + std::abs(e.values[2]);
}

}  // namespace photonpol
