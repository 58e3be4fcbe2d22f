#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <utility>

namespace photonpol {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Complex 3-vector with components labelled (x, y, z).
struct CVec3 {
  std::array<cplx, 3> c{};

  cplx& operator[](std::size_t i) { return c[i]; }
  const cplx& operator[](std::size_t i) const { return c[i]; }

  static CVec3 real(double x, double y, double z) { return {{cplx{x}, cplx{y}, cplx{z}}}; }
  static CVec3 axis(std::size_t i);
};

CVec3 operator+(const CVec3& u, const CVec3& w);
CVec3 operator-(const CVec3& u, const CVec3& w);
CVec3 operator*(cplx s, const CVec3& u);

/// <u|w> = sum conj(u_i) w_i.
cplx inner(const CVec3& u, const CVec3& w);
/// Bilinear u . w without conjugation.
cplx dot(const CVec3& u, const CVec3& w);
double norm(const CVec3& u);

/// Complex 3x3 matrix, row-major over (x, y, z).
struct CMat3 {
  std::array<cplx, 9> a{};

  cplx& operator()(std::size_t r, std::size_t c) { return a[3 * r + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return a[3 * r + c]; }

  static CMat3 identity();
  static CMat3 diag(double d0, double d1, double d2);
  /// |u><w|
  static CMat3 outer(const CVec3& u, const CVec3& w);

  CMat3 adjoint() const;
  CMat3 conj() const;
  cplx trace() const;
  bool is_hermitian(double tol) const;
  /// Largest entrywise modulus of (this - other).
  double max_abs_diff(const CMat3& other) const;
};

CMat3 operator+(const CMat3& x, const CMat3& y);
CMat3 operator-(const CMat3& x, const CMat3& y);
CMat3 operator*(const CMat3& x, const CMat3& y);
CMat3 operator*(cplx s, const CMat3& x);
CVec3 operator*(const CMat3& m, const CVec3& u);

/// Real 3x3 matrix, row-major.
struct RMat3 {
  std::array<double, 9> a{};

  double& operator()(std::size_t r, std::size_t c) { return a[3 * r + c]; }
  double operator()(std::size_t r, std::size_t c) const { return a[3 * r + c]; }

  RMat3 transpose() const;
  double det() const;
};

RMat3 operator*(const RMat3& x, const RMat3& y);
CVec3 operator*(const RMat3& m, const CVec3& u);

/// Propagation direction (theta, phi). theta is restricted to [0, pi); the
/// antipode is the singular point of the rotation convention. At theta = 0
/// the stored phi is kept and R(k) reduces to a z-rotation by phi.
class Direction {
 public:
  Direction() = default;
  /// Throws InvalidDirection outside theta in [0, pi) or for non-finite input.
  /// phi is wrapped into [0, 2pi).
  Direction(double theta, double phi);

  double theta() const noexcept { return theta_; }
  double phi() const noexcept { return phi_; }
  std::array<double, 3> unit() const;

 private:
  double theta_ = 0.0;
  double phi_ = 0.0;
};

/// Velocity of the observer along +z in units of c.
class BoostParameter {
 public:
  BoostParameter() = default;
  /// Throws InvalidVelocity unless |v| < 1.
  explicit BoostParameter(double v);

  static BoostParameter from_rapidity(double eta);

  double velocity() const noexcept { return v_; }
  double gamma() const;
  /// sqrt((1+v)/(1-v))
  double doppler() const;
  double rapidity() const;
  BoostParameter inverse() const { return BoostParameter(-v_); }

 private:
  double v_ = 0.0;
};

/// Relativistic velocity addition along z (rapidities add).
BoostParameter compose(const BoostParameter& first, const BoostParameter& second);

/// Null four-vector (k0, k0 sin(theta) cos(phi), k0 sin(theta) sin(phi), k0 cos(theta)).
struct NullWaveVector {
  double k0 = 1.0;
  Direction dir;

  std::array<double, 4> four_vector() const;
};

/// R(k): rotates (0,0,1) onto k and carries the standard helicity vectors.
RMat3 rotation_to(const Direction& khat);

/// (eps+_k, eps-_k) = R(k) (1, +-i, 0)/sqrt(2).
std::pair<CVec3, CVec3> helicity_vectors(const Direction& khat);

/// Helicity vectors of the standard momentum (0,0,1).
CVec3 standard_helicity(int sign);

/// Lorentz boost of a null vector into the frame of an observer moving with
/// velocity v along z. phi is unchanged.
NullWaveVector boost_null(const NullWaveVector& k, const BoostParameter& b);

struct Eigen3 {
  std::array<double, 3> values{};   ///< descending
  std::array<CVec3, 3> vectors{};   ///< orthonormal, vectors[i] pairs with values[i]
};

/// Cyclic complex Jacobi eigensolver for Hermitian 3x3 matrices.
/// Throws NotHermitian if max |M - M^dagger| > hermitian_tol.
Eigen3 eig_herm3(const CMat3& m, double hermitian_tol = 1e-10);

/// tr|A - B| = sum |lambda_i(A - B)|.
double trace_norm_diff(const CMat3& a, const CMat3& b);

}  // namespace photonpol
