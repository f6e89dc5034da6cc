#pragma once

#include <complex>
#include <optional>

namespace szego {

using cplx = std::complex<double>;

struct Vec2 {
  cplx x{1.0, 0.0};
  cplx y{0.0, 0.0};

  [[nodiscard]] double norm() const;
};

/// 2x2 complex matrix [[a, b], [c, d]].
struct Mat2 {
  cplx a{1.0, 0.0};
  cplx b{0.0, 0.0};
  cplx c{0.0, 0.0};
  cplx d{1.0, 0.0};

  static constexpr Mat2 identity() { return {}; }
  static constexpr Mat2 zero() { return {0.0, 0.0, 0.0, 0.0}; }
  static Mat2 diag(cplx p, cplx q) { return {p, 0.0, 0.0, q}; }

  [[nodiscard]] cplx det() const { return a * d - b * c; }
  [[nodiscard]] cplx trace() const { return a + d; }
  [[nodiscard]] Mat2 inverse() const;
  [[nodiscard]] Mat2 adjoint() const;
  /// Largest singular value.
  [[nodiscard]] double opNorm() const;
  [[nodiscard]] double maxAbs() const;

  Mat2& operator*=(const Mat2& o);
  Mat2& operator+=(const Mat2& o);
  Mat2& operator-=(const Mat2& o);
  Mat2& operator*=(cplx s);
  Mat2& operator/=(cplx s);
};

Mat2 operator*(const Mat2& p, const Mat2& q);
Mat2 operator+(Mat2 p, const Mat2& q);
Mat2 operator-(Mat2 p, const Mat2& q);
Mat2 operator*(cplx s, Mat2 m);
Mat2 operator*(Mat2 m, cplx s);
Vec2 operator*(const Mat2& m, const Vec2& v);

struct SingularPair {
  double smax = 1.0;
  double smin = 1.0;
  Vec2 contracted;  ///< unit right singular vector for smin
};

SingularPair singular(const Mat2& m);

/// exp(X) for traceless X.
Mat2 expTraceless(const Mat2& x);

/// Principal logarithm of a det-1 matrix lying within `radius` of the identity
/// (operator norm). Returns nullopt outside that ball.
std::optional<Mat2> logNearIdentity(const Mat2& m, double radius = 0.5);

/// The form J = diag(1, -1).
inline constexpr Mat2 kJ{1.0, 0.0, 0.0, -1.0};

/// max-entry defect of A* J A - J.
double formDefect(const Mat2& m);

/// Element [[a, b], [conj b, conj a]] of SU(1,1).
struct Su11Matrix {
  cplx a{1.0, 0.0};
  cplx b{0.0, 0.0};

  [[nodiscard]] Mat2 mat() const { return {a, b, std::conj(b), std::conj(a)}; }
  [[nodiscard]] double det() const { return std::norm(a) - std::norm(b); }
  [[nodiscard]] double trace() const { return 2.0 * a.real(); }

  /// Nearest element in the (a, b) parametrisation, det renormalised to 1.
  static Su11Matrix project(const Mat2& m);
};

/// Traceless element [[i t, v], [conj v, -i t]] of su(1,1).
struct Su11Algebra {
  double t = 0.0;
  cplx v{0.0, 0.0};

  [[nodiscard]] Mat2 mat() const {
    return {cplx(0.0, t), v, std::conj(v), cplx(0.0, -t)};
  }
  static Su11Algebra project(const Mat2& m);
};

/// max-entry defect of X* J + J X (zero on su(1,1)).
double algebraDefect(const Mat2& x);

}  // namespace szego
