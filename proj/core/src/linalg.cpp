#include "szego/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace szego {

double Vec2::norm() const { return std::sqrt(std::norm(x) + std::norm(y)); }

Mat2 Mat2::inverse() const {
  const cplx det = this->det();
  return {d / det, -b / det, -c / det, a / det};
}

Mat2 Mat2::adjoint() const {
  return {std::conj(a), std::conj(c), std::conj(b), std::conj(d)};
}

double Mat2::opNorm() const { return singular(*this).smax; }

double Mat2::maxAbs() const {
  return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
}

Mat2& Mat2::operator*=(const Mat2& o) { return *this = *this * o; }

Mat2& Mat2::operator+=(const Mat2& o) {
  a += o.a;
  b += o.b;
  c += o.c;
  d += o.d;
  return *this;
}

Mat2& Mat2::operator-=(const Mat2& o) {
  a -= o.a;
  b -= o.b;
  c -= o.c;
  d -= o.d;
  return *this;
}

Mat2& Mat2::operator*=(cplx s) {
  a *= s;
  b *= s;
  c *= s;
  d *= s;
  return *this;
}

Mat2& Mat2::operator/=(cplx s) {
  a /= s;
  b /= s;
  c /= s;
  d /= s;
  return *this;
}

Mat2 operator*(const Mat2& p, const Mat2& q) {
  return {p.a * q.a + p.b * q.c, p.a * q.b + p.b * q.d,
          p.c * q.a + p.d * q.c, p.c * q.b + p.d * q.d};
}

Mat2 operator+(Mat2 p, const Mat2& q) { return p += q; }
Mat2 operator-(Mat2 p, const Mat2& q) { return p -= q; }
Mat2 operator*(cplx s, Mat2 m) { return m *= s; }
Mat2 operator*(Mat2 m, cplx s) { return m *= s; }

Vec2 operator*(const Mat2& m, const Vec2& v) {
  return {m.a * v.x + m.b * v.y, m.c * v.x + m.d * v.y};
}

SingularPair singular(const Mat2& in) {
  // Work on a copy scaled to unit max entry so squares cannot overflow.
  const double scale = in.maxAbs();
  SingularPair out;
  if (scale == 0.0) {
    out.smax = out.smin = 0.0;
    return out;
  }
  Mat2 m = in;
  m /= scale;
  const double s = std::norm(m.a) + std::norm(m.b) + std::norm(m.c) + std::norm(m.d);
  const double det = std::abs(m.det());
  const double disc = std::sqrt(std::max(0.0, s - 2.0 * det)) * std::sqrt(s + 2.0 * det);
  const double big = 0.5 * (s + disc);
  out.smax = std::sqrt(big);
  out.smin = out.smax > 0.0 ? det / out.smax : 0.0;

  // Right singular vector of the small singular value: kernel of M*M - smin^2.
  const double p = std::norm(m.a) + std::norm(m.c);
  const double r = std::norm(m.b) + std::norm(m.d);
  const cplx q = std::conj(m.a) * m.b + std::conj(m.c) * m.d;
  const double mu = out.smin * out.smin;
  Vec2 v1{q, cplx(mu - p)};
  Vec2 v2{cplx(mu - r), std::conj(q)};
  Vec2 v = v1.norm() >= v2.norm() ? v1 : v2;
  const double n = v.norm();
  if (n > 0.0) {
    v.x /= n;
    v.y /= n;
  } else {
    v = {1.0, 0.0};
  }
  out.contracted = v;
  out.smax *= scale;
  out.smin *= scale;
  return out;
}

Mat2 expTraceless(const Mat2& x) {
  const cplx s2 = -x.det();
  const cplx s = std::sqrt(s2);
  cplx ch;
  cplx shc;
  if (std::abs(s) < 1e-4) {
    ch = 1.0 + s2 / 2.0 + s2 * s2 / 24.0;
    shc = 1.0 + s2 / 6.0 + s2 * s2 / 120.0;
  } else {
    ch = std::cosh(s);
    shc = std::sinh(s) / s;
  }
  return Mat2{ch, 0.0, 0.0, ch} + shc * x;
}

std::optional<Mat2> logNearIdentity(const Mat2& m, double radius) {
  if ((m - Mat2::identity()).opNorm() > radius) return std::nullopt;
  Mat2 u = m;
  u /= std::sqrt(m.det());
  const cplx half = 0.5 * u.trace();
  const cplx theta = std::acosh(half);
  const cplx t2 = theta * theta;
  cplx f;
  if (std::abs(theta) < 1e-4) {
    f = 1.0 - t2 / 6.0 + 7.0 * t2 * t2 / 360.0;
  } else {
    f = theta / std::sinh(theta);
  }
  return f * (u - Mat2{half, 0.0, 0.0, half});
}

double formDefect(const Mat2& m) {
  return (m.adjoint() * kJ * m - kJ).maxAbs();
}

Su11Matrix Su11Matrix::project(const Mat2& m) {
  Su11Matrix s{0.5 * (m.a + std::conj(m.d)), 0.5 * (m.b + std::conj(m.c))};
  const double n = s.det();
  if (n > 0.0) {
    const double k = 1.0 / std::sqrt(n);
    s.a *= k;
    s.b *= k;
  }
  return s;
}

Su11Algebra Su11Algebra::project(const Mat2& m) {
  return {0.5 * (m.a.imag() - m.d.imag()), 0.5 * (m.b + std::conj(m.c))};
}

double algebraDefect(const Mat2& x) {
  return (x.adjoint() * kJ + kJ * x).maxAbs();
}

}  // namespace szego
