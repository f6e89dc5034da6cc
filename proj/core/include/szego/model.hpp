#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "szego/linalg.hpp"

namespace szego {

using TorusPoint = std::vector<double>;
using MultiIndex = std::vector<int>;

/// l1 magnitude of a multi-index, used for every |k| in the library.
int l1(const MultiIndex& k);
double dot(const MultiIndex& k, std::span<const double> x);

/// Distance from t to the nearest integer.
double distZ(double t);

/// Frequency vector with components in [0, 1).
class Frequency {
 public:
  explicit Frequency(std::vector<double> omega);
  static Frequency golden();

  [[nodiscard]] int dim() const { return static_cast<int>(omega_.size()); }
  [[nodiscard]] const std::vector<double>& values() const { return omega_; }
  [[nodiscard]] double operator[](int i) const { return omega_[static_cast<std::size_t>(i)]; }
  /// <k, omega>
  [[nodiscard]] double pair(const MultiIndex& k) const { return dot(k, omega_); }

 private:
  std::vector<double> omega_;
};

struct DiophantineParams {
  double kappa;
  double tau;
};

/// Finite trigonometric polynomial h(x) = sum_k c_k e^{2 pi i <k,x>}.
/// Coefficients should be conjugate symmetric; evaluation returns Re h.
class TrigPolynomial {
 public:
  TrigPolynomial() = default;
  TrigPolynomial(int dim, std::map<MultiIndex, cplx> coefficients, double radius);

  static TrigPolynomial zero(int dim, double radius = 0.5);
  static TrigPolynomial constant(int dim, double value, double radius = 0.5);
  /// amplitude * cos(2 pi <k, x>)
  static TrigPolynomial cosine(const MultiIndex& k, double amplitude = 1.0, double radius = 0.5);

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] double radius() const { return radius_; }
  [[nodiscard]] const std::map<MultiIndex, cplx>& coefficients() const { return coeffs_; }
  [[nodiscard]] double evaluate(std::span<const double> x) const;
  /// sum |c_k| e^{2 pi |k| r}
  [[nodiscard]] double weightedNorm(double r) const;
  [[nodiscard]] double weightedNorm() const { return weightedNorm(radius_); }
  /// Largest conjugate-symmetry violation |c_{-k} - conj c_k|.
  [[nodiscard]] double symmetryDefect() const;
  /// True when only the zero mode is present.
  [[nodiscard]] bool isConstant() const;

 private:
  int dim_ = 1;
  std::map<MultiIndex, cplx> coeffs_;
  double radius_ = 0.5;
};

/// alpha_n(x) = lambda e^{2 pi i h(x + (n-1) omega)}.
class VerblunskyModel {
 public:
  VerblunskyModel(double lambda, TrigPolynomial h, Frequency omega);

  [[nodiscard]] double lambda() const { return lambda_; }
  [[nodiscard]] const TrigPolynomial& h() const { return h_; }
  [[nodiscard]] const Frequency& omega() const { return omega_; }
  [[nodiscard]] int dim() const { return omega_.dim(); }
  /// sqrt(1 - lambda^2), the constant |rho_n|.
  [[nodiscard]] double rho() const;
  /// True when alpha does not depend on the phase.
  [[nodiscard]] bool phaseIndependent() const { return lambda_ == 0.0 || h_.isConstant(); }
  /// alpha(x) itself (n = 1).
  [[nodiscard]] cplx alphaAt(std::span<const double> x) const;

 private:
  double lambda_;
  TrigPolynomial h_;
  Frequency omega_;
};

cplx sample_alpha(const VerblunskyModel& model, std::span<const double> x, long n);

/// alpha_first(x), ..., alpha_{first+count-1}(x) in sample_alpha's indexing.
std::vector<cplx> alpha_orbit(const VerblunskyModel& model, std::span<const double> x,
                              long first, std::size_t count);

/// x + n omega reduced to [0, 1)^d.
TorusPoint shift(const Frequency& omega, std::span<const double> x, long n);

struct Convergent {
  long long a;  ///< partial quotient a_n
  long long p;
  long long q;
};

struct ContinuedFraction {
  std::vector<Convergent> convergents;  ///< n = 1, 2, ...
  std::optional<int> terminatedAt;      ///< index at which a rational omega ended
  bool precisionLimited = false;        ///< stopped because double precision ran out
};

ContinuedFraction continued_fraction(double omega, int depth);

/// omega = [0; a_1, a_2, ...] evaluated in long double.
double frequency_from_partial_quotients(std::span<const long long> a);

/// Finite-depth estimate of limsup ln q_{n+1} / q_n: the max over the last
/// quarter of the requested indices n <= depth (the early convergents say
/// nothing about a limsup).
double beta_exponent(double omega, int depth);

struct DiophantineVerdict {
  bool pass = true;
  MultiIndex witness;        ///< violating n on failure
  double distance = 0.0;     ///< achieved inf_j |<n, omega> - j|
  double bound = 0.0;        ///< kappa / |n|^tau at the witness
};

DiophantineVerdict diophantine_check(const Frequency& omega, DiophantineParams params, int cutoff);

/// All n in Z^d with 0 < |n|_1 <= cutoff (one representative of each +-pair
/// when `halfSpace`).
std::vector<MultiIndex> lattice_ball(int dim, int cutoff, bool halfSpace = false);

}  // namespace szego
