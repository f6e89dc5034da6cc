#include "szego/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "szego/errors.hpp"

namespace szego {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double frac(long double t) {
  long double f = t - std::floor(t);
  if (f >= 1.0L) f = 0.0L;
  return static_cast<double>(f);
}

}  // namespace

int l1(const MultiIndex& k) {
  int s = 0;
  for (int v : k) s += std::abs(v);
  return s;
}

double dot(const MultiIndex& k, std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i < k.size() && i < x.size(); ++i) s += k[i] * x[i];
  return s;
}

double distZ(double t) { return std::abs(t - std::nearbyint(t)); }

Frequency::Frequency(std::vector<double> omega) : omega_(std::move(omega)) {
  if (omega_.empty()) throw DomainError("frequency must have at least one component");
  for (double w : omega_) {
    if (!(w >= 0.0 && w < 1.0)) throw DomainError("frequency components must lie in [0,1)");
  }
}

Frequency Frequency::golden() { return Frequency({(std::sqrt(5.0) - 1.0) / 2.0}); }

TrigPolynomial::TrigPolynomial(int dim, std::map<MultiIndex, cplx> coefficients, double radius)
    : dim_(dim), coeffs_(std::move(coefficients)), radius_(radius) {
  if (dim_ < 1) throw DomainError("trig polynomial dimension must be >= 1");
  if (!(radius_ > 0.0)) throw DomainError("analyticity radius must be positive");
  for (const auto& [k, c] : coeffs_) {
    if (static_cast<int>(k.size()) != dim_)
      throw DomainError("multi-index length does not match dimension");
    (void)c;
  }
}

TrigPolynomial TrigPolynomial::zero(int dim, double radius) { return {dim, {}, radius}; }

TrigPolynomial TrigPolynomial::constant(int dim, double value, double radius) {
  return {dim, {{MultiIndex(static_cast<std::size_t>(dim), 0), cplx(value)}}, radius};
}

TrigPolynomial TrigPolynomial::cosine(const MultiIndex& k, double amplitude, double radius) {
  MultiIndex neg = k;
  for (int& v : neg) v = -v;
  return {static_cast<int>(k.size()), {{k, cplx(amplitude / 2)}, {neg, cplx(amplitude / 2)}}, radius};
}

double TrigPolynomial::evaluate(std::span<const double> x) const {
  double s = 0.0;
  for (const auto& [k, c] : coeffs_) {
    const double ph = kTwoPi * dot(k, x);
    s += c.real() * std::cos(ph) - c.imag() * std::sin(ph);
  }
  return s;
}

double TrigPolynomial::weightedNorm(double r) const {
  double s = 0.0;
  for (const auto& [k, c] : coeffs_) s += std::abs(c) * std::exp(kTwoPi * l1(k) * r);
  return s;
}

double TrigPolynomial::symmetryDefect() const {
  double worst = 0.0;
  for (const auto& [k, c] : coeffs_) {
    MultiIndex neg = k;
    for (int& v : neg) v = -v;
    const auto it = coeffs_.find(neg);
    const cplx partner = it == coeffs_.end() ? cplx(0.0) : it->second;
    worst = std::max(worst, std::abs(partner - std::conj(c)));
  }
  return worst;
}

bool TrigPolynomial::isConstant() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](const auto& kv) { return l1(kv.first) == 0 || kv.second == cplx(0.0); });
}

VerblunskyModel::VerblunskyModel(double lambda, TrigPolynomial h, Frequency omega)
    : lambda_(lambda), h_(std::move(h)), omega_(std::move(omega)) {
  if (!(lambda_ >= 0.0 && lambda_ < 1.0))
    throw DomainError("coupling must satisfy 0 <= lambda < 1 so that |alpha| < 1");
  if (h_.dim() != omega_.dim()) throw DomainError("h and omega dimensions differ");
  if (h_.symmetryDefect() > 1e-12)
    throw DomainError("h coefficients must be conjugate symmetric (real-valued h)");
}

double VerblunskyModel::rho() const { return std::sqrt((1.0 - lambda_) * (1.0 + lambda_)); }

cplx VerblunskyModel::alphaAt(std::span<const double> x) const {
  if (lambda_ == 0.0) return 0.0;
  return std::polar(lambda_, kTwoPi * h_.evaluate(x));
}

TorusPoint shift(const Frequency& omega, std::span<const double> x, long n) {
  TorusPoint y(static_cast<std::size_t>(omega.dim()));
  for (int i = 0; i < omega.dim(); ++i) {
    const long double t = static_cast<long double>(x[static_cast<std::size_t>(i)]) +
                          static_cast<long double>(n) * static_cast<long double>(omega[i]);
    y[static_cast<std::size_t>(i)] = frac(t);
  }
  return y;
}

cplx sample_alpha(const VerblunskyModel& model, std::span<const double> x, long n) {
  if (model.lambda() == 0.0) return 0.0;
  return model.alphaAt(shift(model.omega(), x, n - 1));
}

std::vector<cplx> alpha_orbit(const VerblunskyModel& model, std::span<const double> x,
                              long first, std::size_t count) {
  std::vector<cplx> out(count);
  if (model.lambda() == 0.0) return out;
  if (model.phaseIndependent()) {
    std::fill(out.begin(), out.end(), sample_alpha(model, x, first));
    return out;
  }
  for (std::size_t i = 0; i < count; ++i) out[i] = sample_alpha(model, x, first + static_cast<long>(i));
  return out;
}

ContinuedFraction continued_fraction(double omega, int depth) {
  if (depth < 1) throw DomainError("continued fraction depth must be >= 1");
  if (!(omega > 0.0 && omega < 1.0)) throw DomainError("continued fraction needs omega in (0,1)");
  ContinuedFraction cf;
  long long pPrev = 1, qPrev = 0;  // p_{-1}, q_{-1}
  long long p = 0, q = 1;          // p_0, q_0
  long double rem = omega;
  for (int n = 1; n <= depth; ++n) {
    const long double inv = 1.0L / rem;
    long long a = static_cast<long long>(std::floor(inv + 1e-12L));
    if (a < 1) a = 1;
    const long long pn = a * p + pPrev;
    const long long qn = a * q + qPrev;
    if (qn > 100000000LL) {
      cf.precisionLimited = true;
      break;
    }
    cf.convergents.push_back({a, pn, qn});
    pPrev = p;
    qPrev = q;
    p = pn;
    q = qn;
    rem = inv - static_cast<long double>(a);
    if (rem < 1e-9L) {
      cf.terminatedAt = n;
      break;
    }
  }
  return cf;
}

double frequency_from_partial_quotients(std::span<const long long> a) {
  long double x = 0.0L;
  for (auto it = a.rbegin(); it != a.rend(); ++it) x = 1.0L / (static_cast<long double>(*it) + x);
  return static_cast<double>(x);
}

double beta_exponent(double omega, int depth) {
  const ContinuedFraction cf = continued_fraction(omega, depth + 1);
  const auto& c = cf.convergents;
  if (c.size() < 2) return 0.0;
  auto ratio = [&](std::size_t n) {  // n is 1-based
    return std::log(static_cast<double>(c[n].q)) / static_cast<double>(c[n - 1].q);
  };
  const int lo = std::max(1, (3 * depth + 3) / 4);
  double best = -1.0;
  for (int n = lo; n <= depth && static_cast<std::size_t>(n) < c.size(); ++n)
    best = std::max(best, ratio(static_cast<std::size_t>(n)));
  if (best < 0.0) best = ratio(c.size() - 1);
  return std::max(0.0, best);
}

std::vector<MultiIndex> lattice_ball(int dim, int cutoff, bool halfSpace) {
  std::vector<MultiIndex> out;
  MultiIndex k(static_cast<std::size_t>(dim), -cutoff);
  for (;;) {
    const int m = l1(k);
    if (m > 0 && m <= cutoff) {
      bool keep = true;
      if (halfSpace) {
        // keep k whose first nonzero entry is positive
        for (int v : k) {
          if (v != 0) {
            keep = v > 0;
            break;
          }
        }
      }
      if (keep) out.push_back(k);
    }
    int i = 0;
    while (i < dim && k[static_cast<std::size_t>(i)] == cutoff) {
      k[static_cast<std::size_t>(i)] = -cutoff;
      ++i;
    }
    if (i == dim) break;
    ++k[static_cast<std::size_t>(i)];
  }
  return out;
}

DiophantineVerdict diophantine_check(const Frequency& omega, DiophantineParams params, int cutoff) {
  if (cutoff < 1) throw DomainError("diophantine cutoff must be >= 1");
  if (!(params.kappa > 0.0 && params.tau > 0.0)) throw DomainError("kappa and tau must be positive");
  DiophantineVerdict v;
  // smallest |n| first so the reported witness is minimal
  auto ball = lattice_ball(omega.dim(), cutoff, true);
  std::stable_sort(ball.begin(), ball.end(),
                   [](const MultiIndex& a, const MultiIndex& b) { return l1(a) < l1(b); });
  for (const auto& n : ball) {
    const double dist = distZ(omega.pair(n));
    const double bound = params.kappa / std::pow(static_cast<double>(l1(n)), params.tau);
    if (dist < bound) {
      v.pass = false;
      v.witness = n;
      v.distance = dist;
      v.bound = bound;
      return v;
    }
  }
  return v;
}

}  // namespace szego
