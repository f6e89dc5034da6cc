#include "szego/cmv.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "szego/errors.hpp"

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace szego {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrapAngle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

// Tridiagonal-by-row storage of a block diagonal factor.
struct Factor {
  std::vector<std::array<cplx, 3>> rows;  // (i, i-1), (i, i), (i, i+1)
  explicit Factor(int n) : rows(static_cast<std::size_t>(n), {cplx(0), cplx(0), cplx(0)}) {}
  cplx at(int i, int j) const {
    const int d = j - i;
    if (i < 0 || i >= static_cast<int>(rows.size()) || d < -1 || d > 1) return 0.0;
    return rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(d + 1)];
  }
  void set(int i, int j, cplx v) { rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j - i + 1)] = v; }
};

// Places Theta_j (global index j) into the factor whose local row 0 has global
// index `first`. Straddling blocks keep only their inside entry.
void placeBlock(Factor& f, long first, int n, long j, cplx alpha, const Boundary& bd,
                bool leftFixedOne) {
  const long r0 = j - first;
  const long r1 = r0 + 1;
  const bool in0 = r0 >= 0 && r0 < n;
  const bool in1 = r1 >= 0 && r1 < n;
  if (in0 && in1) {
    const ThetaBlock t(alpha);
    const Mat2 m = t.mat();
    const int i = static_cast<int>(r0);
    f.set(i, i, m.a);
    f.set(i, i + 1, m.b);
    f.set(i + 1, i, m.c);
    f.set(i + 1, i + 1, m.d);
  } else if (in0) {
    const cplx a = bd.decoupled() ? bd.beta : alpha;
    f.set(static_cast<int>(r0), static_cast<int>(r0), std::conj(a));
  } else if (in1) {
    cplx v;
    if (leftFixedOne) {
      v = 1.0;
    } else {
      v = -(bd.decoupled() ? bd.beta : alpha);
    }
    f.set(static_cast<int>(r1), static_cast<int>(r1), v);
  }
}

}  // namespace

ThetaBlock::ThetaBlock(cplx a) : alpha(a) {
  const double m = std::norm(a);
  if (!(m < 1.0)) throw DomainError("Theta block needs |alpha| < 1");
  rho = std::sqrt(1.0 - m);
}

Boundary Boundary::unimodular(cplx beta) {
  if (std::abs(std::abs(beta) - 1.0) > 1e-12) throw DomainError("boundary value must be unimodular");
  return {Type::unimodular, beta};
}

CmvTruncation::CmvTruncation(CmvKind kind, long firstIndex, Boundary boundary, TorusPoint basePhase,
                             std::vector<cplx> coefficients, std::vector<std::array<cplx, 5>> band)
    : kind_(kind),
      size_(static_cast<int>(band.size())),
      first_(firstIndex),
      boundary_(boundary),
      basePhase_(std::move(basePhase)),
      coefficients_(std::move(coefficients)),
      band_(std::move(band)) {}

cplx CmvTruncation::operator()(int row, int col) const {
  const int d = col - row;
  if (row < 0 || row >= size_ || col < 0 || col >= size_ || d < -2 || d > 2) return 0.0;
  return band_[static_cast<std::size_t>(row)][static_cast<std::size_t>(d + 2)];
}

CmvTruncation::Dense CmvTruncation::dense() const {
  Dense m = Dense::Zero(size_, size_);
  for (int i = 0; i < size_; ++i)
    for (int j = std::max(0, i - 2); j <= std::min(size_ - 1, i + 2); ++j) m(i, j) = (*this)(i, j);
  return m;
}

CmvTruncation::Sparse CmvTruncation::sparse() const {
  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(static_cast<std::size_t>(size_) * 5);
  for (int i = 0; i < size_; ++i)
    for (int j = std::max(0, i - 2); j <= std::min(size_ - 1, i + 2); ++j) {
      const cplx v = (*this)(i, j);
      if (v != cplx(0.0)) trips.emplace_back(i, j, v);
    }
  Sparse s(size_, size_);
  s.setFromTriplets(trips.begin(), trips.end());
  return s;
}

double CmvTruncation::unitarityDefect() const {
  double worst = 0.0;
  for (int i = 0; i < size_; ++i) {
    for (int j = std::max(0, i - 4); j <= std::min(size_ - 1, i + 4); ++j) {
      cplx s = 0.0;
      for (int k = std::max(0, std::max(i, j) - 2); k <= std::min(size_ - 1, std::min(i, j) + 2); ++k)
        s += std::conj((*this)(k, i)) * (*this)(k, j);
      if (i == j) s -= 1.0;
      worst = std::max(worst, std::abs(s));
    }
  }
  return worst;
}

void CmvTruncation::writeCsv(std::ostream& os) const {
  os << "row,col,re,im\n";
  os.precision(17);
  for (int i = 0; i < size_; ++i)
    for (int j = std::max(0, i - 2); j <= std::min(size_ - 1, i + 2); ++j) {
      const cplx v = (*this)(i, j);
      if (v != cplx(0.0)) os << i << ',' << j << ',' << v.real() << ',' << v.imag() << '\n';
    }
}

CmvTruncation assemble_cmv_from(std::span<const cplx> alpha, CmvKind kind, Boundary boundary,
                                long firstIndex, cplx leftStraddle, TorusPoint basePhase) {
  const int n = static_cast<int>(alpha.size());
  if (n < 2) throw DomainError("CMV truncation needs size >= 2");
  const long first = kind == CmvKind::standard ? 0 : firstIndex;
  if (kind == CmvKind::extended && first % 2 != 0)
    throw DomainError("extended truncation must start at an even index");
  Factor even(n);
  Factor odd(n);
  // Block Theta_j sits in the even factor for even j; the odd factor holds
  // the straddling block j = first - 1 on the left.
  for (long j = first - 1; j < first + n; ++j) {
    const long local = j - first;
    const cplx a = local >= 0 ? alpha[static_cast<std::size_t>(local)] : leftStraddle;
    Factor& f = (j % 2 == 0) ? even : odd;
    const bool fixedOne = kind == CmvKind::standard && j == -1;
    placeBlock(f, first, n, j, a, boundary, fixedOne);
  }
  std::vector<std::array<cplx, 5>> band(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int d = -2; d <= 2; ++d) {
      const int k = i + d;
      if (k < 0 || k >= n) {
        band[static_cast<std::size_t>(i)][static_cast<std::size_t>(d + 2)] = 0.0;
        continue;
      }
      cplx s = 0.0;
      for (int j = i - 1; j <= i + 1; ++j) s += even.at(i, j) * odd.at(j, k);
      band[static_cast<std::size_t>(i)][static_cast<std::size_t>(d + 2)] = s;
    }
  return {kind, first, boundary, std::move(basePhase), std::vector<cplx>(alpha.begin(), alpha.end()),
          std::move(band)};
}

CmvTruncation assemble_cmv(const VerblunskyModel& model, std::span<const double> x, int size,
                           CmvKind kind, Boundary boundary, long firstIndex) {
  if (size < 2) throw DomainError("CMV truncation needs size >= 2");
  const long first = kind == CmvKind::standard ? 0 : firstIndex;
  // Theta_j uses alpha(x + j omega), i.e. sample index j + 1.
  const auto alpha = alpha_orbit(model, x, first + 1, static_cast<std::size_t>(size));
  const cplx left = kind == CmvKind::extended ? sample_alpha(model, x, first) : cplx(0.0);
  return assemble_cmv_from(alpha, kind, boundary, first, left, TorusPoint(x.begin(), x.end()));
}

std::vector<cplx> truncation_eigenvalues(const CmvTruncation& m) {
  Eigen::ComplexEigenSolver<CmvTruncation::Dense> es(m.dense(), false);
  if (es.info() != Eigen::Success) throw ComputationError("dense eigenvalue routine did not converge");
  std::vector<cplx> out(static_cast<std::size_t>(m.size()));
  for (int i = 0; i < m.size(); ++i) out[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
  return out;
}

std::vector<double> truncation_spectrum(const CmvTruncation& m) {
  if (m.kind() == CmvKind::standard && m.boundary().decoupled() && m.size() > 512) {
    const auto& a = m.coefficients();
    return paraorthogonal_angles(std::span(a).first(a.size() - 1), m.boundary().beta);
  }
  const auto eig = truncation_eigenvalues(m);
  std::vector<double> angles;
  angles.reserve(eig.size());
  double worst = 1.0;
  for (const cplx& e : eig) {
    const double r = std::abs(e);
    if (std::abs(r - 1.0) > std::abs(worst - 1.0)) worst = r;
    if (r < 1.0 - 1e-8 || r > 1.0 + 1e-8) continue;
    angles.push_back(wrapAngle(std::arg(e)));
  }
  if (angles.size() != eig.size())
    throw NonUnitaryError("truncation is not unitary; use a decoupling boundary", worst);
  std::sort(angles.begin(), angles.end());
  return angles;
}

namespace {

// Lifted sum of Arg(1 - alpha_n b_n); every factor has positive real part so
// the running product can be unwrapped by watching negative-axis crossings.
double argSum(std::span<const cplx> alpha, cplx z) {
  cplx b = z;
  cplx q = 1.0;
  long winding = 0;
  std::size_t k = 0;
  for (const cplx& a : alpha) {
    const cplx w = 1.0 - a * b;
    const cplx nq = q * w;
    const bool upper = q.imag() >= 0.0;
    const bool nupper = nq.imag() >= 0.0;
    if (upper != nupper && (q.real() < 0.0 || nq.real() < 0.0)) winding += upper ? 1 : -1;
    q = nq;
    const cplx cw = std::conj(w);
    b = z * b * cw * cw / std::norm(w);
    if (++k % 32 == 0) {
      b /= std::abs(b);
      q /= std::abs(q);
    }
  }
  return std::arg(q) + kTwoPi * static_cast<double>(winding);
}

}  // namespace

double blaschke_phase(std::span<const cplx> alpha, double theta) {
  const double n = static_cast<double>(alpha.size() + 1);
  return n * theta - 2.0 * argSum(alpha, std::polar(1.0, theta));
}

long count_eigenangles(std::span<const cplx> alpha, cplx beta, double theta) {
  const double c = -std::arg(beta);
  const double p0 = blaschke_phase(alpha, 0.0);
  const double p1 = blaschke_phase(alpha, theta);
  return static_cast<long>(std::ceil((p1 - c) / kTwoPi)) - static_cast<long>(std::ceil((p0 - c) / kTwoPi));
}

std::vector<double> paraorthogonal_angles(std::span<const cplx> alpha, cplx beta) {
  const double c = -std::arg(beta);
  const std::size_t n = alpha.size() + 1;
  std::vector<double> out;
  out.reserve(n);
  auto psi = [&](double t) { return blaschke_phase(alpha, t); };
  const double p0 = psi(0.0);
  // Roots of psi(t) = c + 2 pi k for k = k0 .. k0 + n - 1, all in [0, 2 pi).
  struct Job {
    double lo, hi, plo, phi;
  };
  std::vector<Job> stack{{0.0, kTwoPi, p0, p0 + kTwoPi * static_cast<double>(n)}};
  while (!stack.empty()) {
    Job j = stack.back();
    stack.pop_back();
    const long first = static_cast<long>(std::ceil((j.plo - c) / kTwoPi));
    const long last = static_cast<long>(std::ceil((j.phi - c) / kTwoPi)) - 1;
    if (last < first) continue;
    if (last == first || j.hi - j.lo < 1e-13) {
      const double target = c + kTwoPi * static_cast<double>(first);
      double lo = j.lo, hi = j.hi;
      for (int it = 0; it < 60 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (psi(mid) < target) lo = mid; else hi = mid;
      }
      for (long k = first; k <= last; ++k) out.push_back(wrapAngle(0.5 * (lo + hi)));
      continue;
    }
    const double mid = 0.5 * (j.lo + j.hi);
    const double pm = psi(mid);
    stack.push_back({j.lo, mid, j.plo, pm});
    stack.push_back({mid, j.hi, pm, j.phi});
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<cplx> szego_zeros(std::span<const cplx> alpha) {
  const auto n = static_cast<lapack_int>(alpha.size());
  if (n < 1) throw DomainError("need at least one coefficient");
  std::vector<double> rho(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) rho[i] = ThetaBlock(alpha[i]).rho;
  // Column-major GGT matrix: G(k, l) = -conj(a_l) a_{k-1} rho_k..rho_{l-1} for
  // k <= l, rho_{k-1} on the subdiagonal, with a_{-1} = -1.
  const auto un = static_cast<std::size_t>(n);
  std::vector<cplx> h(un * un, cplx(0.0));
  for (std::size_t k = 0; k < un; ++k) {
    const cplx prev = k == 0 ? cplx(-1.0) : alpha[k - 1];
    double prod = 1.0;
    for (std::size_t l = k; l < un; ++l) {
      h[l * un + k] = -std::conj(alpha[l]) * prev * prod;
      prod *= rho[l];
    }
    if (k > 0) h[(k - 1) * un + k] = rho[k - 1];
  }
  std::vector<cplx> w(un);
  const lapack_int info =
      LAPACKE_zhseqr(LAPACK_COL_MAJOR, 'E', 'N', n, 1, n, h.data(), n, w.data(), nullptr, n);
  if (info != 0) throw ComputationError("Hessenberg QR did not converge");
  return w;
}

static_assert(sizeof(lapack_int) == sizeof(int), "LAPACK integer width");

namespace {
constexpr int kBand = 2;
constexpr int kLdab = 3 * kBand + 1;
}  // namespace

GreenSolver::GreenSolver(const CmvTruncation& m, cplx z)
    : n_(m.size()),
      shifted_(static_cast<std::size_t>(m.size())),
      factors_(static_cast<std::size_t>(kLdab) * static_cast<std::size_t>(m.size()), cplx(0.0)),
      pivots_(static_cast<std::size_t>(m.size())) {
  for (int i = 0; i < n_; ++i)
    for (int d = -kBand; d <= kBand; ++d) {
      const cplx v = m(i, i + d) - (d == 0 ? z : cplx(0.0));
      shifted_[static_cast<std::size_t>(i)][static_cast<std::size_t>(d + kBand)] = v;
      const int j = i + d;
      if (j >= 0 && j < n_)
        factors_[static_cast<std::size_t>(2 * kBand + i - j) + static_cast<std::size_t>(j) * kLdab] = v;
    }
  const lapack_int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n_, n_, kBand, kBand, factors_.data(), kLdab,
                                         pivots_.data());
  if (info != 0) throw SolveError("resolvent factorization failed", INFINITY);
}

Eigen::VectorXcd GreenSolver::column(int l) const {
  Eigen::VectorXcd g = Eigen::VectorXcd::Zero(n_);
  g(l) = 1.0;
  const lapack_int info = LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', n_, kBand, kBand, 1, factors_.data(), kLdab,
                                         pivots_.data(), g.data(), n_);
  if (info != 0) throw SolveError("resolvent back-substitution failed", INFINITY);
  double residual = 0.0;
  for (int i = 0; i < n_; ++i) {
    cplx s = i == l ? cplx(-1.0) : cplx(0.0);
    for (int d = -kBand; d <= kBand; ++d) {
      const int j = i + d;
      if (j >= 0 && j < n_) s += shifted_[static_cast<std::size_t>(i)][static_cast<std::size_t>(d + kBand)] * g(j);
    }
    residual += std::norm(s);
  }
  residual = std::sqrt(residual);
  if (!(residual <= 1e-10)) throw SolveError("resolvent solve residual too large", residual);
  return g;
}

cplx green_entry(const CmvTruncation& m, cplx z, int k, int l) {
  if (std::abs(std::abs(z) - 1.0) < 1e-15) throw DomainError("resolvent requires |z| != 1");
  if (k < 0 || l < 0 || k >= m.size() || l >= m.size()) throw DomainError("resolvent index out of range");
  return GreenSolver(m, z).entry(k, l);
}

}  // namespace szego
