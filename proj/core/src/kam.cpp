#include "szego/kam.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <functional>
#include <limits>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace szego {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;
// Fourier coefficients below this are indistinguishable from rounding.
constexpr double kCoefficientFloor = 1e-15;
// Norm bounds smaller than this are checked against it instead.
constexpr double kNormFloor = 1e-13;
constexpr double kEpsilonFloor = 1e-15;

MultiIndex negate(MultiIndex k) {
  for (int& v : k) v = -v;
  return k;
}

MultiIndex zeroIndex(int dim) { return MultiIndex(static_cast<std::size_t>(dim), 0); }

Check makeCheck(std::string name, double value, double bound) {
  return {std::move(name), value, bound, value <= bound};
}

Mat2 rotationAt(const MultiIndex& n, std::span<const double> x) {
  const double ph = kPi * dot(n, x);
  return Mat2::diag(std::polar(1.0, -ph), std::polar(1.0, ph));
}

TorusPoint plus(std::span<const double> x, const Frequency& w) {
  TorusPoint y(x.begin(), x.end());
  for (int i = 0; i < w.dim(); ++i) y[static_cast<std::size_t>(i)] += w[i];
  return y;
}

// Weighted Fourier norm of a matrix-valued sample set.
double matrixNorm(const TorusGrid& grid, std::span<const Mat2> samples, double r) {
  std::array<std::vector<cplx>, 4> entries;
  for (auto& e : entries) e.resize(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    entries[0][i] = samples[i].a;
    entries[1][i] = samples[i].b;
    entries[2][i] = samples[i].c;
    entries[3][i] = samples[i].d;
  }
  const auto a = dft(grid, entries[0]);
  const auto b = dft(grid, entries[1]);
  const auto c = dft(grid, entries[2]);
  const auto d = dft(grid, entries[3]);
  double s = 0.0;
  for (const auto& [k, ak] : a) {
    const Mat2 m{ak, b.at(k), c.at(k), d.at(k)};
    if (m.maxAbs() < kCoefficientFloor) continue;
    s += m.opNorm() * std::exp(kTwoPi * l1(k) * r);
  }
  return s;
}

// vec (column-major) of S^{-1} Y S is (S^T kron S^{-1}) vec Y.
Eigen::Matrix4cd adjointAction(const Mat2& s) {
  const Mat2 si = s.inverse();
  const cplx st[2][2] = {{s.a, s.c}, {s.b, s.d}};
  const cplx sv[2][2] = {{si.a, si.b}, {si.c, si.d}};
  Eigen::Matrix4cd k;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) k(2 * i + p, 2 * j + q) = st[i][j] * sv[p][q];
  return k;
}

// Eigenvector of S for mu with the larger of the two standard representations.
Vec2 eigenvector(const Su11Matrix& s, cplx mu) {
  const Vec2 v1{s.b, mu - s.a};
  const Vec2 v2{mu - std::conj(s.a), std::conj(s.b)};
  return v1.norm() >= v2.norm() ? v1 : v2;
}

double jNorm(const Vec2& v) { return std::norm(v.x) - std::norm(v.y); }

struct Eigenframe {
  Mat2 p;  ///< in SU(1,1), P^{-1} S P = diag(mu, conj mu)
  cplx mu;
};

std::optional<Eigenframe> ellipticFrame(const Su11Matrix& s) {
  const double half = s.a.real();
  if (std::abs(half) >= 1.0) return std::nullopt;
  if (std::abs(s.b) < 1e-300) return Eigenframe{Mat2::identity(), s.a / std::abs(s.a)};
  const double theta = std::acos(half);
  for (const cplx mu : {std::polar(1.0, theta), std::polar(1.0, -theta)}) {
    const Vec2 v = eigenvector(s, mu);
    const double jn = jNorm(v);
    if (jn > 0.0) {
      const double k = 1.0 / std::sqrt(jn);
      const cplx p = v.x * k, q = v.y * k;
      return Eigenframe{Mat2{p, std::conj(q), q, std::conj(p)}, mu};
    }
  }
  return std::nullopt;
}

std::optional<MultiIndex> findResonance(double twoRho, const Frequency& omega, double cutoff,
                                        double width) {
  std::optional<MultiIndex> best;
  double bestDist = width;
  auto consider = [&](const MultiIndex& n) {
    const int len = l1(n);
    if (len == 0 || static_cast<double>(len) >= cutoff) return;
    const double d = std::abs(twoRho - omega.pair(n));
    if (d < bestDist || (best && d == bestDist && len < l1(*best))) {
      bestDist = d;
      best = n;
    }
  };
  if (omega.dim() == 1) {
    if (omega[0] == 0.0) return std::nullopt;
    const double q = twoRho / omega[0];
    for (long n = static_cast<long>(std::floor(q)) - 1; n <= static_cast<long>(std::floor(q)) + 2; ++n)
      consider({static_cast<int>(n)});
    return best;
  }
  // Brute force over a capped ball for d >= 2.
  const int cap = static_cast<int>(std::min(std::ceil(cutoff) - 1.0, 40.0));
  if (cap < 1) return std::nullopt;
  for (const auto& n : lattice_ball(omega.dim(), cap, false)) consider(n);
  return best;
}

SuFunction conjugateSamples(const TorusGrid& grid, const SuFunction& f, double radius,
                            const std::function<Mat2(const TorusPoint&, const Mat2&)>& op) {
  std::vector<Mat2> samples(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const TorusPoint x = grid.point(i);
    samples[i] = op(x, f.evaluate(x));
  }
  return SuFunction::fromSamples(grid, samples, radius, kCoefficientFloor);
}

// Solves S^{-1} Y(x + w) S - Y(x) = -(f(x) - hat f(0)) on 0 < |k| < cutoff.
SuFunction solveHomological(const Mat2& s, const SuFunction& f, const Frequency& omega, double cutoff,
                            double radius) {
  std::set<MultiIndex> ks;
  for (const auto& [k, m] : f.modes()) {
    if (l1(k) == 0 || static_cast<double>(l1(k)) >= cutoff) continue;
    ks.insert(k);
    ks.insert(negate(k));
  }
  const Eigen::Matrix4cd ad = adjointAction(s);
  std::map<MultiIndex, SuMode> modes;
  for (const auto& k : ks) {
    const Mat2 fk = f.coefficient(k);
    const cplx e = std::polar(1.0, kTwoPi * omega.pair(k));
    const Eigen::Matrix4cd lhs = e * ad - Eigen::Matrix4cd::Identity();
    Eigen::Vector4cd rhs;
    rhs << -fk.a, -fk.c, -fk.b, -fk.d;
    const Eigen::Vector4cd y = lhs.fullPivLu().solve(rhs);
    modes[k] = {cplx(0.0, -1.0) * y(0), y(2)};
  }
  return {f.dim(), std::move(modes), radius};
}

// U unitary with U S U^{-1} = [[mu, c], [0, mu']].
std::pair<Mat2, cplx> schurForm(const Mat2& s, cplx mu) {
  Vec2 u1{s.b, mu - s.a};
  const Vec2 alt{mu - s.d, s.c};
  if (alt.norm() > u1.norm()) u1 = alt;
  if (u1.norm() < 1e-300) u1 = {1.0, 0.0};
  const double n = u1.norm();
  u1.x /= n;
  u1.y /= n;
  const Vec2 u2{-std::conj(u1.y), std::conj(u1.x)};
  const Mat2 uInv{u1.x, u2.x, u1.y, u2.y};
  const Mat2 u = uInv.adjoint();
  const Mat2 t = u * s * uInv;
  return {u, t.b};
}

}  // namespace

KamSchedule::KamSchedule(double eps0, double radius) : epsilon0(eps0), r(radius) {
  if (!(eps0 > 0.0 && eps0 < 1.0)) throw DomainError("schedule needs 0 < eps0 < 1");
  if (!(radius > 0.0)) throw DomainError("schedule needs r > 0");
}

double KamSchedule::epsilon(int j) const { return std::exp(std::ldexp(1.0, j) * std::log(epsilon0)); }
double KamSchedule::radius(int j) const { return std::ldexp(r, -j); }
double KamSchedule::cutoff(int j) const { return std::pow(4.0, j + 1) * std::log(1.0 / epsilon0) / r; }

double KamGate::bound(double normS0, double r, double rPrime) const {
  const double gap = std::min(1.0, 1.0 / r) * (r - rPrime);
  return d0 / std::pow(normS0, c0) * std::pow(gap, c0 * dc.tau);
}

bool allPass(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void Conjugation::applyConstant(const Mat2& m) {
  Factor f;
  f.kind = Factor::Kind::constant;
  f.mat = m;
  factors_.push_back(std::move(f));
}

void Conjugation::applyExponential(SuFunction y) {
  Factor f;
  f.kind = Factor::Kind::exponential;
  f.generator = std::move(y);
  factors_.push_back(std::move(f));
}

void Conjugation::applyRotation(MultiIndex n) {
  if (static_cast<int>(n.size()) != dim_) throw DomainError("rotation degree has wrong dimension");
  Factor f;
  f.kind = Factor::Kind::rotation;
  f.degree = std::move(n);
  factors_.push_back(std::move(f));
}

void Conjugation::append(const Conjugation& later) {
  factors_.insert(factors_.end(), later.factors_.begin(), later.factors_.end());
}

Mat2 Conjugation::evaluate(std::span<const double> x) const {
  Mat2 m = Mat2::identity();
  for (const auto& f : factors_) {
    switch (f.kind) {
      case Factor::Kind::constant: m = f.mat * m; break;
      case Factor::Kind::exponential: m = expTraceless(f.generator.evaluate(x)) * m; break;
      case Factor::Kind::rotation: m = rotationAt(f.degree, x) * m; break;
    }
  }
  return m;
}

MultiIndex Conjugation::degree() const {
  MultiIndex d = zeroIndex(dim_);
  for (const auto& f : factors_)
    if (f.kind == Factor::Kind::rotation)
      for (std::size_t i = 0; i < d.size(); ++i) d[i] += f.degree[i];
  return d;
}

double Conjugation::supNorm(const TorusGrid& grid) const {
  double s = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    TorusPoint x = grid.point(i);
    for (double& v : x) v *= 2.0;
    s = std::max(s, evaluate(x).opNorm());
  }
  return s;
}

SzegoSplit szego_split(const VerblunskyModel& model, double zeta, double radius,
                       std::optional<TorusGrid> grid) {
  const cplx z = std::polar(1.0, zeta);
  SzegoSplit s{Su11Matrix{sqrtBranch(z), 0.0}, SuFunction::zero(model.dim(), radius)};
  const double lambda = model.lambda();
  if (lambda == 0.0) return s;
  // log of rho^{-1} [[1, w conj], [w, 1]] with |w| = lambda is acosh(1/rho)/lambda times its off-diagonal.
  const double c = std::acosh(1.0 / model.rho()) / lambda;
  const TorusGrid g = grid ? *grid : TorusGrid::defaultFor(model.dim());
  std::vector<Mat2> samples(g.size());
  double peak = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const cplx v = -c * std::conj(model.alphaAt(g.point(i))) * std::conj(z);
    samples[i] = Su11Algebra{0.0, v}.mat();
    peak = std::max(peak, std::abs(v));
  }
  s.f0 = SuFunction::fromSamples(g, samples, radius, 1e-16 * peak);
  return s;
}

std::optional<double> constant_rotation(const Su11Matrix& s, double collar) {
  const double half = s.a.real();
  if (std::abs(half) > 1.0 + collar) return std::nullopt;
  if (std::abs(half) >= 1.0) return half > 0.0 ? 0.0 : 0.5;
  const auto frame = ellipticFrame(s);
  if (!frame) return std::nullopt;
  double a = std::arg(frame->mu);
  if (a < 0.0) a += kTwoPi;
  return a / kTwoPi;
}

const char* toString(KamBranch b) { return b == KamBranch::resonant ? "resonant" : "nonResonant"; }

KamStepResult kam_step(const KamStepInput& in) {
  const int dim = in.omega.dim();
  if (in.f0.dim() != dim) throw DomainError("perturbation and frequency dimensions differ");
  if (!(in.rPrime > 0.0 && in.rPrime < in.r)) throw DomainError("need 0 < r' < r");
  const TorusGrid grid = in.grid ? *in.grid : TorusGrid::defaultFor(dim);
  const double normF = in.f0.norm(in.r);
  const Mat2 s0 = in.s0.mat();
  const double normS0 = s0.opNorm();
  if (in.gate.enforce) {
    const double bound = in.gate.bound(normS0, in.r, in.rPrime);
    if (normF > bound) {
      std::ostringstream os;
      os << "smallness gate violated: ||f0||_r = " << normF << " > D0/||S0||^C0 (min(1,1/r)(r-r'))^(C0 tau) = "
         << bound << " (D0 = " << in.gate.d0 << ", C0 = " << in.gate.c0 << ", tau = " << in.gate.dc.tau << ")";
      throw KamGateError(os.str());
    }
  }

  KamStepResult res;
  res.epsilon = in.epsilon ? *in.epsilon : std::max(normF, kEpsilonFloor);
  const double eps = res.epsilon;
  res.cutoff = 2.0 * std::abs(std::log(eps)) / (in.r - in.rPrime);
  res.rho = constant_rotation(in.s0);

  if (in.forceBranch == KamBranch::resonant) {
    if (!in.forceResonance) throw DomainError("forced resonant branch needs a resonance index");
    res.resonance = in.forceResonance;
  } else if (!in.forceBranch && res.rho) {
    res.resonance = findResonance(2.0 * *res.rho, in.omega, res.cutoff, std::pow(eps, 1.0 / 15.0));
  }
  res.branch = res.resonance ? KamBranch::resonant : KamBranch::nonResonant;

  Conjugation b(dim);
  Mat2 s = s0;
  SuFunction f = in.f0;
  if (res.resonance) {
    const auto frame = ellipticFrame(in.s0);
    if (!frame) throw KamStepError("resonant branch needs an elliptic constant");
    const MultiIndex n = *res.resonance;
    if (in.f0.maxDegree() + l1(n) >= grid.perAxis / 2)
      throw KamStepError("sampling grid too coarse for the shifted perturbation");
    const Mat2 pInv = frame->p.inverse();
    b.applyConstant(pInv);
    b.applyRotation(n);
    const double shiftPhase = kPi * in.omega.pair(n);
    s = Mat2::diag(frame->mu * std::polar(1.0, -shiftPhase), std::conj(frame->mu) * std::polar(1.0, shiftPhase));
    f = conjugateSamples(grid, in.f0, in.r, [&](const TorusPoint& x, const Mat2& fx) {
      const Mat2 rot = rotationAt(n, x);
      return rot * (pInv * fx * frame->p) * rot.inverse();
    });
  }
  const SuFunction y = solveHomological(s, f, in.omega, res.cutoff, in.rPrime);
  if (!y.modes().empty()) b.applyExponential(y);

  if (b.isIdentity() && in.f0.modes().empty()) {
    // Nothing to conjugate; keep S0 exactly instead of a rounded grid mean.
    res.sPlus = in.s0;
    res.fPlus = SuFunction::zero(dim, in.rPrime);
  } else {
    // Conjugated map on the grid; it is 1-periodic even when B is only 2-periodic.
    std::vector<Mat2> g(grid.size());
    Mat2 mean = Mat2::zero();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const TorusPoint x = grid.point(i);
      g[i] = b.evaluate(plus(x, in.omega)) * s0 * expTraceless(in.f0.evaluate(x)) * b.evaluate(x).inverse();
      mean += g[i];
    }
    mean /= static_cast<double>(grid.size());
    res.sPlus = Su11Matrix::project(mean);
    const Mat2 sPlusInv = res.sPlus.mat().inverse();
    std::vector<Mat2> logs(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto l = logNearIdentity(sPlusInv * g[i], 0.5);
      if (!l) throw KamStepError("residual left the 0.5 ball around the identity; eps too large for a first-order step");
      logs[i] = *l;
    }
    res.fPlus = SuFunction::fromSamples(grid, logs, in.rPrime, kCoefficientFloor);
  }
  res.b = std::move(b);

  // Off-grid residual: midpoints between sample nodes.
  double residual = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    TorusPoint x = grid.point(i);
    for (double& v : x) v += 0.5 / grid.perAxis;
    const Mat2 lhs = res.b.evaluate(plus(x, in.omega)) * s0 * expTraceless(in.f0.evaluate(x)) * res.b.evaluate(x).inverse();
    const Mat2 rhs = res.sPlus.mat() * expTraceless(res.fPlus.evaluate(x));
    residual = std::max(residual, (lhs - rhs).opNorm());
  }
  res.residual = residual;
  res.bNormSup = res.b.supNorm(grid);
  if (const auto l = logNearIdentity(res.sPlus.mat(), 1.99)) res.logSPlus = Su11Algebra::project(*l);

  const double fPlusNorm = res.fPlus.norm(in.rPrime);
  res.checks.push_back(makeCheck("conjugacy residual <= 1e-9 ||B||_0^2", residual, 1e-9 * res.bNormSup * res.bNormSup));
  res.checks.push_back(makeCheck("su(1,1) defect of f+", res.fPlus.algebraDefectOn(grid), 1e-12));
  if (res.branch == KamBranch::nonResonant) {
    std::vector<Mat2> bMinusI(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) bMinusI[i] = res.b.evaluate(grid.point(i)) - Mat2::identity();
    res.checks.push_back(makeCheck("||B - id||_r' <= eps^(1/2)", matrixNorm(grid, bMinusI, in.rPrime), std::sqrt(eps)));
    res.checks.push_back(makeCheck("||f+||_r' <= eps^1.9", fPlusNorm, std::max(std::pow(eps, 1.9), kNormFloor)));
    res.checks.push_back(makeCheck("||S+ - S0|| <= 2 eps", (res.sPlus.mat() - s0).opNorm(), 2.0 * eps));
  } else {
    const double inf = std::numeric_limits<double>::infinity();
    res.checks.push_back(makeCheck("|deg B - n*|", static_cast<double>(l1([&] {
                                     MultiIndex d = res.b.degree();
                                     for (std::size_t i = 0; i < d.size(); ++i) d[i] -= (*res.resonance)[i];
                                     return d;
                                   }())),
                                   0.0));
    res.checks.push_back(makeCheck("|t+| <= eps^(1/16)", res.logSPlus ? std::abs(res.logSPlus->t) : inf,
                                   std::pow(eps, 1.0 / 16.0)));
    res.checks.push_back(makeCheck("|v+| <= eps^(15/16)", res.logSPlus ? std::abs(res.logSPlus->v) : inf,
                                   std::pow(eps, 15.0 / 16.0)));
    const double tau = in.gate.dc.tau;
    const double bound = eps * std::exp(-in.rPrime * std::pow(eps, -1.0 / (18.0 * tau)));
    res.checks.push_back(makeCheck("||f+||_r' <= eps exp(-r' eps^(-1/(18 tau)))", fPlusNorm, std::max(bound, kNormFloor)));
  }
  return res;
}

KamIteration kam_iterate(const VerblunskyModel& model, double zeta, const KamSchedule& schedule,
                         int maxSteps, const KamIterateOptions& options) {
  if (maxSteps < 0) throw DomainError("maxSteps must be >= 0");
  const int dim = model.dim();
  const TorusGrid grid = options.grid ? *options.grid : TorusGrid::defaultFor(dim);
  const TorusGrid check = dim == 1 ? TorusGrid{1, 512} : grid;
  const SzegoSplit split = szego_split(model, zeta, schedule.r, grid);
  const Mat2 s0 = split.s0.mat();
  auto original = [&](const TorusPoint& x) { return s0 * expTraceless(split.f0.evaluate(x)); };

  KamIteration it;
  KamState st;
  st.j = 0;
  st.s = split.s0;
  st.f = split.f0;
  st.b = Conjugation::identity(dim);
  st.degB = zeroIndex(dim);
  st.checks.push_back(makeCheck("||f0||_r <= eps0", split.f0.norm(schedule.r), schedule.epsilon0));
  it.states.push_back(st);

  for (int j = 1; j <= maxSteps; ++j) {
    if (schedule.epsilon(j) < options.floor) {
      it.floorAt = j;
      std::ostringstream os;
      os << "eps_" << j << " = " << schedule.epsilon(j) << " is below the floating-point floor " << options.floor;
      it.stopReason = os.str();
      return it;
    }
    const KamState& prev = it.states.back();
    KamStepInput in;
    in.s0 = prev.s;
    in.f0 = prev.f;
    in.omega = model.omega();
    in.r = schedule.radius(j - 1);
    in.rPrime = schedule.radius(j);
    in.epsilon = schedule.epsilon(j - 1);
    in.gate = options.gate;
    in.grid = grid;
    KamStepResult step;
    try {
      step = kam_step(in);
    } catch (const KamGateError& e) {
      throw KamGateError("step " + std::to_string(j) + ": " + e.what());
    } catch (const KamStepError& e) {
      throw KamStepError("step " + std::to_string(j) + ": " + e.what());
    }

    KamState next;
    next.j = j;
    next.s = step.sPlus;
    next.f = step.fPlus;
    next.b = prev.b;
    next.b.append(step.b);
    next.degB = next.b.degree();
    next.lastBranch = step.branch;
    next.checks = step.checks;
    const double epsPrev = schedule.epsilon(j - 1);
    next.checks.push_back(makeCheck("||f_{j-1}||_{r_{j-1}} <= eps_{j-1}", prev.f.norm(in.r), epsPrev));
    next.checks.push_back(makeCheck("gate (ic)", prev.f.norm(in.r),
                                    options.gate.bound(prev.s.mat().opNorm(), in.r, in.rPrime)));
    next.bNormSup = next.b.supNorm(grid);
    next.checks.push_back(makeCheck("||B_j||_0 <= eps_{j-1}^(-1/192)", next.bNormSup, std::pow(epsPrev, -1.0 / 192.0)));
    next.checks.push_back(makeCheck("|deg B_j| <= 2 N_{j-1}", l1(next.degB), 2.0 * schedule.cutoff(j - 1)));

    double residual = 0.0;
    for (std::size_t i = 0; i < check.size(); ++i) {
      TorusPoint x = check.point(i);
      const Mat2 lhs = next.b.evaluate(plus(x, model.omega())) * original(x) * next.b.evaluate(x).inverse();
      const Mat2 rhs = next.s.mat() * expTraceless(next.f.evaluate(x));
      residual = std::max(residual, (lhs - rhs).opNorm());
    }
    next.conjugacyResidual = residual;
    next.checks.push_back(makeCheck("B_j conjugacy residual <= 1e-9 ||B_j||_0^2", residual,
                                    1e-9 * next.bNormSup * next.bNormSup));

    if (step.branch == KamBranch::resonant) {
      ResonantForm rf;
      if (const auto l = logNearIdentity(next.s.mat(), 1.99)) {
        const Su11Algebra a = Su11Algebra::project(*l);
        rf.t = a.t;
        rf.v = a.v;
      }
      const double half = next.s.a.real();
      const cplx theta = std::acos(cplx(half));  // real on the elliptic side, imaginary beyond
      rf.rho = theta / kTwoPi;
      const cplx mu = half + std::sqrt(cplx(half * half - 1.0));
      const auto [u, c] = schurForm(next.s.mat(), mu);
      rf.u = u;
      rf.c = c;
      double fb = 0.0;
      const Mat2 uInv = u.adjoint();
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const TorusPoint x = grid.point(i);
        fb = std::max(fb, (u * next.s.mat() * (expTraceless(next.f.evaluate(x)) - Mat2::identity()) * uInv).opNorm());
      }
      rf.residualBound = fb;
      next.checks.push_back(makeCheck("|t_j| <= eps_{j-1}^(1/16)", std::abs(rf.t), std::pow(epsPrev, 1.0 / 16.0)));
      next.checks.push_back(makeCheck("|v_j| <= eps_{j-1}^(15/16)", std::abs(rf.v), std::pow(epsPrev, 15.0 / 16.0)));
      next.checks.push_back(makeCheck("||B_j||_0^2 |c_j| <= 8 ||S0||", next.bNormSup * next.bNormSup * std::abs(c),
                                      8.0 * s0.opNorm()));
      next.resonantForm = rf;
    }
    it.states.push_back(std::move(next));
  }
  it.stopReason = "completed " + std::to_string(maxSteps) + " steps";
  return it;
}

std::vector<MultiIndex> ResonanceSet::labelsAt(double zeta) const {
  std::vector<MultiIndex> out;
  for (const auto& a : arcs) {
    const bool in = (zeta >= a.lo && zeta <= a.hi) || (zeta + kTwoPi >= a.lo && zeta + kTwoPi <= a.hi);
    if (in) out.push_back(a.m);
  }
  return out;
}

namespace {

std::optional<double> rotationBefore(const VerblunskyModel& model, double zeta, int j,
                                     const KamSchedule& schedule, const KamIterateOptions& options) {
  if (j == 1) return constant_rotation(szego_split(model, zeta, schedule.r).s0);
  try {
    const KamIteration it = kam_iterate(model, zeta, schedule, j - 1, options);
    if (static_cast<int>(it.states.size()) < j) return std::nullopt;
    return constant_rotation(it.states[static_cast<std::size_t>(j - 1)].s);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::vector<MultiIndex> resonanceLabels(int dim, double cutoff) {
  const int cap = static_cast<int>(std::floor(cutoff));
  if (cap < 1) return {};
  return lattice_ball(dim, cap, false);
}

}  // namespace

ResonanceSet resonance_set(const VerblunskyModel& model, const std::vector<double>& zetas, int j,
                           const KamSchedule& schedule, const KamIterateOptions& options) {
  if (j < 1) throw DomainError("resonance sets start at j = 1");
  ResonanceSet set;
  set.j = j;
  set.width = std::pow(schedule.epsilon(j - 1), 1.0 / 15.0);
  set.cutoff = schedule.cutoff(j - 1);
  const auto labels = resonanceLabels(model.dim(), set.cutoff);
  std::vector<std::optional<double>> twoRho(zetas.size());
  for (std::size_t i = 0; i < zetas.size(); ++i) {
    const auto r = rotationBefore(model, zetas[i], j, schedule, options);
    if (r) twoRho[i] = 2.0 * *r;
  }
  for (const auto& m : labels) {
    const double target = model.omega().pair(m);
    std::vector<bool> hit(zetas.size(), false);
    for (std::size_t i = 0; i < zetas.size(); ++i)
      hit[i] = twoRho[i] && distZ(*twoRho[i] - target) < set.width;
    const std::size_t n = zetas.size();
    if (std::none_of(hit.begin(), hit.end(), [](bool b) { return b; })) continue;
    if (std::all_of(hit.begin(), hit.end(), [](bool b) { return b; })) {
      set.arcs.push_back({m, 0.0, kTwoPi});
      continue;
    }
    // Start scanning right after a miss so wrapping runs stay in one piece.
    std::size_t start = 0;
    while (hit[start]) ++start;
    for (std::size_t c = 0; c < n; ++c) {
      const std::size_t i = (start + c) % n;
      if (!hit[i] || hit[(i + n - 1) % n]) continue;
      std::size_t e = i;
      while (hit[(e + 1) % n]) e = (e + 1) % n;
      double hi = zetas[e];
      if (e < i) hi += kTwoPi;
      set.arcs.push_back({m, zetas[i], hi});
    }
  }
  return set;
}

GrowthReport growth_bound_check(const VerblunskyModel& model, const ResonanceSet& set,
                                const KamSchedule& schedule, int sampleCount,
                                const std::optional<SpectrumArcs>& spectrum, double budget, Exec exec) {
  if (sampleCount < 1) throw DomainError("sampleCount must be >= 1");
  const double eps = schedule.epsilon(set.j - 1);
  GrowthReport rep;
  rep.sMax = static_cast<long>(std::floor(std::pow(eps, -1.0 / 16.0)));
  rep.budget = budget;
  const double scale = std::pow(eps, -1.0 / 96.0);

  // Candidate zetas spread over the arcs by length.
  double total = 0.0;
  for (const auto& a : set.arcs) total += a.hi - a.lo;
  std::vector<double> zetas;
  if (total > 0.0) {
    const int probes = 16 * sampleCount;
    for (int p = 0; p < probes && static_cast<int>(zetas.size()) < sampleCount; ++p) {
      double pos = (p + 0.5) / probes * total;
      for (const auto& a : set.arcs) {
        const double len = a.hi - a.lo;
        if (pos <= len) {
          const double z = std::fmod(a.lo + pos, kTwoPi);
          if (!spectrum || spectrum->contains(z)) zetas.push_back(z);
          break;
        }
        pos -= len;
      }
    }
    std::sort(zetas.begin(), zetas.end());
    if (static_cast<int>(zetas.size()) > sampleCount) zetas.resize(static_cast<std::size_t>(sampleCount));
  }
  const PhaseGrid phases = PhaseGrid::defaultFor(model);
  rep.samples.resize(zetas.size());
  parallelFor(zetas.size(), exec, [&](std::size_t i) {
    GrowthSample gs;
    gs.zeta = zetas[i];
    const cplx z = std::polar(1.0, zetas[i]);
    double sup = 1.0;
    for (const auto& x : phases.points) {
      const auto alpha = alpha_orbit(model, x, 1, static_cast<std::size_t>(rep.sMax));
      Mat2 m = Mat2::identity();
      for (const cplx& a : alpha) {
        m = szego_step(a, z) * m;
        sup = std::max(sup, m.opNorm());
      }
    }
    gs.supNorm = sup;
    gs.constant = sup / scale;
    gs.flagged = gs.constant > budget;
    rep.samples[i] = gs;
  });
  for (const auto& s : rep.samples) rep.maxConstant = std::max(rep.maxConstant, s.constant);
  return rep;
}

RotationLabel rotation_label(const VerblunskyModel& model, double zeta, int j, const KamSchedule& schedule,
                             long nIter, const KamIterateOptions& options) {
  if (j < 1) throw DomainError("labels start at j = 1");
  RotationLabel out;
  const double width = std::pow(schedule.epsilon(j - 1), 1.0 / 15.0);
  out.bound = 2.0 * width;
  const auto rho = rotationBefore(model, zeta, j, schedule, options);
  if (!rho) return out;
  for (const auto& m : resonanceLabels(model.dim(), schedule.cutoff(j - 1))) {
    if (distZ(2.0 * *rho - model.omega().pair(m)) < width) {
      out.inK = true;
      break;
    }
  }
  if (!out.inK) return out;
  const double twoRho = 2.0 * rotation_number(model, zeta, nIter).rho;
  const int cap = static_cast<int>(std::floor(2.0 * schedule.cutoff(j - 1)));
  std::vector<MultiIndex> candidates = lattice_ball(model.dim(), cap, false);
  candidates.push_back(zeroIndex(model.dim()));
  double best = std::numeric_limits<double>::infinity();
  for (const auto& n : candidates) {
    const double d = distZ(twoRho - model.omega().pair(n));
    if (d < best || (d == best && out.label && l1(n) < l1(*out.label))) {
      best = d;
      out.label = n;
    }
  }
  out.defect = best;
  out.flagged = best > out.bound;
  return out;
}

D0Calibration calibrate_d0(const Frequency& omega, DiophantineParams dc, int trials, unsigned seed, double c0) {
  if (trials < 1) throw DomainError("calibration needs at least one trial");
  const double r = 0.5, rPrime = 0.25;
  const int dim = omega.dim();
  D0Calibration cal;
  cal.trials = trials;
  for (int step = 0; step <= 14; ++step) {
    const double eps = std::pow(10.0, -1.0 - 0.5 * step);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int failures = 0;
    for (int t = 0; t < trials; ++t) {
      const double tt = (0.3 + 1.2 * unit(rng)) * (unit(rng) < 0.5 ? -1.0 : 1.0);
      const cplx vv = std::polar(0.5 * unit(rng) * std::abs(tt), kTwoPi * unit(rng));
      const Su11Matrix s0 = Su11Matrix::project(expTraceless(Su11Algebra{tt, vv}.mat()));
      std::map<MultiIndex, SuMode> modes;
      const int count = 1 + static_cast<int>(3 * unit(rng));
      for (int q = 0; q < count; ++q) {
        MultiIndex k = zeroIndex(dim);
        k[static_cast<std::size_t>(q % dim)] = 1 + static_cast<int>(3 * unit(rng));
        const cplx th = std::polar(unit(rng), kTwoPi * unit(rng));
        modes[k].t += th;
        modes[negate(k)].t += std::conj(th);
        modes[k].v += std::polar(unit(rng), kTwoPi * unit(rng));
        modes[negate(k)].v += std::polar(unit(rng), kTwoPi * unit(rng));
      }
      SuFunction f(dim, modes, r);
      const double scale = eps / f.norm(r);
      for (auto& [k, m] : modes) {
        m.t *= scale;
        m.v *= scale;
      }
      KamStepInput in;
      in.s0 = s0;
      in.f0 = SuFunction(dim, modes, r);
      in.omega = omega;
      in.r = r;
      in.rPrime = rPrime;
      in.gate.enforce = false;
      in.gate.dc = dc;
      in.forceBranch = KamBranch::nonResonant;
      try {
        if (!allPass(kam_step(in).checks)) ++failures;
      } catch (const std::exception&) {
        ++failures;
      }
    }
    cal.failuresPerEpsilon.emplace_back(eps, failures);
  }
  // Largest eps below which every rung passes.
  for (auto it = cal.failuresPerEpsilon.rbegin(); it != cal.failuresPerEpsilon.rend(); ++it) {
    if (it->second != 0) break;
    cal.epsilonStar = it->first;
  }
  const double gap = std::min(1.0, 1.0 / r) * (r - rPrime);
  cal.d0 = cal.epsilonStar / std::pow(gap, c0 * dc.tau);
  return cal;
}

}  // namespace szego
