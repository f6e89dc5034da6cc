#include "szego/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "szego/errors.hpp"

namespace szego {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;
constexpr int kRenormEvery = 32;

// M = [[1, -i], [1, i]] / (1 + i) and its inverse; M^{-1} SU(1,1) M = SL(2,R).
const Mat2 kToReal{cplx(0.5, -0.5), cplx(-0.5, -0.5), cplx(0.5, -0.5), cplx(0.5, 0.5)};
const Mat2 kToRealInv = kToReal.inverse();

struct Real2 {
  double a, b, c, d;
};

Real2 toReal(const Mat2& m) {
  const Mat2 r = kToRealInv * m * kToReal;
  return {r.a.real(), r.b.real(), r.c.real(), r.d.real()};
}

// Keeps the norm bounded and, while the product is well conditioned enough
// for a*d - b*c to be accurate, pulls det back to 1.
void renormalize(ScaledMat2& s) {
  double n = s.mat.opNorm();
  if (s.logScale == 0.0 && n < 1e3) {
    const cplx drift = s.mat.det() - 1.0;
    if (std::abs(drift) > 1e-10) {
      s.mat /= std::sqrt(s.mat.det());
      n = s.mat.opNorm();
    }
  }
  if (n > 1e100 || (n > 0.0 && n < 1e-100)) {
    s.mat /= n;
    s.logScale += std::log(n);
  }
}

// Accumulates ln ||prod|| without overflow.
struct LogProduct {
  Mat2 m = Mat2::identity();
  double logs = 0.0;
  long steps = 0;

  void push(const Mat2& step) {
    m = step * m;
    if (++steps % kRenormEvery == 0) {
      const double n = m.opNorm();
      m /= n;
      logs += std::log(n);
    }
  }
  [[nodiscard]] double logNorm() const { return logs + std::log(m.opNorm()); }
};

// Clockwise projective lift of one SL(2,R) step via the polar decomposition
// T = R(phi) P with P positive definite: the increment is phi plus the
// (less than pi/2) turn produced by P.
struct Winder {
  double vx = 1.0, vy = 0.0;
  double total = 0.0;

  void push(const Real2& t) {
    double phi = std::atan2(t.b - t.c, t.a + t.d);
    if (phi < -kPi / 2) phi += kTwoPi;
    const double cs = std::cos(phi), sn = std::sin(phi);
    // P = R(phi)^{-1} T with R(phi) = [[cs, sn], [-sn, cs]]
    const double pa = cs * t.a - sn * t.c, pb = cs * t.b - sn * t.d;
    const double pc = sn * t.a + cs * t.c, pd = sn * t.b + cs * t.d;
    const double wx = pa * vx + pb * vy, wy = pc * vx + pd * vy;
    const double turn = -std::atan2(vx * wy - vy * wx, vx * wx + vy * wy);
    total += phi + turn;
    const double nx = cs * wx + sn * wy, ny = -sn * wx + cs * wy;
    const double n = std::hypot(nx, ny);
    vx = nx / n;
    vy = ny / n;
  }
};

// Renormalized step with z^{1/2} hoisted out of the loop.
struct StepKernel {
  cplx s, sInv;
  explicit StepKernel(cplx z) : s(sqrtBranch(z)), sInv(1.0 / s) {}
  Mat2 operator()(cplx a) const {
    const double r = 1.0 / std::sqrt(1.0 - std::norm(a));
    return Mat2{s * r, -std::conj(a) * sInv * r, -a * s * r, sInv * r};
  }
};

double wrap01(double t) {
  t -= std::floor(t);
  return t >= 1.0 ? 0.0 : t;
}

}  // namespace

cplx sqrtBranch(cplx z) {
  double a = std::arg(z);
  if (a < 0.0) a += kTwoPi;
  return std::polar(std::sqrt(std::abs(z)), a / 2.0);
}

Mat2 szego_step(cplx alpha, cplx z, bool renormalized) {
  const double m = std::norm(alpha);
  if (!(m < 1.0)) throw DomainError("Szegő step needs |alpha| < 1");
  if (z == cplx(0.0)) throw DomainError("Szegő step needs z != 0");
  const double rho = std::sqrt(1.0 - m);
  if (!renormalized) return Mat2{z / rho, -std::conj(alpha) / rho, -alpha * z / rho, 1.0 / rho};
  const cplx s = sqrtBranch(z);
  return Mat2{s / rho, -std::conj(alpha) / (s * rho), -alpha * s / rho, 1.0 / (s * rho)};
}

Mat2 ScaledMat2::value() const { return std::exp(logScale) * mat; }

double ScaledMat2::logNorm() const { return logScale + std::log(mat.opNorm()); }

CocycleMap szego_cocycle(const VerblunskyModel& model, cplx z) {
  return {model.omega(), [model, z](std::span<const double> x) {
            return szego_step(model.alphaAt(x), z, true);
          }};
}

ScaledMat2 transfer_product(const CocycleMap& map, std::span<const double> x, long n) {
  ScaledMat2 out;
  if (n >= 0) {
    for (long k = 0; k < n; ++k) {
      out.mat = map(shift(map.omega(), x, k)) * out.mat;
      if ((k + 1) % kRenormEvery == 0) renormalize(out);
    }
  } else {
    for (long k = 1; k <= -n; ++k) {
      out.mat = map(shift(map.omega(), x, -k)).inverse() * out.mat;
      if (k % kRenormEvery == 0) renormalize(out);
    }
  }
  renormalize(out);
  return out;
}

ScaledMat2 transfer_product(const VerblunskyModel& model, std::span<const double> x, cplx z, long n) {
  if (z == cplx(0.0)) throw DomainError("transfer product needs z != 0");
  if (n >= 0) return transfer_from(alpha_orbit(model, x, 1, static_cast<std::size_t>(n)), z);
  ScaledMat2 out;
  for (long k = 1; k <= -n; ++k) {
    out.mat = szego_step(sample_alpha(model, x, 1 - k), z).inverse() * out.mat;
    if (k % kRenormEvery == 0) renormalize(out);
  }
  renormalize(out);
  return out;
}

ScaledMat2 transfer_from(std::span<const cplx> alpha, cplx z) {
  ScaledMat2 out;
  std::size_t k = 0;
  for (const cplx& a : alpha) if (!(std::norm(a) < 1.0)) throw DomainError("Szegő step needs |alpha| < 1");
  const StepKernel step(z);
  for (const cplx& a : alpha) {
    out.mat = step(a) * out.mat;
    if (++k % kRenormEvery == 0) renormalize(out);
  }
  renormalize(out);
  return out;
}

PhaseGrid PhaseGrid::single(TorusPoint x) { return {{std::move(x)}, {}}; }

PhaseGrid PhaseGrid::tensor(int dim, int perAxis) {
  if (dim < 1 || perAxis < 1) throw DomainError("phase grid needs positive dimension and count");
  PhaseGrid g;
  g.shape.assign(static_cast<std::size_t>(dim), perAxis);
  std::size_t total = 1;
  for (int i = 0; i < dim; ++i) total *= static_cast<std::size_t>(perAxis);
  g.points.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    TorusPoint p(static_cast<std::size_t>(dim));
    std::size_t r = idx;
    for (int i = 0; i < dim; ++i) {
      p[static_cast<std::size_t>(i)] = (static_cast<double>(r % static_cast<std::size_t>(perAxis)) + 0.5) / perAxis;
      r /= static_cast<std::size_t>(perAxis);
    }
    g.points.push_back(std::move(p));
  }
  return g;
}

PhaseGrid PhaseGrid::lowDiscrepancy(int dim, int count) {
  if (dim < 1 || count < 1) throw DomainError("phase grid needs positive dimension and count");
  if (dim == 1) return tensor(1, count);
  // Additive recurrence with the generalized golden ratio (R_d sequence).
  double phi = 2.0;
  for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / (dim + 1));
  std::vector<double> a(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) a[static_cast<std::size_t>(i)] = std::pow(1.0 / phi, i + 1);
  PhaseGrid g;
  for (int k = 0; k < count; ++k) {
    TorusPoint p(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) p[static_cast<std::size_t>(i)] = wrap01(0.5 + a[static_cast<std::size_t>(i)] * (k + 1));
    g.points.push_back(std::move(p));
  }
  return g;
}

PhaseGrid PhaseGrid::defaultFor(const VerblunskyModel& model) {
  if (model.phaseIndependent()) return single(TorusPoint(static_cast<std::size_t>(model.dim()), 0.0));
  if (model.dim() <= 2) return tensor(model.dim(), 64);
  return lowDiscrepancy(model.dim(), 64 * 64);
}

std::vector<std::pair<std::size_t, std::size_t>> PhaseGrid::neighbours() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (shape.empty()) return out;
  std::vector<std::size_t> stride(shape.size(), 1);
  for (std::size_t i = 1; i < shape.size(); ++i) stride[i] = stride[i - 1] * static_cast<std::size_t>(shape[i - 1]);
  for (std::size_t idx = 0; idx < points.size(); ++idx) {
    for (std::size_t ax = 0; ax < shape.size(); ++ax) {
      const auto n = static_cast<std::size_t>(shape[ax]);
      if (n < 2) continue;
      const std::size_t coord = (idx / stride[ax]) % n;
      const std::size_t next = coord + 1 == n ? idx - coord * stride[ax] : idx + stride[ax];
      out.emplace_back(idx, next);
    }
  }
  return out;
}

LyapunovResult lyapunov_exponent(const VerblunskyModel& model, cplx z, long nIter,
                                 const PhaseGrid& phases, Exec exec) {
  if (nIter < 1) throw DomainError("Lyapunov exponent needs nIter >= 1");
  if (phases.size() == 0) throw DomainError("Lyapunov exponent needs a nonempty phase grid");
  if (z == cplx(0.0)) throw DomainError("Lyapunov exponent needs z != 0");
  std::vector<double> per(phases.size());
  parallelFor(phases.size(), exec, [&](std::size_t p) {
    const auto alpha = alpha_orbit(model, phases.points[p], 1, static_cast<std::size_t>(nIter));
    LogProduct prod;
    const StepKernel step(z);
    for (const cplx& a : alpha) prod.push(step(a));
    per[p] = prod.logNorm() / static_cast<double>(nIter);
  });
  const double n = static_cast<double>(per.size());
  const double mean = std::accumulate(per.begin(), per.end(), 0.0) / n;
  double var = 0.0;
  for (double v : per) var += (v - mean) * (v - mean);
  LyapunovResult r;
  r.gammaRenormalized = mean;
  r.gammaSzego = mean + 0.5 * std::log(std::abs(z));
  r.iterations = nIter;
  r.phaseSamples = per.size();
  r.stdError = per.size() > 1 ? std::sqrt(var / (n - 1.0) / n) : 0.0;
  return r;
}

RotationResult rotation_number(const VerblunskyModel& model, double zeta, long nIter,
                               const PhaseGrid& phases, Exec exec) {
  if (nIter < 1) throw DomainError("rotation number needs nIter >= 1");
  const cplx z = std::polar(1.0, zeta);
  std::vector<double> per(phases.size());
  parallelFor(phases.size(), exec, [&](std::size_t p) {
    const auto alpha = alpha_orbit(model, phases.points[p], 1, static_cast<std::size_t>(nIter));
    Winder w;
    const StepKernel step(z);
    for (const cplx& a : alpha) w.push(toReal(step(a)));
    per[p] = w.total / (kTwoPi * static_cast<double>(nIter));
  });
  RotationResult r;
  r.rho = wrap01(std::accumulate(per.begin(), per.end(), 0.0) / static_cast<double>(per.size()));
  r.windingSamples = nIter * static_cast<long>(per.size());
  return r;
}

RotationResult rotation_number(const VerblunskyModel& model, double zeta, long nIter) {
  const PhaseGrid g = model.phaseIndependent() ? PhaseGrid::defaultFor(model)
                                               : PhaseGrid::lowDiscrepancy(model.dim(), 8);
  return rotation_number(model, zeta, nIter, g);
}

RotationResult rotation_number(const CocycleMap& map, long nIter, const PhaseGrid& phases) {
  double sum = 0.0;
  for (const auto& x : phases.points) {
    Winder w;
    for (long k = 0; k < nIter; ++k) w.push(toReal(map(shift(map.omega(), x, k))));
    sum += w.total / (kTwoPi * static_cast<double>(nIter));
  }
  RotationResult r;
  r.rho = wrap01(sum / static_cast<double>(phases.size()));
  r.windingSamples = nIter * static_cast<long>(phases.size());
  return r;
}

double circularDistance(double a, double b) {
  const double d = wrap01(a - b);
  return std::min(d, 1.0 - d);
}

const char* toString(UhVerdict v) {
  switch (v) {
    case UhVerdict::uniformlyHyperbolic: return "uniformlyHyperbolic";
    case UhVerdict::notUH: return "notUH";
    case UhVerdict::undecided: return "undecided";
  }
  return "?";
}

double uh_threshold(long horizon, double factor) {
  const double n = static_cast<double>(horizon);
  return factor * std::log(n) / n;
}

OrbitBank::OrbitBank(const VerblunskyModel& model, PhaseGrid phases, long length)
    : phases_(std::move(phases)), length_(length) {
  orbits_.reserve(phases_.size());
  for (const auto& x : phases_.points) orbits_.push_back(alpha_orbit(model, x, 1, static_cast<std::size_t>(length)));
}

namespace {

double coherenceOf(const PhaseGrid& grid, const std::vector<ScaledMat2>& prods) {
  double worst = 1.0;
  std::vector<Vec2> dirs(prods.size());
  for (std::size_t i = 0; i < prods.size(); ++i) dirs[i] = singular(prods[i].mat).contracted;
  for (const auto& [i, j] : grid.neighbours()) {
    const cplx ip = std::conj(dirs[i].x) * dirs[j].x + std::conj(dirs[i].y) * dirs[j].y;
    worst = std::min(worst, std::abs(ip));
  }
  return worst;
}

}  // namespace

UhReport uh_classify(const OrbitBank& bank, cplx z, const UhPolicy& policy) {
  const long cap = std::min(policy.maxHorizon, bank.length());
  const double finalThreshold = uh_threshold(cap, policy.thresholdFactor);
  const double minCoherence = std::cos(policy.coherenceAngle);
  const std::size_t np = bank.phases().size();
  std::vector<ScaledMat2> prods(np);
  const StepKernel step(z);
  long done = 0;
  long horizon = std::min(policy.startHorizon, cap);
  UhReport rep;
  for (;;) {
    double gMin = INFINITY;
    double gMax = -INFINITY;
    for (std::size_t p = 0; p < np; ++p) {
      const auto orbit = bank.orbit(p);
      ScaledMat2& s = prods[p];
      for (long k = done; k < horizon; ++k) {
        s.mat = step(orbit[static_cast<std::size_t>(k)]) * s.mat;
        if ((k + 1) % kRenormEvery == 0) renormalize(s);
      }
      renormalize(s);
      const double gp = s.logNorm() / static_cast<double>(horizon);
      gMin = std::min(gMin, gp);
      gMax = std::max(gMax, gp);
    }
    done = horizon;
    rep.horizon = horizon;
    rep.minGrowth = gMin;
    rep.threshold = uh_threshold(horizon, policy.thresholdFactor);
    // Splitting the longest product into blocks of this length bounds its
    // growth by the largest block growth, so nothing later can pass.
    if (gMax <= finalThreshold) {
      rep.verdict = UhVerdict::notUH;
      rep.coherence = 0.0;
      return rep;
    }
    if (gMin > rep.threshold) {
      rep.coherence = coherenceOf(bank.phases(), prods);
      if (rep.coherence >= minCoherence) {
        rep.verdict = UhVerdict::uniformlyHyperbolic;
        return rep;
      }
      if (horizon >= cap) {
        rep.verdict = UhVerdict::undecided;
        return rep;
      }
    } else if (horizon >= cap) {
      rep.verdict = UhVerdict::notUH;
      return rep;
    }
    horizon = std::min(horizon * 2, cap);
  }
}

UhReport uh_classify(const VerblunskyModel& model, cplx z, const UhPolicy& policy) {
  return uh_classify(OrbitBank(model, PhaseGrid::defaultFor(model), policy.maxHorizon), z, policy);
}

UhReport uh_test(const VerblunskyModel& model, cplx z, long horizon, const PhaseGrid& phases,
                 double threshold, double coherenceAngle) {
  if (horizon < 1) throw DomainError("hyperbolicity test needs a positive horizon");
  UhReport rep;
  rep.horizon = horizon;
  rep.threshold = threshold;
  std::vector<ScaledMat2> prods;
  prods.reserve(phases.size());
  double g = INFINITY;
  for (const auto& x : phases.points) {
    prods.push_back(transfer_product(model, x, z, horizon));
    const double gp = prods.back().logNorm() / static_cast<double>(horizon);
    g = std::min(g, gp);
    if (gp <= threshold) {
      rep.minGrowth = g;
      rep.verdict = UhVerdict::notUH;
      rep.coherence = 0.0;
      return rep;
    }
  }
  rep.minGrowth = g;
  rep.coherence = coherenceOf(phases, prods);
  rep.verdict = rep.coherence >= std::cos(coherenceAngle) ? UhVerdict::uniformlyHyperbolic
                                                          : UhVerdict::undecided;
  return rep;
}

bool SpectrumArcs::contains(double zeta) const {
  return std::any_of(arcs.begin(), arcs.end(), [&](const Arc& a) { return a.contains(zeta); });
}

bool SpectrumArcs::interior(double zeta, double margin) const {
  const bool wrapsLow = std::any_of(arcs.begin(), arcs.end(), [](const Arc& a) { return a.hi >= kTwoPi; });
  const bool wrapsHigh = std::any_of(arcs.begin(), arcs.end(), [](const Arc& a) { return a.lo <= 0.0; });
  for (const Arc& a : arcs) {
    if (!a.contains(zeta)) continue;
    const bool loOk = (a.lo <= 0.0 && wrapsLow) || zeta - a.lo >= margin;
    const bool hiOk = (a.hi >= kTwoPi && wrapsHigh) || a.hi - zeta >= margin;
    if (loOk && hiOk) return true;
  }
  return false;
}

double SpectrumArcs::totalLength() const {
  double s = 0.0;
  for (const Arc& a : arcs) s += a.length();
  return s;
}

SpectrumArcs spectrum_scan(const VerblunskyModel& model, int gridSize, const ScanOptions& options) {
  if (gridSize < 16) throw DomainError("spectrum scan needs gridSize >= 16");
  const double step = kTwoPi / gridSize;
  SpectrumArcs out;
  out.gridResolution = step / std::ldexp(1.0, options.refineSteps);
  if (model.lambda() == 0.0) {
    out.arcs.push_back({0.0, kTwoPi});
    return out;
  }
  const OrbitBank bank(model, PhaseGrid::defaultFor(model), options.policy.maxHorizon);
  auto inSigma = [&](double zeta) {
    return uh_classify(bank, std::polar(1.0, zeta), options.policy).verdict != UhVerdict::uniformlyHyperbolic;
  };
  const auto n = static_cast<std::size_t>(gridSize);
  std::vector<char> sigma(n);
  parallelFor(n, options.exec, [&](std::size_t i) { sigma[i] = inSigma(step * static_cast<double>(i)) ? 1 : 0; });

  if (std::all_of(sigma.begin(), sigma.end(), [](char c) { return c != 0; })) {
    out.arcs.push_back({0.0, kTwoPi});
    return out;
  }
  if (std::none_of(sigma.begin(), sigma.end(), [](char c) { return c != 0; })) return out;

  // Bisect the transition between grid points i and i + 1 (circularly).
  auto refine = [&](std::size_t i) {
    double lo = step * static_cast<double>(i);
    double hi = lo + step;
    const bool loIn = sigma[i] != 0;
    for (int it = 0; it < options.refineSteps; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double m = mid >= kTwoPi ? mid - kTwoPi : mid;
      if (inSigma(m) == loIn) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
  };

  std::vector<std::size_t> transitions;
  for (std::size_t i = 0; i < n; ++i)
    if (sigma[i] != sigma[(i + 1) % n]) transitions.push_back(i);
  std::vector<double> edge(transitions.size());
  parallelFor(transitions.size(), options.exec, [&](std::size_t t) { edge[t] = refine(transitions[t]); });

  // Pair each entry edge (out -> in) with the next exit edge (in -> out).
  const std::size_t m = transitions.size();
  std::size_t startT = 0;
  while (sigma[transitions[startT]] != 0) ++startT;  // first entry edge
  for (std::size_t k = 0; k < m; k += 2) {
    const std::size_t a = (startT + k) % m;
    const std::size_t b = (startT + k + 1) % m;
    double lo = edge[a];
    double hi = edge[b];
    if (lo >= kTwoPi) lo -= kTwoPi;
    if (hi >= kTwoPi) hi -= kTwoPi;
    if (hi >= lo) {
      out.arcs.push_back({lo, hi});
    } else {
      out.arcs.push_back({lo, kTwoPi});
      out.arcs.push_back({0.0, hi});
    }
  }
  std::sort(out.arcs.begin(), out.arcs.end(), [](const Arc& x, const Arc& y) { return x.lo < y.lo; });
  return out;
}

std::vector<Vec2> szego_polynomials(std::span<const cplx> alpha, cplx z, std::size_t count) {
  if (count > alpha.size()) throw DomainError("not enough coefficients for the requested degree");
  std::vector<Vec2> out;
  out.reserve(count + 1);
  Vec2 v{1.0, 1.0};
  out.push_back(v);
  for (std::size_t k = 1; k <= count; ++k) {
    v = szego_step(alpha[k - 1], z, false) * v;
    out.push_back(v);
  }
  return out;
}

std::vector<Vec2> gz_iterates(std::span<const cplx> alpha, cplx z, std::size_t count) {
  if (count > alpha.size()) throw DomainError("not enough coefficients for the requested length");
  std::vector<Vec2> out;
  out.reserve(count + 1);
  Vec2 v{1.0, 1.0};
  out.push_back(v);
  for (std::size_t n = 1; n <= count; ++n) {
    const cplx a = alpha[n - 1];
    const double rho = std::sqrt(1.0 - std::norm(a));
    Mat2 t;
    if ((n - 1) % 2 == 0) {
      t = Mat2{-a / rho, 1.0 / (z * rho), z / rho, -std::conj(a) / rho};
    } else {
      t = Mat2{-std::conj(a) / rho, 1.0 / rho, 1.0 / rho, -a / rho};
    }
    v = t * v;
    out.push_back(v);
  }
  return out;
}

TelescopeReport telescope(std::span<const Mat2> heads, std::span<const Mat2> perturbations) {
  if (heads.size() != perturbations.size() || heads.empty())
    throw DomainError("telescoping needs equally many heads and perturbations");
  TelescopeReport r;
  Mat2 prefix = Mat2::identity();  // M^(k-1)
  Mat2 xi = Mat2::zero();
  Mat2 direct = Mat2::identity();
  double sumStated = 0.0;
  double sumShifted = 0.0;
  for (std::size_t k = 0; k < heads.size(); ++k) {
    const Mat2& mk = heads[k];
    const Mat2& ek = perturbations[k];
    direct = mk * (Mat2::identity() + ek) * direct;
    const Mat2 conj = prefix.inverse() * ek * prefix;
    xi = xi + conj * (Mat2::identity() + xi);
    const double en = ek.opNorm();
    sumShifted += prefix.opNorm() * prefix.opNorm() * en;
    prefix = mk * prefix;
    sumStated += prefix.opNorm() * prefix.opNorm() * en;
  }
  r.product = direct;
  r.head = prefix;
  r.xi = xi;
  r.identityDefect = (direct - prefix * (Mat2::identity() + xi)).opNorm() / direct.opNorm();
  r.boundStated = std::expm1(sumStated);
  r.boundShifted = std::expm1(sumShifted);
  return r;
}

}  // namespace szego
