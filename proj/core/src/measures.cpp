#include "szego/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "szego/cmv.hpp"
#include "szego/errors.hpp"

namespace szego {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kAlexandrovSamples = 16;

void requireInsideDisk(cplx z) {
  if (!(std::abs(z) < 1.0)) throw DomainError("Carathéodory evaluation needs |z| < 1");
}

void requireUnimodular(cplx phi) {
  if (std::abs(std::abs(phi) - 1.0) > 1e-12) throw DomainError("phi must be unimodular");
}

std::vector<AlexandrovValue> alexandrovSamples(cplx F) {
  std::vector<AlexandrovValue> out;
  out.reserve(kAlexandrovSamples);
  for (int k = 0; k < kAlexandrovSamples; ++k) {
    const cplx phi = std::polar(1.0, kTwoPi * k / kAlexandrovSamples);
    out.push_back({phi, alexandrov_transform(F, phi)});
  }
  return out;
}

// Left half-line coefficients -conj alpha_{-n-2}, n = 0..depth-1.
std::vector<cplx> leftCoefficients(const VerblunskyModel& model, std::span<const double> x, int depth) {
  std::vector<cplx> out(static_cast<std::size_t>(depth));
  for (int n = 0; n < depth; ++n) out[static_cast<std::size_t>(n)] = -std::conj(sample_alpha(model, x, -n - 1));
  return out;
}

PhaseGrid withPoint(PhaseGrid grid, std::span<const double> x) {
  grid.points.emplace_back(x.begin(), x.end());
  grid.shape.clear();
  return grid;
}

// Extended truncation sized so the resolvent at radius r has decayed well
// before the cut.
int fullLineSize(double oneMinusR) {
  const int n = static_cast<int>(std::ceil(30.0 / oneMinusR));
  return std::max(256, 4 * ((n + 3) / 4));
}

cplx greenSum(const VerblunskyModel& model, std::span<const double> x, cplx z, int size) {
  const long first = -2L * (size / 4);
  const auto m = assemble_cmv(model, x, size, CmvKind::extended, Boundary::unimodular(1.0), first);
  const GreenSolver solver(m, z);
  const int i0 = static_cast<int>(-first);
  return solver.entry(i0, i0) + solver.entry(i0 + 1, i0 + 1);
}

double simpson(const std::vector<double>& f, double h) {
  const std::size_t n = f.size() - 1;
  double s = f.front() + f.back();
  for (std::size_t i = 1; i < n; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * f[i];
  return s * h / 3.0;
}

}  // namespace

cplx caratheodory_from(std::span<const cplx> alpha, cplx z) {
  requireInsideDisk(z);
  cplx f = 0.0;
  for (auto it = alpha.rbegin(); it != alpha.rend(); ++it) {
    const cplx zf = z * f;
    f = (*it + zf) / (1.0 + std::conj(*it) * zf);
  }
  const cplx zf = z * f;
  return (1.0 + zf) / (1.0 - zf);
}

CaratheodoryEval schur_caratheodory(const VerblunskyModel& model, std::span<const double> x, cplx z,
                                    int depth) {
  requireInsideDisk(z);
  if (depth < 1) throw DomainError("Schur depth must be >= 1");
  const auto alpha = alpha_orbit(model, x, 1, static_cast<std::size_t>(depth));
  CaratheodoryEval e;
  e.z = z;
  e.depth = depth;
  e.F = caratheodory_from(alpha, z);
  if (e.F.real() < -1e-10) throw ComputationError("Schur evaluation lost the Carathéodory property");
  e.FAlex = alexandrovSamples(e.F);
  return e;
}

cplx alexandrov_transform(cplx F, cplx phi) {
  requireUnimodular(phi);
  const cplx den = (1.0 + phi) + (1.0 - phi) * F;
  if (std::abs(den) < 1e-12) throw DomainError("Alexandrov transform denominator vanishes");
  return ((1.0 - phi) + (1.0 + phi) * F) / den;
}

double alexandrov_sup(cplx F) {
  if (!(F.real() > 0.0)) throw DomainError("Alexandrov supremum needs Re F > 0");
  const double w0 = (1.0 + std::norm(F)) / (2.0 * F.real());
  return w0 + std::sqrt(std::max(0.0, w0 * w0 - 1.0));
}

JlSequences jl_sequences(std::span<const cplx> alpha, cplx z, cplx rotation, std::size_t count) {
  requireUnimodular(rotation);
  if (alpha.size() < count) throw DomainError("not enough coefficients for the requested length");
  JlSequences s;
  s.phi.resize(count + 1);
  s.psi.resize(count + 1);
  Vec2 u{1.0, std::conj(rotation)};
  Vec2 v{1.0, -std::conj(rotation)};
  s.phi[0] = u.x;
  s.psi[0] = v.x;
  for (std::size_t n = 1; n <= count; ++n) {
    const Mat2 t = szego_step(alpha[n - 1], z, false);
    u = t * u;
    v = t * v;
    s.phi[n] = u.x;
    s.psi[n] = v.x;
  }
  return s;
}

double weighted_norm_squared(std::span<const cplx> a, double l) {
  if (!(l >= 0.0)) throw DomainError("weighted norm index must be >= 0");
  const double fl = std::floor(l);
  const auto top = static_cast<std::size_t>(fl);
  const double frac = l - fl;
  if (top >= a.size() || (frac > 0.0 && top + 1 >= a.size()))
    throw DomainError("weighted norm index exceeds the sequence length");
  double s = 0.0;
  for (std::size_t j = 0; j <= top; ++j) s += std::norm(a[j]);
  if (frac > 0.0) s += frac * std::norm(a[top + 1]);
  return s;
}

JlIdentityDefect jl_identity_defect(const VerblunskyModel& model, std::span<const double> x, double zeta,
                                    cplx rotation, std::size_t count) {
  const auto alpha = alpha_orbit(model, x, 1, count);
  const auto s = jl_sequences(alpha, std::polar(1.0, zeta), rotation, count);
  JlIdentityDefect d;
  for (std::size_t n = 0; n <= count; ++n) {
    const double dev = std::abs(s.phi[n] * std::conj(s.psi[n]) + s.psi[n] * std::conj(s.phi[n]) - 2.0);
    d.absolute = std::max(d.absolute, dev);
    d.relative = std::max(d.relative, dev / std::max(1.0, std::abs(s.phi[n]) * std::abs(s.psi[n])));
  }
  return d;
}

double sup_transfer_squared(const VerblunskyModel& model, double zeta, long sMax, const PhaseGrid& phases,
                            Exec exec) {
  if (sMax < 0) throw DomainError("horizon must be >= 0");
  const cplx z = std::polar(1.0, zeta);
  std::vector<double> best(phases.size(), 0.0);
  parallelFor(phases.size(), exec, [&](std::size_t p) {
    const auto alpha = alpha_orbit(model, phases.points[p], 1, static_cast<std::size_t>(sMax));
    Mat2 m = Mat2::identity();
    double logScale = 0.0;
    double worst = 0.0;
    for (const cplx& a : alpha) {
      m = szego_step(a, z, true) * m;
      const double nrm = m.opNorm();
      worst = std::max(worst, logScale + std::log(nrm));
      if (nrm > 1e100) {
        m /= cplx(nrm);
        logScale += std::log(nrm);
      }
    }
    best[p] = worst;
  });
  const double logSup = *std::max_element(best.begin(), best.end());
  return std::exp(2.0 * logSup);
}

long jl_horizon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
  return static_cast<long>(std::floor(std::numbers::sqrt2 / epsilon)) + 2;
}

JlBoundReport jl_bound_check(const VerblunskyModel& model, std::span<const double> x, double zeta,
                             double epsilon, cplx phi, const JlOptions& options) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
  requireUnimodular(phi);
  const double target = std::numbers::sqrt2 / epsilon;
  const auto hiIndex = static_cast<std::size_t>(std::ceil(target)) + 1;
  const std::size_t count = hiIndex + 2;
  const auto alpha = alpha_orbit(model, x, 1, std::max<std::size_t>(count, static_cast<std::size_t>(options.depth)));
  const auto seq = jl_sequences(std::span(alpha).first(count), std::polar(1.0, zeta), phi, count);

  auto product = [&](double l) {
    return std::sqrt(weighted_norm_squared(seq.phi, l) * weighted_norm_squared(seq.psi, l));
  };
  double lo = 0.0;
  double hi = static_cast<double>(hiIndex);
  if (!(product(hi) >= target))
    throw ComputationError("norm product did not reach sqrt(2)/eps; cannot bracket l");
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (product(mid) < target ? lo : hi) = mid;
  }
  JlBoundReport r;
  r.zeta = zeta;
  r.epsilon = epsilon;
  r.phi = phi;
  r.lOfR = 0.5 * (lo + hi);
  r.phiNorm = std::sqrt(weighted_norm_squared(seq.phi, r.lOfR));
  r.psiNorm = std::sqrt(weighted_norm_squared(seq.psi, r.lOfR));
  r.normRatio = r.psiNorm / r.phiNorm;
  r.productDefect = std::abs(epsilon * r.phiNorm * r.psiNorm - std::numbers::sqrt2);

  const cplx z = std::polar(1.0 - epsilon, zeta);
  const cplx F = caratheodory_from(std::span(alpha).first(static_cast<std::size_t>(options.depth)), z);
  r.FAbs = std::abs(alexandrov_transform(F, phi));
  r.FSupPhi = alexandrov_sup(F);
  r.requiredA = std::max(r.FAbs / r.normRatio, r.normRatio / r.FAbs);

  r.horizon = jl_horizon(epsilon);
  const PhaseGrid phases = withPoint(options.phases ? *options.phases : PhaseGrid::defaultFor(model), x);
  r.supTransfer = sup_transfer_squared(model, zeta, r.horizon, phases, options.exec);
  r.requiredC = r.FSupPhi / r.supTransfer;
  r.universalA = options.constants.A;
  r.universalC = options.constants.C;
  return r;
}

CaratheodoryEval full_line_caratheodory(const VerblunskyModel& model, std::span<const double> x, cplx z,
                                        int truncationSize, int depth) {
  requireInsideDisk(z);
  if (truncationSize < 8 || truncationSize % 4 != 0)
    throw DomainError("full-line truncation size must be a multiple of 4 and >= 8");
  if (depth < 1) throw DomainError("Schur depth must be >= 1");
  CaratheodoryEval e;
  e.z = z;
  e.depth = depth;
  const auto right = alpha_orbit(model, x, 1, static_cast<std::size_t>(depth));
  const auto left = leftCoefficients(model, x, depth);
  const cplx fPlus = caratheodory_from(right, z);
  const cplx fMinus = caratheodory_from(left, z);
  e.F = fPlus;
  e.FAlex = alexandrovSamples(fPlus);

  const cplx ab = std::conj(right.front());
  const cplx i(0.0, 1.0);
  const cplx mMinus = ((1.0 - ab).real() - i * (1.0 + ab).imag() * fMinus) /
                      (i * (1.0 - ab).imag() - (1.0 + ab).real() * fMinus);
  e.MMinus = mMinus;

  FullLineBounds b;
  b.truncationSize = truncationSize;
  b.greenSum = greenSum(model, x, z, truncationSize);
  b.mobiusBound = std::abs((1.0 - fPlus * mMinus) / (fPlus - mMinus));
  b.alexandrovSup = alexandrov_sup(fPlus);
  b.resolventBoundHolds = std::abs(b.greenSum) <= b.mobiusBound + 1e-8;
  b.majorizationHolds = b.mobiusBound <= b.alexandrovSup + 1e-8;
  e.PhiFull = 1.0 + 2.0 * z * b.greenSum;
  e.fullLine = b;
  return e;
}

const char* toString(OrbitClass c) {
  switch (c) {
    case OrbitClass::bounded: return "bounded";
    case OrbitClass::growing: return "growing";
    case OrbitClass::inconclusive: return "inconclusive";
  }
  return "?";
}

OrbitVerdict subordinacy_classify(const VerblunskyModel& model, double zeta, long horizon,
                                  const PhaseGrid& phases, const OrbitPolicy& policy, Exec exec) {
  if (horizon < 1000) throw DomainError("subordinacy horizon must be >= 1000");
  std::vector<long> checkpoints;
  for (double s = 1.0; s < static_cast<double>(horizon); s *= 1.1) {
    const long c = static_cast<long>(std::ceil(s));
    if (checkpoints.empty() || checkpoints.back() != c) checkpoints.push_back(c);
  }
  if (checkpoints.back() != horizon) checkpoints.push_back(horizon);

  const cplx z = std::polar(1.0, zeta);
  std::vector<std::vector<double>> runs(phases.size());
  parallelFor(phases.size(), exec, [&](std::size_t p) {
    const auto alpha = alpha_orbit(model, phases.points[p], 1, static_cast<std::size_t>(horizon));
    std::vector<double> run(checkpoints.size(), 0.0);
    Mat2 m = Mat2::identity();
    double logScale = 0.0;
    double worst = 0.0;
    std::size_t next = 0;
    for (long s = 1; s <= horizon; ++s) {
      m = szego_step(alpha[static_cast<std::size_t>(s - 1)], z, true) * m;
      const double nrm = m.opNorm();
      worst = std::max(worst, logScale + std::log(nrm));
      if (nrm > 1e100) {
        m /= cplx(nrm);
        logScale += std::log(nrm);
      }
      if (s == checkpoints[next]) run[next++] = worst;
    }
    runs[p] = std::move(run);
  });

  std::vector<double> logSup(checkpoints.size(), 0.0);
  for (const auto& run : runs)
    for (std::size_t k = 0; k < run.size(); ++k) logSup[k] = std::max(logSup[k], run[k]);

  const double tailStart = std::sqrt(static_cast<double>(horizon));
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < checkpoints.size(); ++k)
    if (static_cast<double>(checkpoints[k]) >= tailStart) {
      lx.push_back(std::log(static_cast<double>(checkpoints[k])));
      ly.push_back(logSup[k]);
    }
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    mx += lx[k];
    my += ly[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxy += (lx[k] - mx) * (ly[k] - my);
    sxx += (lx[k] - mx) * (lx[k] - mx);
  }

  OrbitVerdict v;
  v.zeta = zeta;
  v.horizon = horizon;
  v.supNorm = std::exp(logSup.back());
  v.tailSlope = sxx > 0.0 ? sxy / sxx : 0.0;
  if (v.supNorm < policy.cap && v.tailSlope <= policy.boundedSlope) {
    v.verdict = OrbitClass::bounded;
  } else if (v.tailSlope >= policy.growingSlope) {
    v.verdict = OrbitClass::growing;
  } else {
    v.verdict = OrbitClass::inconclusive;
  }
  return v;
}

WindowBound measure_window_bound(const VerblunskyModel& model, std::span<const double> x, double zeta,
                                 double epsilon, const WindowOptions& options) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
  if (options.panels < 2 || options.panels % 2 != 0) throw DomainError("Simpson panel count must be even");
  const double r = 1.0 - epsilon;
  const auto alpha = alpha_orbit(model, x, 1, static_cast<std::size_t>(options.depth));
  const auto nodes = static_cast<std::size_t>(options.panels) + 1;
  const double h = 2.0 * epsilon / options.panels;
  const int size = fullLineSize(epsilon);
  std::vector<double> reF(nodes), reLambda(nodes, 0.0);
  parallelFor(nodes, options.exec, [&](std::size_t k) {
    const cplx z = std::polar(r, zeta - epsilon + h * static_cast<double>(k));
    reF[k] = caratheodory_from(alpha, z).real();
    if (options.fullLine) reLambda[k] = (1.0 + z * greenSum(model, x, z, size)).real();
  });

  WindowBound w;
  w.zeta = zeta;
  w.epsilon = epsilon;
  w.muMass = simpson(reF, h) / kTwoPi;
  w.lambdaMass = options.fullLine ? simpson(reLambda, h) / kTwoPi : 0.0;
  const PhaseGrid phases = withPoint(options.phases ? *options.phases : PhaseGrid::defaultFor(model), x);
  w.supTransfer = sup_transfer_squared(model, zeta, jl_horizon(epsilon), phases, options.exec);
  w.rhsUnit = epsilon * w.supTransfer;
  w.requiredCMu = w.muMass / w.rhsUnit;
  w.requiredCLambda = w.lambdaMass / w.rhsUnit;
  w.universalC = options.constants.CWindow;
  return w;
}

MeasureCalibration calibrate_measure_constants(int samplesPerModel, unsigned seed, double margin, Exec exec) {
  if (samplesPerModel < 1) throw DomainError("calibration needs at least one sample");
  const VerblunskyModel models[] = {
      VerblunskyModel(0.0, TrigPolynomial::zero(1), Frequency::golden()),
      VerblunskyModel(0.5, TrigPolynomial::zero(1), Frequency::golden()),
  };
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  MeasureCalibration cal;
  cal.margin = margin;
  const TorusPoint x{0.0};
  for (const auto& model : models) {
    for (int s = 0; s < samplesPerModel; ++s) {
      const double zeta = kTwoPi * unit(rng);
      const double eps = std::pow(10.0, -3.0 + 2.0 * unit(rng));
      const cplx phi = std::polar(1.0, kTwoPi * unit(rng));
      JlOptions jo;
      jo.exec = exec;
      const auto jl = jl_bound_check(model, x, zeta, eps, phi, jo);
      WindowOptions wo;
      wo.exec = exec;
      const auto wb = measure_window_bound(model, x, zeta, eps, wo);
      cal.maxRequiredA = std::max(cal.maxRequiredA, jl.requiredA);
      cal.maxRequiredC = std::max(cal.maxRequiredC, jl.requiredC);
      cal.maxRequiredCWindow = std::max({cal.maxRequiredCWindow, wb.requiredCMu, wb.requiredCLambda});
      ++cal.samples;
    }
  }
  cal.constants = {margin * cal.maxRequiredA, margin * cal.maxRequiredC, margin * cal.maxRequiredCWindow};
  return cal;
}

}  // namespace szego
