// One PASS/FAIL line per acceptance criterion. `--criterion N` runs one of them.

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "szego/cmv.hpp"
#include "szego/cocycle.hpp"
#include "szego/dos.hpp"
#include "szego/gordon.hpp"
#include "szego/kam.hpp"
#include "szego/measures.hpp"

using namespace szego;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[violated] " << what << "; ";
    }
  }
  template <class T>
  void note(const std::string& key, const T& v) {
    detail << key << "=" << v << "; ";
  }
};

VerblunskyModel freeModel() { return VerblunskyModel(0.0, TrigPolynomial::zero(1), Frequency::golden()); }
VerblunskyModel constantModel(double lambda) {
  return VerblunskyModel(lambda, TrigPolynomial::zero(1), Frequency::golden());
}
VerblunskyModel cosineModel(double lambda, const Frequency& w = Frequency::golden()) {
  return VerblunskyModel(lambda, TrigPolynomial::cosine({1}), w);
}

std::vector<double> circleGrid(int n) {
  std::vector<double> z(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = kTwoPi * i / n;
  return z;
}

// Grid points inside the spectrum, at least `margin` away from every arc end.
std::vector<double> interiorPoints(const SpectrumArcs& s, int count, double margin) {
  std::vector<double> candidates;
  for (const double z : circleGrid(4096)) {
    bool ok = false;
    for (const auto& a : s.arcs) {
      for (const double t : {z, z + kTwoPi})
        if (t >= a.lo + margin && t <= a.hi - margin) ok = true;
    }
    if (ok) candidates.push_back(z);
  }
  std::vector<double> out;
  if (candidates.empty()) return out;
  for (int i = 0; i < count; ++i)
    out.push_back(candidates[static_cast<std::size_t>((static_cast<double>(i) + 0.5) / count * candidates.size())]);
  return out;
}

Outcome freeExactness() {
  Outcome o;
  const auto m = freeModel();
  const auto scan = spectrum_scan(m, 256);
  o.require(scan.arcs.size() == 1 && std::abs(scan.totalLength() - kTwoPi) < 1e-12, "spectrum is the full circle");
  const PhaseGrid one = PhaseGrid::single({0.0});
  double lyap = 0.0, outside = 0.0, rot = 0.0;
  for (const double zeta : circleGrid(64)) {
    lyap = std::max(lyap, lyapunov_exponent(m, std::polar(1.0, zeta), 10000, one).gammaSzego);
    outside = std::max(outside, std::abs(lyapunov_exponent(m, std::polar(1.2, zeta), 10000, one).gammaSzego - std::log(1.2)));
    rot = std::max(rot, circularDistance(rotation_number(m, zeta, 20000).rho, zeta / (4 * kPi)));
  }
  o.note("maxLyapOnCircle", lyap);
  o.note("maxDevAt1.2", outside);
  o.note("maxRotDev", rot);
  o.require(lyap <= 1e-6, "Lyapunov <= 1e-6 on the circle");
  o.require(outside <= 1e-6, "gamma(1.2 e^{i zeta}) = ln 1.2");
  o.require(rot <= 1e-6, "rho = zeta / 4 pi");
  const auto d = dos_histogram(m, 256, 1, DosEstimator::truncation);
  double dev = 0.0;
  for (std::size_t i = 0; i < d.grid.size(); ++i) dev = std::max(dev, std::abs(d.cdf[i] - d.grid[i] / kTwoPi));
  o.note("cdfDev", dev);
  o.require(dev <= 2.0 / 256, "CDF deviation <= 2/N");
  return o;
}

Outcome geronimusArc() {
  Outcome o;
  const auto m = constantModel(0.5);
  const int grid = 512;
  const auto scan = spectrum_scan(m, grid);
  const double tol = std::max(kTwoPi / grid, 1e-3);
  o.require(scan.arcs.size() == 1, "one arc");
  if (scan.arcs.size() == 1) {
    const double lo = std::abs(scan.arcs[0].lo - kPi / 3), hi = std::abs(scan.arcs[0].hi - 5 * kPi / 3);
    o.note("endpointErr", std::max(lo, hi));
    o.require(lo <= tol && hi <= tol, "endpoints within max(grid step, 1e-3)");
  }
  int disagreements = 0, compared = 0;
  for (const double zeta : circleGrid(1000)) {
    if (std::min(std::abs(zeta - kPi / 3), std::abs(zeta - 5 * kPi / 3)) < 1e-3) continue;
    ++compared;
    const bool inSpectrum = std::abs(std::cos(zeta / 2)) < std::sqrt(0.75);
    const bool uh = uh_classify(m, std::polar(1.0, zeta)).verdict == UhVerdict::uniformlyHyperbolic;
    if (uh == inSpectrum) ++disagreements;
  }
  o.note("compared", compared);
  o.note("disagreements", disagreements);
  o.require(disagreements == 0, "uh_test agrees with the trace criterion");
  return o;
}

DosTable thoulessDos() {
  static const DosTable d = dos_histogram(cosineModel(0.3), 2000, 50, DosEstimator::truncation);
  return d;
}

Outcome thouless() {
  Outcome o;
  const auto m = cosineModel(0.3);
  const DosTable d = thoulessDos();
  const PhaseGrid phases = PhaseGrid::defaultFor(m);
  double worst = 0.0;
  for (const double zeta : circleGrid(16)) {
    const cplx z = std::polar(1.1, zeta);
    worst = std::max(worst, thouless_check(m, z, d, lyapunov_exponent(m, z, 10000, phases)).gap);
  }
  o.note("maxGap", worst);
  o.require(worst <= 5e-3, "|gamma - Thouless integral| <= 5e-3");
  return o;
}

Outcome rotationDos() {
  Outcome o;
  const auto r = rotation_dos_consistency(cosineModel(0.3), thoulessDos(), circleGrid(100), 20000);
  o.note("maxDeviation", r.maxDeviation);
  o.require(r.maxDeviation <= 1e-2, "|2 rho - k| <= 1e-2");
  return o;
}

Outcome zeroLyapunovAndGrowth() {
  Outcome o;
  const auto m = cosineModel(0.05);
  const auto scan = spectrum_scan(m, 512);
  const auto pts = interiorPoints(scan, 64, 0.0);
  const PhaseGrid phases = PhaseGrid::defaultFor(m);
  double lyap = 0.0;
  for (const double zeta : pts) lyap = std::max(lyap, lyapunov_exponent(m, std::polar(1.0, zeta), 10000, phases).gammaSzego);
  o.note("sigmaPoints", pts.size());
  o.note("maxLyapOnSigma", lyap);
  o.require(!pts.empty() && lyap <= 5e-3, "LE <= 5e-3 on the detected spectrum");

  // One constant for gamma((1 + eps) e^{i zeta}) / sqrt(eps); frozen at 1, the
  // free model sits at ln(1.1) / sqrt(0.1) = 0.30.
  constexpr double kGrowthConstant = 1.0;
  double ratio = 0.0, lbeSlack = 1.0;
  for (const double zeta : interiorPoints(scan, 16, 0.0))
    for (const double eps : {1e-3, 1e-2, 1e-1}) {
      const double g = lyapunov_exponent(m, std::polar(1.0 + eps, zeta), 10000, phases).gammaSzego;
      ratio = std::max(ratio, g / std::sqrt(eps));
      lbeSlack = std::min(lbeSlack, g - std::log(1.0 + eps));
    }
  o.note("maxGammaOverSqrtEps", ratio);
  o.note("minLowerBoundSlack", lbeSlack);
  o.require(ratio <= kGrowthConstant, "gamma / sqrt(eps) <= 1");
  o.require(lbeSlack >= -1e-3, "gamma >= ln(1 + delta) - 1e-3");
  return o;
}

Outcome holderSandwich() {
  Outcome o;
  const auto m = cosineModel(0.05);
  const auto d = dos_histogram(m, 4000, 20, DosEstimator::truncation);
  const auto zetas = interiorPoints(spectrum_scan(m, 512), 10, 0.1);
  const auto t = holder_modulus(d, zetas, {1e-2, 2e-2, 5e-2, 1e-1});
  double lo = 10.0, hi = -10.0;
  std::size_t slopes = 0;
  for (const auto& f : t.fits)
    for (const double s : f.localSlopes) {
      lo = std::min(lo, s);
      hi = std::max(hi, s);
      ++slopes;
    }
  o.note("zetas", zetas.size());
  o.note("localSlopes", slopes);
  o.note("minSlope", lo);
  o.note("maxSlope", hi);
  o.require(zetas.size() == 10 && slopes > 0, "10 interior points with usable windows");
  o.require(lo >= 0.45 && hi <= 1.55, "local slopes in [0.45, 1.55]");
  return o;
}

// Random elliptic S0 with |b| <= 0.5 and rotation rho.
Su11Matrix ellipticWith(double rho, double hyper, double phase) {
  const Mat2 k{std::cosh(hyper), std::polar(std::sinh(hyper), phase), std::polar(std::sinh(hyper), -phase),
               std::cosh(hyper)};
  const Mat2 d = Mat2::diag(std::polar(1.0, kTwoPi * rho), std::polar(1.0, -kTwoPi * rho));
  return Su11Matrix::project(k * d * k.inverse());
}

SuFunction randomPerturbation(std::mt19937_64& rng, double norm, double r) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::map<MultiIndex, SuMode> modes;
  for (int k = 1; k <= 3; ++k) {
    const cplx t(u(rng), u(rng));
    modes[{k}] = {t, cplx(u(rng), u(rng))};
    modes[{-k}] = {std::conj(t), cplx(u(rng), u(rng))};
  }
  SuFunction f(1, modes, r);
  const double scale = norm / f.norm(r);
  for (auto& [k, m] : modes) m = {scale * m.t, scale * m.v};
  return SuFunction(1, std::move(modes), r);
}

Outcome kamContract() {
  Outcome o;
  {
    KamStepInput in;
    in.s0 = ellipticWith(0.3, 0.2, 1.0);
    in.f0 = SuFunction::zero(1, 0.5);
    in.forceBranch = KamBranch::nonResonant;
    const auto r = kam_step(in);
    o.require(r.b.isIdentity() && r.fPlus.modes().empty() && (r.sPlus.mat() - in.s0.mat()).maxAbs() < 1e-14,
              "identity case exact");
  }
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double eps = 1e-6;
  int accepted = 0, drawn = 0, violations = 0;
  while (accepted < 200) {
    ++drawn;
    KamStepInput in;
    in.s0 = ellipticWith(u(rng), 0.5 * u(rng), kTwoPi * u(rng));
    in.f0 = randomPerturbation(rng, eps, 0.5);
    in.gate.enforce = false;
    const auto r = kam_step(in);
    if (r.branch != KamBranch::nonResonant) continue;
    ++accepted;
    const bool ok = r.residual <= 1e-12 && allPass(r.checks);
    if (!ok) ++violations;
  }
  o.note("nonResonantTrials", accepted);
  o.note("drawn", drawn);
  o.note("nonResonantViolations", violations);
  o.require(violations == 0, "non-resonant contract");

  // Resonant trials: 2 rho = n omega + delta with delta across the resonance window.
  const double w = Frequency::golden()[0];
  const double width = std::pow(eps, 1.0 / 15.0);
  int resonant = 0, degreeFail = 0, tFail = 0, vFail = 0, fFail = 0;
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + static_cast<int>(u(rng) * 3);
    const double delta = width * (2 * u(rng) - 1) * 0.999;
    KamStepInput in;
    in.s0 = ellipticWith(0.5 * (n * w + delta), 0.5 * u(rng), kTwoPi * u(rng));
    in.f0 = randomPerturbation(rng, eps, 0.5);
    in.gate.enforce = false;
    in.forceBranch = KamBranch::resonant;
    in.forceResonance = MultiIndex{n};
    const auto r = kam_step(in);
    ++resonant;
    for (const auto& c : r.checks) {
      if (c.pass) continue;
      if (c.name.find("deg B") != std::string::npos) ++degreeFail;
      else if (c.name.find("|t+|") != std::string::npos) ++tFail;
      else if (c.name.find("|v+|") != std::string::npos) ++vFail;
      else ++fFail;
    }
  }
  o.note("resonantTrials", resonant);
  o.note("degreeViolations", degreeFail);
  o.note("tViolations", tFail);
  o.note("vViolations", vFail);
  o.note("otherViolations", fFail);
  o.require(degreeFail == 0, "deg B = n*");
  o.require(tFail == 0, "|t+| <= eps^(1/16)");
  o.require(vFail == 0 && fFail == 0, "|v+| and f+ bounds");

  KamIterateOptions opt;
  opt.gate.enforce = false;
  const auto it = kam_iterate(cosineModel(1e-4), 2.0, KamSchedule(2e-3, 0.05), 3, opt);
  int budget = 0, budgetFail = 0;
  for (const auto& s : it.states)
    for (const auto& c : s.checks) {
      const bool isBudget = c.name.find("||B_j||_0 <=") != std::string::npos ||
                            c.name.find("|deg B_j|") != std::string::npos ||
                            c.name.find("|c_j|") != std::string::npos;
      if (!isBudget) continue;
      ++budget;
      if (!c.pass) ++budgetFail;
    }
  o.note("smokeSteps", it.states.size() - 1);
  o.note("budgetChecks", budget);
  o.require(budget > 0 && budgetFail == 0, "norm/degree budgets on the smoke model");
  return o;
}

Outcome telescoping() {
  Outcome o;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int violations = 0;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    std::vector<Mat2> heads, pert;
    for (int k = 0; k < 50; ++k) {
      heads.push_back(szego_step(std::polar(0.5 * std::abs(u(rng)), kPi * u(rng)), std::polar(1.0, kPi * u(rng))));
      Mat2 xi{cplx(u(rng), u(rng)), cplx(u(rng), u(rng)), cplx(u(rng), u(rng)), cplx(u(rng), u(rng))};
      pert.push_back((1e-8 / xi.opNorm()) * xi);
    }
    const auto r = telescope(heads, pert);
    worst = std::max(worst, r.identityDefect);
    if (r.identityDefect > 1e-12 || r.xi.opNorm() > r.boundStated) ++violations;
  }
  o.note("maxIdentityDefect", worst);
  o.note("violations", violations);
  o.require(violations == 0, "identity and bound on xi");
  return o;
}

Outcome weightedNormBounds() {
  Outcome o;
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double x[] = {0.0};
  double identity = 0.0, maxA = 0.0, maxC = 0.0, maxW = 0.0;
  int violations = 0, draws = 0;
  const MeasureConstants k;
  for (const auto& m : {freeModel(), constantModel(0.5), cosineModel(0.05)}) {
    for (int t = 0; t < 20; ++t) {
      const double zeta = kTwoPi * u(rng);
      const double eps = std::pow(10.0, -3.0 + 2.0 * u(rng));
      const cplx phi = std::polar(1.0, kTwoPi * u(rng));
      identity = std::max(identity, jl_identity_defect(m, x, zeta, phi, 1000).relative);
      const auto jl = jl_bound_check(m, x, zeta, eps, phi);
      WindowOptions wo;
      const auto win = measure_window_bound(m, x, zeta, eps, wo);
      maxA = std::max(maxA, jl.requiredA);
      maxC = std::max(maxC, jl.requiredC);
      maxW = std::max({maxW, win.requiredCMu, win.requiredCLambda});
      ++draws;
      if (!jl.twoSidedHolds() || !jl.cocycleHolds() || !win.holds()) ++violations;
    }
  }
  o.note("draws", draws);
  o.note("maxIdentityDefect", identity);
  o.note("maxRequiredA", maxA);
  o.note("A", k.A);
  o.note("maxRequiredC", maxC);
  o.note("C", k.C);
  o.note("maxRequiredCWindow", maxW);
  o.note("CWindow", k.CWindow);
  o.require(identity <= 1e-8, "identity to 1e-8 for n <= 1000");
  o.require(violations == 0, "bounds hold with the frozen constants");
  return o;
}

Outcome gordon() {
  Outcome o;
  const double beta = beta_exponent(Frequency::golden()[0], 30);
  o.note("goldenBeta", beta);
  o.require(beta <= 0.01, "golden beta <= 0.01");

  const PhaseGrid phases = PhaseGrid::lowDiscrepancy(1, 16);
  double xIndep = 0.0;
  for (const double lambda : {0.0, 0.5})
    for (const long long q : {1LL, 2LL, 3LL, 5LL, 8LL, 13LL, 89LL, 987LL})
      for (const double zeta : {0.3, 2.0, 4.0}) {
        const auto d = gordon_defect(constantModel(lambda), zeta, q, phases);
        xIndep = std::max({xIndep, d.forward, d.backward});
      }
  o.note("xIndependentDefect", xIndep);
  o.require(xIndep <= 1e-12, "x-independent defect <= 1e-12");

  const auto liouville = cosineModel(0.5, liouville_frequency());
  int sampled = 0, qualifying = 0, floorFail = 0;
  double minMax = 1e300;
  for (const long long q : {2LL, 17LL})
    for (const double zeta : circleGrid(64))
      for (const double x0 : {0.0, 0.25, 0.5, 0.75}) {
        const double x[] = {x0};
        const auto t = gordon_three_block(liouville, x, zeta, q, 1e-6);
        ++sampled;
        if (!t.hypothesesMet) continue;
        ++qualifying;
        minMax = std::min(minMax, t.max);
        if (t.max < kGordonFloor - 1e-9) ++floorFail;
      }
  o.note("threeBlockSamples", sampled);
  o.note("defectsBelow1e-6", qualifying);
  o.note("minThreeBlockMax", qualifying ? minMax : 0.0);
  o.require(floorFail == 0, "three-block max >= 1/(2 sqrt 2) - 1e-9");

  ScOptions so;
  const bool freeEmpty = sc_region(VerblunskyModel(0.0, TrigPolynomial::zero(1), liouville_frequency()), 256, 30, so).empty();
  const bool goldenEmpty = sc_region(cosineModel(0.3), 256, 30, so).empty();
  o.require(freeEmpty, "sc_region empty for lambda = 0");
  o.require(goldenEmpty, "sc_region empty for golden omega");
  return o;
}

Outcome boundedness() {
  Outcome o;
  const auto m = cosineModel(0.05);
  const auto pts = interiorPoints(spectrum_scan(m, 512), 50, 1e-2);
  const PhaseGrid phases = PhaseGrid::defaultFor(m);
  int growing = 0, bounded = 0, inconclusive = 0;
  double worst = 0.0;
  for (const double zeta : pts) {
    const auto v = subordinacy_classify(m, zeta, 10000, phases);
    worst = std::max(worst, v.supNorm);
    switch (v.verdict) {
      case OrbitClass::growing: ++growing; break;
      case OrbitClass::bounded: ++bounded; break;
      case OrbitClass::inconclusive: ++inconclusive; break;
    }
  }
  o.note("points", pts.size());
  o.note("bounded", bounded);
  o.note("inconclusive", inconclusive);
  o.note("growing", growing);
  o.note("maxSupNorm", worst);
  o.require(pts.size() == 50, "50 interior points");
  o.require(growing == 0, "never growing");
  return o;
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list{
      {"free-model exactness", freeExactness},
      {"constant-model arc", geronimusArc},
      {"Thouless formula", thouless},
      {"rotation-DOS identity", rotationDos},
      {"zero Lyapunov exponent and growth bound", zeroLyapunovAndGrowth},
      {"Holder sandwich", holderSandwich},
      {"KAM step contract", kamContract},
      {"telescoping identity", telescoping},
      {"weighted-norm measure bounds", weightedNormBounds},
      {"Gordon suite", gordon},
      {"boundedness on the spectrum", boundedness},
  };
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-11)")->check(CLI::Range(1, 11));
  CLI11_PARSE(app, argc, argv);

  bool all = true;
  const auto& list = criteria();
  for (std::size_t i = 0; i < list.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    if (only && n != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = list[i].run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d %s: %s (%.1fs) %s\n", n, list[i].name, o.pass ? "PASS" : "FAIL", secs,
                o.detail.str().c_str());
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
