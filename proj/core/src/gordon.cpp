#include "szego/gordon.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "szego/errors.hpp"

namespace szego {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double diffNorm(const ScaledMat2& a, const ScaledMat2& b) {
  const double ls = std::max(a.logScale, b.logScale);
  const Mat2 m = std::exp(a.logScale - ls) * a.mat - std::exp(b.logScale - ls) * b.mat;
  return std::exp(ls) * m.opNorm();
}

double appliedNorm(const ScaledMat2& a) {
  const Vec2 v = a.mat * Vec2{1.0, 1.0};
  return std::exp(a.logScale) * v.norm();
}

void requireDenominator(const VerblunskyModel& model, long long q) {
  if (model.dim() != 1) throw DomainError("Gordon diagnostics need d = 1");
  const auto qs = cf_denominators(model.omega()[0]);
  if (std::find(qs.begin(), qs.end(), q) == qs.end())
    throw DomainError("q = " + std::to_string(q) + " is not a continued-fraction denominator of omega");
}

GordonDefect defectAt(const VerblunskyModel& model, std::span<const double> x, cplx z, long long q) {
  const auto n = static_cast<long>(q);
  const TorusPoint xq = shift(model.omega(), x, n);
  return {diffNorm(transfer_product(model, xq, z, n), transfer_product(model, x, z, n)),
          diffNorm(transfer_product(model, xq, z, -n), transfer_product(model, x, z, -n))};
}

}  // namespace

Frequency liouville_frequency(int levels) {
  if (levels < 1 || levels > 3) throw DomainError("synthetic Liouville frequency supports 1..3 levels");
  std::vector<long long> a{2};
  long long qPrev = 1, q = 2;  // q_0, q_1
  while (static_cast<int>(a.size()) < levels) {
    const auto next = static_cast<long long>(std::ceil(std::exp(static_cast<double>(q))));
    a.push_back(next);
    const long long qn = next * q + qPrev;
    qPrev = q;
    q = qn;
  }
  return Frequency({frequency_from_partial_quotients(a)});
}

std::vector<long long> cf_denominators(double omega, int depth) {
  std::vector<long long> out;
  for (const auto& c : continued_fraction(omega, depth).convergents) out.push_back(c.q);
  return out;
}

GordonDefect gordon_defect(const VerblunskyModel& model, double zeta, long long q, const PhaseGrid& phases,
                           Exec exec) {
  requireDenominator(model, q);
  const cplx z = std::polar(1.0, zeta);
  std::vector<GordonDefect> per(phases.size());
  parallelFor(phases.size(), exec, [&](std::size_t p) { per[p] = defectAt(model, phases.points[p], z, q); });
  GordonDefect d;
  for (const auto& g : per) {
    d.forward = std::max(d.forward, g.forward);
    d.backward = std::max(d.backward, g.backward);
  }
  return d;
}

ThreeBlock gordon_three_block(const VerblunskyModel& model, std::span<const double> x, double zeta,
                              long long q, double defectThreshold) {
  requireDenominator(model, q);
  const cplx z = std::polar(1.0, zeta);
  const auto n = static_cast<long>(q);
  ThreeBlock t;
  t.defects = defectAt(model, x, z, q);
  t.norms = {appliedNorm(transfer_product(model, x, z, n)), appliedNorm(transfer_product(model, x, z, -n)),
             appliedNorm(transfer_product(model, x, z, 2 * n))};
  t.max = *std::max_element(t.norms.begin(), t.norms.end());
  t.hypothesesMet = t.defects.forward < defectThreshold && t.defects.backward < defectThreshold;
  if (t.hypothesesMet) {
    t.holds = t.max >= kGordonFloor - 1e-9;
  } else {
    t.note = "lemma hypotheses not met";
  }
  return t;
}

GordonReport gordon_report(const VerblunskyModel& model, std::span<const double> x, double zeta,
                           long long q, const GordonOptions& options) {
  const PhaseGrid phases = options.phases ? *options.phases : PhaseGrid::defaultFor(model);
  const GordonDefect d = gordon_defect(model, zeta, q, phases, options.exec);
  const ThreeBlock t = gordon_three_block(model, x, zeta, q, options.defectThreshold);
  GordonReport r;
  r.zeta = zeta;
  r.qn = q;
  r.defectForward = d.forward;
  r.defectBackward = d.backward;
  r.threeBlockMax = t.max;
  r.hypothesesMet = d.forward < options.defectThreshold && d.backward < options.defectThreshold;
  r.holds = !r.hypothesesMet || t.max >= kGordonFloor - 1e-9;
  r.betaEstimate = beta_exponent(model.omega()[0], options.cfDepth);
  r.gammaEstimate =
      lyapunov_exponent(model, std::polar(1.0, zeta), options.lyapunovIter, phases, options.exec).gammaRenormalized;
  return r;
}

ScRegion sc_region(const VerblunskyModel& model, int gridSize, int cfDepth, const ScOptions& options) {
  if (model.dim() != 1) throw DomainError("singular-continuous region needs d = 1");
  if (gridSize < 8) throw DomainError("grid size must be >= 8");
  ScRegion region;
  region.margin = options.margin;
  region.betaEstimate = beta_exponent(model.omega()[0], cfDepth);
  // No gamma fits in (margin, beta - margin).
  if (region.betaEstimate <= 2.0 * options.margin) return region;

  const SpectrumArcs spectrum = spectrum_scan(model, gridSize, options.scan);
  const PhaseGrid phases = options.phases ? *options.phases : PhaseGrid::defaultFor(model);
  std::vector<double> gamma(static_cast<std::size_t>(gridSize), 0.0);
  std::vector<char> keep(static_cast<std::size_t>(gridSize), 0);
  for (int i = 0; i < gridSize; ++i) {
    const double zeta = kTwoPi * i / gridSize;
    if (!spectrum.contains(zeta)) continue;
    const double g =
        lyapunov_exponent(model, std::polar(1.0, zeta), options.lyapunovIter, phases, options.exec).gammaRenormalized;
    gamma[static_cast<std::size_t>(i)] = g;
    keep[static_cast<std::size_t>(i)] = g > options.margin && g < region.betaEstimate - options.margin;
  }
  for (int i = 0; i < gridSize;) {
    if (!keep[static_cast<std::size_t>(i)]) {
      ++i;
      continue;
    }
    int j = i;
    ScArc a;
    a.minGamma = gamma[static_cast<std::size_t>(i)];
    a.maxGamma = a.minGamma;
    while (j + 1 < gridSize && keep[static_cast<std::size_t>(j + 1)]) {
      ++j;
      a.minGamma = std::min(a.minGamma, gamma[static_cast<std::size_t>(j)]);
      a.maxGamma = std::max(a.maxGamma, gamma[static_cast<std::size_t>(j)]);
    }
    a.arc = {kTwoPi * i / gridSize, kTwoPi * j / gridSize};
    region.arcs.push_back(a);
    i = j + 1;
  }
  return region;
}

}  // namespace szego
