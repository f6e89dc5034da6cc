#include "szego/dos.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "szego/cmv.hpp"
#include "szego/errors.hpp"

namespace szego {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrapAngle(double t) {
  t = std::fmod(t, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  return t >= kTwoPi ? 0.0 : t;
}

// Counts of eigen-angles in [0, t_g) for one phase, via the Blaschke phase.
std::vector<long> truncationCounts(std::span<const cplx> alpha, cplx beta,
                                   const std::vector<double>& grid) {
  const auto head = alpha.first(alpha.size() - 1);
  const double c = -std::arg(beta);
  const double base = std::ceil((blaschke_phase(head, 0.0) - c) / kTwoPi);
  std::vector<long> out(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g)
    out[g] = static_cast<long>(std::ceil((blaschke_phase(head, grid[g]) - c) / kTwoPi) - base);
  out.front() = 0;
  out.back() = static_cast<long>(alpha.size());
  return out;
}

std::vector<long> zerosCounts(std::span<const cplx> alpha, const std::vector<double>& grid) {
  std::vector<double> angles;
  for (const cplx& w : szego_zeros(alpha)) angles.push_back(wrapAngle(std::arg(w)));
  std::sort(angles.begin(), angles.end());
  std::vector<long> out(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g)
    out[g] = std::lower_bound(angles.begin(), angles.end(), grid[g]) - angles.begin();
  out.back() = static_cast<long>(angles.size());
  return out;
}

}  // namespace

const char* toString(DosEstimator e) {
  return e == DosEstimator::truncation ? "truncation" : "zeros";
}

DosEstimator dosEstimatorFromString(const std::string& s) {
  if (s == "truncation") return DosEstimator::truncation;
  if (s == "zeros") return DosEstimator::zeros;
  throw DomainError("unknown DOS estimator '" + s + "' (expected truncation or zeros)");
}

double DosTable::cdfAt(double zeta) const {
  if (zeta == kTwoPi) return 1.0;
  zeta = wrapAngle(zeta);
  const auto it = std::upper_bound(grid.begin(), grid.end(), zeta);
  if (it == grid.end()) return cdf.back();
  const auto i = static_cast<std::size_t>(it - grid.begin());
  const double t = (zeta - grid[i - 1]) / (grid[i] - grid[i - 1]);
  return cdf[i - 1] + t * (cdf[i] - cdf[i - 1]);
}

double DosTable::mass(double a, double b) const {
  if (b < a) return 0.0;
  const double turns = std::floor((b - a) / kTwoPi);
  const double rest = (b - a) - turns * kTwoPi;
  const double lo = wrapAngle(a);
  const double hi = lo + rest;
  double m = turns;
  if (hi <= kTwoPi) {
    m += cdfAt(hi) - cdfAt(lo);
  } else {
    m += 1.0 - cdfAt(lo) + cdfAt(hi - kTwoPi);
  }
  return m;
}

DosTable dos_histogram(const VerblunskyModel& model, int degree, int phases,
                       DosEstimator estimator, const DosOptions& options) {
  if (degree < 16) throw DomainError("DOS estimation needs N >= 16");
  if (phases < 1) throw DomainError("DOS estimation needs at least one phase sample");
  if (estimator == DosEstimator::zeros && model.lambda() == 0.0)
    throw DomainError("zeros estimator undefined for lambda = 0: all zeros of Phi_N sit at the origin");
  if (std::abs(std::abs(options.beta) - 1.0) > 1e-12) throw DomainError("beta must be unimodular");

  const int cells = options.gridCells > 0 ? options.gridCells : std::max(1024, degree);
  DosTable t;
  t.grid.resize(static_cast<std::size_t>(cells) + 1);
  for (int g = 0; g <= cells; ++g) t.grid[static_cast<std::size_t>(g)] = kTwoPi * g / cells;
  t.grid.back() = kTwoPi;
  t.rhoInf = model.rho();
  t.provenance = {estimator, degree, phases};

  const PhaseGrid grid = PhaseGrid::lowDiscrepancy(model.dim(), phases);
  // Phase-independent coefficients give identical samples; compute one.
  const std::size_t distinct = model.phaseIndependent() ? 1 : grid.size();
  std::vector<std::vector<long>> counts(distinct);
  parallelFor(distinct, options.exec, [&](std::size_t p) {
    const auto alpha = alpha_orbit(model, grid.points[p], 1, static_cast<std::size_t>(degree));
    counts[p] = estimator == DosEstimator::truncation ? truncationCounts(alpha, options.beta, t.grid)
                                                      : zerosCounts(alpha, t.grid);
  });
  const double total = static_cast<double>(degree) * static_cast<double>(distinct);
  t.cdf.assign(t.grid.size(), 0.0);
  for (std::size_t g = 0; g < t.grid.size(); ++g) {
    long s = 0;
    for (const auto& c : counts) s += c[g];
    t.cdf[g] = static_cast<double>(s) / total;
  }
  return t;
}

double ks_distance(const DosTable& a, const DosTable& b) {
  double d = 0.0;
  for (double t : a.grid) d = std::max(d, std::abs(a.cdfAt(t) - b.cdfAt(t)));
  for (double t : b.grid) d = std::max(d, std::abs(a.cdfAt(t) - b.cdfAt(t)));
  return d;
}

ThoulessReport thouless_check(const VerblunskyModel& model, cplx z, const DosTable& dos,
                              const LyapunovResult& lyap) {
  (void)model;
  const bool onCircle = std::abs(std::abs(z) - 1.0) < 1e-12;
  const double collar = 4.0 / std::max(1, dos.provenance.degree);
  const double argZ = wrapAngle(std::arg(z));
  double integral = 0.0;
  for (std::size_t g = 1; g < dos.grid.size(); ++g) {
    const double dk = dos.cdf[g] - dos.cdf[g - 1];
    if (dk == 0.0) continue;
    const double mid = 0.5 * (dos.grid[g - 1] + dos.grid[g]);
    if (onCircle) {
      const double d = std::abs(wrapAngle(mid - argZ + std::numbers::pi) - std::numbers::pi);
      if (d < collar) continue;
    }
    integral += dk * std::log(std::abs(1.0 - z * std::polar(1.0, -mid)));
  }
  ThoulessReport r;
  r.lhs = lyap.gammaSzego;
  r.rhs = -std::log(dos.rhoInf) + integral;
  r.gap = std::abs(r.lhs - r.rhs);
  return r;
}

HolderTable holder_modulus(const DosTable& dos, const std::vector<double>& zetas,
                           const std::vector<double>& epsilons) {
  const double resolution = 4.0 / std::max(1, dos.provenance.degree);
  const double floorMass =
      0.5 / (static_cast<double>(std::max(1, dos.provenance.degree)) * std::max(1, dos.provenance.phaseSamples));
  std::vector<double> eps = epsilons;
  std::sort(eps.begin(), eps.end());
  HolderTable table;
  for (double zeta : zetas) {
    HolderFit fit;
    fit.zeta = zeta;
    std::vector<double> lx, ly;
    bool applicable = true;
    for (double e : eps) {
      if (!(e > 0.0)) throw DomainError("window half-widths must be positive");
      HolderRow row{zeta, e, dos.mass(zeta - e, zeta + e), e < resolution};
      table.rows.push_back(row);
      if (row.belowResolution) continue;
      if (row.mass < floorMass) {
        applicable = false;
        continue;
      }
      lx.push_back(std::log(e));
      ly.push_back(std::log(row.mass));
    }
    for (std::size_t i = 1; i < lx.size(); ++i)
      fit.localSlopes.push_back((ly[i] - ly[i - 1]) / (lx[i] - lx[i - 1]));
    if (applicable && lx.size() >= 2) {
      const double n = static_cast<double>(lx.size());
      const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
      const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
      double sxy = 0.0, sxx = 0.0;
      for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
      }
      fit.slope = sxy / sxx;
    } else {
      fit.localSlopes.clear();
    }
    table.fits.push_back(std::move(fit));
  }
  return table;
}

RotationDosReport rotation_dos_consistency(const VerblunskyModel& model, const DosTable& dos,
                                           const std::vector<double>& zetas, long nIter,
                                           std::optional<PhaseGrid> phases, Exec exec) {
  const PhaseGrid grid = phases ? *phases
                                : (model.phaseIndependent() ? PhaseGrid::defaultFor(model)
                                                            : PhaseGrid::lowDiscrepancy(model.dim(), 8));
  RotationDosReport r;
  r.curve.resize(zetas.size());
  parallelFor(zetas.size(), exec, [&](std::size_t i) {
    const double zeta = zetas[i];
    if (!(zeta >= 0.0 && zeta < kTwoPi)) throw DomainError("rotation grid must lie in [0, 2 pi)");
    RotationDosPoint p;
    p.zeta = zeta;
    p.twoRho = 2.0 * rotation_number(model, zeta, nIter, grid).rho;
    p.cdf = dos.cdfAt(zeta);
    p.deviation = circularDistance(p.twoRho, p.cdf);
    r.curve[i] = p;
  });
  for (const auto& p : r.curve) r.maxDeviation = std::max(r.maxDeviation, p.deviation);
  return r;
}

}  // namespace szego
