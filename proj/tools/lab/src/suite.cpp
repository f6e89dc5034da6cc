#include "lab/suite.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "szego/cocycle.hpp"
#include "szego/dos.hpp"
#include "szego/gordon.hpp"
#include "szego/measures.hpp"

namespace szego::lab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> midGrid(int n) {
  std::vector<double> z(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = kTwoPi * (i + 0.5) / n;
  return z;
}

SuiteRow row(std::string name, double value, double bound, std::string note = {}) {
  return {std::move(name), value, bound, value <= bound, std::move(note)};
}

// Constant coefficients of modulus lambda: the spectrum is the arc
// [2 asin lambda, 2 pi - 2 asin lambda], the full circle at lambda = 0.
void constantModelRows(const VerblunskyModel& model, const SpectrumArcs& scan, int gridSize, Exec exec,
                       std::vector<SuiteRow>& rows) {
  const double a = 2.0 * std::asin(model.lambda());
  const double b = kTwoPi - a;
  const double tol = std::max(kTwoPi / gridSize, 1e-3);
  double err = 0.0;
  std::string note;
  if (model.lambda() == 0.0) {
    err = std::abs(scan.totalLength() - kTwoPi);
    note = "full circle expected";
  } else if (scan.arcs.size() != 1) {
    err = INFINITY;
    note = std::to_string(scan.arcs.size()) + " arcs, expected 1";
  } else {
    err = std::max(std::abs(scan.arcs[0].lo - a), std::abs(scan.arcs[0].hi - b));
  }
  rows.push_back(row("spectrum-closed-form", err, tol, note));

  // Renormalized trace 2 cos(zeta/2) / rho: elliptic iff |cos(zeta/2)| < rho.
  const auto zetas = midGrid(1000);
  std::vector<char> disagree(zetas.size(), 0);
  parallelFor(zetas.size(), exec, [&](std::size_t i) {
    const double zeta = zetas[i];
    if (model.lambda() > 0.0 && (std::abs(zeta - a) < 1e-3 || std::abs(zeta - b) < 1e-3)) return;
    const bool inArc = std::abs(std::cos(zeta / 2.0)) <= model.rho();
    const bool notUh = uh_classify(model, std::polar(1.0, zeta)).verdict != UhVerdict::uniformlyHyperbolic;
    disagree[i] = inArc != notUh;
  });
  rows.push_back(row("uh-vs-trace-disagreements", static_cast<double>(std::count(disagree.begin(), disagree.end(), 1)),
                     0.0, "1000 points, 1e-3 endpoint collar"));
}

}  // namespace

std::vector<SuiteRow> model_suite(const VerblunskyModel& model, const SuiteParams& params, Exec exec) {
  std::vector<SuiteRow> rows;
  ScanOptions scanOptions;
  scanOptions.exec = exec;
  const SpectrumArcs scan = spectrum_scan(model, params.gridSize, scanOptions);
  if (model.phaseIndependent()) constantModelRows(model, scan, params.gridSize, exec, rows);

  // Pooling identical phases adds nothing when alpha does not depend on x.
  const int phases = model.phaseIndependent() ? 1 : params.phases;
  DosOptions dosOptions;
  dosOptions.exec = exec;
  const DosTable dos = dos_histogram(model, params.degree, phases, DosEstimator::truncation, dosOptions);
  const PhaseGrid grid = PhaseGrid::defaultFor(model);

  double thoulessGap = 0.0;
  for (const double zeta : midGrid(8)) {
    const cplx z = std::polar(1.1, zeta);
    const auto lyap = lyapunov_exponent(model, z, 10000, grid, exec);
    thoulessGap = std::max(thoulessGap, thouless_check(model, z, dos, lyap).gap);
  }
  rows.push_back(row("thouless-gap", thoulessGap, 5e-3, "|z| = 1.1, 8 points"));

  const auto rd = rotation_dos_consistency(model, dos, midGrid(100), 20000, std::nullopt, exec);
  rows.push_back(row("rotation-dos-deviation", rd.maxDeviation, 1e-2, "100 points"));

  std::vector<double> interior;
  for (const double zeta : midGrid(params.gridSize))
    if (scan.interior(zeta, 1e-2)) interior.push_back(zeta);
  std::vector<double> picks;
  for (std::size_t i = 0; i < 8 && !interior.empty(); ++i)
    picks.push_back(interior[i * interior.size() / 8]);
  const TorusPoint x0(static_cast<std::size_t>(model.dim()), 0.0);
  double jl = 0.0;
  for (const double zeta : picks)
    jl = std::max(jl, jl_identity_defect(model, x0, zeta, cplx(1.0, 0.0), 1000).absolute);
  rows.push_back(row("jl-identity-defect", jl, 1e-8, std::to_string(picks.size()) + " spectrum points, n <= 1000"));

  if (model.phaseIndependent() && model.dim() == 1) {
    std::vector<long long> qs;
    for (const long long q : cf_denominators(model.omega()[0], 30))
      if (q <= 1000) qs.push_back(q);
    const PhaseGrid probe = PhaseGrid::lowDiscrepancy(1, 8);
    double worst = 0.0;
    for (const long long q : qs)
      for (const double zeta : midGrid(4)) {
        const auto d = gordon_defect(model, zeta, q, probe, exec);
        worst = std::max({worst, d.forward, d.backward});
      }
    rows.push_back(row("gordon-defect-x-independent", worst, 1e-12));
  }
  return rows;
}

}  // namespace szego::lab
