#pragma once

#include <optional>
#include <vector>

#include "szego/cocycle.hpp"
#include "szego/model.hpp"
#include "szego/parallel.hpp"

namespace szego {

enum class DosEstimator { truncation, zeros };
const char* toString(DosEstimator e);
DosEstimator dosEstimatorFromString(const std::string& s);

struct DosProvenance {
  DosEstimator estimator = DosEstimator::truncation;
  int degree = 0;
  int phaseSamples = 0;
};

/// Empirical integrated density of states on knots 0 = t_0 < ... < t_G = 2 pi.
struct DosTable {
  std::vector<double> grid;
  std::vector<double> cdf;
  double rhoInf = 1.0;
  DosProvenance provenance;

  /// k(0, zeta), linear between knots; zeta is reduced mod 2 pi except 2 pi itself.
  [[nodiscard]] double cdfAt(double zeta) const;
  /// Mass of the arc [a, b] traversed counterclockwise; b - a may exceed 0..2pi.
  [[nodiscard]] double mass(double a, double b) const;
};

struct DosOptions {
  /// Number of grid cells; 0 picks max(1024, N).
  int gridCells = 0;
  /// Unimodular replacement of the last coefficient for the truncation estimator.
  cplx beta{1.0, 0.0};
  Exec exec;
};

/// Pools eigen-angles of decoupled truncations (or projected zeros of Phi_N)
/// over `phases` low-discrepancy phases. Requires N >= 16.
DosTable dos_histogram(const VerblunskyModel& model, int degree, int phases,
                       DosEstimator estimator, const DosOptions& options = {});

/// sup |F - G| over the union of both grids.
double ks_distance(const DosTable& a, const DosTable& b);

struct ThoulessReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
};

/// lhs is lyap.gammaSzego; rhs is -ln rho_inf + sum over cells of
/// dk * ln|1 - z e^{-i t_mid}|. Cells within 4/N of arg z are dropped when |z| = 1.
ThoulessReport thouless_check(const VerblunskyModel& model, cplx z, const DosTable& dos,
                              const LyapunovResult& lyap);

struct HolderRow {
  double zeta = 0.0;
  double epsilon = 0.0;
  double mass = 0.0;
  bool belowResolution = false;  ///< epsilon < 4/N, excluded from fits
};

struct HolderFit {
  double zeta = 0.0;
  std::vector<double> localSlopes;  ///< between consecutive usable epsilons
  std::optional<double> slope;      ///< least squares; empty when not applicable
};

struct HolderTable {
  std::vector<HolderRow> rows;
  std::vector<HolderFit> fits;
};

/// Window masses k(zeta - eps, zeta + eps). A fit is not applicable when a usable
/// window holds less than half a sampled eigenvalue (gaps) or fewer than two
/// epsilons are usable.
HolderTable holder_modulus(const DosTable& dos, const std::vector<double>& zetas,
                           const std::vector<double>& epsilons);

struct RotationDosPoint {
  double zeta = 0.0;
  double twoRho = 0.0;
  double cdf = 0.0;
  double deviation = 0.0;
};

struct RotationDosReport {
  double maxDeviation = 0.0;
  std::vector<RotationDosPoint> curve;
};

/// |2 rho(zeta) - k(0, zeta)| measured mod 1, since the rotation number is only
/// defined mod 1 and both sides reach 1 at zeta = 2 pi.
RotationDosReport rotation_dos_consistency(const VerblunskyModel& model, const DosTable& dos,
                                           const std::vector<double>& zetas, long nIter = 20000,
                                           std::optional<PhaseGrid> phases = std::nullopt,
                                           Exec exec = {});

}  // namespace szego
