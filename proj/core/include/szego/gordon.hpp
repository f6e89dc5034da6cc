#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "szego/cocycle.hpp"
#include "szego/model.hpp"
#include "szego/parallel.hpp"

namespace szego {

/// Frequency [0; a_1, a_2, ...] with a_1 = 2 and a_{n+1} = ceil(e^{q_n}), so
/// ln q_{n+1} / q_n stays near 1. `levels` partial quotients, at most 3 (the
/// next one no longer fits a double).
Frequency liouville_frequency(int levels = 3);

/// CF denominators of omega up to the precision limit.
std::vector<long long> cf_denominators(double omega, int depth = 40);

struct GordonDefect {
  double forward = 0.0;   ///< max ||A^q(x + q w) - A^q(x)||
  double backward = 0.0;  ///< max ||A^{-q}(x + q w) - A^{-q}(x)||
};

/// Max over `phases`; d = 1 and q must be a CF denominator of omega.
GordonDefect gordon_defect(const VerblunskyModel& model, double zeta, long long q, const PhaseGrid& phases,
                           Exec exec = {});

struct ThreeBlock {
  std::array<double, 3> norms{};  ///< ||A^q v||, ||A^{-q} v||, ||A^{2q} v||, v = (1, 1)
  double max = 0.0;
  GordonDefect defects;           ///< at the single phase x
  bool hypothesesMet = false;     ///< both defects below the threshold
  bool holds = true;              ///< max >= 1/(2 sqrt 2) - 1e-9, or hypotheses unmet
  std::string note;
};

inline constexpr double kGordonFloor = 0.35355339059327373;  // 1 / (2 sqrt 2)

ThreeBlock gordon_three_block(const VerblunskyModel& model, std::span<const double> x, double zeta,
                              long long q, double defectThreshold = 1e-3);

struct GordonReport {
  double zeta = 0.0;
  long long qn = 0;
  double defectForward = 0.0;
  double defectBackward = 0.0;
  double threeBlockMax = 0.0;
  bool hypothesesMet = false;
  bool holds = true;
  double betaEstimate = 0.0;
  double gammaEstimate = 0.0;
};

struct GordonOptions {
  int cfDepth = 30;
  long lyapunovIter = 10000;
  double defectThreshold = 1e-3;
  std::optional<PhaseGrid> phases;  ///< defaults to PhaseGrid::defaultFor
  Exec exec;
};

GordonReport gordon_report(const VerblunskyModel& model, std::span<const double> x, double zeta,
                           long long q, const GordonOptions& options = {});

struct ScArc {
  Arc arc;
  double minGamma = 0.0;
  double maxGamma = 0.0;
};

struct ScRegion {
  double betaEstimate = 0.0;
  double margin = 0.05;
  std::vector<ScArc> arcs;
  [[nodiscard]] bool empty() const { return arcs.empty(); }
};

struct ScOptions {
  double margin = 0.05;
  long lyapunovIter = 10000;
  ScanOptions scan;
  std::optional<PhaseGrid> phases;
  Exec exec;
};

/// Spectrum grid points with margin < gamma < beta - margin, merged into
/// runs of consecutive grid points. Empty without scanning when beta <= 2 margin.
ScRegion sc_region(const VerblunskyModel& model, int gridSize, int cfDepth, const ScOptions& options = {});

}  // namespace szego
