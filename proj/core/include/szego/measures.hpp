#pragma once

#include <optional>
#include <span>
#include <vector>

#include "szego/cocycle.hpp"
#include "szego/linalg.hpp"
#include "szego/model.hpp"
#include "szego/parallel.hpp"

namespace szego {

inline constexpr int kDefaultSchurDepth = 1 << 14;

struct AlexandrovValue {
  cplx phi{1.0, 0.0};
  cplx value{1.0, 0.0};
};

/// Resolvent entries and bounds produced by the full-line evaluation.
struct FullLineBounds {
  cplx greenSum{0.0, 0.0};        ///< G(z;0,0) + G(z;1,1)
  double mobiusBound = 0.0;       ///< |(1 - F+ M-) / (F+ - M-)|
  double alexandrovSup = 0.0;     ///< sup over unimodular phi of |F+^phi|
  bool resolventBoundHolds = true;
  bool majorizationHolds = true;
  int truncationSize = 0;
};

struct CaratheodoryEval {
  cplx z{0.0, 0.0};
  cplx F{1.0, 0.0};
  std::optional<std::vector<AlexandrovValue>> FAlex;
  std::optional<cplx> PhiFull;
  std::optional<cplx> MMinus;
  std::optional<FullLineBounds> fullLine;
  int depth = 0;
};

/// F(z) = (1 + z f) / (1 - z f) where f is the Schur function with parameters
/// alpha_0, alpha_1, ... (tail set to zero).
cplx caratheodory_from(std::span<const cplx> alpha, cplx z);

/// Half-line F from alpha_j = sample_alpha(x, j + 1), j < depth. FAlex holds
/// 16 equally spaced phi.
CaratheodoryEval schur_caratheodory(const VerblunskyModel& model, std::span<const double> x, cplx z,
                                    int depth = kDefaultSchurDepth);

/// Carathéodory function of the measure with coefficients phi * alpha_n.
cplx alexandrov_transform(cplx F, cplx phi);

/// sup over unimodular phi of |alexandrov_transform(F, phi)|, in closed form:
/// the image of the circle is a circle centred at w0 = (1 + |F|^2) / (2 Re F)
/// of radius sqrt(w0^2 - 1). Requires Re F > 0.
double alexandrov_sup(cplx F);

/// Orthonormal polynomials of the rotated measure at z, and their second-kind
/// partners, for n = 0..count.
struct JlSequences {
  std::vector<cplx> phi;
  std::vector<cplx> psi;
};
JlSequences jl_sequences(std::span<const cplx> alpha, cplx z, cplx rotation, std::size_t count);

/// ||a||_l^2 = sum_{j <= [l]} |a_j|^2 + (l - [l]) |a_{[l]+1}|^2, returned squared.
double weighted_norm_squared(std::span<const cplx> a, double l);

/// Deviation of phi_n conj(psi_n) + psi_n conj(phi_n) from 2 on the circle,
/// maximized over n <= count; `relative` divides by max(1, |phi_n| |psi_n|),
/// which matters in gaps where both sequences grow exponentially.
struct JlIdentityDefect {
  double absolute = 0.0;
  double relative = 0.0;
};
JlIdentityDefect jl_identity_defect(const VerblunskyModel& model, std::span<const double> x, double zeta,
                                    cplx rotation, std::size_t count);

/// Frozen output of calibrate_measure_constants() with its default arguments.
struct MeasureConstants {
  double A = 2.65;         ///< two-sided bound |F| vs norm ratio
  double C = 2.0;          ///< sup_phi |F^phi| <= C sup ||A^s||^2
  double CWindow = 0.637;  ///< window masses <= C eps sup ||A^s||^2
};

/// max_{0 <= s <= sMax} sup over phases of ||A^s(x)||^2 for the renormalized
/// cocycle at e^{i zeta}.
double sup_transfer_squared(const VerblunskyModel& model, double zeta, long sMax,
                            const PhaseGrid& phases, Exec exec = {});

/// Horizon c / eps of the cocycle bounds, with c = sqrt 2 from the bound on l.
long jl_horizon(double epsilon);

struct JlBoundReport {
  double zeta = 0.0;
  double epsilon = 0.0;
  cplx phi{1.0, 0.0};
  double lOfR = 0.0;
  double phiNorm = 0.0;
  double psiNorm = 0.0;
  double normRatio = 0.0;   ///< psiNorm / phiNorm
  double FAbs = 0.0;        ///< |F^phi((1 - eps) e^{i zeta})|
  double FSupPhi = 0.0;     ///< sup over phi of the same
  double supTransfer = 0.0; ///< sup_{s <= horizon} ||A^s||_0^2
  long horizon = 0;
  double requiredA = 0.0;   ///< max(FAbs / ratio, ratio / FAbs)
  double requiredC = 0.0;   ///< FSupPhi / supTransfer
  double universalA = 0.0;
  double universalC = 0.0;
  double productDefect = 0.0;  ///< |eps * phiNorm * psiNorm - sqrt 2|
  [[nodiscard]] bool twoSidedHolds() const { return requiredA <= universalA; }
  [[nodiscard]] bool cocycleHolds() const { return requiredC <= universalC; }
};

struct JlOptions {
  MeasureConstants constants;
  int depth = kDefaultSchurDepth;
  /// Phases for the sup norm; defaults to PhaseGrid::defaultFor plus x.
  std::optional<PhaseGrid> phases;
  Exec exec;
};

JlBoundReport jl_bound_check(const VerblunskyModel& model, std::span<const double> x, double zeta,
                             double epsilon, cplx phi, const JlOptions& options = {});

/// Extended truncation of the given even size centred at 0; Phi = 1 + 2 z
/// (G00 + G11), M- from the left half-line with coefficients -conj alpha_{-n-2}.
CaratheodoryEval full_line_caratheodory(const VerblunskyModel& model, std::span<const double> x, cplx z,
                                        int truncationSize, int depth = kDefaultSchurDepth);

enum class OrbitClass { bounded, growing, inconclusive };
const char* toString(OrbitClass c);

struct OrbitVerdict {
  double zeta = 0.0;
  long horizon = 0;
  double supNorm = 1.0;   ///< sup_{s <= horizon} ||A^s||_0, +inf on overflow
  double tailSlope = 0.0; ///< regression slope of ln sup vs ln s over the tail
  OrbitClass verdict = OrbitClass::inconclusive;
};

struct OrbitPolicy {
  double cap = 1e3;
  double boundedSlope = 0.05;
  double growingSlope = 0.5;
};

/// Tail = checkpoints s >= sqrt(horizon).
OrbitVerdict subordinacy_classify(const VerblunskyModel& model, double zeta, long horizon,
                                  const PhaseGrid& phases, const OrbitPolicy& policy = {},
                                  Exec exec = {});

struct WindowBound {
  double zeta = 0.0;
  double epsilon = 0.0;
  double muMass = 0.0;      ///< half-line window mass
  double lambdaMass = 0.0;  ///< full-line window mass (normalized maximal measure)
  double supTransfer = 0.0;
  double rhsUnit = 0.0;     ///< eps * supTransfer
  double requiredCMu = 0.0;
  double requiredCLambda = 0.0;
  double universalC = 0.0;
  [[nodiscard]] bool holds() const {
    return requiredCMu <= universalC && requiredCLambda <= universalC;
  }
};

struct WindowOptions {
  MeasureConstants constants;
  int depth = kDefaultSchurDepth;
  int panels = 64;           ///< Simpson panels over the window
  bool fullLine = true;
  std::optional<PhaseGrid> phases;
  Exec exec;
};

/// Window masses from boundary values at radius 1 - eps:
/// (1 / 2 pi) int_{zeta - eps}^{zeta + eps} Re F((1 - eps) e^{i theta}) d theta.
WindowBound measure_window_bound(const VerblunskyModel& model, std::span<const double> x, double zeta,
                                 double epsilon, const WindowOptions& options = {});

struct MeasureCalibration {
  MeasureConstants constants;
  double maxRequiredA = 0.0;
  double maxRequiredC = 0.0;
  double maxRequiredCWindow = 0.0;
  int samples = 0;
  double margin = 2.0;
};

/// Random (zeta, eps, phi) draws on the free model and the constant model
/// lambda = 0.5; each constant is margin * the largest required value.
MeasureCalibration calibrate_measure_constants(int samplesPerModel = 16, unsigned seed = 11,
                                               double margin = 2.0, Exec exec = {});

}  // namespace szego
