#pragma once

#include <optional>
#include <string>
#include <vector>

#include "szego/cocycle.hpp"
#include "szego/errors.hpp"
#include "szego/fourier.hpp"
#include "szego/linalg.hpp"
#include "szego/model.hpp"
#include "szego/parallel.hpp"

namespace szego {

/// eps_j = eps_0^(2^j), r_j = r / 2^j, N_j = 4^(j+1) ln(1/eps_0) / r.
struct KamSchedule {
  double epsilon0 = 1e-4;
  double r = 0.05;
  double sigma = 1.0 / 15.0;

  KamSchedule(double eps0, double radius);
  [[nodiscard]] double epsilon(int j) const;
  [[nodiscard]] double radius(int j) const;
  [[nodiscard]] double cutoff(int j) const;
};

/// Smallness gate eps <= D0 / ||S0||^C0 (min(1, 1/r) (r - r'))^(C0 tau).
struct KamGate {
  DiophantineParams dc{0.38, 1.0};
  double d0 = 0.16;  ///< calibrate_d0 for the golden mean, 200 trials, seed 7
  double c0 = 2.0;
  bool enforce = true;

  [[nodiscard]] double bound(double normS0, double r, double rPrime) const;
};

/// One verified inequality: value <= bound.
struct Check {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool pass = true;
};

bool allPass(const std::vector<Check>& checks);

/// Piecewise conjugation B(x) = F_m(x) ... F_1(x) on 2T^d.
class Conjugation {
 public:
  struct Factor {
    enum class Kind { constant, exponential, rotation };
    Kind kind = Kind::constant;
    Mat2 mat;               ///< constant
    SuFunction generator;   ///< exponential: exp(Y(x))
    MultiIndex degree;      ///< rotation diag(e^{-pi i <n,x>}, e^{pi i <n,x>})
  };

  Conjugation() = default;
  explicit Conjugation(int dim) : dim_(dim) {}

  static Conjugation identity(int dim) { return Conjugation(dim); }
  void applyConstant(const Mat2& m);
  void applyExponential(SuFunction y);
  void applyRotation(MultiIndex n);
  /// this followed by `later`: later(x) * this(x).
  void append(const Conjugation& later);

  /// x is not reduced mod 1; rotations are only 2-periodic.
  [[nodiscard]] Mat2 evaluate(std::span<const double> x) const;
  [[nodiscard]] MultiIndex degree() const;
  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] const std::vector<Factor>& factors() const { return factors_; }
  /// sup of operator norms over a grid on [0, 2)^d.
  [[nodiscard]] double supNorm(const TorusGrid& grid) const;
  [[nodiscard]] bool isIdentity() const { return factors_.empty(); }

 private:
  int dim_ = 1;
  std::vector<Factor> factors_;
};

/// S0 e^{f0(x)} = renormalized Szegő matrix at z = e^{i zeta}.
struct SzegoSplit {
  Su11Matrix s0;
  SuFunction f0;
};
SzegoSplit szego_split(const VerblunskyModel& model, double zeta, double radius,
                       std::optional<TorusGrid> grid = std::nullopt);

/// Rotation parameter of a constant: eigenvalue e^{2 pi i rho} of the
/// J-positive eigenvector, rho in [0, 1). Empty when S is not elliptic.
std::optional<double> constant_rotation(const Su11Matrix& s, double collar = 1e-10);

enum class KamBranch { nonResonant, resonant };
const char* toString(KamBranch b);

struct KamStepInput {
  Su11Matrix s0;
  SuFunction f0;
  Frequency omega = Frequency::golden();
  double r = 0.5;
  double rPrime = 0.25;
  /// Defaults to max(||f0||_r, 1e-15).
  std::optional<double> epsilon;
  KamGate gate;
  std::optional<KamBranch> forceBranch;
  std::optional<MultiIndex> forceResonance;
  std::optional<TorusGrid> grid;
};

struct KamStepResult {
  KamBranch branch = KamBranch::nonResonant;
  std::optional<MultiIndex> resonance;
  double epsilon = 0.0;
  double cutoff = 0.0;          ///< N = 2 |ln eps| / (r - r')
  std::optional<double> rho;    ///< of S0 when elliptic
  Conjugation b;
  Su11Matrix sPlus;
  SuFunction fPlus;
  double residual = 0.0;        ///< sup ||B(x+w) S0 e^{f0} B^{-1}(x) - S+ e^{f+}||
  double bNormSup = 1.0;        ///< ||B||_0
  std::optional<Su11Algebra> logSPlus;
  std::vector<Check> checks;
};

/// Refused inputs (gate) and failed steps.
class KamGateError : public DomainError {
 public:
  using DomainError::DomainError;
};
class KamStepError : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

KamStepResult kam_step(const KamStepInput& in);

struct ResonantForm {
  double t = 0.0;
  cplx v{0.0, 0.0};
  cplx rho{0.0, 0.0};  ///< real or purely imaginary
  cplx c{0.0, 0.0};
  Mat2 u;              ///< unitary, U S U^{-1} upper triangular
  double residualBound = 0.0;  ///< sup ||F_j||
};

struct KamState {
  int j = 0;
  Su11Matrix s;
  SuFunction f;
  Conjugation b;
  MultiIndex degB;
  KamBranch lastBranch = KamBranch::nonResonant;
  std::optional<ResonantForm> resonantForm;
  double conjugacyResidual = 0.0;
  double bNormSup = 1.0;
  std::vector<Check> checks;
};

struct KamIteration {
  std::vector<KamState> states;  ///< states[0] is the split itself
  std::optional<int> floorAt;    ///< first step not attempted because eps_j underflows
  std::string stopReason;
};

struct KamIterateOptions {
  KamGate gate;
  /// Steps whose eps_j falls below this are not attempted.
  double floor = 1e-18;
  std::optional<TorusGrid> grid;
};

KamIteration kam_iterate(const VerblunskyModel& model, double zeta, const KamSchedule& schedule,
                         int maxSteps, const KamIterateOptions& options = {});

struct ResonanceArc {
  MultiIndex m;
  double lo = 0.0;  ///< hi may exceed 2 pi for arcs through angle 0
  double hi = 0.0;
};

struct ResonanceSet {
  int j = 1;
  double width = 0.0;  ///< eps_{j-1}^(1/15)
  double cutoff = 0.0; ///< N_{j-1}
  std::vector<ResonanceArc> arcs;

  [[nodiscard]] std::vector<MultiIndex> labelsAt(double zeta) const;
};

/// Lambda_m(j) on a zeta grid from the rotation of S_{j-1}; |m| <= N_{j-1}.
ResonanceSet resonance_set(const VerblunskyModel& model, const std::vector<double>& zetas, int j,
                           const KamSchedule& schedule, const KamIterateOptions& options = {});

struct GrowthSample {
  double zeta = 0.0;
  double supNorm = 1.0;
  double constant = 0.0;  ///< supNorm / eps^{-1/96}
  bool flagged = false;
};

struct GrowthReport {
  long sMax = 0;  ///< floor(eps_{j-1}^{-1/16})
  double budget = 10.0;
  double maxConstant = 0.0;
  std::vector<GrowthSample> samples;
};

/// sup over 0 <= s <= sMax and phases of ||A^s(x)|| at zetas drawn from the
/// resonance arcs (intersected with `spectrum` when given).
GrowthReport growth_bound_check(const VerblunskyModel& model, const ResonanceSet& set,
                                const KamSchedule& schedule, int sampleCount,
                                const std::optional<SpectrumArcs>& spectrum = std::nullopt,
                                double budget = 10.0, Exec exec = {});

struct RotationLabel {
  bool inK = false;
  std::optional<MultiIndex> label;
  double defect = 0.0;
  double bound = 0.0;  ///< 2 eps_{j-1}^{1/15}
  bool flagged = false;
};

/// Best n with |n| <= 2 N_{j-1} for the cocycle's 2 rho; only searched when
/// zeta lies in K_j.
RotationLabel rotation_label(const VerblunskyModel& model, double zeta, int j,
                             const KamSchedule& schedule, long nIter = 20000,
                             const KamIterateOptions& options = {});

struct D0Calibration {
  double epsilonStar = 0.0;
  double d0 = 0.0;
  int trials = 0;
  std::vector<std::pair<double, int>> failuresPerEpsilon;
};

/// Largest eps on a ladder for which every randomized first-order step (random
/// elliptic S0, few-mode f0) meets the non-resonant contract, converted to D0
/// with ||S0|| = 1, r = 0.5, r' = 0.25.
D0Calibration calibrate_d0(const Frequency& omega, DiophantineParams dc, int trials = 200,
                           unsigned seed = 7, double c0 = 2.0);

}  // namespace szego
