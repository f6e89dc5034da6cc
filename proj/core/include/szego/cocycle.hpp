#pragma once

#include <functional>
#include <span>
#include <vector>

#include "szego/linalg.hpp"
#include "szego/model.hpp"
#include "szego/parallel.hpp"

namespace szego {

/// Branch of z^{1/2}: sqrt|z| e^{i arg(z)/2} with arg in [0, 2 pi).
cplx sqrtBranch(cplx z);

/// Szegő step [[z, -conj a], [-a z, 1]] / rho, divided by z^{1/2} when
/// `renormalized` (then det = 1 and, on the circle, the matrix is in SU(1,1)).
Mat2 szego_step(cplx alpha, cplx z, bool renormalized = true);

/// Matrix value exp(logScale) * mat; products are rescaled as they grow.
struct ScaledMat2 {
  Mat2 mat;
  double logScale = 0.0;

  [[nodiscard]] Mat2 value() const;
  [[nodiscard]] double logNorm() const;
};

/// x -> A(x) over the rotation by omega.
class CocycleMap {
 public:
  using Fn = std::function<Mat2(std::span<const double>)>;
  CocycleMap(Frequency omega, Fn fn) : omega_(std::move(omega)), fn_(std::move(fn)) {}

  [[nodiscard]] const Frequency& omega() const { return omega_; }
  [[nodiscard]] Mat2 operator()(std::span<const double> x) const { return fn_(x); }

 private:
  Frequency omega_;
  Fn fn_;
};

/// The renormalized Szegő cocycle x -> S(alpha(x), z).
CocycleMap szego_cocycle(const VerblunskyModel& model, cplx z);

/// A^n(x) = A(x + (n-1) omega) ... A(x); A^{-m}(x) = (A^m(x - m omega))^{-1}.
ScaledMat2 transfer_product(const VerblunskyModel& model, std::span<const double> x, cplx z, long n);
ScaledMat2 transfer_product(const CocycleMap& map, std::span<const double> x, long n);

/// Product of renormalized steps over explicit coefficients, first step first.
ScaledMat2 transfer_from(std::span<const cplx> alpha, cplx z);

/// Phase sample set. `shape` lists per-axis counts for tensor grids, which is
/// what lets the hyperbolicity test compare neighbouring phases.
struct PhaseGrid {
  std::vector<TorusPoint> points;
  std::vector<int> shape;

  static PhaseGrid single(TorusPoint x);
  /// Midpoint tensor grid with `perAxis` points on each axis.
  static PhaseGrid tensor(int dim, int perAxis);
  /// Midpoints for d = 1, additive recurrence sequence otherwise.
  static PhaseGrid lowDiscrepancy(int dim, int count);
  /// 64^min(d, 2) points, or one point for phase-independent models.
  static PhaseGrid defaultFor(const VerblunskyModel& model);

  [[nodiscard]] std::size_t size() const { return points.size(); }
  /// Index pairs of grid neighbours (empty for unstructured sets).
  [[nodiscard]] std::vector<std::pair<std::size_t, std::size_t>> neighbours() const;
};

struct LyapunovResult {
  double gammaRenormalized = 0.0;
  double gammaSzego = 0.0;
  long iterations = 0;
  std::size_t phaseSamples = 0;
  double stdError = 0.0;  ///< across-phase standard error
};

LyapunovResult lyapunov_exponent(const VerblunskyModel& model, cplx z, long nIter,
                                 const PhaseGrid& phases, Exec exec = {});

struct RotationResult {
  double rho = 0.0;  ///< in [0, 1)
  long windingSamples = 0;
};

/// Fibered rotation number on the circle z = e^{i zeta}.
RotationResult rotation_number(const VerblunskyModel& model, double zeta, long nIter,
                               const PhaseGrid& phases, Exec exec = {});
RotationResult rotation_number(const VerblunskyModel& model, double zeta, long nIter);
/// Same for a general SU(1,1)-valued map close to the Szegő family.
RotationResult rotation_number(const CocycleMap& map, long nIter, const PhaseGrid& phases);

/// Circular distance between two numbers mod 1.
double circularDistance(double a, double b);

enum class UhVerdict { uniformlyHyperbolic, notUH, undecided };
const char* toString(UhVerdict v);

struct UhReport {
  UhVerdict verdict = UhVerdict::undecided;
  long horizon = 0;
  double minGrowth = 0.0;   ///< min over phases of (1/N) ln ||A^N||
  double threshold = 0.0;
  double coherence = 1.0;   ///< min |<v_i, v_j>| of contracted directions over neighbours
};

struct UhPolicy {
  long startHorizon = 256;
  long maxHorizon = 1L << 14;
  /// Growth threshold multiplier c in c ln N / N.
  double thresholdFactor = 10.0;
  double coherenceAngle = 0.5;
};

/// Growth threshold c ln N / N.
double uh_threshold(long horizon, double factor = 10.0);

/// Fixed-horizon test. notUH when some phase grows no faster than
/// `threshold`; UH when all exceed it with coherent contracted directions.
UhReport uh_test(const VerblunskyModel& model, cplx z, long horizon, const PhaseGrid& phases,
                 double threshold, double coherenceAngle = 0.5);

/// Precomputed coefficient orbits, reusable across spectral parameters.
class OrbitBank {
 public:
  OrbitBank(const VerblunskyModel& model, PhaseGrid phases, long length);
  [[nodiscard]] const PhaseGrid& phases() const { return phases_; }
  [[nodiscard]] long length() const { return length_; }
  [[nodiscard]] std::span<const cplx> orbit(std::size_t p) const { return orbits_[p]; }

 private:
  PhaseGrid phases_;
  long length_;
  std::vector<std::vector<cplx>> orbits_;
};

/// Escalating test: doubles the horizon from policy.startHorizon until a
/// verdict is reached or policy.maxHorizon is hit. notUH is returned early
/// once every phase grows slower than the threshold of the largest horizon.
UhReport uh_classify(const OrbitBank& bank, cplx z, const UhPolicy& policy = {});
UhReport uh_classify(const VerblunskyModel& model, cplx z, const UhPolicy& policy = {});

struct Arc {
  double lo = 0.0;
  double hi = 0.0;
  [[nodiscard]] bool contains(double zeta) const { return zeta >= lo && zeta <= hi; }
  [[nodiscard]] double length() const { return hi - lo; }
};

/// Closed arcs inside [0, 2 pi]; an arc through angle 0 is stored as two pieces.
struct SpectrumArcs {
  std::vector<Arc> arcs;
  double gridResolution = 0.0;

  [[nodiscard]] bool contains(double zeta) const;
  /// Inside some arc with at least `margin` to its ends (arc ends at 0 and
  /// 2 pi that continue across the cut do not count as ends).
  [[nodiscard]] bool interior(double zeta, double margin) const;
  [[nodiscard]] double totalLength() const;
};

struct ScanOptions {
  UhPolicy policy;
  int refineSteps = 8;
  Exec exec;
};

/// Classifies zeta_i = 2 pi i / gridSize, merges non-UH runs into arcs and
/// refines each end by bisection. Undecided points count as spectrum.
SpectrumArcs spectrum_scan(const VerblunskyModel& model, int gridSize, const ScanOptions& options = {});

/// Orthonormal polynomial values phi_n(z), phi*_n(z) for n = 0..count, where
/// step k uses alpha_{k-1}.
std::vector<Vec2> szego_polynomials(std::span<const cplx> alpha, cplx z, std::size_t count);

/// Gesztesy-Zinchenko iterates (s_n, t_n), n = 0..count, from (1, 1). Step n
/// uses alpha_{n-1} and the z-dependent form when n - 1 is even.
std::vector<Vec2> gz_iterates(std::span<const cplx> alpha, cplx z, std::size_t count);

/// Telescoped product M_l (I + xi_l) ... M_0 (I + xi_0) = M^(l) (I + xi^(l)).
struct TelescopeReport {
  Mat2 product;        ///< direct left-to-right product
  Mat2 head;           ///< M^(l)
  Mat2 xi;             ///< xi^(l)
  double identityDefect = 0.0;  ///< relative ||product - head (I + xi)||
  /// exp(sum ||M^(k)||^2 ||xi_k||) - 1
  double boundStated = 0.0;
  /// exp(sum ||M^(k-1)||^2 ||xi_k||) - 1 with M^(-1) = I
  double boundShifted = 0.0;
};

TelescopeReport telescope(std::span<const Mat2> heads, std::span<const Mat2> perturbations);

}  // namespace szego
