#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <array>
#include <iosfwd>
#include <span>
#include <vector>

#include "szego/linalg.hpp"
#include "szego/model.hpp"

namespace szego {

/// 2x2 unitary block [[conj a, rho], [rho, -a]].
struct ThetaBlock {
  cplx alpha;
  double rho;

  explicit ThetaBlock(cplx a);
  [[nodiscard]] Mat2 mat() const { return {std::conj(alpha), rho, rho, -alpha}; }
};

enum class CmvKind { standard, extended };

/// Boundary modification at the cut. `unimodular` replaces the straddling
/// coefficients by beta on the unit circle, which decouples the block and
/// keeps the truncation unitary.
struct Boundary {
  enum class Type { none, unimodular };
  Type type = Type::none;
  cplx beta{1.0, 0.0};

  static Boundary none() { return {}; }
  static Boundary unimodular(cplx beta);
  [[nodiscard]] bool decoupled() const { return type == Type::unimodular; }
};

/// Finite section of a standard (index 0..N-1) or extended (index
/// first..first+N-1) CMV matrix. Five-diagonal band storage.
class CmvTruncation {
 public:
  using Dense = Eigen::MatrixXcd;
  using Sparse = Eigen::SparseMatrix<cplx>;

  CmvTruncation(CmvKind kind, long firstIndex, Boundary boundary, TorusPoint basePhase,
                std::vector<cplx> coefficients, std::vector<std::array<cplx, 5>> band);

  [[nodiscard]] CmvKind kind() const { return kind_; }
  [[nodiscard]] int size() const { return size_; }
  [[nodiscard]] long firstIndex() const { return first_; }
  [[nodiscard]] const Boundary& boundary() const { return boundary_; }
  [[nodiscard]] const TorusPoint& basePhase() const { return basePhase_; }
  /// Coefficients of the local rows, before any boundary replacement.
  [[nodiscard]] const std::vector<cplx>& coefficients() const { return coefficients_; }

  /// Entry at local row/column (0-based); zero outside the band.
  [[nodiscard]] cplx operator()(int row, int col) const;
  [[nodiscard]] Dense dense() const;
  [[nodiscard]] Sparse sparse() const;
  /// max |(M*M - I)_{ij}|
  [[nodiscard]] double unitarityDefect() const;
  /// Triplet CSV (row, col, re, im) with a header row.
  void writeCsv(std::ostream& os) const;

 private:
  CmvKind kind_;
  int size_;
  long first_;
  Boundary boundary_;
  TorusPoint basePhase_;
  std::vector<cplx> coefficients_;
  std::vector<std::array<cplx, 5>> band_;  ///< band_[i][j - i + 2]
};

/// Builds LM (standard) or L'M' (extended). `firstIndex` applies to the
/// extended kind only and must be even.
CmvTruncation assemble_cmv(const VerblunskyModel& model, std::span<const double> x, int size,
                           CmvKind kind, Boundary boundary, long firstIndex = 0);

/// Same construction from explicit coefficients alpha_first, ..., alpha_{first+N-1}
/// plus alpha_{first-1} for the extended left straddle.
CmvTruncation assemble_cmv_from(std::span<const cplx> alpha, CmvKind kind, Boundary boundary,
                                long firstIndex = 0, cplx leftStraddle = 0.0,
                                TorusPoint basePhase = {});

/// Raw eigenvalues from the dense routine (no unitarity requirement).
std::vector<cplx> truncation_eigenvalues(const CmvTruncation& m);

/// Eigen-angles in [0, 2 pi), ascending. Throws NonUnitaryError when an
/// eigenvalue modulus leaves [1 - 1e-8, 1 + 1e-8]. Large decoupled standard
/// truncations go through paraorthogonal_angles instead of a dense solve.
std::vector<double> truncation_spectrum(const CmvTruncation& m);

/// Continuous phase of the degree-N Blaschke product z Phi_{N-1} / Phi*_{N-1}
/// at z = e^{i theta}, built from alpha_0..alpha_{N-2}. Strictly increasing,
/// total increase 2 pi N over one turn.
double blaschke_phase(std::span<const cplx> alpha, double theta);

/// Number of eigen-angles in [0, theta) of the standard truncation whose last
/// coefficient is replaced by the unimodular beta. `alpha` holds the other N - 1.
long count_eigenangles(std::span<const cplx> alpha, cplx beta, double theta);

/// All N eigen-angles of that truncation by root-finding on the phase.
std::vector<double> paraorthogonal_angles(std::span<const cplx> alpha, cplx beta);

/// Zeros of the monic Phi_N built from alpha_0..alpha_{N-1}, as eigenvalues of
/// the upper Hessenberg (GGT) representation of multiplication by z.
std::vector<cplx> szego_zeros(std::span<const cplx> alpha);

/// Resolvent entries <e_k, (M - z)^{-1} e_l> with a reusable banded LU
/// factorization of M - z.
class GreenSolver {
 public:
  GreenSolver(const CmvTruncation& m, cplx z);
  /// Column l of the resolvent; throws SolveError if the residual exceeds 1e-10.
  [[nodiscard]] Eigen::VectorXcd column(int l) const;
  [[nodiscard]] cplx entry(int k, int l) const { return column(l)(k); }

 private:
  int n_;
  std::vector<std::array<cplx, 5>> shifted_;  ///< rows of M - z, offsets -2..2
  std::vector<cplx> factors_;                  ///< LAPACK band layout, 7 rows
  std::vector<int> pivots_;
};

/// Local indices (0-based rows of the truncation).
cplx green_entry(const CmvTruncation& m, cplx z, int k, int l);

}  // namespace szego
