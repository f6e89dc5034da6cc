#pragma once

#include <functional>
#include <map>
#include <span>
#include <vector>

#include "szego/linalg.hpp"
#include "szego/model.hpp"

namespace szego {

/// Uniform tensor grid x_i = i / perAxis on the torus, first axis fastest.
struct TorusGrid {
  int dim = 1;
  int perAxis = 256;

  /// 256 points for d = 1, 64 per axis for d = 2, 16 otherwise.
  static TorusGrid defaultFor(int dim);
  [[nodiscard]] std::size_t size() const;
  [[nodiscard]] TorusPoint point(std::size_t idx) const;
};

/// Fourier coefficients of the diagonal and upper entries: for
/// f(x) = [[i t(x), v(x)], [conj v(x), -i t(x)]] we store hat t(k) and hat v(k).
struct SuMode {
  cplx t{0.0, 0.0};
  cplx v{0.0, 0.0};
};

/// Trigonometric su(1,1)-valued function on T^d.
class SuFunction {
 public:
  SuFunction() = default;
  SuFunction(int dim, std::map<MultiIndex, SuMode> modes, double radius);

  static SuFunction zero(int dim, double radius);
  /// Transforms samples (taken on `grid`, projected to su(1,1)); modes with
  /// |hat t|, |hat v| below `floor` are dropped.
  static SuFunction fromSamples(const TorusGrid& grid, std::span<const Mat2> samples, double radius,
                                double floor);

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] double radius() const { return radius_; }
  [[nodiscard]] const std::map<MultiIndex, SuMode>& modes() const { return modes_; }

  [[nodiscard]] Mat2 evaluate(std::span<const double> x) const;
  /// Full matrix coefficient hat f(k).
  [[nodiscard]] Mat2 coefficient(const MultiIndex& k) const;
  /// sum_k ||hat f(k)|| e^{2 pi |k| r}
  [[nodiscard]] double norm(double r) const;
  [[nodiscard]] double norm() const { return norm(radius_); }
  /// Keeps 0 < |k| < cutoff modes plus k = 0 (strict inequality).
  [[nodiscard]] SuFunction truncated(double cutoff) const;
  /// Largest |k| with a stored nonzero mode.
  [[nodiscard]] int maxDegree() const;
  /// max over grid points of the su(1,1) defect of evaluate(x).
  [[nodiscard]] double algebraDefectOn(const TorusGrid& grid) const;

 private:
  int dim_ = 1;
  std::map<MultiIndex, SuMode> modes_;
  double radius_ = 0.5;
};

/// Forward DFT on a tensor grid: hat g(k) = mean_x g(x) e^{-2 pi i <k, x>}, k
/// in the symmetric range (-perAxis/2, perAxis/2].
std::map<MultiIndex, cplx> dft(const TorusGrid& grid, std::span<const cplx> values);

}  // namespace szego
