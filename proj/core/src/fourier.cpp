#include "szego/fourier.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "szego/errors.hpp"

namespace szego {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int signedIndex(int i, int m) { return i <= m / 2 ? i : i - m; }

}  // namespace

TorusGrid TorusGrid::defaultFor(int dim) {
  if (dim < 1) throw DomainError("grid dimension must be >= 1");
  return {dim, dim == 1 ? 256 : (dim == 2 ? 64 : 16)};
}

std::size_t TorusGrid::size() const {
  std::size_t n = 1;
  for (int i = 0; i < dim; ++i) n *= static_cast<std::size_t>(perAxis);
  return n;
}

TorusPoint TorusGrid::point(std::size_t idx) const {
  TorusPoint p(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) {
    p[static_cast<std::size_t>(i)] = static_cast<double>(idx % static_cast<std::size_t>(perAxis)) / perAxis;
    idx /= static_cast<std::size_t>(perAxis);
  }
  return p;
}

std::map<MultiIndex, cplx> dft(const TorusGrid& grid, std::span<const cplx> values) {
  if (values.size() != grid.size()) throw DomainError("sample count does not match grid");
  const auto m = static_cast<std::size_t>(grid.perAxis);
  std::vector<cplx> data(values.begin(), values.end());
  Eigen::FFT<double> fft;
  std::vector<cplx> line(m), out(m);
  std::size_t stride = 1;
  for (int axis = 0; axis < grid.dim; ++axis) {
    for (std::size_t base = 0; base < data.size(); ++base) {
      if ((base / stride) % m != 0) continue;
      for (std::size_t i = 0; i < m; ++i) line[i] = data[base + i * stride];
      fft.fwd(out, line);
      for (std::size_t i = 0; i < m; ++i) data[base + i * stride] = out[i];
    }
    stride *= m;
  }
  std::map<MultiIndex, cplx> result;
  const double scale = 1.0 / static_cast<double>(data.size());
  for (std::size_t idx = 0; idx < data.size(); ++idx) {
    MultiIndex k(static_cast<std::size_t>(grid.dim));
    std::size_t r = idx;
    for (int i = 0; i < grid.dim; ++i) {
      k[static_cast<std::size_t>(i)] = signedIndex(static_cast<int>(r % m), grid.perAxis);
      r /= m;
    }
    result[k] = data[idx] * scale;
  }
  return result;
}

SuFunction::SuFunction(int dim, std::map<MultiIndex, SuMode> modes, double radius)
    : dim_(dim), modes_(std::move(modes)), radius_(radius) {
  if (dim_ < 1) throw DomainError("function dimension must be >= 1");
  for (const auto& [k, m] : modes_) {
    if (static_cast<int>(k.size()) != dim_) throw DomainError("multi-index length does not match dimension");
    (void)m;
  }
}

SuFunction SuFunction::zero(int dim, double radius) { return {dim, {}, radius}; }

SuFunction SuFunction::fromSamples(const TorusGrid& grid, std::span<const Mat2> samples, double radius,
                                   double floor) {
  std::vector<cplx> t(samples.size()), v(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Su11Algebra a = Su11Algebra::project(samples[i]);
    t[i] = a.t;
    v[i] = a.v;
  }
  const auto th = dft(grid, t);
  const auto vh = dft(grid, v);
  std::map<MultiIndex, SuMode> modes;
  for (const auto& [k, tk] : th) {
    const cplx vk = vh.at(k);
    if (std::abs(tk) < floor && std::abs(vk) < floor) continue;
    modes[k] = {std::abs(tk) < floor ? cplx(0.0) : tk, std::abs(vk) < floor ? cplx(0.0) : vk};
  }
  // Drop modes whose partner was dropped so t stays real.
  for (auto it = modes.begin(); it != modes.end();) {
    MultiIndex neg = it->first;
    for (int& c : neg) c = -c;
    if (it->second.t != cplx(0.0) && !modes.contains(neg)) it->second.t = 0.0;
    ++it;
  }
  return {grid.dim, std::move(modes), radius};
}

Mat2 SuFunction::evaluate(std::span<const double> x) const {
  cplx t = 0.0, v = 0.0;
  for (const auto& [k, m] : modes_) {
    const cplx e = std::polar(1.0, kTwoPi * dot(k, x));
    t += m.t * e;
    v += m.v * e;
  }
  return Su11Algebra{t.real(), v}.mat();
}

Mat2 SuFunction::coefficient(const MultiIndex& k) const {
  MultiIndex neg = k;
  for (int& c : neg) c = -c;
  const auto it = modes_.find(k);
  const auto jt = modes_.find(neg);
  const cplx t = it == modes_.end() ? cplx(0.0) : it->second.t;
  const cplx v = it == modes_.end() ? cplx(0.0) : it->second.v;
  const cplx vNeg = jt == modes_.end() ? cplx(0.0) : jt->second.v;
  return {cplx(0.0, 1.0) * t, v, std::conj(vNeg), cplx(0.0, -1.0) * t};
}

double SuFunction::norm(double r) const {
  double s = 0.0;
  for (const auto& [k, m] : modes_) s += coefficient(k).opNorm() * std::exp(kTwoPi * l1(k) * r);
  // Modes present only through a partner's lower-left entry.
  for (const auto& [k, m] : modes_) {
    MultiIndex neg = k;
    for (int& c : neg) c = -c;
    if (!modes_.contains(neg) && m.v != cplx(0.0))
      s += std::abs(m.v) * std::exp(kTwoPi * l1(k) * r);
  }
  return s;
}

SuFunction SuFunction::truncated(double cutoff) const {
  std::map<MultiIndex, SuMode> kept;
  for (const auto& [k, m] : modes_)
    if (l1(k) == 0 || l1(k) < cutoff) kept[k] = m;
  return {dim_, std::move(kept), radius_};
}

int SuFunction::maxDegree() const {
  int d = 0;
  for (const auto& [k, m] : modes_)
    if (m.t != cplx(0.0) || m.v != cplx(0.0)) d = std::max(d, l1(k));
  return d;
}

double SuFunction::algebraDefectOn(const TorusGrid& grid) const {
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) worst = std::max(worst, algebraDefect(evaluate(grid.point(i))));
  return worst;
}

}  // namespace szego
