#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "szego/cmv.hpp"
#include "szego/errors.hpp"

using namespace szego;

namespace {

constexpr double kPi = std::numbers::pi;

VerblunskyModel freeModel() { return VerblunskyModel(0.0, TrigPolynomial::zero(1), Frequency::golden()); }
VerblunskyModel constantModel(double lambda) {
  return VerblunskyModel(lambda, TrigPolynomial::zero(1), Frequency::golden());
}
VerblunskyModel cosineModel(double lambda) {
  return VerblunskyModel(lambda, TrigPolynomial::cosine({1}), Frequency::golden());
}

// Five-diagonal entries of the standard CMV matrix written out row by row,
// with alpha_{-1} = -1 and rho_{-1} = 0; entries past index n - 1 are cut.
cplx displayedEntry(const std::vector<cplx>& a, int i, int j) {
  const auto al = [&](int k) { return k < 0 ? cplx(-1.0, 0.0) : a[static_cast<std::size_t>(k)]; };
  const auto rh = [&](int k) { return k < 0 ? 0.0 : std::sqrt(1.0 - std::norm(a[static_cast<std::size_t>(k)])); };
  if (i % 2 == 0) {
    const int k = i;
    if (j == k - 1) return std::conj(al(k)) * rh(k - 1);
    if (j == k) return -std::conj(al(k)) * al(k - 1);
    if (j == k + 1) return std::conj(al(k + 1)) * rh(k);
    if (j == k + 2) return rh(k + 1) * rh(k);
  } else {
    const int k = i - 1;
    if (j == k - 1) return rh(k) * rh(k - 1);
    if (j == k) return -rh(k) * al(k - 1);
    if (j == k + 1) return -std::conj(al(k + 1)) * al(k);
    if (j == k + 2) return -rh(k + 1) * al(k);
  }
  return 0.0;
}

}  // namespace

TEST_SUITE("cmv") {
  TEST_CASE("Theta block is unitary") {
    for (const cplx a : {cplx(0.0), cplx(0.5, 0.0), cplx(0.3, -0.4), std::polar(0.999, 1.0)}) {
      const ThetaBlock t(a);
      const Mat2 m = t.mat();
      CHECK((m.adjoint() * m - Mat2::identity()).maxAbs() < 1e-14);
    }
    CHECK_THROWS_AS(ThetaBlock(cplx(1.0, 0.0)), DomainError);
  }

  TEST_CASE("free standard N=4 has the 0/1 pattern") {
    const double x[] = {0.2};
    const auto m = assemble_cmv(freeModel(), x, 4, CmvKind::standard, Boundary::none());
    const double expected[4][4] = {{0, 0, 1, 0}, {1, 0, 0, 0}, {0, 0, 0, 0}, {0, 1, 0, 0}};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) CHECK(std::abs(m(i, j) - expected[i][j]) < 1e-15);
  }

  TEST_CASE("LM product matches the written-out five-diagonal entries") {
    for (const auto& model : {constantModel(0.5), cosineModel(0.3)}) {
      const double x[] = {0.13};
      const int n = 9;
      const auto m = assemble_cmv(model, x, n, CmvKind::standard, Boundary::none());
      std::vector<cplx> a;
      for (int j = 0; j < n; ++j) a.push_back(sample_alpha(model, x, j + 1));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) CHECK(std::abs(m(i, j) - displayedEntry(a, i, j)) < 1e-15);
    }
  }

  TEST_CASE("constant model: every Theta block equal") {
    const double x[] = {0.4};
    const auto m = assemble_cmv(constantModel(0.5), x, 6, CmvKind::standard, Boundary::none());
    for (const cplx c : m.coefficients()) CHECK(std::abs(c - cplx(0.5, 0.0)) < 1e-15);
    const ThetaBlock t(cplx(0.5, 0.0));
    CHECK(std::abs(t.rho - std::sqrt(0.75)) < 1e-15);
  }

  TEST_CASE("decoupled truncations are unitary") {
    const double x[] = {0.31};
    for (const auto& model : {freeModel(), constantModel(0.5), cosineModel(0.9)}) {
      for (const int n : {8, 9, 64}) {
        CHECK(assemble_cmv(model, x, n, CmvKind::extended, Boundary::unimodular(1.0), -4).unitarityDefect() < 1e-12);
        CHECK(assemble_cmv(model, x, n, CmvKind::standard, Boundary::unimodular(std::polar(1.0, 0.7)))
                  .unitarityDefect() < 1e-12);
      }
    }
  }

  TEST_CASE("free decoupled extended truncation: equally spaced angles") {
    const double x[] = {0.0};
    const auto angles = truncation_spectrum(assemble_cmv(freeModel(), x, 8, CmvKind::extended, Boundary::unimodular(1.0)));
    REQUIRE(angles.size() == 8);
    for (std::size_t i = 1; i < angles.size(); ++i) CHECK(angles[i] - angles[i - 1] == doctest::Approx(kPi / 4).epsilon(1e-10));
  }

  TEST_CASE("Geronimus arc holds most eigen-angles") {
    const double x[] = {0.0};
    const auto angles =
        truncation_spectrum(assemble_cmv(constantModel(0.5), x, 200, CmvKind::standard, Boundary::unimodular(1.0)));
    REQUIRE(angles.size() == 200);
    CHECK(std::is_sorted(angles.begin(), angles.end()));
    const auto inside = std::count_if(angles.begin(), angles.end(),
                                      [](double t) { return t >= kPi / 3 - 1e-12 && t <= 5 * kPi / 3 + 1e-12; });
    CHECK(inside >= 190);
  }

  TEST_CASE("non-unitary truncation is refused") {
    const double x[] = {0.0};
    CHECK_THROWS_AS(truncation_spectrum(assemble_cmv(constantModel(0.5), x, 16, CmvKind::standard, Boundary::none())),
                    NonUnitaryError);
  }

  TEST_CASE("real coefficients give a conjugation-symmetric spectrum") {
    // h = 0 and h = 1/2 both give real alpha.
    const VerblunskyModel m(0.4, TrigPolynomial::constant(1, 0.5), Frequency::golden());
    const double x[] = {0.0};
    auto angles = truncation_spectrum(assemble_cmv(m, x, 40, CmvKind::standard, Boundary::unimodular(1.0)));
    std::vector<double> mirrored;
    for (const double t : angles) mirrored.push_back(std::fmod(2 * kPi - t, 2 * kPi));
    std::sort(mirrored.begin(), mirrored.end());
    for (std::size_t i = 0; i < angles.size(); ++i) {
      const double d = std::abs(angles[i] - mirrored[i]);
      CHECK(std::min(d, 2 * kPi - d) < 1e-9);
    }
  }

  TEST_CASE("shift covariance of interior entries") {
    const auto model = cosineModel(0.3);
    const double x[] = {0.27};
    const TorusPoint x2 = shift(model.omega(), x, 2);
    const auto a = assemble_cmv(model, x2, 10, CmvKind::standard, Boundary::none());
    const auto b = assemble_cmv(model, x, 12, CmvKind::standard, Boundary::none());
    for (int i = 2; i < 8; ++i)
      for (int j = 2; j < 8; ++j) CHECK(std::abs(a(i, j) - b(i + 2, j + 2)) < 1e-14);
  }

  TEST_CASE("resolvent entries") {
    const double x[] = {0.0};
    const auto freeTrunc = assemble_cmv(freeModel(), x, 8, CmvKind::extended, Boundary::unimodular(1.0), -4);
    CHECK(std::abs(green_entry(freeTrunc, 0.0, 4, 4)) < 1e-14);

    const auto m = assemble_cmv(constantModel(0.5), x, 64, CmvKind::standard, Boundary::unimodular(1.0));
    const Eigen::MatrixXcd inv = (m.dense() - cplx(0.5, 0.0) * Eigen::MatrixXcd::Identity(64, 64)).inverse();
    CHECK(std::abs(green_entry(m, 0.5, 1, 1) - inv(1, 1)) < 1e-10);

    const GreenSolver solver(m, cplx(0.3, 0.8));
    for (const int l : {0, 17, 63}) {
      const Eigen::VectorXcd g = solver.column(l);
      Eigen::VectorXcd r = (m.dense() - cplx(0.3, 0.8) * Eigen::MatrixXcd::Identity(64, 64)) * g;
      r(l) -= 1.0;
      CHECK(r.cwiseAbs().maxCoeff() < 1e-10);
    }
    CHECK_THROWS_AS(green_entry(m, cplx(1.0, 0.0), 0, 0), DomainError);
  }

  TEST_CASE("CSV dump has a header and one line per nonzero") {
    const double x[] = {0.0};
    const auto m = assemble_cmv(freeModel(), x, 4, CmvKind::standard, Boundary::none());
    std::ostringstream os;
    m.writeCsv(os);
    const std::string s = os.str();
    CHECK(s.rfind("row,col,re,im\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 1 + 3);
  }

  TEST_CASE("paraorthogonal angles agree with the dense routine") {
    const auto model = cosineModel(0.4);
    const double x[] = {0.21};
    const auto m = assemble_cmv(model, x, 48, CmvKind::standard, Boundary::unimodular(std::polar(1.0, 0.3)));
    auto dense = truncation_spectrum(m);
    std::vector<cplx> a;
    for (int j = 0; j < 47; ++j) a.push_back(sample_alpha(model, x, j + 1));
    auto roots = paraorthogonal_angles(a, std::polar(1.0, 0.3));
    std::sort(roots.begin(), roots.end());
    REQUIRE(roots.size() == dense.size());
    for (std::size_t i = 0; i < roots.size(); ++i) CHECK(std::abs(roots[i] - dense[i]) < 1e-8);
  }
}
