#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "szego/errors.hpp"
#include "szego/measures.hpp"

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

// Bernstein-Szego: with alpha_k = 0 for k >= n, F = psi*_n / phi*_n, where
// psi uses -alpha. Monic recursion; the normalization cancels.
cplx bernsteinSzego(const std::vector<cplx>& alpha, cplx z) {
  auto reversed = [&](double sign) {
    cplx p = 1.0, ps = 1.0;
    for (const cplx a0 : alpha) {
      const cplx a = sign * a0;
      const cplx next = z * p - std::conj(a) * ps;
      ps = ps - a * z * p;
      p = next;
    }
    return ps;
  };
  return reversed(-1.0) / reversed(1.0);
}

}  // namespace

TEST_SUITE("measures") {
  TEST_CASE("Caratheodory function of the free model and at the origin") {
    const double x[] = {0.1};
    for (const cplx z : {cplx(0.0), cplx(0.5, 0.2), std::polar(0.99, 2.0)})
      CHECK(std::abs(schur_caratheodory(freeModel(), x, z, 256).F - 1.0) < 1e-14);
    CHECK(std::abs(schur_caratheodory(cosineModel(0.4), x, 0.0, 256).F - 1.0) < 1e-14);
    CHECK_THROWS_AS(schur_caratheodory(cosineModel(0.4), x, cplx(1.0, 0.0), 256), DomainError);
    CHECK_THROWS_AS(schur_caratheodory(cosineModel(0.4), x, 0.5, 0), DomainError);
  }

  TEST_CASE("Schur algorithm matches the Bernstein-Szego oracle") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 20; ++t) {
      std::vector<cplx> alpha;
      for (int k = 0; k < 12; ++k) alpha.push_back(std::polar(0.9 * u(rng), 2 * kPi * u(rng)));
      const cplx z = std::polar(0.95 * u(rng), 2 * kPi * u(rng));
      const cplx f = caratheodory_from(alpha, z);
      CHECK(std::abs(f - bernsteinSzego(alpha, z)) <= 1e-10 * std::abs(f));
      CHECK(f.real() > 0.0);
    }
  }

  TEST_CASE("Alexandrov transform") {
    const cplx f(1.3, -0.4);
    CHECK(std::abs(alexandrov_transform(f, 1.0) - f) < 1e-15);
    CHECK(std::abs(alexandrov_transform(1.0, std::polar(1.0, 0.7)) - 1.0) < 1e-15);
    CHECK_THROWS_AS(alexandrov_transform(f, 0.5), DomainError);

    // Closed-form sup against a brute-force sweep over the circle.
    for (const cplx g : {cplx(1.0, 0.0), cplx(0.3, 2.0), cplx(4.0, -1.0)}) {
      double brute = 0.0;
      for (int k = 0; k < 20000; ++k) {
        try {
          brute = std::max(brute, std::abs(alexandrov_transform(g, std::polar(1.0, 2 * kPi * (k + 0.5) / 20000))));
        } catch (const DomainError&) {
        }
      }
      CHECK(alexandrov_sup(g) >= brute * (1 - 1e-9));
      CHECK(alexandrov_sup(g) <= brute * (1 + 1e-3));
    }
    CHECK_THROWS_AS(alexandrov_sup(cplx(-1.0, 0.0)), DomainError);
  }

  TEST_CASE("weighted norm") {
    const std::vector<cplx> a{1.0, 2.0, cplx(0.0, 3.0), 4.0};
    CHECK(weighted_norm_squared(a, 0.0) == doctest::Approx(1.0));
    CHECK(weighted_norm_squared(a, 2.0) == doctest::Approx(14.0));
    CHECK(weighted_norm_squared(a, 1.5) == doctest::Approx(5.0 + 0.5 * 9.0));
    double prev = 0.0;
    for (double l = 0.0; l <= 2.9; l += 0.1) {
      const double v = weighted_norm_squared(a, l);
      CHECK(v >= prev);
      prev = v;
    }
    CHECK_THROWS_AS(weighted_norm_squared(a, -1.0), DomainError);
  }

  TEST_CASE("Wronskian-type identity on the circle") {
    const double x[] = {0.37};
    for (const auto& m : {freeModel(), constantModel(0.5), cosineModel(0.3)})
      for (const double zeta : {2.0, kPi, 4.0})
        for (const cplx rot : {cplx(1.0), std::polar(1.0, 1.1)})
          CHECK(jl_identity_defect(m, x, zeta, rot, 1000).relative <= 1e-8);
  }

  TEST_CASE("free model: l(eps) in closed form") {
    const double x[] = {0.0};
    for (const double eps : {0.1, 0.02, 0.005}) {
      const auto r = jl_bound_check(freeModel(), x, 1.0, eps, 1.0);
      // |phi_n| = |psi_n| = 1, so (l + 1) eps = sqrt 2.
      CHECK(r.lOfR == doctest::Approx(std::sqrt(2.0) / eps - 1.0).epsilon(1e-6));
      CHECK(r.productDefect < 1e-8);
      CHECK(r.FAbs == doctest::Approx(1.0));
      CHECK(r.normRatio == doctest::Approx(1.0));
      CHECK(r.supTransfer == doctest::Approx(1.0));
      CHECK(r.twoSidedHolds());
      CHECK(r.cocycleHolds());
      CHECK(r.horizon == jl_horizon(eps));
    }
    CHECK_THROWS_AS(jl_bound_check(freeModel(), x, 1.0, 1.5, 1.0), DomainError);
  }

  TEST_CASE("full-line function") {
    const double x[] = {0.2};
    const auto f = full_line_caratheodory(freeModel(), x, std::polar(0.6, 1.0), 64, 256);
    REQUIRE(f.PhiFull.has_value());
    CHECK(std::abs(*f.PhiFull - 1.0) < 1e-12);
    const auto o = full_line_caratheodory(cosineModel(0.3), x, 0.0, 64, 256);
    CHECK(std::abs(*o.PhiFull - 1.0) < 1e-12);
    CHECK_THROWS_AS(full_line_caratheodory(freeModel(), x, 0.5, 10, 256), DomainError);
    CHECK_THROWS_AS(full_line_caratheodory(freeModel(), x, 0.5, 4, 256), DomainError);
  }

  TEST_CASE("subordinacy verdicts") {
    const PhaseGrid phases = PhaseGrid::single({0.0});
    CHECK((subordinacy_classify(freeModel(), 1.0, 10000, phases).verdict == OrbitClass::bounded));
    CHECK((subordinacy_classify(constantModel(0.5), 0.1, 10000, phases).verdict == OrbitClass::growing));
    CHECK_THROWS_AS(subordinacy_classify(freeModel(), 1.0, 999, phases), DomainError);
  }

  TEST_CASE("free window mass") {
    const double x[] = {0.0};
    WindowOptions opt;
    opt.depth = 256;
    for (const double eps : {0.01, 0.05}) {
      const auto w = measure_window_bound(freeModel(), x, 2.0, eps, opt);
      CHECK(w.muMass == doctest::Approx(eps / kPi).epsilon(1e-9));
      CHECK(w.lambdaMass == doctest::Approx(eps / kPi).epsilon(1e-6));
      CHECK(w.holds());
    }
    opt.panels = 7;
    CHECK_THROWS_AS(measure_window_bound(freeModel(), x, 2.0, 0.01, opt), DomainError);
  }
}
