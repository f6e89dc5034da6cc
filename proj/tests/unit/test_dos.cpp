#include <cmath>
#include <numbers>

#include "doctest.h"
#include "szego/dos.hpp"
#include "szego/errors.hpp"

using namespace szego;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

VerblunskyModel freeModel() { return VerblunskyModel(0.0, TrigPolynomial::zero(1), Frequency::golden()); }
VerblunskyModel constantModel(double lambda) {
  return VerblunskyModel(lambda, TrigPolynomial::zero(1), Frequency::golden());
}
VerblunskyModel cosineModel(double lambda) {
  return VerblunskyModel(lambda, TrigPolynomial::cosine({1}), Frequency::golden());
}

void checkCdfShape(const DosTable& d) {
  REQUIRE(d.grid.size() == d.cdf.size());
  CHECK(d.grid.front() == 0.0);
  CHECK(d.grid.back() == doctest::Approx(kTwoPi));
  CHECK(d.cdf.front() == 0.0);
  CHECK(std::abs(d.cdf.back() - 1.0) <= 1.0 / d.provenance.degree);
  for (std::size_t i = 1; i < d.cdf.size(); ++i) CHECK(d.cdf[i] >= d.cdf[i - 1]);
}

}  // namespace

TEST_SUITE("dos") {
  TEST_CASE("free model: uniform CDF") {
    const auto d = dos_histogram(freeModel(), 256, 1, DosEstimator::truncation);
    checkCdfShape(d);
    double dev = 0.0;
    for (std::size_t i = 0; i < d.grid.size(); ++i) dev = std::max(dev, std::abs(d.cdf[i] - d.grid[i] / kTwoPi));
    CHECK(dev <= 2.0 / 256);
    CHECK(d.rhoInf == 1.0);
    CHECK(d.provenance.degree == 256);
  }

  TEST_CASE("Geronimus arc carries the mass") {
    const auto d = dos_histogram(constantModel(0.5), 2000, 1, DosEstimator::truncation);
    checkCdfShape(d);
    CHECK(d.mass(1e-9, std::numbers::pi / 3 - 1e-9) <= 0.02);
    CHECK(d.mass(5 * std::numbers::pi / 3 + 1e-9, kTwoPi - 1e-9) <= 0.02);
    CHECK(std::abs(d.rhoInf - std::sqrt(0.75)) < 1e-12);
  }

  TEST_CASE("zeros estimator refuses lambda = 0") {
    CHECK_THROWS_WITH_AS(dos_histogram(freeModel(), 64, 1, DosEstimator::zeros), doctest::Contains("origin"),
                         DomainError);
    CHECK_THROWS_AS(dos_histogram(cosineModel(0.3), 8, 1, DosEstimator::truncation), DomainError);
    CHECK((dosEstimatorFromString("zeros") == DosEstimator::zeros));
    CHECK_THROWS_AS(dosEstimatorFromString("kernel"), DomainError);
  }

  TEST_CASE("truncation and zeros estimators agree") {
    const auto a = dos_histogram(cosineModel(0.3), 1000, 20, DosEstimator::truncation);
    const auto b = dos_histogram(cosineModel(0.3), 1000, 20, DosEstimator::zeros);
    checkCdfShape(a);
    checkCdfShape(b);
    CHECK(ks_distance(a, b) <= 0.05);
  }

  TEST_CASE("Thouless formula on the free model") {
    const auto d = dos_histogram(freeModel(), 512, 1, DosEstimator::truncation);
    const PhaseGrid one = PhaseGrid::single({0.0});
    for (const double zeta : {0.0, 1.0, 4.0}) {
      const cplx out = std::polar(1.2, zeta);
      const auto t = thouless_check(freeModel(), out, d, lyapunov_exponent(freeModel(), out, 1000, one));
      CHECK(std::abs(t.lhs - std::log(1.2)) < 1e-10);
      CHECK(t.gap <= 1e-3);
      const cplx in = std::polar(0.5, zeta);
      const auto s = thouless_check(freeModel(), in, d, lyapunov_exponent(freeModel(), in, 1000, one));
      CHECK(std::abs(s.lhs) < 1e-10);
      CHECK(std::abs(s.rhs) <= 1e-3);
    }
  }

  TEST_CASE("Hölder windows") {
    const auto d = dos_histogram(freeModel(), 4096, 1, DosEstimator::truncation);
    const auto t = holder_modulus(d, {1.0, 3.0}, {0.01, 0.05, 1e-4});
    for (const auto& r : t.rows) {
      if (r.epsilon == 1e-4) {
        CHECK(r.belowResolution);
        continue;
      }
      CHECK(r.mass == doctest::Approx(r.epsilon / std::numbers::pi).epsilon(0.05));
    }
    for (const auto& f : t.fits) {
      REQUIRE(f.slope.has_value());
      CHECK(*f.slope == doctest::Approx(1.0).epsilon(0.05));
    }

    const auto g = dos_histogram(constantModel(0.5), 2000, 1, DosEstimator::truncation);
    const auto gap = holder_modulus(g, {0.4}, {0.01, 0.02, 0.05});
    REQUIRE(gap.fits.size() == 1);
    CHECK_FALSE(gap.fits[0].slope.has_value());
  }

  TEST_CASE("rotation number and DOS agree") {
    const auto d = dos_histogram(freeModel(), 512, 1, DosEstimator::truncation);
    std::vector<double> zetas;
    for (int i = 0; i < 20; ++i) zetas.push_back(kTwoPi * i / 20);
    CHECK(rotation_dos_consistency(freeModel(), d, zetas, 2000).maxDeviation <= 2.0 / 512);

    const auto g = dos_histogram(constantModel(0.5), 1024, 1, DosEstimator::truncation);
    const auto r = rotation_dos_consistency(constantModel(0.5), g, {0.2, 0.6, 0.9}, 20000);
    CHECK(r.maxDeviation <= 2.0 / 1024);
  }

  TEST_CASE("CDF interpolation and arc mass") {
    const auto d = dos_histogram(freeModel(), 256, 1, DosEstimator::truncation);
    CHECK(d.cdfAt(kTwoPi) == doctest::Approx(1.0));
    CHECK(d.cdfAt(kTwoPi + 1.0) == doctest::Approx(d.cdfAt(1.0)));
    CHECK(d.mass(kTwoPi - 0.5, kTwoPi + 0.5) == doctest::Approx(1.0 / (2 * std::numbers::pi)).epsilon(0.02));
  }

  TEST_CASE("result does not depend on the thread count") {
    DosOptions one, many;
    one.exec.threads = 1;
    many.exec.threads = 4;
    const auto a = dos_histogram(cosineModel(0.3), 256, 12, DosEstimator::truncation, one);
    const auto b = dos_histogram(cosineModel(0.3), 256, 12, DosEstimator::truncation, many);
    CHECK(a.cdf == b.cdf);
  }
}
