#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "szego/errors.hpp"
#include "szego/gordon.hpp"
#include "szego/model.hpp"
#include "szego/model_io.hpp"

using namespace szego;

namespace {

const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

VerblunskyModel cosineModel(double lambda) {
  return VerblunskyModel(lambda, TrigPolynomial::cosine({1}), Frequency::golden());
}

std::vector<long long> denominators(double omega, int depth) {
  std::vector<long long> q;
  for (const auto& c : continued_fraction(omega, depth).convergents) q.push_back(c.q);
  return q;
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("sample_alpha closed forms") {
    const double x[] = {0.37};
    const VerblunskyModel free(0.0, TrigPolynomial::cosine({1}), Frequency::golden());
    CHECK(std::abs(sample_alpha(free, x, 5)) == 0.0);

    const VerblunskyModel constant(0.5, TrigPolynomial::zero(1), Frequency::golden());
    for (long n : {-3L, 1L, 17L}) CHECK(std::abs(sample_alpha(constant, x, n) - cplx(0.5, 0.0)) < 1e-15);

    const double origin[] = {0.0};
    CHECK(std::abs(sample_alpha(cosineModel(0.3), origin, 1) - cplx(0.3, 0.0)) < 1e-15);
  }

  TEST_CASE("|alpha| = lambda and shift consistency") {
    const auto m = cosineModel(0.3);
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
      const double x[] = {u(rng)};
      const long n = static_cast<long>(t) - 100;
      CHECK(std::abs(std::abs(sample_alpha(m, x, n)) - 0.3) < 1e-15);
      const TorusPoint xs = shift(m.omega(), x, 1);
      CHECK(std::abs(sample_alpha(m, x, n + 1) - sample_alpha(m, xs, n)) < 1e-12);
    }
  }

  TEST_CASE("lambda outside [0, 1) is refused") {
    CHECK_THROWS_AS(VerblunskyModel(1.0, TrigPolynomial::zero(1), Frequency::golden()), DomainError);
    CHECK_THROWS_AS(VerblunskyModel(-0.1, TrigPolynomial::zero(1), Frequency::golden()), DomainError);
  }

  TEST_CASE("continued fraction denominators") {
    CHECK(denominators(kGolden, 8) == std::vector<long long>{1, 2, 3, 5, 8, 13, 21, 34});
    CHECK(denominators(std::sqrt(2.0) - 1.0, 5) == std::vector<long long>{2, 5, 12, 29, 70});

    const auto third = continued_fraction(1.0 / 3.0, 10);
    REQUIRE(third.terminatedAt.has_value());
    CHECK(third.convergents.back().q == 3);
  }

  TEST_CASE("convergent recursion and approximation quality") {
    for (const double w : {kGolden, std::sqrt(2.0) - 1.0, std::numbers::pi - 3.0, std::exp(1.0) - 2.0}) {
      const auto cf = continued_fraction(w, 12);
      const auto& c = cf.convergents;
      for (std::size_t n = 0; n + 1 < c.size(); ++n) {
        CHECK(c[n + 1].a >= 1);
        CHECK(c[n + 1].q > c[n].q);
        const long long qPrev = n == 0 ? 1 : c[n - 1].q;
        CHECK(c[n + 1].q == c[n + 1].a * c[n].q + qPrev);
        const double err = std::abs(w - static_cast<double>(c[n].p) / static_cast<double>(c[n].q));
        CHECK(err < 1.0 / (static_cast<double>(c[n].q) * static_cast<double>(c[n + 1].q)) * (1.0 + 1e-9));
      }
    }
  }

  TEST_CASE("beta exponent estimates") {
    CHECK(beta_exponent(kGolden, 20) <= 0.01);
    CHECK(beta_exponent(kGolden, 30) <= 0.01);
    CHECK(beta_exponent(std::sqrt(2.0) - 1.0, 20) <= 0.02);
    CHECK(beta_exponent(kGolden, 20) >= 0.0);

    // a_{n+1} = q_n squares the denominators: 1, 2, 5, 27, 734. The estimate
    // is the max of ln q_{n+1} / q_n over the last quarter of indices. The
    // tail of ones keeps the expansion from ending on an ambiguous quotient.
    const std::vector<long long> a{1, 1, 2, 5, 27, 1, 1, 1};
    REQUIRE(denominators(frequency_from_partial_quotients(a), 5) == std::vector<long long>{1, 2, 5, 27, 734});
    CHECK(beta_exponent(frequency_from_partial_quotients(a), 5) == doctest::Approx(std::log(734.0) / 27.0));

    const Frequency liouville = liouville_frequency(3);
    const auto lq = denominators(liouville[0], 2);
    CHECK(lq == std::vector<long long>{2, 17});
    CHECK(beta_exponent(liouville[0], 30) > 1.0);
  }

  TEST_CASE("diophantine_check") {
    CHECK(diophantine_check(Frequency::golden(), {0.2, 1.5}, 100).pass);
    const auto half = diophantine_check(Frequency({0.5}), {1e-3, 1.0}, 4);
    CHECK_FALSE(half.pass);
    CHECK(half.witness == MultiIndex{2});
    CHECK(half.distance < 1e-15);
    CHECK(diophantine_check(Frequency({kGolden, std::sqrt(2.0) - 1.0}), {0.05, 3.0}, 50).pass);
  }

  TEST_CASE("diophantine_check is monotone in the cutoff") {
    for (const double w : {0.4142, 0.3, kGolden}) {
      bool failedBelow = false;
      for (int n = 1; n <= 60; ++n) {
        const bool p = diophantine_check(Frequency({w}), {0.1, 1.0}, n).pass;
        if (failedBelow) CHECK_FALSE(p);
        failedBelow = failedBelow || !p;
      }
    }
  }

  TEST_CASE("weighted norm and symmetry") {
    const auto h = TrigPolynomial::cosine({1}, 2.0, 0.25);
    CHECK(h.weightedNorm() == doctest::Approx(2.0 * std::exp(2.0 * std::numbers::pi * 0.25)).epsilon(1e-14));
    CHECK(h.symmetryDefect() < 1e-16);
    CHECK(h.evaluate(std::vector<double>{0.0}) == doctest::Approx(2.0));
    CHECK(l1({3, -4}) == 7);
  }

  TEST_CASE("model text round trip is bit-exact") {
    std::map<MultiIndex, cplx> c{{{1, 0}, {0.1, 0.2}}, {{-1, 0}, {0.1, -0.2}}, {{0, 2}, {1.0 / 3.0, 0.0}},
                                 {{0, -2}, {1.0 / 3.0, 0.0}}};
    const VerblunskyModel m(0.123456789012345678, TrigPolynomial(2, c, 0.3),
                            Frequency({kGolden, std::sqrt(2.0) - 1.0}));
    const std::string text = serialize_model(m);
    const VerblunskyModel back = parse_model(text);
    CHECK(serialize_model(back) == text);
    CHECK(back.lambda() == m.lambda());
    CHECK(back.omega().values() == m.omega().values());
    CHECK(back.h().radius() == m.h().radius());
    CHECK(back.h().coefficients() == m.h().coefficients());
  }

  TEST_CASE("model text diagnostics") {
    CHECK_THROWS_WITH_AS(parse_model("lambda = 0.3\nomega = 0.6\nfoo = 1\n"), doctest::Contains("line 3"),
                         DomainError);
    CHECK_THROWS_AS(parse_model("lambda = 1.5\nomega = 0.6\n"), DomainError);
    CHECK_THROWS_AS(parse_model("lambda = 0.3\n"), DomainError);
    CHECK_THROWS_AS(parse_model("lambda = 0.3\nomega = 0.6\nh.1,0 = 1,0\n"), DomainError);
    const auto m = parse_model("# smoke\nlambda = 0.3\nomega = 0.5\nh.1 = 0.5, 0\nh.-1 = 0.5,0\n");
    CHECK(m.h().evaluate(std::vector<double>{0.0}) == doctest::Approx(1.0));
  }
}
