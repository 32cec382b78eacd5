#include <doctest.h>

#include <cmath>
#include <random>

#include "core/aggregate.hpp"
#include "core/rng.hpp"

using namespace rshd;

TEST_CASE("evaluate basic values") {
  const std::vector<double> x1 = {-3.0, 2.0};
  CHECK(evaluate(Aggregator::two_sided_sup(), x1) == doctest::Approx(3.0));
  CHECK(evaluate(Aggregator::one_sided_sup(), x1) == doctest::Approx(2.0));
  const std::vector<double> x2 = {-3.0, -2.0};
  CHECK(evaluate(Aggregator::one_sided_sup(), x2) == doctest::Approx(0.0));
  const std::vector<double> x3 = {3.0, 4.0};
  CHECK(evaluate(Aggregator::lp(2.0), x3) == doctest::Approx(5.0));
  CHECK(evaluate(Aggregator::lp(1.0), x3) == doctest::Approx(7.0));
  CHECK(evaluate(Aggregator::lp(INFINITY), x3) == doctest::Approx(4.0));
  CHECK(evaluate(Aggregator::lp(2.0, true), x3) ==
        doctest::Approx(std::sqrt(12.5)));
  // subset restriction
  CHECK(evaluate(Aggregator::two_sided_sup().restricted({0}), x1) ==
        doctest::Approx(3.0));
  CHECK(evaluate(Aggregator::two_sided_sup().restricted({1}), x1) ==
        doctest::Approx(2.0));
  // empty subset sentinel
  CHECK(evaluate(Aggregator::two_sided_sup().restricted({}), x1) ==
        kEmptySetValue);
  CHECK_THROWS_AS(Aggregator::lp(0.5), Error);
}

TEST_CASE("conjugate") {
  const std::vector<double> x = {-3.0, 2.0};
  CHECK(Aggregator::two_sided_sup().conjugate().kind == AggKind::TwoSidedSup);
  CHECK(evaluate(Aggregator::one_sided_sup().conjugate(), x) ==
        doctest::Approx(3.0)); // max(sup(x)+, sup(-x)+) = max(2,3)
  CHECK(evaluate(Aggregator::lp(2.0).conjugate(), x) ==
        doctest::Approx(evaluate(Aggregator::lp(2.0), x)));
}

TEST_CASE("parse spellings") {
  CHECK(Aggregator::parse("sup").kind == AggKind::TwoSidedSup);
  const auto lp = Aggregator::parse("lp:2");
  CHECK(lp.kind == AggKind::LpNorm);
  CHECK(lp.p == doctest::Approx(2.0));
  CHECK_FALSE(lp.normalized);
  CHECK(Aggregator::parse("lp:1.5:norm").normalized);
  CHECK(std::isinf(Aggregator::parse("lp:inf").p));
  CHECK_THROWS_AS(Aggregator::parse("lp:0.3"), Error);
  CHECK_THROWS_AS(Aggregator::parse("lp:2:bad"), Error);
  CHECK_THROWS_AS(Aggregator::parse("max"), Error);
}

TEST_CASE("aggregator axioms on random inputs") {
  auto eng = RngStream(5).engine();
  std::normal_distribution<double> gauss(0.0, 2.0);
  std::uniform_real_distribution<double> unif(0.0, 3.0);
  const int K = 6;
  const std::vector<Aggregator> aggs = {
      Aggregator::one_sided_sup(), Aggregator::two_sided_sup(),
      Aggregator::lp(1.0),         Aggregator::lp(2.0),
      Aggregator::lp(3.5),         Aggregator::lp(INFINITY),
      Aggregator::lp(2.0, true)};
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<double> x(K), y(K), sum(K);
    for (int k = 0; k < K; ++k) {
      x[size_t(k)] = gauss(eng);
      y[size_t(k)] = gauss(eng);
      sum[size_t(k)] = x[size_t(k)] + y[size_t(k)];
    }
    const double lambda = unif(eng);
    std::vector<double> scaled(K);
    for (int k = 0; k < K; ++k) scaled[size_t(k)] = lambda * x[size_t(k)];
    for (const auto& agg : aggs) {
      const double fx = evaluate(agg, x);
      CHECK(evaluate(agg, sum) <= fx + evaluate(agg, y) + 1e-12);
      CHECK(evaluate(agg, scaled) ==
            doctest::Approx(lambda * fx).epsilon(1e-12).scale(1.0));
      // bounded by the matching lp norm
      const Aggregator norm =
          agg.kind == AggKind::LpNorm ? Aggregator::lp(agg.p, agg.normalized)
                                      : Aggregator::lp(INFINITY);
      CHECK(std::abs(fx) <= evaluate(norm, x) + 1e-12);
    }
  }
}

TEST_CASE("monotone in the subset") {
  auto eng = RngStream(9).engine();
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> x(8);
    for (double& v : x) v = gauss(eng);
    std::vector<int> small, big;
    std::uniform_int_distribution<int> coin(0, 1);
    for (int k = 0; k < 8; ++k) {
      if (coin(eng)) {
        big.push_back(k);
        if (coin(eng)) small.push_back(k);
      }
    }
    for (const auto& base :
         {Aggregator::one_sided_sup(), Aggregator::two_sided_sup(),
          Aggregator::lp(1.0), Aggregator::lp(2.0)}) {
      const double lo = evaluate(base.restricted(small), x);
      const double hi = evaluate(base.restricted(big), x);
      CHECK(lo <= hi + 1e-15);
    }
  }
}
