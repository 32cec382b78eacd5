#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/numerics.hpp"
#include "core/thresholds.hpp"
#include "oracles.hpp"

using namespace rshd;

namespace {

Aggregator sup_over(int K) {
  std::vector<int> all(size_t(K), 0);
  std::iota(all.begin(), all.end(), 0);
  return Aggregator::two_sided_sup().restricted(std::move(all));
}

ThresholdSpec with_known_sigma(ThresholdMethod m, int K, int B = 256) {
  ThresholdSpec spec;
  spec.method = m;
  spec.mc_draws = B;
  spec.sigma = SigmaSource::known(std::vector<double>(size_t(K), 1.0));
  return spec;
}

} // namespace

TEST_CASE("Bonferroni matches the normal-quantile oracle") {
  const auto y = test::correlated_gaussian(2, 100, 0.0, RngStream(1));
  const auto spec = with_known_sigma(ThresholdMethod::Bonferroni, 2);
  const auto t =
      threshold(spec, y, sup_over(2), Probability(0.05), RngStream(2));
  // Phi-bar^-1(0.05/4)/sqrt(100) = 2.2414027276049454 / 10
  CHECK(t.value == doctest::Approx(0.22414027276049453).epsilon(1e-10));
  CHECK(t.value == doctest::Approx(0.224140).epsilon(1e-5));

  // one-sided uses alpha/|C| instead of alpha/(2|C|)
  ThresholdSpec one = spec;
  one.side = Side::OneSided;
  const auto agg1 = Aggregator::one_sided_sup().restricted({0, 1});
  const auto t1 = threshold(one, y, agg1, Probability(0.05), RngStream(2));
  CHECK(t1.value ==
        doctest::Approx(gauss_upper_quantile(Probability(0.025)) / 10.0)
            .epsilon(1e-12));
}

TEST_CASE("Concentration is zero on zero-variance data with sigma = 0") {
  const auto y = DataMatrix::create(3, 8, std::vector<double>(24, 2.5));
  ThresholdSpec spec;
  spec.method = ThresholdMethod::Concentration;
  spec.mc_draws = 64;
  spec.sigma = SigmaSource::known({0.0, 0.0, 0.0});
  const auto t =
      threshold(spec, y, sup_over(3), Probability(0.05), RngStream(3));
  CHECK(t.value == 0.0);
}

TEST_CASE("QuantUncentered exact enumeration example") {
  const auto y = DataMatrix::create(1, 2, {1, 3});
  ThresholdSpec spec;
  spec.method = ThresholdMethod::QuantUncentered;
  spec.exhaustive = true;
  const auto t =
      threshold(spec, y, sup_over(1), Probability(0.25), RngStream(4));
  CHECK(t.value == doctest::Approx(2.0));
}

TEST_CASE("one-sided uncentered quantile has no guarantee") {
  const auto y = test::correlated_gaussian(3, 10, 0.2, RngStream(5));
  ThresholdSpec spec;
  spec.method = ThresholdMethod::QuantUncentered;
  spec.side = Side::OneSided;
  const auto agg = Aggregator::one_sided_sup().restricted({0, 1, 2});
  CHECK_THROWS_AS(threshold(spec, y, agg, Probability(0.1), RngStream(6)),
                  Error);
  try {
    threshold(spec, y, agg, Probability(0.1), RngStream(6));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::unsupported);
  }
}

TEST_CASE("parameter validation") {
  const auto y = test::correlated_gaussian(2, 10, 0.0, RngStream(7));
  ThresholdSpec spec = with_known_sigma(ThresholdMethod::QuantBonf, 2);
  spec.alpha0_frac = 1.0; // alpha0 = alpha is not allowed
  CHECK_THROWS_AS(threshold(spec, y, sup_over(2), Probability(0.05),
                            RngStream(8)),
                  Error);
  spec.alpha0_frac = 0.9;
  spec.delta = 1.0;
  CHECK_THROWS_AS(threshold(spec, y, sup_over(2), Probability(0.05),
                            RngStream(8)),
                  Error);
  ThresholdSpec bounded = with_known_sigma(ThresholdMethod::BoundedSymmetric, 2);
  CHECK_THROWS_AS(threshold(bounded, y, sup_over(2), Probability(0.05),
                            RngStream(8)),
                  Error); // M not set
  ThresholdSpec iter = with_known_sigma(ThresholdMethod::IteratedQuant, 2);
  iter.iter_alphas = {0.04, 0.02};
  CHECK_THROWS_AS(threshold(iter, y, sup_over(2), Probability(0.05),
                            RngStream(8)),
                  Error); // levels sum past alpha
}

TEST_CASE("empty subset returns the +inf sentinel") {
  const auto y = test::correlated_gaussian(2, 10, 0.0, RngStream(9));
  const auto spec = with_known_sigma(ThresholdMethod::ConcBonf, 2);
  const auto agg = Aggregator::two_sided_sup().restricted({});
  const auto t = threshold(spec, y, agg, Probability(0.05), RngStream(10));
  CHECK(std::isinf(t.value));
  CHECK(t.value > 0);
}

TEST_CASE("compound threshold never exceeds Bonferroni at alpha(1-delta)") {
  for (int rep = 0; rep < 20; ++rep) {
    const auto y =
        test::correlated_gaussian(6, 24, 0.4, RngStream(100 + rep));
    auto spec = with_known_sigma(ThresholdMethod::ConcBonf, 6);
    const auto t =
        threshold(spec, y, sup_over(6), Probability(0.05), RngStream(rep));
    auto bonf = with_known_sigma(ThresholdMethod::Bonferroni, 6);
    const auto tb = threshold(bonf, y, sup_over(6),
                              Probability(0.05 * (1.0 - spec.delta)),
                              RngStream(rep));
    CHECK(t.value <= tb.value + 1e-15);
    CHECK(t.component("bonferroni_branch") ==
          doctest::Approx(tb.value).epsilon(1e-14));
    // Eq.-11 decomposition: the value is the min of the two branches
    CHECK(t.value == doctest::Approx(std::min(
                         t.component("bonferroni_branch"),
                         t.component("concentration_branch"))));
  }
}

TEST_CASE("(ND) nondecreasing in the subset for every method") {
  const int K = 8;
  const auto y = test::correlated_gaussian(K, 16, 0.5, RngStream(11));
  auto eng = RngStream(12).engine();
  std::uniform_int_distribution<int> coin(0, 1);
  const std::vector<ThresholdMethod> methods = {
      ThresholdMethod::Bonferroni,     ThresholdMethod::Concentration,
      ThresholdMethod::ConcBonf,       ThresholdMethod::QuantRaw,
      ThresholdMethod::QuantBonf,      ThresholdMethod::QuantConc,
      ThresholdMethod::QuantUncentered, ThresholdMethod::IteratedQuant,
      ThresholdMethod::BoundedSymmetric};
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<int> small, big;
    for (int k = 0; k < K; ++k)
      if (coin(eng)) {
        big.push_back(k);
        if (coin(eng)) small.push_back(k);
      }
    if (small.empty() || big.empty()) continue;
    const RngStream stream(9000 + rep);
    for (const auto m : methods) {
      auto spec = with_known_sigma(m, K, 128);
      spec.bound_m = 4.0;
      const auto lo = threshold(
          spec, y, Aggregator::two_sided_sup().restricted(small),
          Probability(0.05), stream);
      const auto hi = threshold(
          spec, y, Aggregator::two_sided_sup().restricted(big),
          Probability(0.05), stream);
      CHECK(lo.value <= hi.value + 1e-15);
    }
  }
}

TEST_CASE("(TI) translation invariance is bit-exact with frozen draws") {
  const int K = 4, n = 8;
  const auto y = test::dyadic_matrix(K, n, RngStream(13));
  const std::vector<double> shift = {100.5, -7.25, 0.0625, 2048.0};
  const auto ys = y.shifted_copy(shift);
  const auto agg = sup_over(K);
  const std::vector<ThresholdMethod> ti_methods = {
      ThresholdMethod::Concentration, ThresholdMethod::ConcBonf,
      ThresholdMethod::QuantRaw, ThresholdMethod::QuantBonf,
      ThresholdMethod::QuantConc};
  for (const auto m : ti_methods) {
    auto spec = with_known_sigma(m, K, 64);
    const auto t0 =
        threshold(spec, y, agg, Probability(0.05), RngStream(14));
    const auto t1 =
        threshold(spec, ys, agg, Probability(0.05), RngStream(14));
    CHECK(t0.value == t1.value);
    if (m == ThresholdMethod::ConcBonf) {
      CHECK(t0.component("concentration_branch") ==
            t1.component("concentration_branch"));
      CHECK(t0.component("bonferroni_branch") ==
            t1.component("bonferroni_branch"));
    }
  }
}

TEST_CASE("iterated quantile with one level equals quant+bonf exactly") {
  const int K = 5, n = 12;
  const auto y = test::correlated_gaussian(K, n, 0.3, RngStream(15));
  auto qb = with_known_sigma(ThresholdMethod::QuantBonf, K, 200);
  auto iq = with_known_sigma(ThresholdMethod::IteratedQuant, K, 200);
  iq.iter_alphas = {qb.alpha0_frac * 0.05};
  const auto agg = sup_over(K);
  const auto t1 = threshold(qb, y, agg, Probability(0.05), RngStream(16));
  const auto t2 = threshold(iq, y, agg, Probability(0.05), RngStream(16));
  CHECK(t1.value == t2.value);

  // quant+conc reduces the same way when the terminal is the concentration
  // threshold
  auto qc = with_known_sigma(ThresholdMethod::QuantConc, K, 200);
  auto iqc = iq;
  auto term = std::make_shared<ThresholdSpec>(
      with_known_sigma(ThresholdMethod::Concentration, K, 200));
  iqc.terminal = term;
  const auto t3 = threshold(qc, y, agg, Probability(0.05), RngStream(16));
  const auto t4 = threshold(iqc, y, agg, Probability(0.05), RngStream(16));
  CHECK(t3.value == t4.value);
}

TEST_CASE("iterated quantile with several levels") {
  const int K = 4, n = 20;
  const auto y = test::correlated_gaussian(K, n, 0.5, RngStream(17));
  auto iq = with_known_sigma(ThresholdMethod::IteratedQuant, K, 300);
  iq.iter_alphas = {0.02, 0.01, 0.005};
  const auto t =
      threshold(iq, y, sup_over(K), Probability(0.05), RngStream(18));
  CHECK(std::isfinite(t.value));
  CHECK(t.component("alpha0") == doctest::Approx(0.02));
  // gamma factors shrink geometrically here
  CHECK(std::abs(t.component("gamma_terminal")) <=
        std::abs(t.component("gamma_1")) + 1e-12);
}

TEST_CASE("strict Monte Carlo mode") {
  const int K = 3, n = 16;
  const auto y = test::correlated_gaussian(K, n, 0.2, RngStream(19));
  const auto agg = sup_over(K);

  SUBCASE("concentration grows by the slack") {
    auto spec = with_known_sigma(ThresholdMethod::Concentration, K, 400);
    const auto plain =
        threshold(spec, y, agg, Probability(0.05), RngStream(20));
    spec.strict_mc = true;
    const auto strict =
        threshold(spec, y, agg, Probability(0.05), RngStream(20));
    CHECK(strict.value > plain.value);
    CHECK(strict.component("mc_slack") > 0.0);
  }
  SUBCASE("quantile snaps alpha0 to a multiple of 1/(B+1)") {
    auto spec = with_known_sigma(ThresholdMethod::QuantBonf, K, 399);
    spec.strict_mc = true;
    const auto t = threshold(spec, y, agg, Probability(0.05), RngStream(21));
    const double alpha0 = t.component("alpha0");
    const double snapped = alpha0 * 400.0;
    CHECK(snapped == doctest::Approx(std::round(snapped)).epsilon(1e-9));
  }
  SUBCASE("strict iterated quantile with J > 1 is not available") {
    auto spec = with_known_sigma(ThresholdMethod::IteratedQuant, K, 300);
    spec.iter_alphas = {0.02, 0.01};
    spec.strict_mc = true;
    CHECK_THROWS_AS(threshold(spec, y, agg, Probability(0.05), RngStream(22)),
                    Error);
  }
  SUBCASE("strict mode needs bounded weights") {
    auto spec = with_known_sigma(ThresholdMethod::Concentration, K, 400);
    spec.scheme = WeightScheme::poisson(1.0);
    spec.strict_mc = true;
    CHECK_THROWS_AS(threshold(spec, y, agg, Probability(0.05), RngStream(23)),
                    Error);
  }
}

TEST_CASE("confidence regions") {
  SUBCASE("zero variance collapses to the center for sup aggregators") {
    const auto y = DataMatrix::create(2, 6, std::vector<double>(12, 4.0));
    ThresholdSpec spec;
    spec.method = ThresholdMethod::Concentration;
    spec.mc_draws = 64;
    spec.sigma = SigmaSource::known({0.0, 0.0});
    const auto region = confidence_region(y, sup_over(2), spec,
                                          Probability(0.05), RngStream(24));
    CHECK(region.radius == 0.0);
    CHECK(region.contains(std::vector<double>{4.0, 4.0}));
    CHECK_FALSE(region.contains(std::vector<double>{4.0, 4.0001}));
  }
  SUBCASE("quant+bonf radius is nonnegative") {
    for (int rep = 0; rep < 10; ++rep) {
      const auto y =
          test::correlated_gaussian(4, 12, 0.4, RngStream(300 + rep));
      const auto spec = with_known_sigma(ThresholdMethod::QuantBonf, 4, 128);
      const auto region = confidence_region(y, sup_over(4), spec,
                                            Probability(0.05),
                                            RngStream(400 + rep));
      CHECK(region.radius >= 0.0);
    }
  }
  SUBCASE("unproven methods are rejected") {
    const auto y = test::correlated_gaussian(2, 8, 0.0, RngStream(25));
    ThresholdSpec raw;
    raw.method = ThresholdMethod::QuantRaw;
    raw.mc_draws = 64;
    CHECK_THROWS_AS(confidence_region(y, sup_over(2), raw, Probability(0.05),
                                      RngStream(26)),
                    Error);
    raw.allow_unproven = true;
    CHECK_NOTHROW(confidence_region(y, sup_over(2), raw, Probability(0.05),
                                    RngStream(26)));
    ThresholdSpec uncent;
    uncent.method = ThresholdMethod::QuantUncentered;
    uncent.mc_draws = 64;
    uncent.allow_unproven = true;
    CHECK_THROWS_AS(confidence_region(y, sup_over(2), uncent,
                                      Probability(0.05), RngStream(26)),
                    Error);
  }
  SUBCASE("coverage of a correlated Gaussian mean, estimated sigma") {
    const int K = 4, n = 30, trials = 800;
    int covered = 0;
    for (int t = 0; t < trials; ++t) {
      const auto y =
          test::correlated_gaussian(K, n, 0.5, RngStream(80000 + t));
      ThresholdSpec spec;
      spec.method = ThresholdMethod::ConcBonf;
      spec.mc_draws = 128;
      spec.sigma = SigmaSource::estimated();
      const auto region = confidence_region(y, sup_over(K), spec,
                                            Probability(0.1),
                                            RngStream(81000 + t));
      covered += region.contains(std::vector<double>(size_t(K), 0.0));
    }
    CHECK(double(covered) / trials >=
          0.9 - 3.0 * std::sqrt(0.9 * 0.1 / trials));
  }
}

TEST_CASE("lower deviation threshold") {
  const int K = 3, n = 25;
  // scaled Rademacher coordinates: symmetric and bounded, ||Y - mu||_inf <= M
  const double M = 2.0;
  auto make_data = [&](RngStream s) {
    auto eng = s.engine();
    std::uniform_int_distribution<int> bit(0, 1);
    std::vector<double> v(size_t(K) * n);
    for (double& x : v) x = bit(eng) ? M : -M;
    return DataMatrix::create(K, n, std::move(v));
  };
  const auto y = make_data(RngStream(27));
  const auto agg = sup_over(K);

  SUBCASE("alpha near 1 leaves only the expectation term") {
    const auto cst =
        constants(WeightScheme::rademacher(), n, {}, RngStream(0));
    const double v =
        lower_deviation_threshold(y, agg, WeightScheme::rademacher(), M,
                                  Probability(1.0 - 1e-12), 200,
                                  RngStream(28));
    const auto e = resampled_expectation(y, agg, WeightScheme::rademacher(),
                                         200, RngStream(28).substream(1));
    CHECK(v == doctest::Approx(e.raw / cst.d_w.value()).epsilon(1e-5));
  }
  SUBCASE("schemes without D_W are refused") {
    CHECK_THROWS_AS(
        lower_deviation_threshold(y, agg, WeightScheme::efron(), M,
                                  Probability(0.05), 100, RngStream(29)),
        Error);
    CHECK_THROWS_AS(
        lower_deviation_threshold(y, agg, WeightScheme::poisson(1.0), M,
                                  Probability(0.05), 100, RngStream(29)),
        Error);
  }
  SUBCASE("coverage on symmetric bounded data") {
    const int trials = 2000;
    int covered = 0;
    for (int t = 0; t < trials; ++t) {
      const auto data = make_data(RngStream(90000 + t));
      const double bound = lower_deviation_threshold(
          data, agg, WeightScheme::rademacher(), M, Probability(0.05), 128,
          RngStream(91000 + t));
      covered += evaluate(agg, empirical_mean(data)) >= bound; // mu = 0
    }
    CHECK(double(covered) / trials >=
          0.95 - 3.0 * std::sqrt(0.95 * 0.05 / trials));
  }
}

TEST_CASE("side and aggregator must agree") {
  const auto y = test::correlated_gaussian(2, 8, 0.0, RngStream(30));
  auto spec = with_known_sigma(ThresholdMethod::Bonferroni, 2);
  spec.side = Side::OneSided;
  CHECK_THROWS_AS(threshold(spec, y, sup_over(2), Probability(0.05),
                            RngStream(31)),
                  Error);
}
