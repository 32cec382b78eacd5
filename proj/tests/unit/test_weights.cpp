#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "core/weights.hpp"
#include "oracles.hpp"

using namespace rshd;

namespace {

double mean(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / double(xs.size());
}

struct McMoments {
  double a_mean, a_se;   // |W1 - Wbar|
  double c2_mean, c2_se; // n/(n-1) (W1 - Wbar)^2
};

McMoments mc_moments(const WeightScheme& s, int n, int draws,
                     RngStream stream) {
  auto eng = stream.engine();
  std::vector<double> a(size_t(draws), 0.0), c2(size_t(draws), 0.0);
  for (int j = 0; j < draws; ++j) {
    const auto w = draw_weights_with(s, n, eng);
    const double wbar = mean(w);
    a[size_t(j)] = std::abs(w[0] - wbar);
    c2[size_t(j)] = double(n) / (n - 1.0) * (w[0] - wbar) * (w[0] - wbar);
  }
  auto sd = [](const std::vector<double>& v, double m) {
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / (double(v.size()) - 1.0));
  };
  McMoments out;
  out.a_mean = mean(a);
  out.a_se = sd(a, out.a_mean) / std::sqrt(double(draws));
  out.c2_mean = mean(c2);
  out.c2_se = sd(c2, out.c2_mean) / std::sqrt(double(draws));
  return out;
}

} // namespace

TEST_CASE("scheme parsing and validation") {
  CHECK(WeightScheme::parse("rademacher").kind == SchemeKind::Rademacher);
  CHECK(WeightScheme::parse("efron").effective_q(7) == 7);
  CHECK(WeightScheme::parse("efron:3").q == 3);
  CHECK(WeightScheme::parse("bernoulli:0.5").p == doctest::Approx(0.5));
  CHECK(WeightScheme::parse("poisson").mu == doctest::Approx(1.0));
  CHECK(WeightScheme::parse("rho:4").q == 4);
  CHECK(WeightScheme::parse("loo").kind == SchemeKind::LeaveOneOut);
  CHECK(WeightScheme::parse("vfold:4").v == 4);
  CHECK_THROWS_AS(WeightScheme::parse("bogus"), Error);
  CHECK_THROWS_AS(WeightScheme::parse("bernoulli:1.5"), Error);
  CHECK_THROWS_AS(WeightScheme::parse("rho"), Error);

  CHECK_THROWS_AS(draw_weights(WeightScheme::vfold(3), 8, RngStream(1)),
                  Error); // V must divide n
  CHECK_THROWS_AS(draw_weights(WeightScheme::random_hold_out(9), 8,
                               RngStream(1)),
                  Error);
  CHECK_THROWS_AS(draw_weights(WeightScheme::efron(9), 8, RngStream(1)),
                  Error);
  CHECK_NOTHROW(draw_weights(WeightScheme::vfold(4), 8, RngStream(1)));
}

TEST_CASE("draw_weights distributional shape") {
  const int n = 12;
  auto eng = RngStream(7).engine();

  SUBCASE("rademacher signs and symmetric mean") {
    double acc = 0.0;
    const int draws = 100000;
    for (int j = 0; j < draws; ++j) {
      const auto w = draw_weights_with(WeightScheme::rademacher(), 3, eng);
      for (double wi : w) CHECK((wi == 1.0 || wi == -1.0));
      acc += w[0];
    }
    // sd = 1, so 3 stderr = 3/sqrt(draws)
    CHECK(std::abs(acc / draws) < 3.0 / std::sqrt(double(draws)));
  }

  SUBCASE("random hold-out support") {
    for (int q : {1, 5, 11}) {
      const auto w =
          draw_weights_with(WeightScheme::random_hold_out(q), n, eng);
      int on = 0;
      for (double wi : w) {
        CHECK((wi == 0.0 || wi == double(n) / q));
        on += wi != 0.0;
      }
      CHECK(on == q);
      CHECK(mean(w) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  SUBCASE("leave-one-out is rho(n-1)") {
    const auto w = draw_weights_with(WeightScheme::leave_one_out(), n, eng);
    int zero = 0;
    for (double wi : w) {
      CHECK((wi == 0.0 || wi == doctest::Approx(double(n) / (n - 1))));
      zero += wi == 0.0;
    }
    CHECK(zero == 1);
  }

  SUBCASE("efron totals") {
    const auto w = draw_weights_with(WeightScheme::efron(), n, eng);
    double total = 0.0;
    for (double wi : w) {
      CHECK(wi >= 0.0);
      CHECK(wi == doctest::Approx(std::round(wi))); // integer counts at q = n
      total += wi;
    }
    CHECK(total == doctest::Approx(double(n)));
  }

  SUBCASE("bernoulli support") {
    const auto w = draw_weights_with(WeightScheme::bernoulli(0.25), n, eng);
    for (double wi : w) CHECK((wi == 0.0 || wi == 4.0));
  }

  SUBCASE("vfold block structure") {
    const auto w = draw_weights_with(WeightScheme::vfold(4), n, eng);
    const double on = 4.0 / 3.0;
    int zeros = 0;
    for (double wi : w) {
      CHECK((wi == 0.0 || wi == doctest::Approx(on)));
      zeros += wi == 0.0;
    }
    CHECK(zeros == n / 4);
    // the zero block is one of the regular contiguous blocks
    int first_zero = -1;
    for (int i = 0; i < n; ++i)
      if (w[size_t(i)] == 0.0) {
        first_zero = i;
        break;
      }
    CHECK(first_zero % (n / 4) == 0);
    for (int i = first_zero; i < first_zero + n / 4; ++i)
      CHECK(w[size_t(i)] == 0.0);
  }
}

TEST_CASE("constants closed forms from the tables") {
  const RngStream rng(3);

  SUBCASE("leave-one-out n=4") {
    const auto c = constants(WeightScheme::leave_one_out(), 4, {}, rng);
    CHECK(c.a_w == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(c.b_w_lower == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
    CHECK(c.c_w == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(c.d_w.value() == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("rho(n/2) n=4") {
    const auto c = constants(WeightScheme::random_hold_out(2), 4, {}, rng);
    CHECK(c.a_w == doctest::Approx(1.0));
    CHECK(c.b_w_lower == doctest::Approx(1.0));
    CHECK(c.c_w == doctest::Approx(std::sqrt(4.0 / 3.0)));
    CHECK(c.d_w.value() == doctest::Approx(1.0));
  }
  SUBCASE("vfold") {
    const auto c = constants(WeightScheme::vfold(4), 8, {}, rng);
    CHECK(c.a_w == doctest::Approx(0.5));
    CHECK(c.b_w_lower == doctest::Approx(1.0 / std::sqrt(3.0)));
    CHECK(c.c_w == doctest::Approx(std::sqrt(8.0) / 3.0));
    CHECK(c.d_w.value() == doctest::Approx(1.0));
  }
  SUBCASE("rademacher") {
    const auto c = constants(WeightScheme::rademacher(), 4, {}, rng);
    CHECK(c.a_w == doctest::Approx(0.75));
    CHECK(c.b_w_lower == doctest::Approx(0.75)); // certified: A_W
    CHECK(c.c_w == doctest::Approx(1.0));
    CHECK(c.d_w.value() == doctest::Approx(1.5)); // 1 + 1/sqrt(4), upper end
  }
  SUBCASE("efron") {
    const auto c2 = constants(WeightScheme::efron(), 2, {}, rng);
    CHECK(c2.a_w == doctest::Approx(0.5));
    CHECK(c2.c_w == doctest::Approx(1.0));
    CHECK_FALSE(c2.d_w.has_value());
    const auto cq = constants(WeightScheme::efron(3), 8, {}, rng);
    CHECK(cq.a_w == doctest::Approx(2.0 * std::pow(7.0 / 8.0, 3)));
    CHECK(cq.c_w == doctest::Approx(std::sqrt(8.0 / 3.0)));
  }
  SUBCASE("bernoulli") {
    const auto c = constants(WeightScheme::bernoulli(0.5), 4, {}, rng);
    CHECK(c.a_w == doctest::Approx(2.0 * 0.5 * 0.75));
    CHECK(c.c_w == doctest::Approx(1.0));
    CHECK(c.d_w.value() == doctest::Approx(1.0 + std::sqrt(0.5 / 2.0)));
  }
  SUBCASE("poisson(1) certified lower bound") {
    const auto c = constants(WeightScheme::poisson(1.0), 16, {}, rng);
    CHECK(c.a_w == doctest::Approx(2.0 / std::exp(1.0) - 0.25));
    CHECK(c.c_w == doctest::Approx(1.0));
    CHECK_FALSE(c.a_w_stderr.has_value());
    CHECK_FALSE(c.d_w.has_value());
  }
  SUBCASE("poisson(2) estimates A by Monte Carlo") {
    const auto c = constants(WeightScheme::poisson(2.0), 8, {}, rng);
    CHECK(c.a_w_stderr.has_value());
    CHECK(c.a_w > 0.0);
    CHECK(c.c_w == doctest::Approx(1.0 / std::sqrt(2.0)));
  }
}

TEST_CASE("constants Monte Carlo agreement and bracket chain") {
  const std::vector<WeightScheme> schemes = {
      WeightScheme::rademacher(),     WeightScheme::efron(),
      WeightScheme::bernoulli(0.5),   WeightScheme::leave_one_out(),
      WeightScheme::random_hold_out(2)};
  const int draws = 100000;
  for (int n : {4, 8, 16}) {
    int si = 0;
    for (const auto& s : schemes) {
      if (s.kind == SchemeKind::RandomHoldOut && s.q > n / 2) continue;
      const RngStream rng(1000 + n * 10 + si++);
      const auto cst = constants(s, n, draws, rng);
      const auto mc = mc_moments(s, n, draws, rng.substream(77));
      // closed-form A_W exists for all of these (absolute slack covers
      // accumulation noise when the moment is a.s. constant)
      CHECK(std::abs(mc.a_mean - cst.a_w) <= 4.0 * mc.a_se + 1e-9);
      CHECK(std::abs(mc.c2_mean - cst.c_w * cst.c_w) <=
            4.0 * mc.c2_se + 1e-9);
      // A_W <= B_W(MC) <= C_W sqrt(1 - 1/n) within 3 stderr
      REQUIRE(cst.b_w_mc.has_value());
      CHECK(cst.a_w <= cst.b_w_mc->value + 3.0 * cst.b_w_mc->stderr_ + 1e-12);
      CHECK(cst.b_w_mc->value <=
            cst.c_w * std::sqrt(1.0 - 1.0 / n) + 3.0 * cst.b_w_mc->stderr_ +
                1e-12);
    }
  }
}

TEST_CASE("rho and vfold weights have a.s. constant sum of squares") {
  auto eng = RngStream(11).engine();
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 12;
    for (int q : {2, 3, 6}) {
      const auto w =
          draw_weights_with(WeightScheme::random_hold_out(q), n, eng);
      const double wbar = mean(w);
      double ss = 0.0;
      for (double wi : w) ss += (wi - wbar) * (wi - wbar);
      CHECK(ss == doctest::Approx(n * (double(n) / q - 1.0)).epsilon(1e-12));
    }
    const auto w = draw_weights_with(WeightScheme::vfold(4), n, eng);
    double ss = 0.0;
    for (double wi : w) ss += (wi - 1.0) * (wi - 1.0);
    // n Bw^2 with Bw = 1/sqrt(V-1)
    CHECK(ss == doctest::Approx(double(n) / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("scheme indices") {
  const int n = 16;
  SUBCASE("table rows") {
    const auto loo = scheme_indices(WeightScheme::leave_one_out(), n);
    CHECK(loo.accuracy == doctest::Approx(std::sqrt(n / (n - 1.0))));
    CHECK(loo.complexity == doctest::Approx(16.0));
    const auto vf = scheme_indices(WeightScheme::vfold(4), n);
    CHECK(vf.accuracy == doctest::Approx(std::sqrt(16.0 / 3.0)));
    CHECK(vf.complexity == doctest::Approx(4.0));
    const auto rho = scheme_indices(WeightScheme::random_hold_out(2), 4);
    CHECK(rho.accuracy == doctest::Approx(std::sqrt(4.0 / 3.0)));
    CHECK(rho.complexity == doctest::Approx(6.0)); // C(4,2)
    const auto rad = scheme_indices(WeightScheme::rademacher(), n);
    CHECK(rad.complexity == doctest::Approx(65536.0));
    CHECK(rad.accuracy == doctest::Approx(n / (n - 1.0)));
    const auto efron = scheme_indices(WeightScheme::efron(), 4);
    CHECK(efron.complexity == doctest::Approx(35.0)); // C(7,3)
    CHECK(std::isinf(
        scheme_indices(WeightScheme::poisson(1.0), n).complexity));
  }
  SUBCASE("accuracy floor for exchangeable schemes") {
    const double floor = std::sqrt(n / (n - 1.0));
    for (const auto& s :
         {WeightScheme::rademacher(), WeightScheme::efron(),
          WeightScheme::bernoulli(0.5), WeightScheme::poisson(1.0),
          WeightScheme::leave_one_out(), WeightScheme::random_hold_out(8)})
      CHECK(scheme_indices(s, n).accuracy >= floor - 1e-12);
  }
}
