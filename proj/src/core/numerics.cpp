#include "numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rshd {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;

// std::lgamma writes the global signgam; use the reentrant variant where
// available since thresholds evaluate these inside worker threads.
double lgamma_pos(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double gauss_density(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

// log of 2^-n sum_{i=k}^n C(n,i), log-sum-exp with Kahan accumulation.
double log_binom_tail_half(int n, int k) {
  if (k <= 0) return 0.0;
  if (k > n) return -std::numeric_limits<double>::infinity();
  const double lg_n1 = lgamma_pos(n + 1.0);
  const double ln2 = 0.6931471805599453;
  double max_term = -std::numeric_limits<double>::infinity();
  for (int i = k; i <= n; ++i) {
    double t = lg_n1 - lgamma_pos(i + 1.0) - lgamma_pos(n - i + 1.0) - n * ln2;
    max_term = std::max(max_term, t);
  }
  double sum = 0.0, comp = 0.0;
  for (int i = k; i <= n; ++i) {
    double t = lg_n1 - lgamma_pos(i + 1.0) - lgamma_pos(n - i + 1.0) - n * ln2;
    double y = std::exp(t - max_term) - comp;
    double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
  }
  return max_term + std::log(sum);
}

} // namespace

double gauss_upper_tail(double x) {
  if (!std::isfinite(x))
    throw_error(ErrorCode::invalid_argument, "gauss_upper_tail: non-finite x");
  return 0.5 * std::erfc(x / kSqrt2);
}

double gauss_upper_quantile(Probability p) {
  const double target = p.value();
  // Phi-bar is strictly decreasing; bracket then polish with Newton.
  double lo = -40.0, hi = 40.0;
  double x = 0.0;
  for (int i = 0; i < 60; ++i) {
    x = 0.5 * (lo + hi);
    if (gauss_upper_tail(x) > target)
      lo = x;
    else
      hi = x;
    if (hi - lo < 1e-3) break;
  }
  for (int i = 0; i < 100; ++i) {
    const double f = gauss_upper_tail(x) - target;
    if (f > 0.0)
      lo = x;
    else
      hi = x;
    const double d = gauss_density(x);
    double step = d > 0.0 ? f / d : 0.0;
    double next = x + step;
    if (!(next > lo && next < hi) || step == 0.0) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * (1.0 + std::abs(x))) return next;
    x = next;
  }
  return x;
}

int binom_upper_quantile(int n, double eta) {
  if (n < 1)
    throw_error(ErrorCode::invalid_argument, "binom_upper_quantile: n < 1");
  if (!(eta > 0.0 && eta <= 1.0))
    throw_error(ErrorCode::invalid_argument,
                "binom_upper_quantile: eta outside (0,1]");
  if (n <= 52) {
    // C(n,i) and the partial sums stay below 2^53, so plain doubles are
    // exact here and the tail comparison has no rounding at all.
    std::vector<double> choose(n + 1);
    choose[0] = 1.0;
    for (int i = 1; i <= n; ++i)
      choose[i] = choose[i - 1] * (n - i + 1) / i; // exact: integer-valued
    const double pow2n = std::ldexp(1.0, n);
    double tail = 0.0;
    int best = 0;
    for (int k = n; k >= 0; --k) {
      tail += choose[k];
      if (tail / pow2n >= eta) {
        best = k;
        break;
      }
    }
    return best;
  }
  const double log_eta = std::log(eta);
  // tail(k) nonincreasing in k: binary search for the last k with
  // tail(k) >= eta. tail(0) = 1 >= eta always. The 1e-12 relative slack
  // keeps exact ties (eta = 1/2 at the symmetric half-sum, eta = 2^-n at
  // the edge) on the >= side of the comparison despite summation rounding.
  int lo = 0, hi = n;
  while (lo < hi) {
    int mid = lo + (hi - lo + 1) / 2;
    if (log_binom_tail_half(n, mid) >= log_eta - 1e-12)
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

double gamma1(int n, double eta) {
  const int b = binom_upper_quantile(n, eta / 2.0);
  return (2.0 * b - n) / static_cast<double>(n);
}

std::vector<double> gammak_sequence(int n, const std::vector<double>& alphas,
                                    double delta) {
  if (alphas.empty())
    throw_error(ErrorCode::invalid_argument, "gammak_sequence: empty alphas");
  if (!(delta > 0.0 && delta <= 1.0))
    throw_error(ErrorCode::invalid_argument,
                "gammak_sequence: delta outside (0,1]");
  std::vector<double> out;
  out.reserve(alphas.size());
  double prod = 1.0;
  for (double alpha_i : alphas) {
    if (!(alpha_i > 0.0 && alpha_i < 1.0))
      throw_error(ErrorCode::invalid_argument,
                  "gammak_sequence: alpha_i outside (0,1)");
    const int b = binom_upper_quantile(n, alpha_i * delta / 2.0);
    prod *= (2.0 * b - n) / static_cast<double>(n);
    out.push_back(prod);
  }
  return out;
}

double cn_constant(int n) {
  if (n < 2) throw_error(ErrorCode::invalid_argument, "cn_constant: n < 2");
  const double lg = lgamma_pos(n / 2.0) - lgamma_pos((n - 1) / 2.0);
  return std::exp(0.5 * std::log(2.0 / n) + lg);
}

} // namespace rshd
