#ifndef RSHD_RESAMPLE_HPP
#define RSHD_RESAMPLE_HPP

#include <optional>
#include <span>
#include <vector>

#include "aggregate.hpp"
#include "errors.hpp"
#include "rng.hpp"
#include "weights.hpp"

namespace rshd {

// K x n data matrix: row k is coordinate k, column i is observation i.
class DataMatrix {
public:
  static DataMatrix create(int K, int n, std::vector<double> values);

  int rows() const { return K_; }    // K, coordinates
  int cols() const { return n_; }    // n, observations
  double at(int k, int i) const { return values_[size_t(k) * n_ + i]; }
  std::span<const double> row(int k) const {
    return {values_.data() + size_t(k) * n_, size_t(n_)};
  }
  const std::vector<double>& values() const { return values_; }

  DataMatrix centered_copy() const;          // Y - Ybar column-wise
  DataMatrix shifted_copy(std::span<const double> x) const; // Y + x

private:
  DataMatrix(int K, int n, std::vector<double> values)
      : K_(K), n_(n), values_(std::move(values)) {}
  int K_ = 0, n_ = 0;
  std::vector<double> values_;
};

// Where the sigma vector entering a threshold comes from: a known vector,
// or the dimension-free upper bound on ||sigma|| estimated from the data.
// Estimation spends delta_sigma of the level (default alpha/10); the caller
// runs the rest of the threshold at alpha - delta_sigma.
class SigmaSource {
public:
  static SigmaSource known(std::vector<double> sigma);
  static SigmaSource estimated(std::optional<double> delta_sigma = {});

  bool is_known() const { return known_.has_value(); }
  const std::vector<double>& sigma() const { return *known_; }
  double delta_sigma(double alpha) const {
    return delta_sigma_.value_or(alpha / 10.0);
  }

private:
  std::optional<std::vector<double>> known_;
  std::optional<double> delta_sigma_;
};

enum class McMode {
  Sampled,        // B i.i.d. weight draws
  ExhaustiveSigns // all 2^n Rademacher sign vectors (n <= 20)
};

std::vector<double> empirical_mean(const DataMatrix& Y);

// n^-1 sum_i (w_i - wbar)(Y^i - Ybar), the resampled mean of the centered
// data. Invariant under shifting all weights and under Y -> Y + x.
std::vector<double> resampled_mean(const DataMatrix& Y,
                                   std::span<const double> w);

// n^-1 sum_i w_i Y^i, without any centering (the quantile statistics).
std::vector<double> uncentered_resampled_mean(const DataMatrix& Y,
                                              std::span<const double> w);

struct McExpectation {
  double raw = 0.0;     // Monte Carlo mean of phi(resampled mean)
  double stderr_ = 0.0; // 0 in exhaustive mode
};

McExpectation resampled_expectation(const DataMatrix& Y, const Aggregator& agg,
                                    const WeightScheme& scheme, int B,
                                    RngStream stream,
                                    McMode mode = McMode::Sampled);

// Additive Monte Carlo slack for a resampled expectation estimated from B
// draws of weights with W_1 - Wbar in [c1, c2] a.s.:
//   (c2 - c1) sqrt(log(1/beta) / (2B)) ||sigma~||
// with sigma~ the mean absolute deviation to the median, in the norm of agg.
double mc_expectation_correction(const DataMatrix& Y, const Aggregator& agg,
                                 double c1, double c2, int B,
                                 Probability beta);

// Per-coordinate mean absolute deviation from the (lower) median.
std::vector<double> tilde_sigma(const DataMatrix& Y);

// Per-coordinate standard deviation with 1/n normalization.
std::vector<double> sigma_hat(const DataMatrix& Y);

// Statistics phi(uncentered resampled mean) for Rademacher sign vectors,
// together with |Wbar| per draw. stats[a][j] is the j-th draw evaluated
// under aggs[a]; all aggregators share the same sign draws.
struct SignStats {
  std::vector<std::vector<double>> stats;
  std::vector<double> wbar_abs;
};
SignStats rademacher_sign_stats(const DataMatrix& Y,
                                std::span<const Aggregator> aggs, int B,
                                RngStream stream, McMode mode);

// The (floor(alpha*B)+1)-th largest entry; realizes the quantile infimum of
// both the strict-> and the >= conventions. -inf when the order statistic
// falls off the end.
double quantile_from_stats(std::span<const double> stats, double alpha);

// Exact resampled quantile over all 2^n sign vectors of the matrix as
// given (pass the centered matrix for centered quantiles). n <= 20.
double exact_quantile_rademacher(const DataMatrix& Y, const Aggregator& agg,
                                 Probability alpha);

struct McQuantile {
  double q = 0.0;
  std::vector<double> wbar_abs; // per-draw |Wbar|, for empirical_gamma
};
McQuantile mc_quantile(const DataMatrix& Y, const Aggregator& agg,
                       Probability alpha, int B, RngStream stream,
                       McMode mode = McMode::Sampled);

// gamma(W, eta) = max{y >= 0 | B^-1 sum 1{|Wbar^j| >= y} >= eta}, the
// (1-eta)-quantile of |Wbar| under the empirical distribution.
double empirical_gamma(std::span<const double> wbar_abs, Probability eta);

// ||sigma|| <= (C_n - Phi-bar^-1(delta/2)/sqrt(n))^-1 ||sigma-hat||, valid
// with probability 1 - delta; throws infeasible_level when the denominator
// is nonpositive.
double sigma_upper_bound(const DataMatrix& Y, const Aggregator& agg,
                         Probability delta);

// sigma norm + effective level after the estimation split.
struct SigmaNorm {
  double norm = 0.0;
  double alpha_effective = 0.0;
};
SigmaNorm resolve_sigma_norm(const DataMatrix& Y, const Aggregator& agg,
                             const SigmaSource& source, double alpha);

// (1/n) sum_i ||Ybar^(-i) - Y^i||_p, the leave-one-out prediction risk.
double loo_prediction_risk(const DataMatrix& Y, double p);

struct RiskInterval {
  double lower = 0.0;
  double upper = 0.0;
};

// Two one-sided bounds on E||Ybar - mu||_p, each valid at level 1 - alpha
// (simultaneously valid at 1 - 2*alpha by union bound).
RiskInterval risk_interval(const DataMatrix& Y, double p, Probability alpha,
                           const WeightScheme& scheme, int B,
                           const SigmaSource& sigma, RngStream stream);

} // namespace rshd

#endif
