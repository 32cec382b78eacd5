#include "resample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "numerics.hpp"

namespace rshd {

namespace {

double mean_of(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / double(xs.size());
}

double sample_sd(std::span<const double> xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (double(xs.size()) - 1.0));
}

} // namespace

DataMatrix DataMatrix::create(int K, int n, std::vector<double> values) {
  if (K < 1) throw_error(ErrorCode::invalid_argument, "DataMatrix: K < 1");
  if (n < 2) throw_error(ErrorCode::invalid_argument, "DataMatrix: n < 2");
  if (values.size() != size_t(K) * size_t(n))
    throw_error(ErrorCode::invalid_argument,
                "DataMatrix: expected K*n values");
  for (double v : values)
    if (!std::isfinite(v))
      throw_error(ErrorCode::invalid_argument,
                  "DataMatrix: non-finite entry");
  return DataMatrix(K, n, std::move(values));
}

DataMatrix DataMatrix::centered_copy() const {
  std::vector<double> out(values_);
  for (int k = 0; k < K_; ++k) {
    const double m = mean_of(row(k));
    for (int i = 0; i < n_; ++i) out[size_t(k) * n_ + i] -= m;
  }
  return DataMatrix(K_, n_, std::move(out));
}

DataMatrix DataMatrix::shifted_copy(std::span<const double> x) const {
  if (x.size() != size_t(K_))
    throw_error(ErrorCode::invalid_argument, "shifted_copy: bad shift size");
  std::vector<double> out(values_);
  for (int k = 0; k < K_; ++k)
    for (int i = 0; i < n_; ++i) out[size_t(k) * n_ + i] += x[k];
  return DataMatrix(K_, n_, std::move(out));
}

SigmaSource SigmaSource::known(std::vector<double> sigma) {
  for (double s : sigma)
    if (!(s >= 0.0) || !std::isfinite(s))
      throw_error(ErrorCode::invalid_argument,
                  "sigma vector entries must be finite and >= 0");
  SigmaSource src;
  src.known_ = std::move(sigma);
  return src;
}

SigmaSource SigmaSource::estimated(std::optional<double> delta_sigma) {
  if (delta_sigma && !(*delta_sigma > 0.0 && *delta_sigma < 1.0))
    throw_error(ErrorCode::invalid_argument,
                "delta_sigma outside (0,1)");
  SigmaSource src;
  src.delta_sigma_ = delta_sigma;
  return src;
}

std::vector<double> empirical_mean(const DataMatrix& Y) {
  std::vector<double> out(Y.rows());
  for (int k = 0; k < Y.rows(); ++k) out[k] = mean_of(Y.row(k));
  return out;
}

std::vector<double> resampled_mean(const DataMatrix& Y,
                                   std::span<const double> w) {
  const int K = Y.rows(), n = Y.cols();
  if (w.size() != size_t(n))
    throw_error(ErrorCode::invalid_argument, "resampled_mean: bad weight size");
  const double wbar = mean_of(w);
  std::vector<double> out(K, 0.0);
  for (int k = 0; k < K; ++k) {
    const auto yk = Y.row(k);
    const double yb = mean_of(yk);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += (w[i] - wbar) * (yk[i] - yb);
    out[k] = acc / n;
  }
  return out;
}

std::vector<double> uncentered_resampled_mean(const DataMatrix& Y,
                                              std::span<const double> w) {
  const int K = Y.rows(), n = Y.cols();
  if (w.size() != size_t(n))
    throw_error(ErrorCode::invalid_argument,
                "uncentered_resampled_mean: bad weight size");
  std::vector<double> out(K, 0.0);
  for (int k = 0; k < K; ++k) {
    const auto yk = Y.row(k);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += w[i] * yk[i];
    out[k] = acc / n;
  }
  return out;
}

McExpectation resampled_expectation(const DataMatrix& Y, const Aggregator& agg,
                                    const WeightScheme& scheme, int B,
                                    RngStream stream, McMode mode) {
  if (mode == McMode::Sampled && B < 1)
    throw_error(ErrorCode::invalid_argument, "resampled_expectation: B < 1");
  const int n = Y.cols();
  std::vector<double> stats;
  if (mode == McMode::ExhaustiveSigns) {
    if (scheme.kind != SchemeKind::Rademacher)
      throw_error(ErrorCode::unsupported,
                  "exhaustive enumeration is Rademacher-only");
    if (n > 20)
      throw_error(ErrorCode::capacity,
                  "exhaustive enumeration limited to n <= 20");
    const std::uint64_t total = 1ull << n;
    stats.reserve(total);
    std::vector<double> w(n);
    for (std::uint64_t s = 0; s < total; ++s) {
      for (int i = 0; i < n; ++i) w[i] = (s >> i) & 1 ? 1.0 : -1.0;
      stats.push_back(evaluate(agg, resampled_mean(Y, w)));
    }
    const double raw = mean_of(stats);
    return {raw, 0.0};
  }
  stats.reserve(B);
  auto eng = stream.engine();
  for (int j = 0; j < B; ++j) {
    const auto w = draw_weights_with(scheme, n, eng);
    stats.push_back(evaluate(agg, resampled_mean(Y, w)));
  }
  const double raw = mean_of(stats);
  return {raw, sample_sd(stats, raw) / std::sqrt(double(B))};
}

double mc_expectation_correction(const DataMatrix& Y, const Aggregator& agg,
                                 double c1, double c2, int B,
                                 Probability beta) {
  if (!(c1 < c2))
    throw_error(ErrorCode::invalid_argument,
                "mc_expectation_correction: c1 >= c2");
  if (B < 1)
    throw_error(ErrorCode::invalid_argument, "mc_expectation_correction: B < 1");
  const double norm = evaluate(agg, tilde_sigma(Y));
  return (c2 - c1) * std::sqrt(std::log(1.0 / beta.value()) / (2.0 * B)) *
         norm;
}

std::vector<double> tilde_sigma(const DataMatrix& Y) {
  const int K = Y.rows(), n = Y.cols();
  std::vector<double> out(K);
  std::vector<double> buf(n);
  for (int k = 0; k < K; ++k) {
    const auto yk = Y.row(k);
    std::copy(yk.begin(), yk.end(), buf.begin());
    // lower median: order statistic at (n-1)/2
    const int mid = (n - 1) / 2;
    std::nth_element(buf.begin(), buf.begin() + mid, buf.end());
    const double med = buf[mid];
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += std::abs(yk[i] - med);
    out[k] = acc / n;
  }
  return out;
}

std::vector<double> sigma_hat(const DataMatrix& Y) {
  const int K = Y.rows(), n = Y.cols();
  std::vector<double> out(K);
  for (int k = 0; k < K; ++k) {
    const auto yk = Y.row(k);
    const double m = mean_of(yk);
    double ss = 0.0;
    for (int i = 0; i < n; ++i) ss += (yk[i] - m) * (yk[i] - m);
    out[k] = std::sqrt(ss / n);
  }
  return out;
}

SignStats rademacher_sign_stats(const DataMatrix& Y,
                                std::span<const Aggregator> aggs, int B,
                                RngStream stream, McMode mode) {
  const int n = Y.cols();
  SignStats out;
  out.stats.resize(aggs.size());
  std::vector<double> w(n);
  auto push_draw = [&](std::span<const double> weights) {
    const auto m = uncentered_resampled_mean(Y, weights);
    for (size_t a = 0; a < aggs.size(); ++a)
      out.stats[a].push_back(evaluate(aggs[a], m));
    out.wbar_abs.push_back(std::abs(mean_of(weights)));
  };
  if (mode == McMode::ExhaustiveSigns) {
    if (n > 20)
      throw_error(ErrorCode::capacity,
                  "exhaustive enumeration limited to n <= 20; use Monte Carlo");
    const std::uint64_t total = 1ull << n;
    for (auto& s : out.stats) s.reserve(total);
    for (std::uint64_t s = 0; s < total; ++s) {
      for (int i = 0; i < n; ++i) w[i] = (s >> i) & 1 ? 1.0 : -1.0;
      push_draw(w);
    }
    return out;
  }
  if (B < 1) throw_error(ErrorCode::invalid_argument, "sign stats: B < 1");
  auto eng = stream.engine();
  std::uniform_int_distribution<int> bit(0, 1);
  for (auto& s : out.stats) s.reserve(B);
  for (int j = 0; j < B; ++j) {
    for (int i = 0; i < n; ++i) w[i] = bit(eng) ? 1.0 : -1.0;
    push_draw(w);
  }
  return out;
}

double quantile_from_stats(std::span<const double> stats, double alpha) {
  const size_t B = stats.size();
  const size_t rank = size_t(std::floor(alpha * double(B))) + 1; // 1-based, from the top
  if (rank > B) return kEmptySetValue; // degenerate order statistic
  std::vector<double> buf(stats.begin(), stats.end());
  std::nth_element(buf.begin(), buf.begin() + (rank - 1), buf.end(),
                   std::greater<double>());
  return buf[rank - 1];
}

double exact_quantile_rademacher(const DataMatrix& Y, const Aggregator& agg,
                                 Probability alpha) {
  if (Y.cols() > 20)
    throw_error(ErrorCode::capacity,
                "exact quantile needs 2^n enumeration; n <= 20 (use "
                "mc_quantile beyond that)");
  const Aggregator aggs[1] = {agg};
  const auto st =
      rademacher_sign_stats(Y, aggs, 0, RngStream(0), McMode::ExhaustiveSigns);
  return quantile_from_stats(st.stats[0], alpha.value());
}

McQuantile mc_quantile(const DataMatrix& Y, const Aggregator& agg,
                       Probability alpha, int B, RngStream stream,
                       McMode mode) {
  if (mode == McMode::Sampled && B < 1)
    throw_error(ErrorCode::invalid_argument, "mc_quantile: B < 1");
  const Aggregator aggs[1] = {agg};
  auto st = rademacher_sign_stats(Y, aggs, B, stream, mode);
  McQuantile out;
  out.q = quantile_from_stats(st.stats[0], alpha.value());
  out.wbar_abs = std::move(st.wbar_abs);
  return out;
}

double empirical_gamma(std::span<const double> wbar_abs, Probability eta) {
  const size_t B = wbar_abs.size();
  if (B < 1)
    throw_error(ErrorCode::invalid_argument, "empirical_gamma: empty sample");
  const size_t rank = size_t(std::ceil(eta.value() * double(B)));
  if (rank > B || rank == 0) return 0.0;
  std::vector<double> buf(wbar_abs.begin(), wbar_abs.end());
  std::nth_element(buf.begin(), buf.begin() + (rank - 1), buf.end(),
                   std::greater<double>());
  return std::max(buf[rank - 1], 0.0);
}

double sigma_upper_bound(const DataMatrix& Y, const Aggregator& agg,
                         Probability delta) {
  const double cn = cn_constant(Y.cols());
  const double denom = cn - gauss_upper_quantile(Probability(delta / 2.0)) /
                                std::sqrt(double(Y.cols()));
  if (!(denom > 0.0))
    throw_error(ErrorCode::infeasible_level,
                "sigma bound vacuous at this (n, delta): C_n <= "
                "quantile/sqrt(n)");
  return evaluate(agg, sigma_hat(Y)) / denom;
}

SigmaNorm resolve_sigma_norm(const DataMatrix& Y, const Aggregator& agg,
                             const SigmaSource& source, double alpha) {
  if (source.is_known()) {
    if (source.sigma().size() != size_t(Y.rows()))
      throw_error(ErrorCode::invalid_argument,
                  "sigma vector length does not match K");
    return {evaluate(agg, source.sigma()), alpha};
  }
  const double ds = source.delta_sigma(alpha);
  if (!(ds < alpha))
    throw_error(ErrorCode::invalid_argument,
                "delta_sigma must stay below alpha");
  return {sigma_upper_bound(Y, agg, Probability(ds)), alpha - ds};
}

double loo_prediction_risk(const DataMatrix& Y, double p) {
  if (!(p >= 1.0))
    throw_error(ErrorCode::invalid_argument, "loo_prediction_risk: p < 1");
  const int K = Y.rows(), n = Y.cols();
  const auto mean = empirical_mean(Y);
  const Aggregator norm = Aggregator::lp(p);
  std::vector<double> diff(K);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < K; ++k) {
      const double loo = (n * mean[k] - Y.at(k, i)) / (n - 1.0);
      diff[k] = loo - Y.at(k, i);
    }
    acc += evaluate(norm, diff);
  }
  return acc / n;
}

RiskInterval risk_interval(const DataMatrix& Y, double p, Probability alpha,
                           const WeightScheme& scheme, int B,
                           const SigmaSource& sigma, RngStream stream) {
  const Aggregator norm = Aggregator::lp(p);
  const auto cst = constants(scheme, Y.cols(), std::nullopt, stream);
  const auto sn = resolve_sigma_norm(Y, norm, sigma, alpha.value());
  const auto e = resampled_expectation(Y, norm, scheme, B, stream.substream(1));
  const double main = e.raw / cst.b_w_lower;
  const double dev = sn.norm * cst.c_w *
                     gauss_upper_quantile(Probability(sn.alpha_effective / 2.0)) /
                     (Y.cols() * cst.b_w_lower);
  return {main - dev, main + dev};
}

} // namespace rshd
