#include "simfield.hpp"

#include <cmath>

#include "numerics.hpp"

namespace rshd {

std::vector<double> filter_kernel(int d, double b) {
  if (d < 1) throw_error(ErrorCode::invalid_argument, "filter_kernel: d < 1");
  if (!(b >= 0.0))
    throw_error(ErrorCode::invalid_argument, "filter_kernel: b < 0");
  std::vector<double> kernel(size_t(d) * d, 0.0);
  if (b == 0.0) {
    kernel[0] = 1.0;
    return kernel;
  }
  double ss = 0.0;
  for (int t1 = 0; t1 < d; ++t1) {
    const double m1 = std::min(t1, d - t1);
    for (int t2 = 0; t2 < d; ++t2) {
      const double m2 = std::min(t2, d - t2);
      const double v = std::exp(-(m1 * m1 + m2 * m2) / (b * b));
      kernel[size_t(t1) * d + t2] = v;
      ss += v * v;
    }
  }
  const double scale = 1.0 / std::sqrt(ss);
  for (double& v : kernel) v *= scale;
  return kernel;
}

std::vector<double> mean_scenario_vector(const MeanScenario& scenario, int d,
                                         int n, double alpha, Side side) {
  const int K = d * d;
  std::vector<double> mu(K, 0.0);
  if (scenario.kind == MeanScenario::Kind::Zero) return mu;
  if (d % 2 != 0)
    throw_error(ErrorCode::invalid_argument,
                "half-split scenarios need an even side length d");
  // reference unit: Bonferroni threshold over all K coordinates, sigma = 1
  const int c = side == Side::TwoSided ? 2 : 1;
  const double t_bonf =
      gauss_upper_quantile(Probability(alpha / (c * double(K)))) /
      std::sqrt(double(n));

  if (scenario.kind == MeanScenario::Kind::LinearHalf) {
    const int half = d / 2;
    for (int j = 0; j < d; ++j) {
      const double ramp = std::max(half - j, 0) / double(half);
      for (int i = 0; i < d; ++i)
        mu[size_t(i) + size_t(d) * j] = ramp * scenario.amplitude * t_bonf;
    }
    return mu;
  }
  // ExpDecay: nonzero on linear indices k <= K/2, spanning
  // [0.5 t, 0.5 t 10^(r/10)]
  const int half = K / 2;
  for (int k = 0; k <= half; ++k) {
    const double expo =
        (half - k) / double(half) * (scenario.r_db / 10.0) * std::log(10.0);
    mu[size_t(k)] = 0.5 * t_bonf * std::exp(expo);
  }
  return mu;
}

std::vector<double> config_mean(const TorusFieldConfig& config) {
  return mean_scenario_vector(config.mean, config.d, config.n, config.alpha,
                              config.side);
}

DataMatrix sample_field(const TorusFieldConfig& config, RngStream stream) {
  const int d = config.d, n = config.n;
  const int K = d * d;
  const auto kernel = filter_kernel(d, config.b);
  const auto mu = config_mean(config);

  // sparse kernel support: entries below 1e-16 cannot move a double sum
  struct Tap {
    int dt1, dt2;
    double f;
  };
  std::vector<Tap> taps;
  for (int t1 = 0; t1 < d; ++t1)
    for (int t2 = 0; t2 < d; ++t2) {
      const double f = kernel[size_t(t1) * d + t2];
      if (std::abs(f) >= 1e-16) taps.push_back({t1, t2, f});
    }

  auto eng = stream.engine();
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> noise(K);
  std::vector<double> values(size_t(K) * n);
  for (int i = 0; i < n; ++i) {
    for (double& z : noise) z = gauss(eng);
    for (int t1 = 0; t1 < d; ++t1) {
      for (int t2 = 0; t2 < d; ++t2) {
        double acc = 0.0;
        for (const Tap& tap : taps) {
          int s1 = t1 - tap.dt1;
          if (s1 < 0) s1 += d;
          int s2 = t2 - tap.dt2;
          if (s2 < 0) s2 += d;
          acc += tap.f * noise[size_t(s1) * d + s2];
        }
        const int k = t2 + d * t1; // row t1, column t2 -> linear i + d*j form
        values[size_t(k) * n + i] = mu[size_t(k)] + acc;
      }
    }
  }
  return DataMatrix::create(K, n, std::move(values));
}

} // namespace rshd
