#include "weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace rshd {

namespace {

double lgamma_pos(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double log_choose(double n, double k) {
  return lgamma_pos(n + 1.0) - lgamma_pos(k + 1.0) - lgamma_pos(n - k + 1.0);
}

double sample_sd(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (xs.size() - 1.0));
}

} // namespace

WeightScheme WeightScheme::rademacher() { return {SchemeKind::Rademacher}; }

WeightScheme WeightScheme::efron() {
  WeightScheme s;
  s.kind = SchemeKind::Efron;
  s.q = 0; // resolved to n when used
  return s;
}

WeightScheme WeightScheme::efron(int q) {
  if (q < 1) throw_error(ErrorCode::invalid_argument, "efron: q < 1");
  WeightScheme s;
  s.kind = SchemeKind::Efron;
  s.q = q;
  return s;
}

WeightScheme WeightScheme::bernoulli(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw_error(ErrorCode::invalid_argument, "bernoulli: p outside (0,1)");
  WeightScheme s;
  s.kind = SchemeKind::Bernoulli;
  s.p = p;
  return s;
}

WeightScheme WeightScheme::poisson(double mu) {
  if (!(mu > 0.0))
    throw_error(ErrorCode::invalid_argument, "poisson: mu <= 0");
  WeightScheme s;
  s.kind = SchemeKind::Poisson;
  s.mu = mu;
  return s;
}

WeightScheme WeightScheme::random_hold_out(int q) {
  if (q < 1) throw_error(ErrorCode::invalid_argument, "rho: q < 1");
  WeightScheme s;
  s.kind = SchemeKind::RandomHoldOut;
  s.q = q;
  return s;
}

WeightScheme WeightScheme::leave_one_out() {
  return {SchemeKind::LeaveOneOut};
}

WeightScheme WeightScheme::vfold(int v) {
  if (v < 2) throw_error(ErrorCode::invalid_argument, "vfold: V < 2");
  WeightScheme s;
  s.kind = SchemeKind::VFoldCV;
  s.v = v;
  return s;
}

WeightScheme WeightScheme::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string arg =
      colon == std::string::npos ? "" : text.substr(colon + 1);
  auto need_arg = [&](const char* what) {
    if (arg.empty())
      throw_error(ErrorCode::invalid_argument,
                  "scheme '" + head + "' needs a parameter: " + what);
  };
  try {
    if (head == "rademacher" || head == "rad") return rademacher();
    if (head == "efron") return arg.empty() ? efron() : efron(std::stoi(arg));
    if (head == "bernoulli") {
      need_arg("bernoulli:p");
      return bernoulli(std::stod(arg));
    }
    if (head == "poisson") return poisson(arg.empty() ? 1.0 : std::stod(arg));
    if (head == "rho") {
      need_arg("rho:q");
      return random_hold_out(std::stoi(arg));
    }
    if (head == "loo") return leave_one_out();
    if (head == "vfold") {
      need_arg("vfold:V");
      return vfold(std::stoi(arg));
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw_error(ErrorCode::invalid_argument,
                "bad numeric parameter in scheme '" + text + "'");
  }
  throw_error(ErrorCode::invalid_argument, "unknown weight scheme '" + text +
                                               "'");
}

std::string WeightScheme::name() const {
  std::ostringstream out;
  switch (kind) {
    case SchemeKind::Rademacher: out << "rademacher"; break;
    case SchemeKind::Efron:
      out << "efron";
      if (q > 0) out << ":" << q;
      break;
    case SchemeKind::Bernoulli: out << "bernoulli:" << p; break;
    case SchemeKind::Poisson: out << "poisson:" << mu; break;
    case SchemeKind::RandomHoldOut: out << "rho:" << q; break;
    case SchemeKind::LeaveOneOut: out << "loo"; break;
    case SchemeKind::VFoldCV: out << "vfold:" << v; break;
  }
  return out.str();
}

int WeightScheme::effective_q(int n) const {
  if (kind == SchemeKind::Efron) return q > 0 ? q : n;
  if (kind == SchemeKind::LeaveOneOut) return n - 1;
  return q;
}

void WeightScheme::validate(int n) const {
  if (n < 2) throw_error(ErrorCode::invalid_argument, "weights: n < 2");
  switch (kind) {
    case SchemeKind::Efron:
      if (q > 0 && q > n)
        throw_error(ErrorCode::invalid_argument, "efron: q > n");
      break;
    case SchemeKind::RandomHoldOut:
      if (q < 1 || q > n)
        throw_error(ErrorCode::invalid_argument, "rho: q outside 1..n");
      break;
    case SchemeKind::VFoldCV:
      if (v < 2 || v > n)
        throw_error(ErrorCode::invalid_argument, "vfold: V outside 2..n");
      if (n % v != 0)
        throw_error(ErrorCode::invalid_argument,
                    "vfold: V must divide n (irregular blocks unsupported)");
      break;
    default: break;
  }
}

std::vector<double> draw_weights(const WeightScheme& scheme, int n,
                                 RngStream stream) {
  auto eng = stream.engine();
  return draw_weights_with(scheme, n, eng);
}

std::vector<double> draw_weights_with(const WeightScheme& scheme, int n,
                                      std::mt19937_64& eng) {
  scheme.validate(n);
  std::vector<double> w(n, 0.0);
  switch (scheme.kind) {
    case SchemeKind::Rademacher: {
      std::uniform_int_distribution<int> bit(0, 1);
      for (double& wi : w) wi = bit(eng) ? 1.0 : -1.0;
      break;
    }
    case SchemeKind::Efron: {
      // (q/n) W multinomial(q; 1/n...): draw q uniform cells, scale counts.
      const int q = scheme.effective_q(n);
      std::uniform_int_distribution<int> cell(0, n - 1);
      for (int j = 0; j < q; ++j) w[cell(eng)] += 1.0;
      const double scale = static_cast<double>(n) / q;
      for (double& wi : w) wi *= scale;
      break;
    }
    case SchemeKind::Bernoulli: {
      std::bernoulli_distribution coin(scheme.p);
      for (double& wi : w) wi = coin(eng) ? 1.0 / scheme.p : 0.0;
      break;
    }
    case SchemeKind::Poisson: {
      std::poisson_distribution<int> pois(scheme.mu);
      for (double& wi : w) wi = pois(eng) / scheme.mu;
      break;
    }
    case SchemeKind::RandomHoldOut:
    case SchemeKind::LeaveOneOut: {
      const int q = scheme.kind == SchemeKind::LeaveOneOut ? n - 1 : scheme.q;
      // partial Fisher-Yates: first q slots of a shuffled index array
      std::vector<int> idx(n);
      std::iota(idx.begin(), idx.end(), 0);
      for (int j = 0; j < q; ++j) {
        std::uniform_int_distribution<int> pick(j, n - 1);
        std::swap(idx[j], idx[pick(eng)]);
      }
      const double value = static_cast<double>(n) / q;
      for (int j = 0; j < q; ++j) w[idx[j]] = value;
      break;
    }
    case SchemeKind::VFoldCV: {
      const int v = scheme.v;
      const int block = n / v;
      std::uniform_int_distribution<int> pick(0, v - 1);
      const int j = pick(eng);
      const double value = static_cast<double>(v) / (v - 1);
      for (int i = 0; i < n; ++i)
        if (i / block != j) w[i] = value;
      break;
    }
  }
  return w;
}

ResamplingConstants constants(const WeightScheme& scheme, int n,
                              std::optional<int> mc_draws, RngStream stream) {
  scheme.validate(n);
  if (mc_draws && *mc_draws < 1000)
    throw_error(ErrorCode::invalid_argument, "constants: mc_draws < 1000");

  ResamplingConstants cst;
  const double dn = n;
  switch (scheme.kind) {
    case SchemeKind::Rademacher:
      cst.a_w = 1.0 - 1.0 / dn;
      cst.c_w = 1.0;
      cst.d_w = 1.0 + 1.0 / std::sqrt(dn); // certified upper end of [1, 1+1/sqrt(n)]
      cst.x0_a = {0.0, 1.0};
      cst.b_w_lower = cst.a_w;
      break;
    case SchemeKind::Efron: {
      const int q = scheme.effective_q(n);
      cst.a_w = 2.0 * std::pow(1.0 - 1.0 / dn, q);
      cst.c_w = std::sqrt(dn / q);
      cst.b_w_lower = cst.a_w;
      break;
    }
    case SchemeKind::Bernoulli: {
      const double p = scheme.p;
      cst.a_w = 2.0 * (1.0 - p) * (1.0 - 1.0 / dn);
      cst.c_w = std::sqrt(1.0 / p - 1.0);
      cst.d_w = 0.5 / p + std::abs(0.5 / p - 1.0) +
                std::sqrt((1.0 - p) / (dn * p)); // certified upper
      cst.x0_a = {0.5 / p, 0.5 / p};
      cst.b_w_lower = cst.a_w;
      break;
    }
    case SchemeKind::Poisson: {
      cst.c_w = 1.0 / std::sqrt(scheme.mu);
      if (scheme.mu == 1.0) {
        cst.a_w = 2.0 / std::exp(1.0) - 1.0 / std::sqrt(dn); // certified lower
      } else {
        // no stated closed form away from mu = 1: Monte Carlo estimate
        const int draws = mc_draws.value_or(100000);
        auto eng = stream.substream(1).engine();
        std::vector<double> abs_dev(draws);
        for (int j = 0; j < draws; ++j) {
          auto w = draw_weights_with(scheme, n, eng);
          const double wbar =
              std::accumulate(w.begin(), w.end(), 0.0) / dn;
          abs_dev[j] = std::abs(w[0] - wbar);
        }
        const double mean =
            std::accumulate(abs_dev.begin(), abs_dev.end(), 0.0) / draws;
        cst.a_w = mean;
        cst.a_w_stderr = sample_sd(abs_dev, mean) / std::sqrt(double(draws));
      }
      cst.b_w_lower = cst.a_w;
      break;
    }
    case SchemeKind::RandomHoldOut:
    case SchemeKind::LeaveOneOut: {
      const int q =
          scheme.kind == SchemeKind::LeaveOneOut ? n - 1 : scheme.q;
      const double ratio = dn / q;
      cst.a_w = 2.0 * (1.0 - double(q) / dn);
      const double b = std::sqrt(ratio - 1.0); // exact: sum (W-Wbar)^2 is a.s. constant
      cst.c_w = std::sqrt(dn / (dn - 1.0)) * b;
      cst.d_w = 0.5 * ratio + std::abs(1.0 - 0.5 * ratio);
      cst.x0_a = {0.5 * ratio, 0.5 * ratio};
      cst.b_w_lower = b;
      break;
    }
    case SchemeKind::VFoldCV: {
      const double v = scheme.v;
      cst.a_w = 2.0 / v;
      const double b = 1.0 / std::sqrt(v - 1.0); // exact
      cst.c_w = std::sqrt(dn) / (v - 1.0);
      cst.d_w = 1.0;
      cst.x0_a = {0.5 * v / (v - 1.0), 0.5 * v / (v - 1.0)};
      cst.b_w_lower = b;
      break;
    }
  }

  if (mc_draws) {
    const int draws = *mc_draws;
    auto eng = stream.substream(0).engine();
    std::vector<double> bs(draws);
    for (int j = 0; j < draws; ++j) {
      auto w = draw_weights_with(scheme, n, eng);
      const double wbar = std::accumulate(w.begin(), w.end(), 0.0) / dn;
      double ss = 0.0;
      for (double wi : w) ss += (wi - wbar) * (wi - wbar);
      bs[j] = std::sqrt(ss / dn);
    }
    const double mean = std::accumulate(bs.begin(), bs.end(), 0.0) / draws;
    cst.b_w_mc = MeanStderr{mean, sample_sd(bs, mean) / std::sqrt(double(draws))};
  }
  return cst;
}

SchemeIndices scheme_indices(const WeightScheme& scheme, int n,
                             const ResamplingConstants& cst) {
  SchemeIndices idx;
  idx.accuracy = cst.c_w / cst.b_w_lower;
  const double inf = std::numeric_limits<double>::infinity();
  switch (scheme.kind) {
    case SchemeKind::Rademacher:
    case SchemeKind::Bernoulli:
      idx.complexity = std::exp2(double(n)); // 2^n sign/on-off patterns
      break;
    case SchemeKind::Efron: {
      const int q = scheme.effective_q(n);
      idx.complexity = std::exp(log_choose(q + n - 1.0, n - 1.0));
      break;
    }
    case SchemeKind::Poisson:
      idx.complexity = inf; // unbounded support
      break;
    case SchemeKind::RandomHoldOut:
      idx.complexity = std::exp(log_choose(double(n), double(scheme.q)));
      break;
    case SchemeKind::LeaveOneOut:
      idx.complexity = double(n);
      break;
    case SchemeKind::VFoldCV:
      idx.complexity = double(scheme.v);
      break;
  }
  return idx;
}

SchemeIndices scheme_indices(const WeightScheme& scheme, int n) {
  if (scheme.kind == SchemeKind::Poisson && scheme.mu != 1.0)
    throw_error(ErrorCode::invalid_argument,
                "scheme_indices: Poisson(mu != 1) needs Monte Carlo "
                "constants; pass them explicitly");
  return scheme_indices(scheme, n, constants(scheme, n, std::nullopt,
                                             RngStream(0)));
}

} // namespace rshd
