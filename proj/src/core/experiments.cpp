#include "experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "numerics.hpp"
#include "parallel.hpp"

namespace rshd {

namespace {

std::vector<int> null_set(const std::vector<double>& mu, Side side) {
  std::vector<int> h0;
  for (size_t k = 0; k < mu.size(); ++k)
    if (bracket_value(mu[k], side) == 0.0) h0.push_back(int(k));
  return h0;
}

double mean_of(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / double(xs.size());
}

double sample_sd(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / (double(xs.size()) - 1.0));
}

ThresholdSpec sim_threshold_spec(ThresholdMethod m, int B, int K) {
  ThresholdSpec s;
  s.method = m;
  s.side = Side::TwoSided;
  s.mc_draws = B;
  s.sigma = SigmaSource::known(std::vector<double>(size_t(K), 1.0));
  return s;
}

double power_of(const std::vector<int>& rejected,
                const std::vector<int>& h1) {
  if (h1.empty()) return 0.0;
  std::vector<int> hit;
  std::set_intersection(rejected.begin(), rejected.end(), h1.begin(),
                        h1.end(), std::back_inserter(hit));
  return double(hit.size()) / double(h1.size());
}

std::vector<int> rejected_at_cap(const StepDownResult& res, int cap) {
  const auto& surv = res.survivors_after(cap);
  std::vector<int> out;
  std::set_difference(res.survivor_sets.front().begin(),
                      res.survivor_sets.front().end(), surv.begin(),
                      surv.end(), std::back_inserter(out));
  return out;
}

} // namespace

ProcedureConfig ProcedureConfig::parse(const std::string& text) {
  ProcedureConfig proc;
  if (text == "holm") {
    proc.kind = Kind::Holm;
    return proc;
  }
  if (text == "hybrid") {
    proc.kind = Kind::Hybrid;
    return proc;
  }
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  if ((head == "single" || head == "sd") && colon != std::string::npos) {
    proc.kind = head == "single" ? Kind::SingleStep : Kind::StepDown;
    proc.spec.method = parse_threshold_method(text.substr(colon + 1));
    return proc;
  }
  throw_error(ErrorCode::invalid_argument,
              "unknown procedure '" + text +
                  "' (holm | single:<method> | sd:<method> | hybrid)");
}

std::string ProcedureConfig::name() const {
  switch (kind) {
    case Kind::Holm: return "holm";
    case Kind::Hybrid: return "hybrid";
    case Kind::SingleStep:
      return "single:" + threshold_method_name(spec.method);
    case Kind::StepDown: return "sd:" + threshold_method_name(spec.method);
  }
  return "?";
}

StepDownResult run_procedure(const ProcedureConfig& proc, const DataMatrix& Y,
                             Probability alpha, RngStream stream,
                             std::optional<int> early_stop) {
  switch (proc.kind) {
    case ProcedureConfig::Kind::Holm: {
      ThresholdSpec s;
      s.method = ThresholdMethod::Bonferroni;
      s.side = proc.side;
      s.sigma = proc.sigma;
      return step_down(Y, s, alpha, Y.rows() + 1, RngStream(0), early_stop);
    }
    case ProcedureConfig::Kind::SingleStep: {
      ThresholdSpec s = proc.spec;
      s.side = proc.side;
      s.sigma = proc.sigma;
      // one threshold evaluation: the step-down prefix of length 1
      return step_down(Y, s, alpha, Y.rows() + 1, stream, 1);
    }
    case ProcedureConfig::Kind::StepDown: {
      ThresholdSpec s = proc.spec;
      s.side = proc.side;
      s.sigma = proc.sigma;
      return step_down(Y, s, alpha, Y.rows() + 1, stream, early_stop);
    }
    case ProcedureConfig::Kind::Hybrid:
      return hybrid(Y, alpha, proc.hybrid_alpha0_frac * alpha.value(),
                    proc.hybrid_delta, proc.B, stream, proc.sigma,
                    early_stop);
  }
  throw_error(ErrorCode::runtime, "unreachable procedure kind");
}

FwerEstimate evaluate_fwer(const ProcedureConfig& proc,
                           const TorusFieldConfig& scenario,
                           Probability alpha, int trials, RngStream stream) {
  if (trials < 1)
    throw_error(ErrorCode::invalid_argument, "evaluate_fwer: trials < 1");
  const auto mu = config_mean(scenario);
  const auto h0 = null_set(mu, proc.side);
  std::vector<char> false_rejection(size_t(trials), 0);
  parallel_for(trials, [&](int t) {
    const auto ts = stream.substream(std::uint64_t(t));
    const auto Y = sample_field(scenario, ts.substream(0));
    const auto res = run_procedure(proc, Y, alpha, ts.substream(1));
    std::vector<int> bad;
    std::set_intersection(res.rejected.begin(), res.rejected.end(),
                          h0.begin(), h0.end(), std::back_inserter(bad));
    false_rejection[size_t(t)] = bad.empty() ? 0 : 1;
  });
  double f = 0.0;
  for (char c : false_rejection) f += c;
  f /= trials;
  return {f, std::sqrt(f * (1.0 - f) / trials)};
}

PowerEstimate evaluate_power(const ProcedureConfig& proc,
                             const TorusFieldConfig& scenario,
                             Probability alpha, int trials,
                             std::optional<int> early_stop,
                             RngStream stream) {
  if (trials < 1)
    throw_error(ErrorCode::invalid_argument, "evaluate_power: trials < 1");
  const auto mu = config_mean(scenario);
  const auto h0 = null_set(mu, proc.side);
  std::vector<int> h1;
  for (int k = 0; k < int(mu.size()); ++k)
    if (!std::binary_search(h0.begin(), h0.end(), k)) h1.push_back(k);
  if (h1.empty())
    throw_error(ErrorCode::invalid_argument,
                "evaluate_power: scenario has no false null");
  std::vector<double> power(size_t(trials), 0.0);
  std::vector<double> iters(size_t(trials), 0.0);
  parallel_for(trials, [&](int t) {
    const auto ts = stream.substream(std::uint64_t(t));
    const auto Y = sample_field(scenario, ts.substream(0));
    const auto res = run_procedure(proc, Y, alpha, ts.substream(1), early_stop);
    power[size_t(t)] = power_of(res.rejected, h1);
    iters[size_t(t)] = res.iterations;
  });
  PowerEstimate out;
  out.power = mean_of(power);
  out.stderr_ = sample_sd(power) / std::sqrt(double(trials));
  out.mean_iterations = mean_of(iters);
  return out;
}

namespace {

Table run_fig1(const ExperimentParams& p) {
  Table table({"b", "method", "mean_threshold", "sd_threshold"});
  const RngStream root(p.seed);
  const int K = p.d * p.d;
  const Aggregator agg =
      Aggregator::two_sided_sup().restricted([&] {
        std::vector<int> h(K);
        std::iota(h.begin(), h.end(), 0);
        return h;
      }());
  const ThresholdMethod methods[] = {
      ThresholdMethod::Bonferroni,   ThresholdMethod::Concentration,
      ThresholdMethod::ConcBonf,     ThresholdMethod::QuantBonf,
      ThresholdMethod::QuantConc,    ThresholdMethod::QuantRaw};

  for (size_t gi = 0; gi < p.b_grid.size(); ++gi) {
    const double b = p.b_grid[gi];
    TorusFieldConfig scenario{p.d, b, p.n, MeanScenario::zero(), p.alpha,
                              Side::TwoSided};
    const auto g = root.substream(gi);
    std::vector<std::vector<double>> values(
        std::size(methods), std::vector<double>(size_t(p.trials)));
    parallel_for(p.trials, [&](int t) {
      const auto ts = g.substream(100 + std::uint64_t(t));
      const auto Y = sample_field(scenario, ts.substream(0));
      const auto eval_stream = ts.substream(1);
      for (size_t mi = 0; mi < std::size(methods); ++mi) {
        const auto spec = sim_threshold_spec(methods[mi], p.B, K);
        values[mi][size_t(t)] =
            threshold(spec, Y, agg, Probability(p.alpha), eval_stream).value;
      }
    });
    for (size_t mi = 0; mi < std::size(methods); ++mi)
      table.add_row({b, threshold_method_name(methods[mi]),
                     mean_of(values[mi]), sample_sd(values[mi])});

    // ideal: empirical (1-alpha)-quantile of sup |Ybar - mu| over an
    // auxiliary batch with known mu
    std::vector<double> sups(size_t(p.ideal_samples));
    parallel_for(p.ideal_samples, [&](int j) {
      const auto Y = sample_field(
          scenario, g.substream(1000000000ull + std::uint64_t(j)));
      const auto m = empirical_mean(Y);
      sups[size_t(j)] = evaluate(agg, m);
    });
    table.add_row({b, std::string("ideal"),
                   quantile_from_stats(sups, p.alpha), 0.0});
    table.add_row({b, std::string("single"),
                   gauss_upper_quantile(Probability(p.alpha / 2.0)) /
                       std::sqrt(double(p.n)),
                   0.0});
  }
  return table;
}

Table run_fig2(const ExperimentParams& p) {
  Table table({"b", "method", "mean_threshold", "sd_threshold", "mean_power",
               "se_power"});
  const RngStream root(p.seed);
  const int K = p.d * p.d;

  std::vector<ProcedureConfig> procs;
  for (const char* name :
       {"holm", "single:bonf", "single:quant-bonf", "sd:quant-bonf",
        "single:quant-uncent", "sd:quant-uncent"}) {
    ProcedureConfig proc = ProcedureConfig::parse(name);
    proc.side = Side::TwoSided;
    proc.sigma = SigmaSource::known(std::vector<double>(size_t(K), 1.0));
    proc.spec = sim_threshold_spec(proc.spec.method, p.B, K);
    proc.B = p.B;
    procs.push_back(proc);
  }

  for (size_t gi = 0; gi < p.b_grid.size(); ++gi) {
    const double b = p.b_grid[gi];
    TorusFieldConfig scenario{p.d, b, p.n,
                              MeanScenario::linear_half(p.linear_amplitude),
                              p.alpha, Side::TwoSided};
    const auto mu = config_mean(scenario);
    const auto h0 = null_set(mu, Side::TwoSided);
    std::vector<int> h1;
    for (int k = 0; k < K; ++k)
      if (!std::binary_search(h0.begin(), h0.end(), k)) h1.push_back(k);
    const auto g = root.substream(gi);

    // ideal testing threshold: (1-alpha)-quantile of sup over H0 of |Ybar|
    const Aggregator agg_h0 = Aggregator::two_sided_sup().restricted(h0);
    std::vector<double> sups(size_t(p.ideal_samples));
    parallel_for(p.ideal_samples, [&](int j) {
      const auto Y = sample_field(
          scenario, g.substream(1000000000ull + std::uint64_t(j)));
      sups[size_t(j)] = evaluate(agg_h0, empirical_mean(Y));
    });
    const double ideal_t = quantile_from_stats(sups, p.alpha);

    const size_t P = procs.size();
    std::vector<std::vector<double>> tvals(P,
                                           std::vector<double>(size_t(p.trials)));
    std::vector<std::vector<double>> pvals(P,
                                           std::vector<double>(size_t(p.trials)));
    std::vector<double> ideal_power(size_t(p.trials));
    parallel_for(p.trials, [&](int t) {
      const auto ts = g.substream(100 + std::uint64_t(t));
      const auto Y = sample_field(scenario, ts.substream(0));
      const auto mean = empirical_mean(Y);
      for (size_t pi = 0; pi < P; ++pi) {
        const auto res = run_procedure(procs[pi], Y, Probability(p.alpha),
                                       ts.substream(1));
        tvals[pi][size_t(t)] = res.thresholds.back();
        pvals[pi][size_t(t)] = power_of(res.rejected, h1);
      }
      std::vector<int> rej_ideal;
      for (int k = 0; k < K; ++k)
        if (std::abs(mean[k]) > ideal_t) rej_ideal.push_back(k);
      ideal_power[size_t(t)] = power_of(rej_ideal, h1);
    });
    for (size_t pi = 0; pi < P; ++pi)
      table.add_row({b, procs[pi].name(), mean_of(tvals[pi]),
                     sample_sd(tvals[pi]), mean_of(pvals[pi]),
                     sample_sd(pvals[pi]) / std::sqrt(double(p.trials))});
    table.add_row({b, std::string("ideal"), ideal_t, 0.0,
                   mean_of(ideal_power),
                   sample_sd(ideal_power) / std::sqrt(double(p.trials))});
  }
  return table;
}

Table run_fig3(const ExperimentParams& p) {
  Table table({"r", "method", "mean_iterations", "power_cap1", "power_cap2",
               "power_cap3", "power_uncapped"});
  const RngStream root(p.seed);
  const int K = p.d * p.d;
  const double b = p.b_fixed < 0.0 ? p.d / 4.0 : p.b_fixed;

  std::vector<ProcedureConfig> procs;
  for (const char* name : {"sd:quant-uncent", "hybrid"}) {
    ProcedureConfig proc = ProcedureConfig::parse(name);
    proc.side = Side::TwoSided;
    proc.sigma = SigmaSource::known(std::vector<double>(size_t(K), 1.0));
    if (proc.kind == ProcedureConfig::Kind::StepDown)
      proc.spec = sim_threshold_spec(proc.spec.method, p.B, K);
    proc.B = p.B;
    procs.push_back(proc);
  }

  for (size_t gi = 0; gi < p.r_grid.size(); ++gi) {
    const double r = p.r_grid[gi];
    TorusFieldConfig scenario{p.d, b, p.n, MeanScenario::exp_decay(r),
                              p.alpha, Side::TwoSided};
    const auto mu = config_mean(scenario);
    const auto h0 = null_set(mu, Side::TwoSided);
    std::vector<int> h1;
    for (int k = 0; k < K; ++k)
      if (!std::binary_search(h0.begin(), h0.end(), k)) h1.push_back(k);
    const auto g = root.substream(gi);

    const size_t P = procs.size();
    std::vector<std::vector<double>> iters(P,
                                           std::vector<double>(size_t(p.trials)));
    std::vector<std::array<std::vector<double>, 4>> powers(P);
    for (auto& per_cap : powers)
      for (auto& v : per_cap) v.assign(size_t(p.trials), 0.0);

    parallel_for(p.trials, [&](int t) {
      const auto ts = g.substream(100 + std::uint64_t(t));
      const auto Y = sample_field(scenario, ts.substream(0));
      for (size_t pi = 0; pi < P; ++pi) {
        // frozen draws make a capped run the prefix of the uncapped one
        const auto res = run_procedure(procs[pi], Y, Probability(p.alpha),
                                       ts.substream(1));
        iters[pi][size_t(t)] = res.iterations;
        for (int cap = 1; cap <= 3; ++cap)
          powers[pi][size_t(cap - 1)][size_t(t)] =
              power_of(rejected_at_cap(res, cap), h1);
        powers[pi][3][size_t(t)] = power_of(res.rejected, h1);
      }
    });
    for (size_t pi = 0; pi < P; ++pi)
      table.add_row({r, procs[pi].name(), mean_of(iters[pi]),
                     mean_of(powers[pi][0]), mean_of(powers[pi][1]),
                     mean_of(powers[pi][2]), mean_of(powers[pi][3])});
  }
  return table;
}

} // namespace

Table run_experiment(const ExperimentParams& params) {
  switch (params.kind) {
    case ExperimentParams::Kind::Fig1: return run_fig1(params);
    case ExperimentParams::Kind::Fig2: return run_fig2(params);
    case ExperimentParams::Kind::Fig3: return run_fig3(params);
  }
  throw_error(ErrorCode::runtime, "unreachable experiment kind");
}

} // namespace rshd
