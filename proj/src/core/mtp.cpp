#include "mtp.hpp"

#include <algorithm>
#include <numeric>

namespace rshd {

namespace {

std::vector<int> all_coordinates(int K) {
  std::vector<int> h(K);
  std::iota(h.begin(), h.end(), 0);
  return h;
}

std::vector<int> set_difference_sorted(const std::vector<int>& a,
                                       const std::vector<int>& b) {
  std::vector<int> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

// one step-down run starting from `start`, appending to an existing
// trajectory (used by hybrid to continue after its first step)
void step_down_into(StepDownResult& res, const DataMatrix& Y,
                    const ThresholdSpec& spec, Probability alpha,
                    std::vector<int> start, int max_iter, RngStream stream,
                    std::optional<int> early_stop) {
  if (max_iter < 1)
    throw_error(ErrorCode::invalid_argument, "step_down: max_iter < 1");
  const auto mean = empirical_mean(Y);
  const Aggregator base = Aggregator::from_side(spec.side == Side::TwoSided);
  if (res.survivor_sets.empty()) res.survivor_sets.push_back(start);

  std::vector<int> current = std::move(start);
  int local_evals = 0;
  while (true) {
    if (early_stop && local_evals >= *early_stop) break;
    if (local_evals >= max_iter) {
      res.rejected =
          set_difference_sorted(res.survivor_sets.front(), current);
      throw StepDownOverflow(
          "step-down hit the iteration cap before reaching a fixed point",
          res);
    }
    const auto t = threshold(spec, Y, base.restricted(current), alpha,
                             stream);
    res.thresholds.push_back(t.value);
    ++local_evals;
    ++res.iterations;
    std::vector<int> next;
    next.reserve(current.size());
    for (int k : current)
      if (!(bracket_value(mean[k], spec.side) > t.value)) next.push_back(k);
    const bool fixed = next == current;
    res.survivor_sets.push_back(std::move(next));
    if (fixed || res.survivor_sets.back().empty()) break;
    current = res.survivor_sets.back();
  }
}

} // namespace

std::vector<int> single_step(const DataMatrix& Y, const ThresholdSpec& spec,
                             Probability alpha, RngStream stream) {
  const auto mean = empirical_mean(Y);
  const Aggregator agg = Aggregator::from_side(spec.side == Side::TwoSided)
                             .restricted(all_coordinates(Y.rows()));
  const auto t = threshold(spec, Y, agg, alpha, stream);
  std::vector<int> rejected;
  for (int k = 0; k < Y.rows(); ++k)
    if (bracket_value(mean[k], spec.side) > t.value) rejected.push_back(k);
  return rejected;
}

StepDownResult step_down(const DataMatrix& Y, const ThresholdSpec& spec,
                         Probability alpha, int max_iter, RngStream stream,
                         std::optional<int> early_stop) {
  StepDownResult res;
  step_down_into(res, Y, spec, alpha, all_coordinates(Y.rows()), max_iter,
                 stream, early_stop);
  res.rejected =
      set_difference_sorted(res.survivor_sets.front(), res.final_set());
  return res;
}

StepDownResult holm(const DataMatrix& Y, Probability alpha, Side side,
                    const SigmaSource& sigma) {
  ThresholdSpec spec;
  spec.method = ThresholdMethod::Bonferroni;
  spec.side = side;
  spec.sigma = sigma;
  return step_down(Y, spec, alpha, Y.rows() + 1, RngStream(0));
}

StepDownResult hybrid(const DataMatrix& Y, Probability alpha, double alpha0,
                      double delta, int B, RngStream stream,
                      const SigmaSource& sigma,
                      std::optional<int> early_stop) {
  if (!(alpha0 > 0.0 && alpha0 < alpha.value()))
    throw_error(ErrorCode::invalid_argument,
                "hybrid: alpha0 must lie in (0, alpha)");
  if (early_stop && *early_stop < 1)
    throw_error(ErrorCode::invalid_argument, "hybrid: early_stop < 1");

  ThresholdSpec stage1;
  stage1.method = ThresholdMethod::QuantBonf;
  stage1.side = Side::TwoSided;
  stage1.sigma = sigma;
  stage1.mc_draws = B;
  stage1.delta = delta;
  stage1.alpha0_frac = alpha0 / alpha.value();

  const auto mean = empirical_mean(Y);
  const auto H = all_coordinates(Y.rows());
  const Aggregator agg = Aggregator::from_side(true).restricted(H);
  const auto t1 = threshold(stage1, Y, agg, alpha, stream.substream(0));

  StepDownResult res;
  res.survivor_sets.push_back(H);
  res.thresholds.push_back(t1.value);
  res.iterations = 1;
  std::vector<int> survivors;
  for (int k : H)
    if (!(std::abs(mean[k]) > t1.value)) survivors.push_back(k);
  res.survivor_sets.push_back(survivors);
  if (survivors.empty() || (early_stop && *early_stop == 1)) {
    res.rejected = set_difference_sorted(H, survivors);
    return res; // everything rejected in one step, or capped there
  }

  ThresholdSpec stage2;
  stage2.method = ThresholdMethod::QuantUncentered;
  stage2.side = Side::TwoSided;
  stage2.mc_draws = B;
  std::optional<int> stage2_cap;
  if (early_stop) stage2_cap = *early_stop - 1;
  step_down_into(res, Y, stage2, Probability(alpha0), survivors,
                 Y.rows() + 1, stream.substream(1), stage2_cap);
  res.rejected = set_difference_sorted(H, res.final_set());
  return res;
}

} // namespace rshd
