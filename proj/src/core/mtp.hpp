#ifndef RSHD_MTP_HPP
#define RSHD_MTP_HPP

#include <optional>
#include <vector>

#include "thresholds.hpp"

namespace rshd {

// Rejections plus the full step-down trajectory. survivor_sets[j] is C_j
// (survivor_sets[0] the starting set); thresholds[j] is the threshold
// evaluated on C_j; iterations = number of threshold evaluations, i.e. the
// stopping index min{j >= 1 | C_j = C_{j-1}} (early termination when C_j
// empties). rejected = start set minus the final survivor set.
struct StepDownResult {
  std::vector<int> rejected;
  std::vector<std::vector<int>> survivor_sets;
  std::vector<double> thresholds;
  int iterations = 0;

  const std::vector<int>& final_set() const { return survivor_sets.back(); }
  // survivors after at most `evals` threshold evaluations (early stopping)
  const std::vector<int>& survivors_after(int evals) const {
    const int j = std::min<int>(evals, iterations);
    return survivor_sets[size_t(j)];
  }
};

// Thrown when the safety cap is hit before the fixed point (cannot happen
// with the default cap K+1); carries the partial trajectory.
class StepDownOverflow : public Error {
public:
  StepDownOverflow(std::string what, StepDownResult partial)
      : Error(ErrorCode::runtime, std::move(what)),
        partial_(std::move(partial)) {}
  const StepDownResult& partial() const { return partial_; }

private:
  StepDownResult partial_;
};

// {k | [[Ybar_k]] > t_alpha(Y, H)}, the single-step procedure.
std::vector<int> single_step(const DataMatrix& Y, const ThresholdSpec& spec,
                             Probability alpha, RngStream stream);

// Def-3.1 iteration until the fixed point. The same stream feeds every
// iteration, so the realized threshold family is evaluated with frozen
// weight draws. early_stop caps the number of threshold evaluations.
StepDownResult step_down(const DataMatrix& Y, const ThresholdSpec& spec,
                         Probability alpha, int max_iter, RngStream stream,
                         std::optional<int> early_stop = std::nullopt);

// Step-down with the Bonferroni threshold: Holm's procedure. Deterministic.
StepDownResult holm(const DataMatrix& Y, Probability alpha, Side side,
                    const SigmaSource& sigma);

// Two-sided hybrid: one quant+Bonferroni single step at level alpha, then
// an uncentered-quantile step-down at level alpha0 on the survivors. The
// first step counts as one iteration.
StepDownResult hybrid(const DataMatrix& Y, Probability alpha, double alpha0,
                      double delta, int B, RngStream stream,
                      const SigmaSource& sigma = SigmaSource::estimated(),
                      std::optional<int> early_stop = std::nullopt);

} // namespace rshd

#endif
