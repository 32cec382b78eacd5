#ifndef RSHD_EXPERIMENTS_HPP
#define RSHD_EXPERIMENTS_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "mtp.hpp"
#include "simfield.hpp"
#include "table.hpp"

namespace rshd {

inline constexpr std::uint64_t kDefaultSeed = 12345;

// A multiple-testing procedure as run by the evaluation harness and the
// CLI `test` subcommand.
struct ProcedureConfig {
  enum class Kind { Holm, SingleStep, StepDown, Hybrid };
  Kind kind = Kind::Holm;
  ThresholdSpec spec;     // SingleStep / StepDown
  Side side = Side::TwoSided;
  SigmaSource sigma = SigmaSource::estimated();
  double hybrid_alpha0_frac = 0.9;
  double hybrid_delta = 0.1;
  int B = 1000;

  // "holm" | "single:<method>" | "sd:<method>" | "hybrid"
  static ProcedureConfig parse(const std::string& text);
  std::string name() const;
};

StepDownResult run_procedure(const ProcedureConfig& proc, const DataMatrix& Y,
                             Probability alpha, RngStream stream,
                             std::optional<int> early_stop = std::nullopt);

struct FwerEstimate {
  double fwer = 0.0;
  double stderr_ = 0.0;
};

// Fraction of trials with at least one true null rejected; trials get
// substreams derived from (stream, trial index) and run in parallel, so
// the estimate is independent of the worker count.
FwerEstimate evaluate_fwer(const ProcedureConfig& proc,
                           const TorusFieldConfig& scenario,
                           Probability alpha, int trials, RngStream stream);

struct PowerEstimate {
  double power = 0.0; // mean proportion of false nulls rejected
  double stderr_ = 0.0;
  double mean_iterations = 0.0;
};

PowerEstimate evaluate_power(const ProcedureConfig& proc,
                             const TorusFieldConfig& scenario,
                             Probability alpha, int trials,
                             std::optional<int> early_stop, RngStream stream);

struct ExperimentParams {
  enum class Kind { Fig1, Fig2, Fig3 };
  Kind kind = Kind::Fig1;
  int d = 16;
  int n = 100;
  int trials = 200;
  int B = 500;
  double alpha = 0.05;
  std::vector<double> b_grid = {0.0, 2.0, 4.0, 6.0}; // fig1/fig2
  std::vector<double> r_grid = {0.0, 10.0, 20.0};    // fig3
  double b_fixed = -1.0; // fig3 bandwidth; < 0 picks d/4
  double linear_amplitude = 20.0;
  int ideal_samples = 1000;
  std::uint64_t seed = kDefaultSeed;

  bool paper_scale() const { return d >= 128 || n >= 1000 || trials >= 250; }
};

// Result tables:
//   Fig1: (b, method, mean_threshold, sd_threshold)
//   Fig2: (b, method, mean_threshold, sd_threshold, mean_power, se_power)
//   Fig3: (r, method, mean_iterations, power_cap1..power_cap3,
//          power_uncapped)
Table run_experiment(const ExperimentParams& params);

} // namespace rshd

#endif
