#ifndef RSHD_THRESHOLDS_HPP
#define RSHD_THRESHOLDS_HPP

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "resample.hpp"

namespace rshd {

enum class ThresholdMethod {
  Bonferroni,      // per-coordinate union bound
  Concentration,   // resampled expectation + Gaussian concentration
  ConcBonf,        // compound: near-min of the two above
  QuantRaw,        // raw centered quantile (no proven level)
  QuantBonf,       // centered quantile + gamma * Bonferroni remainder
  QuantConc,       // centered quantile + gamma * concentration remainder
  QuantUncentered, // uncentered quantile (two-sided testing only)
  BoundedSymmetric,// bounded symmetric data, expectation / A_W route
  IteratedQuant    // iterated quantile corrections
};

enum class Side { OneSided, TwoSided };

ThresholdMethod parse_threshold_method(const std::string& text);
std::string threshold_method_name(ThresholdMethod m);

// Everything a threshold evaluation needs besides (Y, C, alpha). Defaults
// follow the simulation conventions: delta = 0.1, alpha0 = 0.9 alpha,
// B = 1000 Monte Carlo draws, certified B_W lower bound in denominators,
// Monte Carlo corrections off.
struct ThresholdSpec {
  ThresholdMethod method = ThresholdMethod::ConcBonf;
  Side side = Side::TwoSided;
  WeightScheme scheme = WeightScheme::rademacher();
  SigmaSource sigma = SigmaSource::estimated();
  int mc_draws = 1000;       // B
  double delta = 0.1;        // ConcBonf / Quant+ level split
  double alpha0_frac = 0.9;  // alpha0 = alpha0_frac * alpha
  double bound_m = 0.0;      // M for BoundedSymmetric (> 0)
  std::vector<double> iter_alphas; // IteratedQuant levels; empty = {alpha0}
  std::shared_ptr<const ThresholdSpec> terminal; // IteratedQuant f; null = Bonferroni
  bool exhaustive = false;   // 2^n sign enumeration instead of Monte Carlo
  bool strict_mc = false;    // add the Monte Carlo correction terms
  double strict_beta_frac = 0.1; // share of the level spent on the MC slack
  bool use_b_mc = false;     // MC estimate of B_W instead of certified bound
  int b_mc_draws = 100000;
  bool allow_unproven = false; // let QuantRaw act as a region/test threshold
};

struct ThresholdResult {
  double value = 0.0;
  std::vector<std::pair<std::string, double>> components;

  double component(const std::string& name) const;
};

// Evaluates the threshold for phi restricted to the aggregator's subset.
// An empty subset returns the +inf sentinel (nothing ever rejects against
// it). Repeated calls with the same stream are bit-identical.
ThresholdResult threshold(const ThresholdSpec& spec, const DataMatrix& Y,
                          const Aggregator& agg, Probability alpha,
                          RngStream stream);

struct ConfidenceRegion {
  std::vector<double> center;
  double radius = 0.0;
  Aggregator agg;

  bool contains(std::span<const double> x) const;
};

// Region {x | phi(Ybar - x) <= radius} at level 1 - alpha. Only methods
// with a proven coverage guarantee are accepted; QuantRaw requires the
// explicit allow_unproven flag and QuantUncentered is never a region.
ConfidenceRegion confidence_region(const DataMatrix& Y, const Aggregator& agg,
                                   const ThresholdSpec& spec,
                                   Probability alpha, RngStream stream);

// Lower bound on phi(Ybar - mu) for bounded symmetric data and schemes with
// |W_i - x0| = a a.s.:  E_W[phi]/D_W - (M/sqrt(n)) sqrt(1 + A^2/D^2)
// sqrt(2 log(1/alpha)).
double lower_deviation_threshold(const DataMatrix& Y, const Aggregator& agg,
                                 const WeightScheme& scheme, double M,
                                 Probability alpha, int B, RngStream stream);

inline double bracket_value(double x, Side side) {
  return side == Side::TwoSided ? std::abs(x) : std::max(x, 0.0);
}

Side side_for(const Aggregator& agg);

} // namespace rshd

#endif
