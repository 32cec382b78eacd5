#ifndef RSHD_SIMFIELD_HPP
#define RSHD_SIMFIELD_HPP

#include <vector>

#include "resample.hpp"
#include "thresholds.hpp"

namespace rshd {

// True-mean scenarios of the torus experiments, in units of the Bonferroni
// threshold over the full hypothesis set with sigma = 1 known.
struct MeanScenario {
  enum class Kind { Zero, LinearHalf, ExpDecay };
  Kind kind = Kind::Zero;
  double amplitude = 20.0; // LinearHalf peak, in Bonferroni units
  double r_db = 0.0;       // ExpDecay dynamic range in dB

  static MeanScenario zero() { return {}; }
  static MeanScenario linear_half(double amplitude = 20.0) {
    return {Kind::LinearHalf, amplitude, 0.0};
  }
  static MeanScenario exp_decay(double r_db) {
    return {Kind::ExpDecay, 20.0, r_db};
  }
};

struct TorusFieldConfig {
  int d = 16;      // side length, K = d^2
  double b = 0.0;  // filter bandwidth in pixels (0 = white noise)
  int n = 30;      // observations
  MeanScenario mean;
  double alpha = 0.05;        // reference level for the scenario unit
  Side side = Side::TwoSided; // sidedness of the reference Bonferroni
};

// Pseudo-Gaussian filter F_b(t) = C_b exp(-dist(0,t)^2 / b^2) on the d x d
// flat torus, normalized so sum F^2 = 1. b = 0 degenerates to the
// Kronecker delta.
std::vector<double> filter_kernel(int d, double b);

// Scenario mean vector on the d x d grid, linear index k = i + d*j.
// Half-splits need even d.
std::vector<double> mean_scenario_vector(const MeanScenario& scenario, int d,
                                         int n, double alpha, Side side);

// n independent columns mu + (white noise conv F_b); each coordinate has
// variance exactly 1 by the kernel normalization.
DataMatrix sample_field(const TorusFieldConfig& config, RngStream stream);

// mu of a config (the vector sample_field adds).
std::vector<double> config_mean(const TorusFieldConfig& config);

} // namespace rshd

#endif
