#ifndef RSHD_WEIGHTS_HPP
#define RSHD_WEIGHTS_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

namespace rshd {

enum class SchemeKind {
  Rademacher,
  Efron,        // Efron(q); q = n is the standard bootstrap
  Bernoulli,    // Bernoulli(p)
  Poisson,      // Poisson(mu)
  RandomHoldOut,// rho(q)
  LeaveOneOut,  // rho(n-1)
  VFoldCV       // regular V-fold, V divides n
};

// A resampling weight law together with its parameter. Built through the
// factories so parameter ranges are checked once.
struct WeightScheme {
  SchemeKind kind = SchemeKind::Rademacher;
  int q = 0;       // Efron, RandomHoldOut
  double p = 0.0;  // Bernoulli
  double mu = 0.0; // Poisson
  int v = 0;       // VFoldCV

  static WeightScheme rademacher();
  static WeightScheme efron();        // q chosen as n at draw time
  static WeightScheme efron(int q);
  static WeightScheme bernoulli(double p);
  static WeightScheme poisson(double mu);
  static WeightScheme random_hold_out(int q);
  static WeightScheme leave_one_out();
  static WeightScheme vfold(int v);

  // Parses "rademacher", "efron", "efron:q", "bernoulli:p", "poisson:mu",
  // "rho:q", "loo", "vfold:V" (the CLI spelling).
  static WeightScheme parse(const std::string& text);

  std::string name() const;
  void validate(int n) const; // throws invalid_argument on a bad (scheme, n)

  int effective_q(int n) const; // Efron/rho q, with Efron() defaulting to n
};

struct MeanStderr {
  double value = 0.0;
  double stderr_ = 0.0;
};

// The four constants of a weight law. b_w_lower is certified (exact closed
// form where one exists, otherwise A_W, which always lower-bounds B_W);
// dividing by anything larger would void the nonasymptotic guarantees.
// d_w is stored as a certified upper value where only a bracket is known
// (Rademacher, Bernoulli), and is absent for schemes that do not satisfy
// |W_i - x0| = a a.s.
struct ResamplingConstants {
  double a_w = 0.0;
  std::optional<double> a_w_stderr; // set when A_W itself is an MC estimate
  double b_w_lower = 0.0;
  std::optional<MeanStderr> b_w_mc;
  double c_w = 0.0;
  std::optional<double> d_w;
  std::optional<std::pair<double, double>> x0_a; // (x0, a) when defined
};

// One weight vector of length n distributed per the scheme.
std::vector<double> draw_weights(const WeightScheme& scheme, int n,
                                 RngStream stream);

// Same, advancing a caller-owned engine (for Monte Carlo loops).
std::vector<double> draw_weights_with(const WeightScheme& scheme, int n,
                                      std::mt19937_64& eng);

// Closed forms wherever the tables give them; Monte Carlo B_W estimate
// (value, stderr) over mc_draws when requested (mc_draws >= 1000).
ResamplingConstants constants(const WeightScheme& scheme, int n,
                              std::optional<int> mc_draws, RngStream stream);

struct SchemeIndices {
  double accuracy = 0.0;   // C_W / B_W with the certified lower bound for B
  double complexity = 0.0; // |supp D(W)|; +inf for unbounded support
};

SchemeIndices scheme_indices(const WeightScheme& scheme, int n,
                             const ResamplingConstants& cst);
SchemeIndices scheme_indices(const WeightScheme& scheme, int n);

} // namespace rshd

#endif
