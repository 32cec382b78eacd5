#ifndef RSHD_AGGREGATE_HPP
#define RSHD_AGGREGATE_HPP

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace rshd {

enum class AggKind {
  OneSidedSup, // sup_k (x_k)_+
  TwoSidedSup, // sup_k |x_k|
  LpNorm       // (sum |x_k|^p)^(1/p), optionally size-normalized
};

// The function phi restricted to a coordinate subset. An empty engaged
// subset means "no coordinates": evaluate yields the -inf sentinel and the
// threshold layer never compares against it.
struct Aggregator {
  AggKind kind = AggKind::TwoSidedSup;
  double p = 2.0;                  // LpNorm only; p in [1, inf]
  bool normalized = false;         // LpNorm only
  std::optional<std::vector<int>> subset; // nullopt = all coordinates

  static Aggregator one_sided_sup();
  static Aggregator two_sided_sup();
  static Aggregator lp(double p, bool normalized = false);
  static Aggregator from_side(bool two_sided); // testing brackets [[.]]

  // Parses the CLI spelling: "sup", "lp:<p>", "lp:<p>:norm" (p may be "inf").
  static Aggregator parse(const std::string& text);

  Aggregator restricted(std::vector<int> coords) const;
  Aggregator conjugate() const; // phi~(x) = max(phi(x), phi(-x))

  bool subset_empty() const { return subset && subset->empty(); }
  int subset_size(int K) const {
    return subset ? static_cast<int>(subset->size()) : K;
  }
};

double evaluate(const Aggregator& agg, std::span<const double> x);

inline constexpr double kEmptySetValue =
    -std::numeric_limits<double>::infinity();

} // namespace rshd

#endif
