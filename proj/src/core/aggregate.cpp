#include "aggregate.hpp"

#include <algorithm>
#include <cmath>

namespace rshd {

Aggregator Aggregator::one_sided_sup() { return {AggKind::OneSidedSup}; }
Aggregator Aggregator::two_sided_sup() { return {AggKind::TwoSidedSup}; }

Aggregator Aggregator::lp(double p, bool normalized) {
  if (!(p >= 1.0))
    throw_error(ErrorCode::invalid_argument, "lp aggregator: p < 1");
  Aggregator a;
  a.kind = AggKind::LpNorm;
  a.p = p;
  a.normalized = normalized;
  return a;
}

Aggregator Aggregator::from_side(bool two_sided) {
  return two_sided ? two_sided_sup() : one_sided_sup();
}

Aggregator Aggregator::parse(const std::string& text) {
  if (text == "sup") return two_sided_sup();
  if (text.rfind("lp:", 0) == 0) {
    std::string rest = text.substr(3);
    bool norm = false;
    const auto colon = rest.find(':');
    if (colon != std::string::npos) {
      const std::string tag = rest.substr(colon + 1);
      if (tag != "norm")
        throw_error(ErrorCode::invalid_argument,
                    "bad aggregator suffix '" + tag + "' (expected 'norm')");
      norm = true;
      rest = rest.substr(0, colon);
    }
    double p;
    if (rest == "inf") {
      p = std::numeric_limits<double>::infinity();
    } else {
      try {
        p = std::stod(rest);
      } catch (const std::exception&) {
        throw_error(ErrorCode::invalid_argument,
                    "bad lp exponent '" + rest + "'");
      }
    }
    return lp(p, norm);
  }
  throw_error(ErrorCode::invalid_argument, "unknown aggregator '" + text +
                                               "' (expected sup or lp:<p>)");
}

Aggregator Aggregator::restricted(std::vector<int> coords) const {
  Aggregator a = *this;
  std::sort(coords.begin(), coords.end());
  a.subset = std::move(coords);
  return a;
}

Aggregator Aggregator::conjugate() const {
  Aggregator a = *this;
  if (kind == AggKind::OneSidedSup) a.kind = AggKind::TwoSidedSup;
  return a; // |.| and lp norms are symmetric already
}

double evaluate(const Aggregator& agg, std::span<const double> x) {
  const auto value_at = [&](int k) { return x[static_cast<size_t>(k)]; };
  std::span<const int> coords;
  std::vector<int> all;
  if (agg.subset) {
    if (agg.subset->empty()) return kEmptySetValue;
    coords = *agg.subset;
  } else {
    all.resize(x.size());
    for (size_t i = 0; i < x.size(); ++i) all[i] = static_cast<int>(i);
    coords = all;
  }

  switch (agg.kind) {
    case AggKind::OneSidedSup: {
      double best = 0.0; // sup of positive parts is never below 0
      for (int k : coords) best = std::max(best, value_at(k));
      return best;
    }
    case AggKind::TwoSidedSup: {
      double best = 0.0;
      for (int k : coords) best = std::max(best, std::abs(value_at(k)));
      return best;
    }
    case AggKind::LpNorm: {
      if (std::isinf(agg.p)) {
        double best = 0.0;
        for (int k : coords) best = std::max(best, std::abs(value_at(k)));
        return best;
      }
      double sum = 0.0;
      for (int k : coords) sum += std::pow(std::abs(value_at(k)), agg.p);
      if (agg.normalized) sum /= static_cast<double>(coords.size());
      return std::pow(sum, 1.0 / agg.p);
    }
  }
  return 0.0; // unreachable
}

} // namespace rshd
