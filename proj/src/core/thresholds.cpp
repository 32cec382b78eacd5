#include "thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "numerics.hpp"

namespace rshd {

namespace {

// Fixed substream tags, so that one evaluation with one stream is
// reproducible piece by piece: 0 = quantile sign draws, 1 = expectation
// weight draws, 2 = remainder/terminal evaluation, 93 = constants MC.
constexpr std::uint64_t kTagSigns = 0;
constexpr std::uint64_t kTagExpectation = 1;
constexpr std::uint64_t kTagTerminal = 2;
constexpr std::uint64_t kTagConstants = 93;

// a.s. range of W_1 - Wbar, where bounded; drives the Monte Carlo slack.
// For Rademacher weights the stated usable width is c2 - c1 = 2.
std::optional<std::pair<double, double>> weight_range(const WeightScheme& s,
                                                      int n) {
  const double dn = n;
  switch (s.kind) {
    case SchemeKind::Rademacher: return {{-1.0, 1.0}};
    case SchemeKind::Bernoulli: {
      const double half_width = (1.0 - 1.0 / dn) / s.p;
      return {{-half_width, half_width}};
    }
    case SchemeKind::RandomHoldOut:
      return {{-1.0, dn / s.q - 1.0}};
    case SchemeKind::LeaveOneOut:
      return {{-1.0, 1.0 / (dn - 1.0)}};
    case SchemeKind::VFoldCV:
      return {{-1.0, 1.0 / (s.v - 1.0)}};
    case SchemeKind::Efron:
      return {{-1.0, dn - 1.0}};
    case SchemeKind::Poisson: return std::nullopt;
  }
  return std::nullopt;
}

struct Ctx {
  const ThresholdSpec& spec;
  const DataMatrix& Y;
  RngStream stream;
  std::optional<ResamplingConstants> cst_cache;

  Ctx(const ThresholdSpec& s, const DataMatrix& y, RngStream st)
      : spec(s), Y(y), stream(st) {}

  const ResamplingConstants& cst() {
    if (!cst_cache)
      cst_cache = constants(spec.scheme, Y.cols(),
                            spec.use_b_mc ? std::optional<int>(spec.b_mc_draws)
                                          : std::nullopt,
                            stream.substream(kTagConstants));
    return *cst_cache;
  }

  double b_denominator() {
    const auto& c = cst();
    if (spec.use_b_mc && c.b_w_mc) return c.b_w_mc->value;
    return c.b_w_lower;
  }

  McMode mode() const {
    return spec.exhaustive ? McMode::ExhaustiveSigns : McMode::Sampled;
  }
};

using Components = std::vector<std::pair<std::string, double>>;

double inv_tail(double p) { return gauss_upper_quantile(Probability(p)); }

// Resampled expectation term with the optional Prop-2.7 slack. Returns the
// value to put in the numerator plus the level left for the rest of the
// threshold (the slack consumes a beta = strict_beta_frac * level share).
struct ExpTerm {
  double value = 0.0;
  double level_remaining = 0.0;
  double slack = 0.0;
};

ExpTerm expectation_term(Ctx& ctx, const Aggregator& agg, double level) {
  ExpTerm out;
  const auto e =
      resampled_expectation(ctx.Y, agg, ctx.spec.scheme, ctx.spec.mc_draws,
                            ctx.stream.substream(kTagExpectation), ctx.mode());
  out.value = e.raw;
  out.level_remaining = level;
  if (ctx.spec.strict_mc && ctx.mode() == McMode::Sampled) {
    const auto range = weight_range(ctx.spec.scheme, ctx.Y.cols());
    if (!range)
      throw_error(ErrorCode::unsupported,
                  "strict Monte Carlo correction needs a.s. bounded weights; "
                  "none available for " + ctx.spec.scheme.name());
    const double beta = ctx.spec.strict_beta_frac * level;
    out.slack = mc_expectation_correction(ctx.Y, agg, range->first,
                                          range->second, ctx.spec.mc_draws,
                                          Probability(beta));
    out.value += out.slack;
    out.level_remaining = level - beta;
  }
  return out;
}

ThresholdResult eval_bonferroni(Ctx& ctx, const Aggregator& agg,
                                double level) {
  const auto sn = resolve_sigma_norm(ctx.Y, agg, ctx.spec.sigma, level);
  const int m = agg.subset_size(ctx.Y.rows());
  const int c = side_for(agg) == Side::TwoSided ? 2 : 1;
  const double q = inv_tail(sn.alpha_effective / (c * m));
  ThresholdResult out;
  out.value = sn.norm * q / std::sqrt(double(ctx.Y.cols()));
  out.components = {{"sigma_norm", sn.norm},
                    {"gauss_quantile", q},
                    {"card", double(m)}};
  return out;
}

ThresholdResult eval_concentration(Ctx& ctx, const Aggregator& agg,
                                   double level) {
  const auto sn = resolve_sigma_norm(ctx.Y, agg, ctx.spec.sigma, level);
  const auto e = expectation_term(ctx, agg, sn.alpha_effective);
  const double b = ctx.b_denominator();
  const double n = ctx.Y.cols();
  const double main = e.value / b;
  const double dev = sn.norm * inv_tail(e.level_remaining / 2.0) *
                     (ctx.cst().c_w / (n * b) + 1.0 / std::sqrt(n));
  ThresholdResult out;
  out.value = main + dev;
  out.components = {{"expectation", main},
                    {"deviation", dev},
                    {"sigma_norm", sn.norm},
                    {"mc_slack", e.slack / b}};
  return out;
}

ThresholdResult eval_conc_bonf(Ctx& ctx, const Aggregator& agg,
                               double level) {
  const auto sn = resolve_sigma_norm(ctx.Y, agg, ctx.spec.sigma, level);
  const auto e = expectation_term(ctx, agg, sn.alpha_effective);
  const double a = e.level_remaining;
  const double delta = ctx.spec.delta;
  const double b = ctx.b_denominator();
  const double n = ctx.Y.cols();
  const int m = agg.subset_size(ctx.Y.rows());
  const int c = side_for(agg) == Side::TwoSided ? 2 : 1;

  const double branch_bonf =
      sn.norm * inv_tail(a * (1.0 - delta) / (c * m)) / std::sqrt(n);
  const double branch_conc =
      e.value / b + sn.norm * inv_tail(a * (1.0 - delta) / 2.0) / std::sqrt(n) +
      sn.norm * ctx.cst().c_w * inv_tail(a * delta / 2.0) / (n * b);

  ThresholdResult out;
  out.value = std::min(branch_bonf, branch_conc);
  out.components = {{"bonferroni_branch", branch_bonf},
                    {"concentration_branch", branch_conc},
                    {"sigma_norm", sn.norm},
                    {"mc_slack", e.slack / b}};
  return out;
}

ThresholdResult eval_quant_raw(Ctx& ctx, const Aggregator& agg, double level,
                               bool centered) {
  if (!centered && side_for(agg) != Side::TwoSided)
    throw_error(ErrorCode::unsupported,
                "the uncentered quantile threshold has a guarantee in the "
                "two-sided setting only");
  const Aggregator aggs[1] = {agg};
  const DataMatrix data = centered ? ctx.Y.centered_copy() : ctx.Y;
  const auto st =
      rademacher_sign_stats(data, aggs, ctx.spec.mc_draws,
                            ctx.stream.substream(kTagSigns), ctx.mode());
  ThresholdResult out;
  out.value = quantile_from_stats(st.stats[0], level);
  out.components = {{"quantile", out.value}, {"level", level}};
  return out;
}

ThresholdSpec default_terminal(const ThresholdSpec& spec) {
  ThresholdSpec t = spec;
  t.method = ThresholdMethod::Bonferroni;
  t.terminal.reset();
  t.iter_alphas.clear();
  return t;
}

ThresholdResult eval_iterated_quant(Ctx& ctx, const Aggregator& agg,
                                    double alpha) {
  const ThresholdSpec& spec = ctx.spec;
  std::vector<double> alphas = spec.iter_alphas;
  if (alphas.empty()) alphas.push_back(spec.alpha0_frac * alpha);
  const size_t J = alphas.size();
  double alpha_sum = 0.0;
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0))
      throw_error(ErrorCode::invalid_argument,
                  "iterated quantile: level outside (0,1)");
    alpha_sum += a;
  }
  if (!(alpha_sum < alpha))
    throw_error(ErrorCode::invalid_argument,
                "iterated quantile: sum of levels must stay below alpha");
  const bool strict = spec.strict_mc && ctx.mode() == McMode::Sampled;
  if (strict && J > 1)
    throw_error(ErrorCode::unsupported,
                "Monte Carlo-corrected form exists for a single quantile "
                "stage only (J = 1)");
  if (strict) {
    // pin alpha0 to a multiple of 1/(B+1): the empirical-quantile level
    // then costs nothing extra
    const double unit = 1.0 / (spec.mc_draws + 1.0);
    const double snapped = std::floor(alphas[0] / unit) * unit;
    if (!(snapped > 0.0))
      throw_error(ErrorCode::invalid_argument,
                  "strict mode: B too small to represent alpha0");
    alphas[0] = snapped;
    alpha_sum = snapped;
  }

  const Aggregator conj = agg.conjugate();
  const Aggregator aggs[2] = {agg, conj};
  const DataMatrix centered = ctx.Y.centered_copy();
  const auto st =
      rademacher_sign_stats(centered, aggs, spec.mc_draws,
                            ctx.stream.substream(kTagSigns), ctx.mode());

  const double q_main =
      quantile_from_stats(st.stats[0], alphas[0] * (1.0 - spec.delta));
  std::vector<double> gammas =
      gammak_sequence(ctx.Y.cols(), alphas, spec.delta);
  if (strict)
    gammas[0] = empirical_gamma(st.wbar_abs,
                                Probability(alphas[0] * spec.delta));

  double value = q_main;
  Components comps = {{"quantile_main", q_main}};
  for (size_t i = 1; i < J; ++i) {
    const double qi =
        quantile_from_stats(st.stats[1], alphas[i] * (1.0 - spec.delta));
    value += gammas[i - 1] * qi;
    comps.emplace_back("quantile_" + std::to_string(i), qi);
    comps.emplace_back("gamma_" + std::to_string(i), gammas[i - 1]);
  }

  const double level_f = alpha - alpha_sum;
  ThresholdSpec term =
      spec.terminal ? *spec.terminal : default_terminal(spec);
  term.side = Side::TwoSided; // the remainder bounds the conjugate phi~
  const auto f = threshold(term, ctx.Y, conj, Probability(level_f),
                           ctx.stream.substream(kTagTerminal));
  value += gammas.back() * f.value;
  comps.emplace_back("gamma_terminal", gammas.back());
  comps.emplace_back("terminal", f.value);
  comps.emplace_back("alpha0", alphas[0]);

  ThresholdResult out;
  out.value = value;
  out.components = std::move(comps);
  return out;
}

// quant+bonf / quant+conc are the J = 1 iterated form with the matching
// terminal, so all three share one code path.
ThresholdResult eval_quant_plus(Ctx& ctx, const Aggregator& agg, double alpha,
                                ThresholdMethod remainder) {
  ThresholdSpec iter = ctx.spec;
  iter.method = ThresholdMethod::IteratedQuant;
  iter.iter_alphas.clear();
  auto term = std::make_shared<ThresholdSpec>(ctx.spec);
  term->method = remainder == ThresholdMethod::QuantBonf
                     ? ThresholdMethod::Bonferroni
                     : ThresholdMethod::Concentration;
  term->terminal.reset();
  term->iter_alphas.clear();
  iter.terminal = std::move(term);
  Ctx sub(iter, ctx.Y, ctx.stream);
  return eval_iterated_quant(sub, agg, alpha);
}

ThresholdResult eval_bounded_symmetric(Ctx& ctx, const Aggregator& agg,
                                       double alpha) {
  if (!(ctx.spec.bound_m > 0.0))
    throw_error(ErrorCode::invalid_argument,
                "bounded-symmetric threshold needs M > 0");
  const auto e = expectation_term(ctx, agg, alpha);
  const double a_w = ctx.cst().a_w;
  if (!(a_w > 0.0))
    throw_error(ErrorCode::invalid_argument,
                "A_W must be positive for the bounded-symmetric threshold");
  const double n = ctx.Y.cols();
  const double main = e.value / a_w;
  const double dev = 2.0 * ctx.spec.bound_m / std::sqrt(n) *
                     std::sqrt(std::log(1.0 / e.level_remaining));
  ThresholdResult out;
  out.value = main + dev;
  out.components = {{"expectation", main},
                    {"deviation", dev},
                    {"mc_slack", e.slack / a_w}};
  return out;
}

} // namespace

Side side_for(const Aggregator& agg) {
  return agg.kind == AggKind::OneSidedSup ? Side::OneSided : Side::TwoSided;
}

ThresholdMethod parse_threshold_method(const std::string& text) {
  if (text == "bonf") return ThresholdMethod::Bonferroni;
  if (text == "conc") return ThresholdMethod::Concentration;
  if (text == "conc-bonf") return ThresholdMethod::ConcBonf;
  if (text == "quant-raw") return ThresholdMethod::QuantRaw;
  if (text == "quant-bonf") return ThresholdMethod::QuantBonf;
  if (text == "quant-conc") return ThresholdMethod::QuantConc;
  if (text == "quant-uncent") return ThresholdMethod::QuantUncentered;
  if (text == "iter-quant") return ThresholdMethod::IteratedQuant;
  if (text == "bounded") return ThresholdMethod::BoundedSymmetric;
  throw_error(ErrorCode::invalid_argument,
              "unknown threshold method '" + text + "'");
}

std::string threshold_method_name(ThresholdMethod m) {
  switch (m) {
    case ThresholdMethod::Bonferroni: return "bonf";
    case ThresholdMethod::Concentration: return "conc";
    case ThresholdMethod::ConcBonf: return "conc-bonf";
    case ThresholdMethod::QuantRaw: return "quant-raw";
    case ThresholdMethod::QuantBonf: return "quant-bonf";
    case ThresholdMethod::QuantConc: return "quant-conc";
    case ThresholdMethod::QuantUncentered: return "quant-uncent";
    case ThresholdMethod::IteratedQuant: return "iter-quant";
    case ThresholdMethod::BoundedSymmetric: return "bounded";
  }
  return "?";
}

double ThresholdResult::component(const std::string& name) const {
  for (const auto& [key, value] : components)
    if (key == name) return value;
  throw_error(ErrorCode::invalid_argument,
              "no threshold component named '" + name + "'");
}

ThresholdResult threshold(const ThresholdSpec& spec, const DataMatrix& Y,
                          const Aggregator& agg, Probability alpha,
                          RngStream stream) {
  if (spec.side != side_for(agg))
    throw_error(ErrorCode::invalid_argument,
                "spec.side does not match the aggregator's sidedness");
  if (!(spec.delta > 0.0 && spec.delta < 1.0))
    throw_error(ErrorCode::invalid_argument, "delta outside (0,1)");
  if (!(spec.alpha0_frac > 0.0 && spec.alpha0_frac < 1.0))
    throw_error(ErrorCode::invalid_argument, "alpha0_frac outside (0,1)");
  if (agg.subset_empty()) {
    ThresholdResult out;
    out.value = std::numeric_limits<double>::infinity();
    out.components = {{"empty_subset", 1.0}};
    return out;
  }

  Ctx ctx(spec, Y, stream);
  const double a = alpha.value();
  switch (spec.method) {
    case ThresholdMethod::Bonferroni: return eval_bonferroni(ctx, agg, a);
    case ThresholdMethod::Concentration:
      return eval_concentration(ctx, agg, a);
    case ThresholdMethod::ConcBonf: return eval_conc_bonf(ctx, agg, a);
    case ThresholdMethod::QuantRaw:
      return eval_quant_raw(ctx, agg, a, /*centered=*/true);
    case ThresholdMethod::QuantUncentered:
      return eval_quant_raw(ctx, agg, a, /*centered=*/false);
    case ThresholdMethod::QuantBonf:
      return eval_quant_plus(ctx, agg, a, ThresholdMethod::QuantBonf);
    case ThresholdMethod::QuantConc:
      return eval_quant_plus(ctx, agg, a, ThresholdMethod::QuantConc);
    case ThresholdMethod::IteratedQuant:
      return eval_iterated_quant(ctx, agg, a);
    case ThresholdMethod::BoundedSymmetric:
      return eval_bounded_symmetric(ctx, agg, a);
  }
  throw_error(ErrorCode::runtime, "unreachable threshold method");
}

bool ConfidenceRegion::contains(std::span<const double> x) const {
  if (x.size() != center.size())
    throw_error(ErrorCode::invalid_argument,
                "contains: dimension mismatch");
  std::vector<double> diff(center.size());
  for (size_t k = 0; k < center.size(); ++k) diff[k] = center[k] - x[k];
  return evaluate(agg, diff) <= radius;
}

ConfidenceRegion confidence_region(const DataMatrix& Y, const Aggregator& agg,
                                   const ThresholdSpec& spec,
                                   Probability alpha, RngStream stream) {
  if (spec.method == ThresholdMethod::QuantUncentered)
    throw_error(ErrorCode::unsupported,
                "the uncentered quantile is a testing threshold, not a "
                "confidence region for an unknown mean");
  if (spec.method == ThresholdMethod::QuantRaw && !spec.allow_unproven)
    throw_error(ErrorCode::unsupported,
                "the raw centered quantile has no proven coverage level; "
                "set allow_unproven to use it anyway");
  ConfidenceRegion region;
  region.center = empirical_mean(Y);
  region.radius = threshold(spec, Y, agg, alpha, stream).value;
  region.agg = agg;
  return region;
}

double lower_deviation_threshold(const DataMatrix& Y, const Aggregator& agg,
                                 const WeightScheme& scheme, double M,
                                 Probability alpha, int B, RngStream stream) {
  if (!(M > 0.0))
    throw_error(ErrorCode::invalid_argument,
                "lower_deviation_threshold: M <= 0");
  const auto cst =
      constants(scheme, Y.cols(), std::nullopt, stream.substream(kTagConstants));
  if (!cst.d_w)
    throw_error(ErrorCode::unsupported,
                "scheme " + scheme.name() +
                    " does not satisfy |W_i - x0| = a a.s.; no D_W");
  const auto e = resampled_expectation(Y, agg, scheme, B,
                                       stream.substream(kTagExpectation));
  const double d = *cst.d_w;
  const double ratio = cst.a_w / d;
  const double n = Y.cols();
  return e.raw / d - M / std::sqrt(n) * std::sqrt(1.0 + ratio * ratio) *
                         std::sqrt(2.0 * std::log(1.0 / alpha.value()));
}

} // namespace rshd
