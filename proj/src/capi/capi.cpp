#include "resamphd.h"

#include <cstring>
#include <fstream>
#include <sstream>

#include "core/experiments.hpp"
#include "core/numerics.hpp"
#include "core/table.hpp"

namespace {

thread_local std::string g_last_error;

rshd_status map_code(rshd::ErrorCode code) {
  using rshd::ErrorCode;
  switch (code) {
    case ErrorCode::invalid_argument: return RSHD_ERR_INVALID_ARGUMENT;
    case ErrorCode::capacity: return RSHD_ERR_CAPACITY;
    case ErrorCode::unsupported: return RSHD_ERR_UNSUPPORTED;
    case ErrorCode::infeasible_level: return RSHD_ERR_INFEASIBLE_LEVEL;
    case ErrorCode::data_format: return RSHD_ERR_DATA_FORMAT;
    case ErrorCode::io: return RSHD_ERR_IO;
    case ErrorCode::runtime: return RSHD_ERR_RUNTIME;
  }
  return RSHD_ERR_RUNTIME;
}

template <class Fn>
rshd_status guarded(Fn&& fn) {
  try {
    fn();
    return RSHD_OK;
  } catch (const rshd::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RSHD_ERR_RUNTIME;
  } catch (...) {
    g_last_error = "unknown error";
    return RSHD_ERR_RUNTIME;
  }
}

rshd::Side parse_side(const char* side) {
  if (!side || std::strcmp(side, "two") == 0) return rshd::Side::TwoSided;
  if (std::strcmp(side, "one") == 0) return rshd::Side::OneSided;
  rshd::throw_error(rshd::ErrorCode::invalid_argument,
                    std::string("side must be 'one' or 'two', got '") + side +
                        "'");
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  const auto parse_num = [](const std::string& s) {
    try {
      size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      rshd::throw_error(rshd::ErrorCode::invalid_argument,
                        "bad grid number '" + s + "'");
    }
  };
  if (text.find(':') != std::string::npos) {
    // a:b:step
    std::istringstream in(text);
    std::string a, b, s;
    std::getline(in, a, ':');
    std::getline(in, b, ':');
    std::getline(in, s, ':');
    const double lo = parse_num(a), hi = parse_num(b),
                 step = s.empty() ? 1.0 : parse_num(s);
    if (!(step > 0.0) || hi < lo)
      rshd::throw_error(rshd::ErrorCode::invalid_argument,
                        "bad grid range '" + text + "'");
    for (double v = lo; v <= hi + 1e-9; v += step) out.push_back(v);
    return out;
  }
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_num(item));
  if (out.empty())
    rshd::throw_error(rshd::ErrorCode::invalid_argument, "empty grid");
  return out;
}

rshd::MeanScenario parse_scenario(const std::string& text) {
  if (text == "zero") return rshd::MeanScenario::zero();
  if (text.rfind("linear", 0) == 0) {
    double amplitude = 20.0;
    if (text.size() > 6 && text[6] == ':')
      amplitude = std::stod(text.substr(7));
    return rshd::MeanScenario::linear_half(amplitude);
  }
  if (text.rfind("exp:", 0) == 0)
    return rshd::MeanScenario::exp_decay(std::stod(text.substr(4)));
  rshd::throw_error(rshd::ErrorCode::invalid_argument,
                    "unknown scenario '" + text +
                        "' (zero | linear[:amplitude] | exp:<r_db>)");
}

} // namespace

struct rshd_matrix {
  rshd::DataMatrix data;
};

struct rshd_table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> cells;

  explicit rshd_table(const rshd::Table& t) : columns(t.columns()) {
    cells.reserve(t.rows().size());
    for (const auto& row : t.rows()) {
      std::vector<std::string> r;
      r.reserve(row.size());
      for (const auto& cell : row)
        r.push_back(rshd::Table::format_cell(cell));
      cells.push_back(std::move(r));
    }
  }
};

namespace {

// Options struct -> core ThresholdSpec (+ aggregator over all coordinates).
struct ResolvedOpts {
  rshd::ThresholdSpec spec;
  rshd::Aggregator agg;
};

ResolvedOpts resolve_opts(const rshd_threshold_opts* opts, int K) {
  if (!opts)
    rshd::throw_error(rshd::ErrorCode::invalid_argument, "opts is NULL");
  ResolvedOpts r;
  r.spec.method = rshd::parse_threshold_method(
      opts->method ? opts->method : "conc-bonf");
  r.spec.side = parse_side(opts->side);
  r.spec.scheme =
      rshd::WeightScheme::parse(opts->scheme ? opts->scheme : "rademacher");
  if (opts->mc_draws > 0) r.spec.mc_draws = opts->mc_draws;
  if (opts->delta > 0.0) r.spec.delta = opts->delta;
  if (opts->alpha0_frac > 0.0) r.spec.alpha0_frac = opts->alpha0_frac;
  r.spec.bound_m = opts->bound_m;
  if (opts->sigma) {
    r.spec.sigma = rshd::SigmaSource::known(
        std::vector<double>(opts->sigma, opts->sigma + K));
  } else if (opts->sigma_delta > 0.0) {
    r.spec.sigma = rshd::SigmaSource::estimated(opts->sigma_delta);
  } else {
    r.spec.sigma = rshd::SigmaSource::estimated();
  }
  if (opts->iter_alphas) r.spec.iter_alphas = parse_grid(opts->iter_alphas);
  r.spec.exhaustive = opts->exhaustive != 0;
  r.spec.strict_mc = opts->strict_mc != 0;
  r.spec.allow_unproven = opts->allow_unproven != 0;

  rshd::Aggregator base =
      opts->phi && std::strcmp(opts->phi, "sup") != 0
          ? rshd::Aggregator::parse(opts->phi)
          : rshd::Aggregator::from_side(r.spec.side == rshd::Side::TwoSided);
  std::vector<int> all(static_cast<size_t>(K), 0);
  for (int k = 0; k < K; ++k) all[size_t(k)] = k;
  r.agg = base.restricted(std::move(all));
  // lp aggregators are symmetric: they live on the two-sided branch
  if (r.agg.kind == rshd::AggKind::LpNorm) r.spec.side = rshd::Side::TwoSided;
  return r;
}

} // namespace

extern "C" {

const char* rshd_version(void) { return "0.1.0"; }

const char* rshd_status_name(rshd_status status) {
  switch (status) {
    case RSHD_OK: return "ok";
    case RSHD_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case RSHD_ERR_CAPACITY: return "capacity";
    case RSHD_ERR_UNSUPPORTED: return "unsupported";
    case RSHD_ERR_INFEASIBLE_LEVEL: return "infeasible-level";
    case RSHD_ERR_DATA_FORMAT: return "data-format";
    case RSHD_ERR_IO: return "io";
    case RSHD_ERR_RUNTIME: return "runtime";
  }
  return "unknown";
}

const char* rshd_last_error(void) { return g_last_error.c_str(); }

rshd_status rshd_matrix_create(int32_t K, int32_t n, const double* row_major,
                               rshd_matrix** out) {
  return guarded([&] {
    if (!row_major || !out)
      rshd::throw_error(rshd::ErrorCode::invalid_argument, "NULL argument");
    std::vector<double> values(row_major, row_major + size_t(K) * size_t(n));
    *out = new rshd_matrix{rshd::DataMatrix::create(K, n, std::move(values))};
  });
}

rshd_status rshd_matrix_read_csv(const char* path, rshd_matrix** out) {
  return guarded([&] {
    if (!path || !out)
      rshd::throw_error(rshd::ErrorCode::invalid_argument, "NULL argument");
    std::ifstream in(path);
    if (!in)
      rshd::throw_error(rshd::ErrorCode::io,
                        std::string("cannot open '") + path + "'");
    std::vector<double> values;
    int n = -1, K = 0;
    std::string line;
    bool past_header = false;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!past_header && (line.empty() || line[0] == '#')) continue;
      past_header = true;
      if (line.empty()) continue;
      int count = 0;
      std::istringstream row(line);
      std::string cell;
      while (std::getline(row, cell, ',')) {
        try {
          size_t used = 0;
          values.push_back(std::stod(cell, &used));
          // allow trailing spaces only
          while (used < cell.size() && std::isspace(unsigned(cell[used])))
            ++used;
          if (used != cell.size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
          rshd::throw_error(rshd::ErrorCode::data_format,
                            "non-numeric cell '" + cell + "' in row " +
                                std::to_string(K + 1));
        }
        ++count;
      }
      if (n < 0) n = count;
      if (count != n)
        rshd::throw_error(rshd::ErrorCode::data_format,
                          "ragged row " + std::to_string(K + 1) + ": got " +
                              std::to_string(count) + " cells, expected " +
                              std::to_string(n));
      ++K;
    }
    if (K == 0)
      rshd::throw_error(rshd::ErrorCode::data_format, "no data rows");
    if (n < 2)
      rshd::throw_error(rshd::ErrorCode::data_format,
                        "need n >= 2 observations per row");
    *out = new rshd_matrix{rshd::DataMatrix::create(K, n, std::move(values))};
  });
}

void rshd_matrix_free(rshd_matrix* m) { delete m; }

int32_t rshd_matrix_rows(const rshd_matrix* m) {
  return m ? m->data.rows() : 0;
}

int32_t rshd_matrix_cols(const rshd_matrix* m) {
  return m ? m->data.cols() : 0;
}

rshd_status rshd_matrix_get(const rshd_matrix* m, int32_t k, int32_t i,
                            double* out) {
  return guarded([&] {
    if (!m || !out)
      rshd::throw_error(rshd::ErrorCode::invalid_argument, "NULL argument");
    if (k < 0 || k >= m->data.rows() || i < 0 || i >= m->data.cols())
      rshd::throw_error(rshd::ErrorCode::invalid_argument,
                        "matrix index out of range");
    *out = m->data.at(k, i);
  });
}

void rshd_table_free(rshd_table* t) { delete t; }

int32_t rshd_table_rows(const rshd_table* t) {
  return t ? int32_t(t->cells.size()) : 0;
}

int32_t rshd_table_cols(const rshd_table* t) {
  return t ? int32_t(t->columns.size()) : 0;
}

const char* rshd_table_column(const rshd_table* t, int32_t j) {
  if (!t || j < 0 || j >= int32_t(t->columns.size())) return nullptr;
  return t->columns[size_t(j)].c_str();
}

const char* rshd_table_cell(const rshd_table* t, int32_t i, int32_t j) {
  if (!t || i < 0 || i >= int32_t(t->cells.size()) || j < 0 ||
      j >= int32_t(t->columns.size()))
    return nullptr;
  return t->cells[size_t(i)][size_t(j)].c_str();
}

rshd_status rshd_gauss_upper_tail(double x, double* out) {
  return guarded([&] { *out = rshd::gauss_upper_tail(x); });
}

rshd_status rshd_gauss_upper_quantile(double p, double* out) {
  return guarded(
      [&] { *out = rshd::gauss_upper_quantile(rshd::Probability(p)); });
}

rshd_status rshd_binom_upper_quantile(int32_t n, double eta, int32_t* out) {
  return guarded([&] { *out = rshd::binom_upper_quantile(n, eta); });
}

rshd_status rshd_gamma1(int32_t n, double eta, double* out) {
  return guarded([&] { *out = rshd::gamma1(n, eta); });
}

rshd_status rshd_cn_constant(int32_t n, double* out) {
  return guarded([&] { *out = rshd::cn_constant(n); });
}

rshd_status rshd_constants_table(const char* scheme, int32_t n,
                                 int32_t mc_draws, uint64_t seed,
                                 rshd_table** out) {
  return guarded([&] {
    if (!scheme || !out)
      rshd::throw_error(rshd::ErrorCode::invalid_argument, "NULL argument");
    const auto ws = rshd::WeightScheme::parse(scheme);
    const auto mc =
        mc_draws > 0 ? std::optional<int>(mc_draws) : std::nullopt;
    const auto cst = rshd::constants(ws, n, mc, rshd::RngStream(seed));
    const auto idx = rshd::scheme_indices(ws, n, cst);
    rshd::Table t({"scheme", "n", "A", "B_lower", "B_mc", "B_mc_stderr", "C",
                   "D", "accuracy", "complexity"});
    using Cell = rshd::Table::Cell;
    std::vector<Cell> row;
    row.emplace_back(ws.name());
    row.emplace_back(std::int64_t(n));
    row.emplace_back(cst.a_w);
    row.emplace_back(cst.b_w_lower);
    if (cst.b_w_mc) {
      row.emplace_back(cst.b_w_mc->value);
      row.emplace_back(cst.b_w_mc->stderr_);
    } else {
      row.emplace_back(std::string(""));
      row.emplace_back(std::string(""));
    }
    row.emplace_back(cst.c_w);
    if (cst.d_w)
      row.emplace_back(*cst.d_w);
    else
      row.emplace_back(std::string(""));
    row.emplace_back(idx.accuracy);
    row.emplace_back(idx.complexity);
    t.add_row(std::move(row));
    *out = new rshd_table(t);
  });
}

void rshd_threshold_opts_init(rshd_threshold_opts* opts) {
  if (!opts) return;
  std::memset(opts, 0, sizeof(*opts));
  opts->method = "conc-bonf";
  opts->side = "two";
  opts->scheme = "rademacher";
  opts->phi = "sup";
  opts->mc_draws = 1000;
  opts->delta = 0.1;
  opts->alpha0_frac = 0.9;
}

rshd_status rshd_threshold_eval(const rshd_matrix* data,
                                const rshd_threshold_opts* opts, double alpha,
                                uint64_t seed, rshd_table** out) {
  return guarded([&] {
    if (!data || !out)
      rshd::throw_error(rshd::ErrorCode::invalid_argument, "NULL argument");
    auto resolved = resolve_opts(opts, data->data.rows());
    const auto result =
        rshd::threshold(resolved.spec, data->data, resolved.agg,
                        rshd::Probability(alpha), rshd::RngStream(seed));
    rshd::Table t({"component", "value"});
    t.add_row({std::string("value"), result.value});
    for (const auto& [name, value] : result.components)
      t.add_row({name, value});
    *out = new rshd_table(t);
  });
}

rshd_status rshd_confidence_region(const rshd_matrix* data,
                                   const rshd_threshold_opts* opts,
                                   double alpha, uint64_t seed,
                                   rshd_table** out) {
  return guarded([&] {
    if (!data || !out)
      rshd::throw_error(rshd::ErrorCode::invalid_argument, "NULL argument");
    auto resolved = resolve_opts(opts, data->data.rows());
    const auto region = rshd::confidence_region(
        data->data, resolved.agg, resolved.spec, rshd::Probability(alpha),
        rshd::RngStream(seed));
    rshd::Table t({"index", "center", "radius"});
    for (size_t k = 0; k < region.center.size(); ++k)
      t.add_row({std::int64_t(k), region.center[k], region.radius});
    *out = new rshd_table(t);
  });
}

rshd_status rshd_region_contains(const rshd_matrix* data,
                                 const rshd_threshold_opts* opts, double alpha,
                                 uint64_t seed, const double* x,
                                 int32_t* out) {
  return guarded([&] {
    if (!data || !x || !out)
      rshd::throw_error(rshd::ErrorCode::invalid_argument, "NULL argument");
    auto resolved = resolve_opts(opts, data->data.rows());
    const auto region = rshd::confidence_region(
        data->data, resolved.agg, resolved.spec, rshd::Probability(alpha),
        rshd::RngStream(seed));
    *out = region.contains(
               std::span<const double>(x, size_t(data->data.rows())))
               ? 1
               : 0;
  });
}

rshd_status rshd_run_test(const rshd_matrix* data, const char* procedure,
                          const rshd_threshold_opts* opts, double alpha,
                          uint64_t seed, rshd_table** per_coordinate,
                          rshd_table** trace) {
  return guarded([&] {
    if (!data || !procedure || !per_coordinate || !trace)
      rshd::throw_error(rshd::ErrorCode::invalid_argument, "NULL argument");
    auto resolved = resolve_opts(opts, data->data.rows());
    auto proc = rshd::ProcedureConfig::parse(procedure);
    proc.side = resolved.spec.side;
    proc.sigma = resolved.spec.sigma;
    proc.B = resolved.spec.mc_draws;
    proc.hybrid_alpha0_frac = resolved.spec.alpha0_frac;
    proc.hybrid_delta = resolved.spec.delta;
    if (proc.kind == rshd::ProcedureConfig::Kind::SingleStep ||
        proc.kind == rshd::ProcedureConfig::Kind::StepDown) {
      const auto method = proc.spec.method; // parsed from the procedure text
      proc.spec = resolved.spec;
      proc.spec.method = method;
    }

    const auto res = rshd::run_procedure(proc, data->data,
                                         rshd::Probability(alpha),
                                         rshd::RngStream(seed));
    const auto mean = rshd::empirical_mean(data->data);

    rshd::Table per({"index", "mean", "bracket_value", "rejected",
                     "iteration_rejected"});
    for (int k = 0; k < data->data.rows(); ++k) {
      std::int64_t rejected_at = 0;
      for (size_t j = 1; j < res.survivor_sets.size(); ++j) {
        if (!std::binary_search(res.survivor_sets[j].begin(),
                                res.survivor_sets[j].end(), k)) {
          rejected_at = std::int64_t(j);
          break;
        }
      }
      per.add_row({std::int64_t(k), mean[size_t(k)],
                   rshd::bracket_value(mean[size_t(k)], proc.side),
                   std::int64_t(rejected_at > 0 ? 1 : 0), rejected_at});
    }

    rshd::Table tr({"iteration", "card", "threshold", "surviving_card",
                    "set"});
    for (size_t j = 0; j < res.thresholds.size(); ++j) {
      std::string members;
      for (int k : res.survivor_sets[j]) {
        if (!members.empty()) members += ' ';
        members += std::to_string(k);
      }
      tr.add_row({std::int64_t(j + 1),
                  std::int64_t(res.survivor_sets[j].size()),
                  res.thresholds[j],
                  std::int64_t(res.survivor_sets[j + 1].size()),
                  std::move(members)});
    }
    *per_coordinate = new rshd_table(per);
    *trace = new rshd_table(tr);
  });
}

void rshd_experiment_opts_init(rshd_experiment_opts* opts) {
  if (!opts) return;
  std::memset(opts, 0, sizeof(*opts));
  opts->experiment = "fig1";
  opts->d = 16;
  opts->n = 100;
  opts->trials = 200;
  opts->B = 500;
  opts->alpha = 0.05;
  opts->b_fixed = -1.0;
  opts->amplitude = 20.0;
  opts->ideal_samples = 1000;
}

rshd_status rshd_run_experiment(const rshd_experiment_opts* opts,
                                uint64_t seed, rshd_table** out) {
  return guarded([&] {
    if (!opts || !out)
      rshd::throw_error(rshd::ErrorCode::invalid_argument, "NULL argument");
    rshd::ExperimentParams p;
    const std::string kind = opts->experiment ? opts->experiment : "fig1";
    if (kind == "fig1")
      p.kind = rshd::ExperimentParams::Kind::Fig1;
    else if (kind == "fig2")
      p.kind = rshd::ExperimentParams::Kind::Fig2;
    else if (kind == "fig3")
      p.kind = rshd::ExperimentParams::Kind::Fig3;
    else
      rshd::throw_error(rshd::ErrorCode::invalid_argument,
                        "experiment must be fig1|fig2|fig3");
    if (opts->d > 0) p.d = opts->d;
    if (opts->n > 0) p.n = opts->n;
    if (opts->trials > 0) p.trials = opts->trials;
    if (opts->B > 0) p.B = opts->B;
    if (opts->alpha > 0.0) p.alpha = opts->alpha;
    if (opts->b_grid) p.b_grid = parse_grid(opts->b_grid);
    if (opts->r_grid) p.r_grid = parse_grid(opts->r_grid);
    p.b_fixed = opts->b_fixed;
    if (opts->amplitude > 0.0) p.linear_amplitude = opts->amplitude;
    if (opts->ideal_samples > 0) p.ideal_samples = opts->ideal_samples;
    p.seed = seed;
    *out = new rshd_table(rshd::run_experiment(p));
  });
}

rshd_status rshd_sample_field(int32_t d, double b, int32_t n,
                              const char* scenario, double alpha,
                              uint64_t seed, rshd_matrix** out) {
  return guarded([&] {
    if (!scenario || !out)
      rshd::throw_error(rshd::ErrorCode::invalid_argument, "NULL argument");
    rshd::TorusFieldConfig config;
    config.d = d;
    config.b = b;
    config.n = n;
    config.mean = parse_scenario(scenario);
    config.alpha = alpha > 0.0 ? alpha : 0.05;
    *out = new rshd_matrix{rshd::sample_field(config, rshd::RngStream(seed))};
  });
}

} // extern "C"
