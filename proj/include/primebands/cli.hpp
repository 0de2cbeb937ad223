#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>

#include <CLI11.hpp>

#include "primebands/batemanhorn.hpp"
#include "primebands/cramer.hpp"
#include "primebands/report.hpp"

namespace primebands::cli {

/// Parsed run configuration; the computational fields are echoed into every
/// report's metadata so a run is reproducible from its output alone.
struct RunConfig {
  std::string subcommand;
  std::string pattern;
  std::string polys;
  std::vector<u64> xs;
  u64 prime_limit = 0;  // 0 = per-subcommand preset
  double rel_tol = 1e-10;
  u64 trials = 1000;
  u64 seed = 42;
  std::string format = "text";
  std::string output;
  unsigned threads = 0;  // 0 = env var PRIMEBANDS_THREADS, else 1
};

namespace detail {

using primebands::detail::fmt;

/// Flag wins over the environment variable; both unset means single-threaded.
inline unsigned resolve_cli_threads(unsigned flag_value, const char* env_value) {
  if (flag_value != 0) return flag_value;
  if (env_value != nullptr) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env_value, &end, 10);
    if (end && *end == '\0' && v > 0 && v < 1024) return static_cast<unsigned>(v);
  }
  return 1;
}

/// Accepts plain and scientific notation ("100000", "1e5", "1.4e7"); the
/// value must be a nonnegative integer below 2^53.
inline u64 parse_count(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("expected an integer like 100000 or 1e5, got '" + text + "'");
  }
  if (used != text.size() || !(v >= 0.0) || v > 9.0e15 || v != std::floor(v))
    throw std::invalid_argument("expected an integer like 100000 or 1e5, got '" + text + "'");
  return static_cast<u64>(v);
}

inline std::vector<u64> parse_count_list(const std::string& text) {
  std::vector<u64> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    out.push_back(parse_count(
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos)));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) throw std::invalid_argument("expected at least one x value");
  return out;
}

inline void write_result(const RunConfig& cfg, const std::string& bytes, std::ostream& out) {
  if (cfg.output.empty()) {
    out << bytes;
    return;
  }
  std::ofstream f(cfg.output, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file '" + cfg.output + "'");
  f << bytes;
}

inline std::string singular_series_text(const SingularSeriesResult& c, ReportFormat format) {
  nlohmann::ordered_json j;
  j["value"] = c.value;
  j["prime_limit"] = c.prime_limit;
  j["tail_factor_bound"] = c.tail_factor_bound;
  j["vanished"] = c.vanished;
  j["tail_is_heuristic"] = c.tail_is_heuristic;
  switch (format) {
    case ReportFormat::json:
      return j.dump(2) + "\n";
    case ReportFormat::csv:
      return "value,prime_limit,tail_factor_bound,vanished,tail_is_heuristic\n" +
             fmt("%.12g", c.value) + "," + std::to_string(c.prime_limit) + "," +
             fmt("%.6g", c.tail_factor_bound) + "," + (c.vanished ? "1" : "0") + "," +
             (c.tail_is_heuristic ? "1" : "0") + "\n";
    case ReportFormat::text: {
      std::string s;
      s += "value:             " + fmt("%.12g", c.value) + "\n";
      s += "prime_limit:       " + std::to_string(c.prime_limit) + "\n";
      s += "tail_factor_bound: " + fmt("%.6g", c.tail_factor_bound) + "\n";
      s += "vanished:          " + std::string(c.vanished ? "true" : "false") + "\n";
      s += "tail_is_heuristic: " + std::string(c.tail_is_heuristic ? "true" : "false") + "\n";
      return s;
    }
  }
  return {};
}

inline ReportFormat format_of(const RunConfig& cfg) {
  auto f = parse_format(cfg.format);
  if (!f) throw std::invalid_argument("unknown format '" + cfg.format + "' (expected csv, json or text)");
  return *f;
}

inline void require_admissible(const TuplePattern& t) {
  if (auto p = first_obstruction(t))
    throw std::domain_error("pattern " + t.to_string() +
                            " is inadmissible: residues cover all classes modulo " +
                            std::to_string(*p));
}

inline std::vector<std::pair<std::string, std::string>> base_metadata(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> md;
  md.emplace_back("version", kVersion);
  md.emplace_back("subcommand", cfg.subcommand);
  return md;
}

// ---- tuples ----------------------------------------------------------

inline int run_tuples_count(const RunConfig& cfg, std::ostream& out) {
  const TuplePattern t = TuplePattern::parse(cfg.pattern);
  require_admissible(t);
  const u64 x = cfg.xs.at(0);
  const PrimeTable table = PrimeTable::sieve(
      std::max<u64>(x + std::max<u64>(t.max_offset(), 1), 3), {.threads = cfg.threads});
  write_result(cfg, std::to_string(count_prime_tuples(t, x, table, cfg.threads)) + "\n", out);
  return 0;
}

inline int run_tuples_constant(const RunConfig& cfg, std::ostream& out) {
  const TuplePattern t = TuplePattern::parse(cfg.pattern);
  const u64 P = cfg.prime_limit ? cfg.prime_limit : 1000000;
  const SingularSeriesResult c = tuple_constant(t, P, nullptr, cfg.threads);
  write_result(cfg, singular_series_text(c, format_of(cfg)), out);
  return 0;
}

inline int run_tuples_table(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const TuplePattern t = TuplePattern::parse(cfg.pattern);
  require_admissible(t);
  const u64 P = cfg.prime_limit ? cfg.prime_limit : 10000000;  // table preset
  const u64 max_x = cfg.xs.back();
  const PrimeTable table = PrimeTable::sieve(
      std::max(max_x + std::max<u64>(t.max_offset(), 1), u64{3}), {.threads = cfg.threads});
  const PrimeTable* for_constant = table.limit() >= P ? &table : nullptr;
  const SingularSeriesResult c = tuple_constant(t, P, for_constant, cfg.threads);
  if (c.vanished)
    throw std::domain_error("pattern " + t.to_string() + " has a vanishing constant");
  if (c.tail_is_heuristic)
    err << "note: singular-series tail estimate is heuristic for this pattern\n";

  Report report;
  report.title = "prime constellation deviations, pattern " + t.to_string();
  report.metadata = base_metadata(cfg);
  report.metadata.emplace_back("pattern", t.to_string());
  report.metadata.emplace_back("prime_limit", std::to_string(c.prime_limit));
  report.metadata.emplace_back("constant", fmt("%.12g", c.value));
  report.metadata.emplace_back("rel_tol", fmt("%.3g", cfg.rel_tol));
  const int k = static_cast<int>(t.k());
  for (u64 x : cfg.xs) {
    const u64 actual = count_prime_tuples(t, x, table, cfg.threads);
    const double xd = static_cast<double>(x);
    const double ik = log_integral({xd, k, cfg.rel_tol});
    const double i2k = log_integral({xd, 2 * k, cfg.rel_tol});
    const auto est = MomentEstimates::from_mean_and_variance(
        c.value * ik, c.value * ik - c.value * c.value * i2k);
    report.rows.push_back(deviation_row(x, actual, est));
  }
  write_result(cfg, render(report, format_of(cfg)), out);
  return 0;
}

// ---- bateman-horn ----------------------------------------------------

inline void bh_caveats(const PolynomialSystem& s, const SingularSeriesResult* c,
                       std::ostream& err) {
  bool nonlinear = false;
  for (const auto& f : s.polynomials()) nonlinear = nonlinear || f.degree() >= 2;
  if (nonlinear) err << "note: irreducibility of the polynomials is assumed, not verified\n";
  std::set<std::string> seen;
  for (const auto& f : s.polynomials())
    if (!seen.insert(f.to_string()).second) {
      err << "note: repeated polynomials; the heuristic double-counts their contribution\n";
      break;
    }
  if (c && c->tail_is_heuristic)
    err << "note: singular-series tail estimate is heuristic for this system\n";
}

inline u64 bh_table_prime_limit(const RunConfig& cfg, const PolynomialSystem& s) {
  if (cfg.prime_limit) return cfg.prime_limit;
  // The 1e7 table preset is justified by the stabilized tail bound only;
  // oscillating or brute-force counters keep the 1e6 default.
  const auto plan = primebands::detail::plan_counter(s);
  const bool stabilized =
      plan.counter.stable_after.has_value() && plan.counter.asymptotic_roots == s.r();
  return stabilized ? 10000000 : 1000000;
}

inline const PrimeTable* maybe_value_table(const PolynomialSystem& s, u64 max_x,
                                           std::optional<PrimeTable>& storage,
                                           unsigned threads) {
  i64 max_value = 0;
  for (const auto& f : s.polynomials())
    max_value = std::max(max_value, f.eval(static_cast<i64>(max_x)));
  // Sieving pays off when lookups amortize: always for linear systems,
  // only for small ranges otherwise (is_prime_64 is exact either way).
  const i64 cap = s.all_linear() ? (i64{1} << 30) : (i64{1} << 22);
  if (max_value >= 2 && max_value <= cap) {
    storage.emplace(PrimeTable::sieve(static_cast<u64>(max_value), {.threads = threads}));
    return &*storage;
  }
  return nullptr;  // values exceed sieve scale; is_prime_64 handles them
}

inline int run_bh_count(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const PolynomialSystem s = PolynomialSystem::parse(cfg.polys);
  bh_caveats(s, nullptr, err);
  const u64 x = cfg.xs.at(0);
  std::optional<PrimeTable> storage;
  const PrimeTable* table = maybe_value_table(s, x, storage, cfg.threads);
  write_result(cfg, std::to_string(count_prime_values(s, x, 1, table, cfg.threads)) + "\n",
               out);
  return 0;
}

inline int run_bh_constant(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const PolynomialSystem s = PolynomialSystem::parse(cfg.polys);
  const u64 P = cfg.prime_limit ? cfg.prime_limit : 1000000;
  const SingularSeriesResult c = bh_constant(s, P, nullptr, cfg.threads);
  bh_caveats(s, &c, err);
  write_result(cfg, singular_series_text(c, format_of(cfg)), out);
  return 0;
}

inline int run_bh_table(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const PolynomialSystem s = PolynomialSystem::parse(cfg.polys);
  const u64 P = bh_table_prime_limit(cfg, s);
  const SingularSeriesResult c = bh_constant(s, P, nullptr, cfg.threads);
  bh_caveats(s, &c, err);
  if (c.vanished)
    throw std::domain_error("system " + s.to_string() +
                            " has a vanishing constant; some polynomial takes only finitely "
                            "many prime values");

  Report report;
  report.title = "prime-value deviations, system " + s.to_string();
  report.metadata = base_metadata(cfg);
  report.metadata.emplace_back("polys", s.to_string());
  report.metadata.emplace_back("prime_limit", std::to_string(c.prime_limit));
  report.metadata.emplace_back("constant", fmt("%.12g", c.value));
  report.metadata.emplace_back("rel_tol", fmt("%.3g", cfg.rel_tol));

  const double prefactor = c.value / s.degree_product();
  const int r = static_cast<int>(s.r());
  std::optional<PrimeTable> storage;
  const PrimeTable* table = maybe_value_table(s, cfg.xs.back(), storage, cfg.threads);
  for (u64 x : cfg.xs) {
    const u64 actual = count_prime_values(s, x, 1, table, cfg.threads);
    const double xd = static_cast<double>(x);
    const double ir = log_integral({xd, r, cfg.rel_tol});
    const double i2r = log_integral({xd, 2 * r, cfg.rel_tol});
    const auto est = MomentEstimates::from_mean_and_variance(
        prefactor * ir, prefactor * ir - prefactor * prefactor * i2r);
    report.rows.push_back(deviation_row(x, actual, est));
  }
  write_result(cfg, render(report, format_of(cfg)), out);
  return 0;
}

// ---- cramer ----------------------------------------------------------

struct ModelOpts {
  std::string model = "tuple";
  double constant = 1.0;
  unsigned k = 2;
  double degree_product = 1.0;
};

inline UrnModel build_model(const ModelOpts& m) {
  if (m.model == "classic") return UrnModel::classic();
  if (m.model == "tuple") return UrnModel::tuple(m.constant, m.k);
  if (m.model == "bateman_horn")
    return UrnModel::bateman_horn(m.constant, m.k, m.degree_product);
  throw std::invalid_argument("unknown model '" + m.model +
                              "' (expected classic, tuple or bateman_horn)");
}

inline void model_metadata(nlohmann::ordered_json& j, const ModelOpts& m, const UrnModel& model) {
  j["model"] = m.model;
  if (m.model != "classic") {
    j["C"] = m.constant;
    j["k"] = m.k;
  }
  if (m.model == "bateman_horn") j["degree_product"] = m.degree_product;
  j["start_index"] = model.start_index();
}

inline int run_cramer_simulate(const RunConfig& cfg, const ModelOpts& mo, std::ostream& out) {
  const UrnModel model = build_model(mo);
  const u64 x = cfg.xs.at(0);
  nlohmann::ordered_json j;
  model_metadata(j, mo, model);
  j["x"] = x;
  j["seed"] = cfg.seed;
  j["trials"] = cfg.trials;
  if (cfg.trials == 1) {
    const SimOutcome o = simulate(model, x, cfg.seed);
    const MomentEstimates exact = moments(model, x, cfg.threads);
    j["count"] = o.count;
    j["exact_mean"] = exact.mean;
    j["exact_sd"] = exact.sd;
    if (exact.sd > 0.0) j["z"] = (static_cast<double>(o.count) - exact.mean) / exact.sd;
  } else {
    const BatchSummary b = simulate_batch(model, x, cfg.trials, cfg.seed, cfg.threads);
    j["exact_mean"] = b.exact.mean;
    j["exact_variance"] = b.exact.variance;
    j["exact_sd"] = b.exact.sd;
    j["empirical_mean"] = b.empirical_mean;
    j["empirical_variance"] = b.empirical_variance;
    j["ks_statistic"] = b.ks_statistic;
    j["ks_critical_1pct"] = 1.63 / std::sqrt(static_cast<double>(cfg.trials));
  }
  auto scalar = [](const nlohmann::ordered_json& v) -> std::string {
    if (v.is_number_float()) return fmt("%.10g", v.get<double>());
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
  };
  const ReportFormat format = format_of(cfg);
  std::string bytes;
  if (format == ReportFormat::json) {
    bytes = j.dump(2) + "\n";
  } else if (format == ReportFormat::csv) {
    std::string header, row;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!header.empty()) {
        header += ",";
        row += ",";
      }
      header += it.key();
      row += scalar(it.value());
    }
    bytes = header + "\n" + row + "\n";
  } else {
    for (auto it = j.begin(); it != j.end(); ++it)
      bytes += it.key() + ": " + scalar(it.value()) + "\n";
  }
  write_result(cfg, bytes, out);
  return 0;
}

inline int run_cramer_lyapunov(const RunConfig& cfg, const ModelOpts& mo, std::ostream& out) {
  const UrnModel model = build_model(mo);
  nlohmann::ordered_json meta;
  model_metadata(meta, mo, model);
  const std::string model_cols = mo.model + "," + fmt("%.10g", mo.constant) + "," +
                                 std::to_string(mo.k);
  std::string csv = "model,C,k,x,ratio,bound,variance\n";
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  std::string text;
  for (u64 x : cfg.xs) {
    const LyapunovResult r = lyapunov_ratio(model, x, cfg.threads);
    csv += model_cols + "," + std::to_string(x) + "," + fmt("%.10g", r.ratio) + "," +
           fmt("%.10g", r.bound) + "," + fmt("%.10g", r.variance) + "\n";
    nlohmann::ordered_json jr;
    jr["x"] = x;
    jr["ratio"] = r.ratio;
    jr["bound"] = r.bound;
    jr["variance"] = r.variance;
    rows.push_back(jr);
    text += fmt("%12.0f", static_cast<double>(x)) + "  ratio " + fmt("%.8f", r.ratio) +
            "  bound " + fmt("%.8f", r.bound) + "  variance " + fmt("%.4f", r.variance) + "\n";
  }
  const ReportFormat format = format_of(cfg);
  std::string bytes;
  if (format == ReportFormat::csv) {
    bytes = csv;
  } else if (format == ReportFormat::json) {
    nlohmann::ordered_json j;
    j["model"] = meta;
    j["rows"] = rows;
    bytes = j.dump(2) + "\n";
  } else {
    bytes = text;
  }
  write_result(cfg, bytes, out);
  return 0;
}

// ---- gap --------------------------------------------------------------

inline int run_gap(const RunConfig& cfg, int r, std::ostream& out, std::ostream& err) {
  err << "note: the bound candidate is reported for comparison, not asserted\n";
  std::string csv = "x,r,sum,integral,gap,bound_candidate\n";
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  std::string text;
  for (u64 x : cfg.xs) {
    const SumIntegralGap g = sum_integral_gap(x, r, cfg.threads);
    csv += std::to_string(x) + "," + std::to_string(r) + "," + fmt("%.10g", g.sum) + "," +
           fmt("%.10g", g.integral) + "," + fmt("%.10g", g.gap) + "," +
           fmt("%.6g", g.bound_candidate) + "\n";
    nlohmann::ordered_json jr;
    jr["x"] = x;
    jr["r"] = r;
    jr["sum"] = g.sum;
    jr["integral"] = g.integral;
    jr["gap"] = g.gap;
    jr["bound_candidate"] = g.bound_candidate;
    rows.push_back(jr);
    text += fmt("%12.0f", static_cast<double>(x)) + "  sum " + fmt("%.6f", g.sum) +
            "  integral " + fmt("%.6f", g.integral) + "  gap " + fmt("%.6f", g.gap) +
            "  bound_candidate " + fmt("%.6f", g.bound_candidate) + "\n";
  }
  const ReportFormat format = format_of(cfg);
  std::string bytes = format == ReportFormat::csv
                          ? csv
                          : (format == ReportFormat::json
                                 ? nlohmann::ordered_json{{"rows", rows}}.dump(2) + "\n"
                                 : text);
  write_result(cfg, bytes, out);
  return 0;
}

}  // namespace detail

/// Entry point shared by the binary and the tests. Returns 0 on success,
/// 1 on usage errors, 2 on computation errors.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"prime constellation and polynomial prime-value predictions, counts and deviation bands"};
  app.require_subcommand(1);

  RunConfig cfg;
  detail::ModelOpts model_opts;
  int gap_r = 1;
  std::string xs_text;
  unsigned threads_flag = 0;

  auto add_common = [&](CLI::App* cmd, bool with_format) {
    cmd->add_option("--threads", threads_flag,
                    "worker count (default: PRIMEBANDS_THREADS env var, else 1)");
    if (with_format) {
      cmd->add_option("--format", cfg.format, "output format: csv, json or text")->capture_default_str();
      cmd->add_option("--output", cfg.output, "write the result to this file instead of stdout");
    }
  };

  CLI::App* tuples = app.add_subcommand("tuples", "prime constellation counts and tables");
  CLI::App* t_count = tuples->add_subcommand("count", "actual constellation count");
  t_count->add_option("--pattern", cfg.pattern, "offsets including the leading 0, e.g. 0,4,6")
      ->required();
  t_count->add_option("--x", xs_text, "upper bound, e.g. 1e5")->required();
  add_common(t_count, true);

  CLI::App* t_constant = tuples->add_subcommand("constant", "singular-series constant");
  t_constant->add_option("--pattern", cfg.pattern, "offsets including the leading 0")->required();
  std::string prime_limit_text;
  t_constant->add_option("--prime-limit", prime_limit_text, "Euler-product truncation, e.g. 1e7");
  add_common(t_constant, true);

  CLI::App* t_table = tuples->add_subcommand("table", "deviation table over several x");
  t_table->add_option("--pattern", cfg.pattern, "offsets including the leading 0")->required();
  t_table->add_option("--x", xs_text, "comma-separated bounds, e.g. 1e5,1e6,1e7")->required();
  std::string t_table_plimit;
  t_table->add_option("--prime-limit", t_table_plimit, "Euler-product truncation (default 1e7)");
  t_table->add_option("--rel-tol", cfg.rel_tol, "quadrature relative tolerance")->capture_default_str();
  add_common(t_table, true);

  CLI::App* bh = app.add_subcommand("bh", "polynomial prime-value counts and tables");
  CLI::App* b_count = bh->add_subcommand("count", "actual count of prime-valued arguments");
  b_count->add_option("--polys", cfg.polys, "coefficient lists constant-first, ';'-separated, e.g. \"1,0,1\"")
      ->required();
  b_count->add_option("--x", xs_text, "upper bound for the argument n")->required();
  add_common(b_count, true);

  CLI::App* b_constant = bh->add_subcommand("constant", "singular-series constant");
  b_constant->add_option("--polys", cfg.polys, "coefficient lists constant-first")->required();
  std::string b_plimit;
  b_constant->add_option("--prime-limit", b_plimit, "Euler-product truncation, e.g. 1e7");
  add_common(b_constant, true);

  CLI::App* b_table = bh->add_subcommand("table", "deviation table over several x");
  b_table->add_option("--polys", cfg.polys, "coefficient lists constant-first")->required();
  b_table->add_option("--x", xs_text, "comma-separated bounds")->required();
  std::string b_table_plimit;
  b_table->add_option("--prime-limit", b_table_plimit,
                      "Euler-product truncation (default: 1e7 stabilized, 1e6 otherwise)");
  b_table->add_option("--rel-tol", cfg.rel_tol, "quadrature relative tolerance")->capture_default_str();
  add_common(b_table, true);

  CLI::App* cramer = app.add_subcommand("cramer", "generalized urn-model simulation and CLT checks");
  CLI::App* c_sim = cramer->add_subcommand("simulate", "Monte Carlo draws against exact moments");
  c_sim->add_option("--model", model_opts.model, "classic, tuple or bateman_horn");
  c_sim->add_option("--C", model_opts.constant, "singular-series constant");
  c_sim->add_option("--k,--r", model_opts.k, "log exponent (k or r)");
  c_sim->add_option("--degree-product", model_opts.degree_product, "h_1*...*h_r for bateman_horn");
  c_sim->add_option("--x", xs_text, "number of urns")->required();
  c_sim->add_option("--trials", cfg.trials, "number of independent realizations")->capture_default_str();
  c_sim->add_option("--seed", cfg.seed, "base seed for the counter-based generator")->capture_default_str();
  add_common(c_sim, true);

  CLI::App* c_lyap = cramer->add_subcommand("lyapunov", "Lyapunov CLT quotient along x");
  c_lyap->add_option("--model", model_opts.model, "classic, tuple or bateman_horn");
  c_lyap->add_option("--C", model_opts.constant, "singular-series constant");
  c_lyap->add_option("--k,--r", model_opts.k, "log exponent (k or r)");
  c_lyap->add_option("--degree-product", model_opts.degree_product, "h_1*...*h_r for bateman_horn");
  c_lyap->add_option("--x", xs_text, "comma-separated bounds")->required();
  add_common(c_lyap, true);

  CLI::App* gap = app.add_subcommand("gap", "sum-vs-integral discrepancy report");
  gap->add_option("--r", gap_r, "log power r >= 1")->capture_default_str();
  gap->add_option("--x", xs_text, "comma-separated bounds")->required();
  add_common(gap, true);

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("primebands");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    err << "example: tuples table --pattern 0,2 --x 1e5,1e6 --format csv\n";
    return 1;
  }

  try {
    cfg.threads = detail::resolve_cli_threads(threads_flag, std::getenv("PRIMEBANDS_THREADS"));
    try {
      cfg.xs = xs_text.empty() ? std::vector<u64>{} : detail::parse_count_list(xs_text);
      for (const std::string* pl : {&prime_limit_text, &t_table_plimit, &b_plimit, &b_table_plimit})
        if (!pl->empty()) cfg.prime_limit = detail::parse_count(*pl);
    } catch (const std::invalid_argument& e) {
      err << "usage error: " << e.what() << "\n";
      return 1;
    }

    auto dispatch = [&](CLI::App* leaf, const std::string& name, auto fn) -> std::optional<int> {
      if (leaf->parsed()) {
        cfg.subcommand = name;
        return fn();
      }
      return std::nullopt;
    };

    std::optional<int> rc;
    try {
      if (!rc) rc = dispatch(t_count, "tuples count", [&] { return detail::run_tuples_count(cfg, out); });
      if (!rc) rc = dispatch(t_constant, "tuples constant", [&] { return detail::run_tuples_constant(cfg, out); });
      if (!rc) rc = dispatch(t_table, "tuples table", [&] { return detail::run_tuples_table(cfg, out, err); });
      if (!rc) rc = dispatch(b_count, "bh count", [&] { return detail::run_bh_count(cfg, out, err); });
      if (!rc) rc = dispatch(b_constant, "bh constant", [&] { return detail::run_bh_constant(cfg, out, err); });
      if (!rc) rc = dispatch(b_table, "bh table", [&] { return detail::run_bh_table(cfg, out, err); });
      if (!rc) rc = dispatch(c_sim, "cramer simulate", [&] { return detail::run_cramer_simulate(cfg, model_opts, out); });
      if (!rc) rc = dispatch(c_lyap, "cramer lyapunov", [&] { return detail::run_cramer_lyapunov(cfg, model_opts, out); });
      if (!rc) rc = dispatch(gap, "gap", [&] { return detail::run_gap(cfg, gap_r, out, err); });
    } catch (const std::invalid_argument& e) {
      err << "usage error: " << e.what() << "\n";
      err << "example: tuples table --pattern 0,2 --x 1e5,1e6 --format csv\n";
      return 1;
    }
    if (!rc) {
      err << "usage error: no subcommand given\n";
      return 1;
    }
    return *rc;
  } catch (const std::exception& e) {
    err << "computation error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace primebands::cli
