#pragma once

// Sweep runner behind the command-line tool: configuration, grid evaluation
// in parallel, and streaming CSV output with a JSON metadata sidecar.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "wmr/curves.hpp"
#include "wmr/errors.hpp"
#include "wmr/measures.hpp"
#include "wmr/oracle.hpp"
#include "wmr/parallel.hpp"
#include "wmr/params.hpp"

namespace wmr {

enum class Experiment {
  ln_vs_p,
  mw_vs_p,
  critical_ln,
  critical_mw,
  transmissivity_vs_s,
  tel_fidelity_vs_p,
  is_fidelity_vs_p,
  oracle_suite
};

inline constexpr std::array<std::pair<Experiment, const char*>, 8> kExperimentNames{{
    {Experiment::ln_vs_p, "ln_vs_p"},
    {Experiment::mw_vs_p, "mw_vs_p"},
    {Experiment::critical_ln, "critical_ln"},
    {Experiment::critical_mw, "critical_mw"},
    {Experiment::transmissivity_vs_s, "transmissivity_vs_s"},
    {Experiment::tel_fidelity_vs_p, "tel_fidelity_vs_p"},
    {Experiment::is_fidelity_vs_p, "is_fidelity_vs_p"},
    {Experiment::oracle_suite, "oracle_suite"},
}};

inline std::string to_string(Experiment e) {
  for (const auto& [k, name] : kExperimentNames)
    if (k == e) return name;
  return "?";
}

inline Experiment parse_experiment(const std::string& name) {
  for (const auto& [k, label] : kExperimentNames)
    if (name == label) return k;
  std::string known;
  for (const auto& [k, label] : kExperimentNames) known += (known.empty() ? "" : ", ") + std::string(label);
  throw UsageError("unknown experiment '" + name + "' (expected one of: " + known + ")");
}

/// Arithmetic grid start, start + step, ... up to and including stop when it
/// lies on the lattice.
struct PGrid {
  double start = 0.0;
  double stop = 1.0;
  double step = 0.005;

  std::vector<double> points() const {
    std::vector<double> pts;
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    pts.reserve(count);
    for (std::size_t i = 0; i < count; ++i) pts.push_back(std::min(stop, start + step * static_cast<double>(i)));
    return pts;
  }
};

struct ExperimentConfig {
  Experiment experiment = Experiment::ln_vs_p;
  std::vector<int> n_list;
  std::vector<double> s_list;
  double theta = std::numbers::pi / 2;
  PGrid p_grid;
  std::optional<int> m;      ///< bipartition size; n/2 when unset
  std::string output_path;   ///< empty means standard output
  bool quick = false;        ///< smaller grids for oracle_suite
  std::set<std::string> defaulted; ///< fields whose values came from the runner's defaults

  int m_for(int n) const { return m.value_or(n / 2); }
  void mark_explicit(const std::string& field) { defaulted.erase(field); }
};

/// Defaults for each experiment. Every field is recorded as defaulted until
/// overridden.
inline ExperimentConfig default_config(Experiment e) {
  ExperimentConfig cfg;
  cfg.experiment = e;
  cfg.s_list = {0.0, 0.3, 0.5, 0.7};
  switch (e) {
  case Experiment::critical_ln:
  case Experiment::critical_mw:
    for (int n = 4; n <= 100; n += 4) cfg.n_list.push_back(n);
    break;
  case Experiment::transmissivity_vs_s:
    cfg.n_list = {4, 8, 12, 24};
    cfg.s_list.clear();
    for (int i = 0; i <= 18; ++i) cfg.s_list.push_back(0.05 * i);
    cfg.p_grid = {0.2, 0.2, 0.005};
    break;
  default:
    cfg.n_list = {4};
    break;
  }
  cfg.defaulted = {"n_list", "s_list", "theta", "p_grid", "m"};
  return cfg;
}

inline bool uses_mw(Experiment e) { return e == Experiment::mw_vs_p || e == Experiment::critical_mw; }
inline bool uses_fidelity(Experiment e) { return e == Experiment::tel_fidelity_vs_p || e == Experiment::is_fidelity_vs_p; }
inline bool is_critical(Experiment e) { return e == Experiment::critical_ln || e == Experiment::critical_mw; }

inline void validate(const ExperimentConfig& cfg) {
  auto fail = [](const std::string& msg) { throw UsageError(msg); };
  if (cfg.experiment == Experiment::oracle_suite) return;
  if (cfg.n_list.empty()) fail("n list must be nonempty");
  if (cfg.s_list.empty()) fail("s list must be nonempty");
  if (!(cfg.theta >= 0.0 && cfg.theta <= std::numbers::pi)) fail("theta must lie in [0, pi]");
  const PGrid& g = cfg.p_grid;
  if (!(g.step > 0.0)) fail("p step must be positive");
  if (!(g.start >= 0.0 && g.stop <= 1.0 && g.start <= g.stop)) fail("p grid must satisfy 0 <= start <= stop <= 1");
  if (is_critical(cfg.experiment) && !(g.start < g.stop)) fail("critical experiments need p start < p stop as the search bracket");
  for (double s : cfg.s_list)
    if (!(s >= 0.0 && s < 1.0)) fail("weak strengths must lie in [0, 1), got " + std::to_string(s));
  for (int n : cfg.n_list) {
    if (n < 2) fail("qubit counts must be >= 2, got " + std::to_string(n));
    if (uses_fidelity(cfg.experiment) && n < 3) fail("fidelity experiments need n >= 3, got " + std::to_string(n));
    if (uses_mw(cfg.experiment) && n % 2 != 0) fail("MW experiments need even n, got " + std::to_string(n));
    if (cfg.m && (*cfg.m < 1 || *cfg.m > n - 1)) fail("m = " + std::to_string(*cfg.m) + " is not a valid bipartition for n = " + std::to_string(n));
  }
}

// ---------------------------------------------------------------------------
// CSV output

struct CsvRow {
  std::string experiment;
  int n = 0;
  std::optional<double> theta;
  std::optional<double> s;
  std::optional<double> p;
  std::optional<double> r_opt;
  std::optional<double> value;
  std::optional<double> transmissivity;
  std::string extra;
};

inline constexpr const char* kCsvHeader = "experiment,n,theta,s,p,r_opt,value,transmissivity,extra";

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

inline std::string format_row(const CsvRow& row) {
  auto num = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  return csv_field(row.experiment) + ',' + std::to_string(row.n) + ',' + num(row.theta) + ',' + num(row.s) + ',' + num(row.p) + ',' +
         num(row.r_opt) + ',' + num(row.value) + ',' + num(row.transmissivity) + ',' + csv_field(row.extra);
}

/// Row-at-a-time CSV writer; the header is written on construction.
class CsvWriter {
public:
  CsvWriter(std::ostream& out, std::string context) : out_(out), context_(std::move(context)) {
    out_ << kCsvHeader << '\n';
    check();
  }

  void write(const CsvRow& row) {
    out_ << format_row(row) << '\n';
    ++rows_;
  }

  void flush() {
    out_.flush();
    check();
  }

  std::size_t rows() const { return rows_; }

private:
  void check() const {
    if (!out_) throw std::runtime_error("CSV write failed for " + context_);
  }

  std::ostream& out_;
  std::string context_;
  std::size_t rows_ = 0;
};

inline std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  return f;
}

/// Writes a header and the given rows to `path`.
template <class Range>
void emit_csv(const Range& rows, const std::string& path) {
  std::ofstream f = open_output(path);
  CsvWriter w(f, "'" + path + "'");
  for (const CsvRow& row : rows) w.write(row);
  w.flush();
}

// ---------------------------------------------------------------------------
// Evaluation

struct ExperimentSummary {
  std::size_t rows = 0;
  std::size_t flagged = 0;     ///< rows whose evaluation threw
  std::size_t no_crossing = 0; ///< critical searches without a threshold crossing in the bracket
  bool oracle_passed = true;
  double max_oracle_deviation = 0.0;
};

namespace detail {

struct SweepTask {
  int n;
  double s;
  double p;
};

inline std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

inline std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

inline Quantity quantity_of(Experiment e) {
  switch (e) {
  case Experiment::mw_vs_p:
  case Experiment::critical_mw: return Quantity::e_mw;
  case Experiment::tel_fidelity_vs_p: return Quantity::f_tel;
  case Experiment::is_fidelity_vs_p: return Quantity::f_is;
  default: return Quantity::e_ln;
  }
}

inline std::string kind_tag(const ExperimentConfig& cfg, int n) {
  const Quantity q = quantity_of(cfg.experiment);
  std::string tag = to_string(q);
  if (q == Quantity::e_ln) tag += ";m=" + std::to_string(cfg.m_for(n));
  return tag;
}

inline CsvRow evaluate_task(const ExperimentConfig& cfg, const SweepTask& t) {
  const Experiment e = cfg.experiment;
  const Quantity q = quantity_of(e);
  const int m = cfg.m_for(t.n);
  CsvRow row;
  row.experiment = to_string(e);
  row.n = t.n;
  row.theta = is_fidelity(q) ? std::numbers::pi / 2 : cfg.theta;
  row.s = t.s;
  row.extra = kind_tag(cfg, t.n);
  const GhzParams gp{*row.theta, t.n};
  try {
    if (e == Experiment::transmissivity_vs_s) {
      const OptResult res = optimize_quantity(Quantity::e_ln, gp, t.s, t.p, m);
      row.p = t.p;
      row.r_opt = res.r_opt;
      row.value = res.transmissivity_at_opt;
      row.transmissivity = res.transmissivity_at_opt;
      row.extra += ";e_ln=" + format_number(res.value_opt);
    } else if (is_critical(e)) {
      const bool unprotected = t.s == 0.0;
      if (unprotected) row.extra += ";unprotected";
      const double closed = critical_p_closed_form(gp, t.s, q == Quantity::e_mw ? MeasureKind::mw : MeasureKind::ln);
      row.value = closed;
      row.extra += ";value=closed_form_pc";
      try {
        const CriticalResult c = critical_p_numeric(q, gp, t.s, m, unprotected, cfg.p_grid.start, cfg.p_grid.stop);
        const OptResult at = curve_point(q, gp, t.s, c.p_critical, m, unprotected);
        row.p = c.p_critical;
        row.r_opt = at.r_opt;
        row.transmissivity = at.transmissivity_at_opt;
        row.extra += ";threshold=" + format_number(c.threshold_used) + ";bracket=" + format_number(c.bracket_width);
      } catch (const BracketError&) {
        row.extra += ";no_death_in_range";
      }
    } else {
      const bool unprotected = t.s == 0.0;
      const OptResult res = curve_point(q, gp, t.s, t.p, m, unprotected);
      row.p = t.p;
      row.r_opt = res.r_opt;
      row.value = res.value_opt;
      row.transmissivity = res.transmissivity_at_opt;
      if (unprotected) row.extra += ";unprotected";
    }
  } catch (const std::exception& ex) {
    row.extra += ";error=" + std::string(ex.what());
    row.value = std::nullopt;
  }
  return row;
}

inline std::vector<SweepTask> sweep_tasks(const ExperimentConfig& cfg) {
  std::vector<SweepTask> tasks;
  const auto ns = sorted_unique(cfg.n_list);
  const auto ss = sorted_unique(cfg.s_list);
  const auto ps = is_critical(cfg.experiment) ? std::vector<double>{cfg.p_grid.start} : cfg.p_grid.points();
  for (int n : ns)
    for (double s : ss)
      for (double p : ps) tasks.push_back({n, s, p});
  return tasks;
}

} // namespace detail

inline constexpr std::size_t kSweepChunk = 4096;

/// Runs the experiment, streaming rows to `csv` in (n, s, p) order. Grid
/// points are evaluated in parallel chunk by chunk.
inline ExperimentSummary run_experiment(const ExperimentConfig& cfg, std::ostream& csv, const std::string& context = "output") {
  validate(cfg);
  CsvWriter writer(csv, context);
  ExperimentSummary sum;

  if (cfg.experiment == Experiment::oracle_suite) {
    for (const OracleCheck& chk : run_oracle_suite(cfg.quick)) {
      CsvRow row;
      row.experiment = to_string(cfg.experiment);
      row.n = chk.n;
      row.value = chk.max_deviation;
      row.extra = chk.name + ";tol=" + format_number(chk.tolerance) + ";points=" + std::to_string(chk.points) + ";" +
                  (chk.passed() ? "pass" : "fail") + (chk.passed() ? "" : ";worst=" + chk.worst_point);
      writer.write(row);
      sum.oracle_passed = sum.oracle_passed && chk.passed();
      sum.max_oracle_deviation = std::max(sum.max_oracle_deviation, chk.max_deviation);
    }
    writer.flush();
    sum.rows = writer.rows();
    return sum;
  }

  const auto tasks = detail::sweep_tasks(cfg);
  for (std::size_t begin = 0; begin < tasks.size(); begin += kSweepChunk) {
    const std::size_t count = std::min(kSweepChunk, tasks.size() - begin);
    const auto rows = parallel_map(count, [&](std::size_t i) { return detail::evaluate_task(cfg, tasks[begin + i]); });
    for (const CsvRow& row : rows) {
      if (row.extra.find(";error=") != std::string::npos) ++sum.flagged;
      if (row.extra.find(";no_death_in_range") != std::string::npos) ++sum.no_crossing;
      writer.write(row);
    }
    writer.flush();
  }
  sum.rows = writer.rows();
  return sum;
}

// ---------------------------------------------------------------------------
// Configuration files and metadata

/// Metadata describing a run; deterministic for a given configuration.
inline nlohmann::ordered_json experiment_metadata(const ExperimentConfig& cfg, const ExperimentSummary& sum) {
  nlohmann::ordered_json j;
  j["experiment"] = to_string(cfg.experiment);
  j["columns"] = kCsvHeader;
  j["significant_digits"] = 12;
  if (cfg.experiment == Experiment::oracle_suite) {
    j["quick"] = cfg.quick;
    j["oracle_passed"] = sum.oracle_passed;
    j["max_oracle_deviation"] = sum.max_oracle_deviation;
  } else {
    j["n_list"] = detail::sorted_unique(cfg.n_list);
    j["s_list"] = detail::sorted_unique(cfg.s_list);
    j["theta"] = cfg.theta;
    j["p_grid"] = {{"start", cfg.p_grid.start}, {"stop", cfg.p_grid.stop}, {"step", cfg.p_grid.step}};
    j["m"] = cfg.m ? nlohmann::ordered_json(*cfg.m) : nlohmann::ordered_json("n/2");
    if (uses_fidelity(cfg.experiment)) j["resource_theta"] = std::numbers::pi / 2;
    if (!is_critical(cfg.experiment) && cfg.experiment != Experiment::transmissivity_vs_s)
      j["baseline"] = "s = 0 rows are the unprotected curve (no weak measurement, no reversal)";
    if (is_critical(cfg.experiment))
      j["critical"] = {{"threshold", critical_threshold(detail::quantity_of(cfg.experiment))},
                       {"bracket", {cfg.p_grid.start, cfg.p_grid.stop}},
                       {"p_column", "numeric critical damping of the optimized curve"},
                       {"value_column", "closed-form critical damping"}};
    j["no_crossing_rows"] = sum.no_crossing;
  }
  j["defaulted_fields"] = std::vector<std::string>(cfg.defaulted.begin(), cfg.defaulted.end());
  j["default_note"] = "defaulted fields hold the runner's own choices of grid and weak strengths";
  j["rows"] = sum.rows;
  j["flagged_rows"] = sum.flagged;
  return j;
}

/// Applies a JSON configuration file on top of `cfg`. Recognised keys:
/// experiment, n, s, theta, p_start, p_stop, p_step, m, out, quick.
inline void apply_config_json(ExperimentConfig& cfg, const nlohmann::json& j) {
  try {
    if (j.contains("n")) {
      cfg.n_list = j["n"].is_array() ? j["n"].get<std::vector<int>>() : std::vector<int>{j["n"].get<int>()};
      cfg.mark_explicit("n_list");
    }
    if (j.contains("s")) {
      cfg.s_list = j["s"].is_array() ? j["s"].get<std::vector<double>>() : std::vector<double>{j["s"].get<double>()};
      cfg.mark_explicit("s_list");
    }
    if (j.contains("theta")) {
      cfg.theta = j["theta"].get<double>();
      cfg.mark_explicit("theta");
    }
    for (const auto& [key, field] : {std::pair{"p_start", &PGrid::start}, std::pair{"p_stop", &PGrid::stop}, std::pair{"p_step", &PGrid::step}})
      if (j.contains(key)) {
        cfg.p_grid.*field = j[key].get<double>();
        cfg.mark_explicit("p_grid");
      }
    if (j.contains("m")) {
      cfg.m = j["m"].get<int>();
      cfg.mark_explicit("m");
    }
    if (j.contains("out")) cfg.output_path = j["out"].get<std::string>();
    if (j.contains("quick")) cfg.quick = j["quick"].get<bool>();
  } catch (const nlohmann::json::exception& ex) {
    throw UsageError(std::string("invalid configuration value: ") + ex.what());
  }
}

inline nlohmann::json read_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read configuration file '" + path + "'");
  try {
    return nlohmann::json::parse(f);
  } catch (const nlohmann::json::parse_error& ex) {
    throw UsageError("configuration file '" + path + "' is not valid JSON: " + ex.what());
  }
}

/// Runs the experiment into cfg.output_path (standard output when empty) and
/// writes `<output>.meta.json` next to a file output.
inline ExperimentSummary run_experiment_to_output(const ExperimentConfig& cfg) {
  if (cfg.output_path.empty()) return run_experiment(cfg, std::cout, "standard output");
  validate(cfg);
  ExperimentSummary sum;
  {
    std::ofstream f = open_output(cfg.output_path);
    sum = run_experiment(cfg, f, "'" + cfg.output_path + "'");
  }
  const std::string meta_path = cfg.output_path + ".meta.json";
  std::ofstream meta = open_output(meta_path);
  meta << experiment_metadata(cfg, sum).dump(2) << '\n';
  if (!meta) throw std::runtime_error("cannot write '" + meta_path + "'");
  return sum;
}

} // namespace wmr
