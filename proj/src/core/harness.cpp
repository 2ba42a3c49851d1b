#include "harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "errors.hpp"
#include "rng.hpp"
#include "textio.hpp"

namespace pfopt {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError(where, what);
}

std::string join_path(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known) fail(join_path(where, it.key()), "unknown field");
  }
}

const json* find(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double get_double(const json& obj, const std::string& where, const char* key,
                  double def) {
  const json* v = find(obj, key);
  if (!v) return def;
  if (!v->is_number()) fail(join_path(where, key), "expected a number");
  return v->get<double>();
}

long get_long(const json& obj, const std::string& where, const char* key,
              long def) {
  const json* v = find(obj, key);
  if (!v) return def;
  if (!v->is_number_integer()) fail(join_path(where, key), "expected an integer");
  return v->get<long>();
}

int get_int(const json& obj, const std::string& where, const char* key,
            int def) {
  return static_cast<int>(get_long(obj, where, key, def));
}

std::uint64_t get_u64(const json& obj, const std::string& where,
                      const char* key, std::uint64_t def) {
  const json* v = find(obj, key);
  if (!v) return def;
  if (v->is_number_unsigned()) return v->get<std::uint64_t>();
  if (v->is_number_integer() && v->get<long long>() >= 0)
    return static_cast<std::uint64_t>(v->get<long long>());
  fail(join_path(where, key), "expected a nonnegative integer");
}

bool get_bool(const json& obj, const std::string& where, const char* key,
              bool def) {
  const json* v = find(obj, key);
  if (!v) return def;
  if (!v->is_boolean()) fail(join_path(where, key), "expected a boolean");
  return v->get<bool>();
}

std::string get_string(const json& obj, const std::string& where,
                       const char* key, const std::string& def) {
  const json* v = find(obj, key);
  if (!v) return def;
  if (!v->is_string()) fail(join_path(where, key), "expected a string");
  return v->get<std::string>();
}

int strategy_ordinal(Strategy s) { return static_cast<int>(s); }

/* One parsed trace line; the unit the aggregation runs on. */
struct TraceRow {
  int iteration = 0;
  double y = 0.0;
  double best_so_far = 0.0;
};

std::vector<TraceRow> to_rows(const std::vector<IterationRecord>& records) {
  std::vector<TraceRow> rows(records.size());
  for (size_t i = 0; i < records.size(); ++i)
    rows[i] = {records[i].iteration, records[i].y, records[i].best_so_far};
  return rows;
}

std::string trace_to_csv(const std::vector<TraceRow>& rows) {
  std::string out = "iteration,y,best_so_far\n";
  for (const TraceRow& r : rows)
    out += std::to_string(r.iteration) + "," + fmt_g17(r.y) + "," +
           fmt_g17(r.best_so_far) + "\n";
  return out;
}

double parse_double_field(const std::string& s, const std::string& where) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + s.size() || s.empty()) fail(where, "expected a number");
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  for (;;) {
    const size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<TraceRow> parse_trace_csv(const std::string& text,
                                      const std::string& name) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "iteration,y,best_so_far")
    fail(name + ":1", "bad trace header");
  std::vector<TraceRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    const std::string where = name + ":" + std::to_string(lineno);
    if (cells.size() != 3) fail(where, "expected 3 columns");
    TraceRow r;
    r.iteration = static_cast<int>(parse_double_field(cells[0], where));
    r.y = parse_double_field(cells[1], where);
    r.best_so_far = parse_double_field(cells[2], where);
    rows.push_back(r);
  }
  return rows;
}

std::filesystem::path trace_path(const CampaignConfig& cfg, Strategy s,
                                 int repeat) {
  return cfg.output_dir / "traces" /
         (strategy_name(s) + "_rep" + std::to_string(repeat) + ".csv");
}

/* Per-iteration aggregates across repeats.  Early-stopped repeats simply
 * drop out of later iterations' statistics. */
void aggregate(const std::vector<std::vector<TraceRow>>& repeats,
               double threshold, StrategySummary& out) {
  size_t max_len = 0;
  for (const auto& r : repeats) max_len = std::max(max_len, r.size());
  for (size_t i = 0; i < max_len; ++i) {
    double sum = 0.0, best_sum = 0.0;
    int k = 0, converged = 0;
    for (const auto& r : repeats)
      if (i < r.size()) {
        sum += r[i].y;
        best_sum += r[i].best_so_far;
        if (r[i].best_so_far <= threshold) ++converged;
        ++k;
      }
    const double mean = sum / k;
    double ss = 0.0;
    for (const auto& r : repeats)
      if (i < r.size()) ss += (r[i].y - mean) * (r[i].y - mean);
    out.mean_error.push_back(mean);
    out.std_error.push_back(std::sqrt(ss / k));  // population convention
    out.best_so_far_mean.push_back(best_sum / k);
    out.convergence_fraction.push_back(static_cast<double>(converged) / k);
  }
}

std::string campaign_summary_json(const CampaignSummary& summary) {
  json j;
  j["experiment"] = summary.experiment;
  j["convergence_threshold"] = summary.convergence_threshold;
  j["strategies"] = json::array();
  for (const StrategySummary& ss : summary.strategies) {
    json s;
    s["name"] = strategy_name(ss.strategy);
    s["wall_seconds"] = ss.wall_seconds;
    s["repeats_done"] = ss.n_repeats_done;
    s["failed_repeats"] = ss.failed_repeats;
    s["failures"] = ss.failures;
    const auto conv = convergence_iteration(ss.mean_error,
                                            summary.convergence_threshold);
    if (conv)
      s["convergence_iteration"] = *conv;
    else
      s["convergence_iteration"] = nullptr;
    if (!ss.mean_error.empty()) s["final_mean_error"] = ss.mean_error.back();
    j["strategies"].push_back(s);
  }
  return j.dump(2) + "\n";
}

}  // namespace

void validate_config(const CampaignConfig& cfg) {
  if (cfg.strategies.empty()) fail("strategies", "must not be empty");
  for (size_t a = 0; a < cfg.strategies.size(); ++a)
    for (size_t b = a + 1; b < cfg.strategies.size(); ++b)
      if (cfg.strategies[a] == cfg.strategies[b])
        fail("strategies", "duplicate strategy " +
                               strategy_name(cfg.strategies[a]));
  if (cfg.n_repeats < 1) fail("n_repeats", "must be >= 1");
  if (cfg.output_dir.empty()) fail("output_dir", "must not be empty");

  if (cfg.experiment.n_source_samples < 2)
    fail("experiment.n_source_samples", "must be >= 2");
  if (cfg.experiment.n_source_samples > 2000000000L)
    fail("experiment.n_source_samples", "too large");
  if ((cfg.experiment.kind == ExperimentKind::SineNoise ||
       cfg.experiment.kind == ExperimentKind::SinePhase) &&
      cfg.experiment.quadrature_nodes < 32)
    fail("experiment.quadrature_nodes", "must be >= 32");

  if (cfg.run.n_particles < 1) fail("run.n_particles", "must be >= 1");
  if (cfg.run.t_max < 1) fail("run.t_max", "must be >= 1");
  if (cfg.run.warmup_iterations < 0) fail("run.warmup_iterations", "must be >= 0");
  if (!(cfg.run.gamma > 0.0) || !std::isfinite(cfg.run.gamma))
    fail("run.gamma", "must be positive and finite");
  if (!(cfg.run.stop_threshold >= 0.0)) fail("run.stop_threshold", "must be >= 0");

  if (cfg.run.mc.n_samples < 1) fail("run.mc.n_samples", "must be >= 1");
  if (cfg.run.mc.burn_in < 0) fail("run.mc.burn_in", "must be >= 0");
  if (cfg.run.mc.thinning < 1) fail("run.mc.thinning", "must be >= 1");
  if (!(cfg.run.mc.proposal_std > 0.0) || !std::isfinite(cfg.run.mc.proposal_std))
    fail("run.mc.proposal_std", "must be positive and finite");

  if (!(cfg.run.lm.lambda0 > 0.0)) fail("run.lm.lambda0", "must be positive");
  if (!(cfg.run.lm.adapt_up >= 1.0)) fail("run.lm.adapt_up", "must be >= 1");
  if (!(cfg.run.lm.adapt_down >= 1.0)) fail("run.lm.adapt_down", "must be >= 1");
  if (!(cfg.run.lm.diag_floor > 0.0)) fail("run.lm.diag_floor", "must be positive");
  if (!(cfg.run.lm.ridge_scale > 0.0)) fail("run.lm.ridge_scale", "must be positive");
}

double resolved_convergence_threshold(const CampaignConfig& cfg) {
  if (cfg.convergence_threshold > 0.0) return cfg.convergence_threshold;
  return 3.0 / std::sqrt(static_cast<double>(cfg.run.mc.n_samples));
}

CampaignConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail("json", e.what());
  }
  if (!j.is_object()) fail("json", "top level must be an object");
  check_keys(j, "",
             {"experiment", "run", "strategies", "n_repeats",
              "shared_initial_conditions", "output_dir",
              "convergence_threshold", "targets_path"});

  CampaignConfig cfg;

  if (const json* e = find(j, "experiment")) {
    if (!e->is_object()) fail("experiment", "expected an object");
    check_keys(*e, "experiment",
               {"kind", "n_source_samples", "seed", "quadrature_nodes"});
    cfg.experiment.kind = experiment_from_name(
        get_string(*e, "experiment", "kind", experiment_name(cfg.experiment.kind)));
    cfg.experiment.n_source_samples = get_long(
        *e, "experiment", "n_source_samples", cfg.experiment.n_source_samples);
    cfg.experiment.seed = get_u64(*e, "experiment", "seed", cfg.experiment.seed);
    cfg.experiment.quadrature_nodes = get_int(
        *e, "experiment", "quadrature_nodes", cfg.experiment.quadrature_nodes);
  }

  if (const json* r = find(j, "run")) {
    if (!r->is_object()) fail("run", "expected an object");
    check_keys(*r, "run",
               {"n_particles", "t_max", "stop_threshold", "gamma",
                "warmup_iterations", "master_seed", "mc", "lm"});
    cfg.run.n_particles = get_int(*r, "run", "n_particles", cfg.run.n_particles);
    cfg.run.t_max = get_int(*r, "run", "t_max", cfg.run.t_max);
    cfg.run.stop_threshold =
        get_double(*r, "run", "stop_threshold", cfg.run.stop_threshold);
    cfg.run.gamma = get_double(*r, "run", "gamma", cfg.run.gamma);
    cfg.run.warmup_iterations =
        get_int(*r, "run", "warmup_iterations", cfg.run.warmup_iterations);
    cfg.run.master_seed = get_u64(*r, "run", "master_seed", cfg.run.master_seed);
    if (const json* mc = find(*r, "mc")) {
      if (!mc->is_object()) fail("run.mc", "expected an object");
      check_keys(*mc, "run.mc",
                 {"n_samples", "burn_in", "proposal_std", "thinning"});
      cfg.run.mc.n_samples = get_int(*mc, "run.mc", "n_samples", cfg.run.mc.n_samples);
      cfg.run.mc.burn_in = get_int(*mc, "run.mc", "burn_in", cfg.run.mc.burn_in);
      cfg.run.mc.proposal_std =
          get_double(*mc, "run.mc", "proposal_std", cfg.run.mc.proposal_std);
      cfg.run.mc.thinning = get_int(*mc, "run.mc", "thinning", cfg.run.mc.thinning);
    }
    if (const json* lm = find(*r, "lm")) {
      if (!lm->is_object()) fail("run.lm", "expected an object");
      check_keys(*lm, "run.lm",
                 {"lambda0", "adapt_up", "adapt_down", "diag_floor", "ridge_scale"});
      cfg.run.lm.lambda0 = get_double(*lm, "run.lm", "lambda0", cfg.run.lm.lambda0);
      cfg.run.lm.adapt_up = get_double(*lm, "run.lm", "adapt_up", cfg.run.lm.adapt_up);
      cfg.run.lm.adapt_down =
          get_double(*lm, "run.lm", "adapt_down", cfg.run.lm.adapt_down);
      cfg.run.lm.diag_floor =
          get_double(*lm, "run.lm", "diag_floor", cfg.run.lm.diag_floor);
      cfg.run.lm.ridge_scale =
          get_double(*lm, "run.lm", "ridge_scale", cfg.run.lm.ridge_scale);
    }
  }

  if (const json* s = find(j, "strategies")) {
    if (!s->is_array()) fail("strategies", "expected an array of strings");
    cfg.strategies.clear();
    for (size_t i = 0; i < s->size(); ++i) {
      const json& v = (*s)[i];
      const std::string where = "strategies[" + std::to_string(i) + "]";
      if (!v.is_string()) fail(where, "expected a string");
      try {
        cfg.strategies.push_back(strategy_from_name(v.get<std::string>()));
      } catch (const ParseError& e) {
        fail(where, e.what());
      }
    }
  }

  cfg.n_repeats = get_int(j, "", "n_repeats", cfg.n_repeats);
  cfg.shared_initial_conditions = get_bool(j, "", "shared_initial_conditions",
                                           cfg.shared_initial_conditions);
  cfg.output_dir = get_string(j, "", "output_dir", cfg.output_dir.string());
  cfg.convergence_threshold =
      get_double(j, "", "convergence_threshold", cfg.convergence_threshold);
  cfg.targets_path = get_string(j, "", "targets_path", cfg.targets_path.string());

  return cfg;
}

CampaignConfig parse_config(const std::filesystem::path& path) {
  return parse_config_text(read_file(path));
}

std::string config_to_json(const CampaignConfig& cfg) {
  json j;
  j["experiment"] = {
      {"kind", experiment_name(cfg.experiment.kind)},
      {"n_source_samples", cfg.experiment.n_source_samples},
      {"seed", cfg.experiment.seed},
      {"quadrature_nodes", cfg.experiment.quadrature_nodes},
  };
  j["run"] = {
      {"n_particles", cfg.run.n_particles},
      {"t_max", cfg.run.t_max},
      {"stop_threshold", cfg.run.stop_threshold},
      {"gamma", cfg.run.gamma},
      {"warmup_iterations", cfg.run.warmup_iterations},
      {"master_seed", cfg.run.master_seed},
      {"mc",
       {{"n_samples", cfg.run.mc.n_samples},
        {"burn_in", cfg.run.mc.burn_in},
        {"proposal_std", cfg.run.mc.proposal_std},
        {"thinning", cfg.run.mc.thinning}}},
      {"lm",
       {{"lambda0", cfg.run.lm.lambda0},
        {"adapt_up", cfg.run.lm.adapt_up},
        {"adapt_down", cfg.run.lm.adapt_down},
        {"diag_floor", cfg.run.lm.diag_floor},
        {"ridge_scale", cfg.run.lm.ridge_scale}}},
  };
  j["strategies"] = json::array();
  for (Strategy s : cfg.strategies) j["strategies"].push_back(strategy_name(s));
  j["n_repeats"] = cfg.n_repeats;
  j["shared_initial_conditions"] = cfg.shared_initial_conditions;
  j["output_dir"] = cfg.output_dir.string();
  j["convergence_threshold"] = cfg.convergence_threshold;
  j["targets_path"] = cfg.targets_path.string();
  return j.dump(2) + "\n";
}

void apply_scale(CampaignConfig& cfg, const std::string& scale) {
  if (scale == "desk") {
    cfg.experiment.n_source_samples = 100000;
    cfg.run.n_particles = 50;
    cfg.run.t_max = 20;
    cfg.run.mc.n_samples = 2000;
    cfg.n_repeats = 3;
  } else if (scale == "paper") {
    cfg.experiment.n_source_samples = 1000000;
    cfg.run.n_particles = 100;
    cfg.run.t_max = 20;
    cfg.run.mc.n_samples = 10000;
    cfg.n_repeats = 10;
  } else {
    throw InvalidInput("unknown scale '" + scale + "' (use paper or desk)");
  }
}

std::optional<int> convergence_iteration(std::span<const double> series,
                                         double threshold) {
  if (!(threshold > 0.0)) throw InvalidInput("threshold must be positive");
  double running = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < series.size(); ++i) {
    running = std::min(running, series[i]);
    if (running <= threshold) return static_cast<int>(i) + 1;
  }
  return std::nullopt;
}

TargetMoments campaign_targets(const CampaignConfig& cfg) {
  if (!cfg.targets_path.empty()) return read_target_moments(cfg.targets_path);
  return compute_target_moments(gen_source_samples(cfg.experiment));
}

CampaignSummary run_campaign(const CampaignConfig& cfg) {
  validate_config(cfg);
  const double threshold = resolved_convergence_threshold(cfg);
  const TargetMoments targets = campaign_targets(cfg);

  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir / "traces", ec);
  if (ec)
    throw IoError("cannot create " + (cfg.output_dir / "traces").string() +
                  ": " + ec.message());
  write_target_moments(targets, cfg.output_dir / "targets.txt");

  CampaignSummary summary;
  summary.experiment = experiment_name(cfg.experiment.kind);
  summary.convergence_threshold = threshold;

  const Initializer init = initializer_for(cfg.experiment.kind);

  for (Strategy s : cfg.strategies) {
    StrategySummary ss;
    ss.strategy = s;
    std::vector<std::vector<TraceRow>> repeats;
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 1; r <= cfg.n_repeats; ++r) {
      RunConfig rc = cfg.run;
      rc.strategy = s;
      rc.master_seed = derive_seed(
          cfg.run.master_seed, kSeedPhaseRepeat, static_cast<std::uint64_t>(r),
          cfg.shared_initial_conditions ? 0u : 1u + strategy_ordinal(s));
      try {
        const std::vector<IterationRecord> records = run(rc, targets, init);
        const std::vector<TraceRow> rows = to_rows(records);
        write_file_atomic(trace_path(cfg, s, r), trace_to_csv(rows));
        repeats.push_back(rows);
        ++ss.n_repeats_done;
      } catch (const Error& e) {
        ++ss.failed_repeats;
        ss.failures.push_back(strategy_name(s) + " repeat " +
                              std::to_string(r) + ": " + e.what());
      }
    }
    ss.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    aggregate(repeats, threshold, ss);
    summary.strategies.push_back(std::move(ss));
  }

  emit_csv(summary, cfg.output_dir / "summary.csv");
  emit_svg(summary, cfg.output_dir / "campaign.svg");
  write_file_atomic(cfg.output_dir / "campaign_summary.json",
                    campaign_summary_json(summary));
  return summary;
}

CampaignSummary report_campaign(const CampaignConfig& cfg) {
  validate_config(cfg);
  const double threshold = resolved_convergence_threshold(cfg);

  CampaignSummary summary;
  summary.experiment = experiment_name(cfg.experiment.kind);
  summary.convergence_threshold = threshold;

  for (Strategy s : cfg.strategies) {
    StrategySummary ss;
    ss.strategy = s;
    std::vector<std::vector<TraceRow>> repeats;
    for (int r = 1; r <= cfg.n_repeats; ++r) {
      const std::filesystem::path p = trace_path(cfg, s, r);
      if (!std::filesystem::exists(p)) {
        ++ss.failed_repeats;
        ss.failures.push_back("missing trace " + p.string());
        continue;
      }
      repeats.push_back(parse_trace_csv(read_file(p), p.filename().string()));
      ++ss.n_repeats_done;
    }
    if (ss.n_repeats_done == 0)
      throw IoError("no traces found for strategy " + strategy_name(s) +
                    " under " + (cfg.output_dir / "traces").string());
    aggregate(repeats, threshold, ss);
    summary.strategies.push_back(std::move(ss));
  }

  emit_csv(summary, cfg.output_dir / "summary.csv");
  emit_svg(summary, cfg.output_dir / "campaign.svg");
  return summary;
}

void generate_artifacts(const CampaignConfig& cfg) {
  validate_config(cfg);
  const std::vector<State> samples = gen_source_samples(cfg.experiment);

  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec)
    throw IoError("cannot create " + cfg.output_dir.string() + ": " +
                  ec.message());

  std::string csv = "x1,x2,x3,x4\n";
  for (const State& x : samples) {
    csv += fmt_g17(x[0]);
    for (int i = 1; i < kStateDim; ++i) {
      csv += ',';
      csv += fmt_g17(x[i]);
    }
    csv += '\n';
  }
  write_file_atomic(cfg.output_dir / "samples.csv", csv);
  write_target_moments(compute_target_moments(samples),
                       cfg.output_dir / "targets.txt");
}

void emit_csv(const CampaignSummary& summary,
              const std::filesystem::path& path) {
  std::string out =
      "iteration,strategy,mean_error,std_error,best_so_far_mean,"
      "convergence_fraction\n";
  for (const StrategySummary& ss : summary.strategies)
    for (size_t i = 0; i < ss.mean_error.size(); ++i)
      out += std::to_string(i + 1) + "," + strategy_name(ss.strategy) + "," +
             fmt_g17(ss.mean_error[i]) + "," + fmt_g17(ss.std_error[i]) + "," +
             fmt_g17(ss.best_so_far_mean[i]) + "," +
             fmt_g17(ss.convergence_fraction[i]) + "\n";
  write_file_atomic(path, out);
}

namespace {

std::string fmt_px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

const char* strategy_color(Strategy s) {
  switch (s) {
    case Strategy::Naive: return "#7f7f7f";
    case Strategy::GenericPF: return "#1f77b4";
    case Strategy::ModifiedPF: return "#d62728";
  }
  return "#000000";
}

}  // namespace

void emit_svg(const CampaignSummary& summary,
              const std::filesystem::path& path) {
  const double width = 960, height = 600;
  const double ml = 80, mr = 180, mt = 50, mb = 60;
  const double pw = width - ml - mr, ph = height - mt - mb;

  size_t n_iter = 0;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const StrategySummary& ss : summary.strategies) {
    n_iter = std::max(n_iter, ss.mean_error.size());
    for (size_t i = 0; i < ss.mean_error.size(); ++i) {
      const double m = ss.mean_error[i], sd = ss.std_error[i];
      if (m > 0.0) lo = std::min(lo, m);
      if (m - sd > 0.0) lo = std::min(lo, m - sd);
      hi = std::max(hi, m + sd);
    }
  }
  if (!(lo < hi)) {
    lo = 1e-3;
    hi = 1.0;
  }
  lo /= 1.5;
  hi *= 1.5;
  const double llo = std::log10(lo), lhi = std::log10(hi);

  const auto px = [&](double it) {
    return n_iter > 1 ? ml + (it - 1.0) / (n_iter - 1.0) * pw : ml + pw / 2;
  };
  const auto py = [&](double v) {
    const double lv = std::log10(std::max(v, lo));
    return mt + (lhi - lv) / (lhi - llo) * ph;
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt_px(width) +
         "\" height=\"" + fmt_px(height) + "\" viewBox=\"0 0 " + fmt_px(width) +
         " " + fmt_px(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + fmt_px(ml) + "\" y=\"28\" font-family=\"sans-serif\" "
         "font-size=\"18\" fill=\"#222\">" + summary.experiment +
         ": average error per moment vs iteration</text>\n";

  /* decade gridlines + labels */
  for (int e = static_cast<int>(std::ceil(llo)); e <= std::floor(lhi); ++e) {
    const double v = std::pow(10.0, e);
    const double y = py(v);
    svg += "<line x1=\"" + fmt_px(ml) + "\" y1=\"" + fmt_px(y) + "\" x2=\"" +
           fmt_px(ml + pw) + "\" y2=\"" + fmt_px(y) +
           "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + fmt_px(ml - 8) + "\" y=\"" + fmt_px(y + 4) +
           "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#444\" "
           "text-anchor=\"end\">1e" + std::to_string(e) + "</text>\n";
  }

  /* x ticks at integer iterations */
  const int step = n_iter > 12 ? static_cast<int>((n_iter + 9) / 10) : 1;
  for (size_t t = 1; t <= n_iter; t += step) {
    const double x = px(static_cast<double>(t));
    svg += "<line x1=\"" + fmt_px(x) + "\" y1=\"" + fmt_px(mt + ph) +
           "\" x2=\"" + fmt_px(x) + "\" y2=\"" + fmt_px(mt + ph + 5) +
           "\" stroke=\"#444\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + fmt_px(x) + "\" y=\"" + fmt_px(mt + ph + 20) +
           "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#444\" "
           "text-anchor=\"middle\">" + std::to_string(t) + "</text>\n";
  }

  /* axes */
  svg += "<line x1=\"" + fmt_px(ml) + "\" y1=\"" + fmt_px(mt) + "\" x2=\"" +
         fmt_px(ml) + "\" y2=\"" + fmt_px(mt + ph) +
         "\" stroke=\"#222\" stroke-width=\"1.5\"/>\n";
  svg += "<line x1=\"" + fmt_px(ml) + "\" y1=\"" + fmt_px(mt + ph) +
         "\" x2=\"" + fmt_px(ml + pw) + "\" y2=\"" + fmt_px(mt + ph) +
         "\" stroke=\"#222\" stroke-width=\"1.5\"/>\n";
  svg += "<text x=\"" + fmt_px(ml + pw / 2) + "\" y=\"" +
         fmt_px(height - 15) + "\" font-family=\"sans-serif\" font-size=\"14\" "
         "fill=\"#222\" text-anchor=\"middle\">iteration</text>\n";
  svg += "<text x=\"20\" y=\"" + fmt_px(mt + ph / 2) +
         "\" font-family=\"sans-serif\" font-size=\"14\" fill=\"#222\" "
         "text-anchor=\"middle\" transform=\"rotate(-90 20 " +
         fmt_px(mt + ph / 2) +
         ")\">average error per moment</text>\n";

  /* convergence threshold */
  if (summary.convergence_threshold > lo &&
      summary.convergence_threshold < hi) {
    const double y = py(summary.convergence_threshold);
    svg += "<line x1=\"" + fmt_px(ml) + "\" y1=\"" + fmt_px(y) + "\" x2=\"" +
           fmt_px(ml + pw) + "\" y2=\"" + fmt_px(y) +
           "\" stroke=\"#999\" stroke-width=\"1\" stroke-dasharray=\"6 4\"/>\n";
    svg += "<text x=\"" + fmt_px(ml + pw - 4) + "\" y=\"" + fmt_px(y - 5) +
           "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#777\" "
           "text-anchor=\"end\">convergence threshold</text>\n";
  }

  /* per-strategy error bars and polylines */
  for (const StrategySummary& ss : summary.strategies) {
    const char* color = strategy_color(ss.strategy);
    for (size_t i = 0; i < ss.mean_error.size(); ++i) {
      const double m = ss.mean_error[i], sd = ss.std_error[i];
      if (sd <= 0.0) continue;
      const double x = px(static_cast<double>(i + 1));
      const double ytop = py(m + sd);
      const double ybot = py(std::max(m - sd, lo));
      svg += "<line x1=\"" + fmt_px(x) + "\" y1=\"" + fmt_px(ytop) +
             "\" x2=\"" + fmt_px(x) + "\" y2=\"" + fmt_px(ybot) +
             "\" stroke=\"" + color + "\" stroke-width=\"1\" opacity=\"0.6\"/>\n";
      for (double ye : {ytop, ybot})
        svg += "<line x1=\"" + fmt_px(x - 3) + "\" y1=\"" + fmt_px(ye) +
               "\" x2=\"" + fmt_px(x + 3) + "\" y2=\"" + fmt_px(ye) +
               "\" stroke=\"" + color + "\" stroke-width=\"1\" opacity=\"0.6\"/>\n";
    }
    std::string points;
    for (size_t i = 0; i < ss.mean_error.size(); ++i) {
      if (i) points += ' ';
      points += fmt_px(px(static_cast<double>(i + 1))) + "," +
                fmt_px(py(ss.mean_error[i]));
    }
    svg += "<polyline points=\"" + points + "\" fill=\"none\" stroke=\"" +
           color + "\" stroke-width=\"2\"/>\n";
  }

  /* legend */
  double ly = mt + 10;
  for (const StrategySummary& ss : summary.strategies) {
    const double lx = ml + pw + 16;
    svg += "<line x1=\"" + fmt_px(lx) + "\" y1=\"" + fmt_px(ly) + "\" x2=\"" +
           fmt_px(lx + 24) + "\" y2=\"" + fmt_px(ly) + "\" stroke=\"" +
           strategy_color(ss.strategy) + "\" stroke-width=\"3\"/>\n";
    svg += "<text x=\"" + fmt_px(lx + 30) + "\" y=\"" + fmt_px(ly + 4) +
           "\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#222\">" +
           strategy_name(ss.strategy) + "</text>\n";
    ly += 22;
  }

  svg += "</svg>\n";
  write_file_atomic(path, svg);
}

void write_target_moments(const TargetMoments& tm,
                          const std::filesystem::path& path) {
  std::string out = "n_source_samples " + std::to_string(tm.n_source_samples) + "\n";
  out += "mean";
  for (double v : tm.mean) out += " " + fmt_g17(v);
  out += "\nstddev";
  for (double v : tm.stddev) out += " " + fmt_g17(v);
  out += "\nstandardized";
  for (bool b : tm.standardized) out += b ? " 1" : " 0";
  out += "\ntargets";
  for (int k = 0; k < kNumPotentials; ++k) out += " " + fmt_g17(tm.t[k]);
  out += "\n";
  write_file_atomic(path, out);
}

TargetMoments read_target_moments(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  const std::string name = path.filename().string();

  const auto next_line = [&](const std::string& key) {
    std::string line;
    if (!std::getline(in, line)) fail(name, "missing line '" + key + "'");
    const auto cells = split(line, ' ');
    if (cells.empty() || cells[0] != key)
      fail(name, "expected line to start with '" + key + "'");
    return std::vector<std::string>(cells.begin() + 1, cells.end());
  };

  TargetMoments tm;
  const auto n = next_line("n_source_samples");
  if (n.size() != 1) fail(name, "n_source_samples: expected one value");
  tm.n_source_samples =
      static_cast<long>(parse_double_field(n[0], name + ":n_source_samples"));

  const auto mean = next_line("mean");
  const auto sd = next_line("stddev");
  const auto flags = next_line("standardized");
  if (mean.size() != kStateDim || sd.size() != kStateDim ||
      flags.size() != kStateDim)
    fail(name, "mean/stddev/standardized: expected 4 values each");
  for (int i = 0; i < kStateDim; ++i) {
    tm.mean[i] = parse_double_field(mean[i], name + ":mean");
    tm.stddev[i] = parse_double_field(sd[i], name + ":stddev");
    tm.standardized[i] = flags[i] == "1";
  }

  const auto t = next_line("targets");
  if (t.size() != kNumPotentials)
    fail(name, "targets: expected 24 values");
  tm.t.resize(kNumPotentials);
  for (int k = 0; k < kNumPotentials; ++k)
    tm.t[k] = parse_double_field(t[k], name + ":targets");
  return tm;
}

}  // namespace pfopt
