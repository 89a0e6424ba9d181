#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <future>
#include <map>
#include <numeric>
#include <thread>

#include "thermo/cli.hpp"
#include "thermo/debias.hpp"
#include "thermo/error.hpp"
#include "thermo/fitting.hpp"
#include "thermo/power_model.hpp"
#include "thermo/sensor.hpp"
#include "thermo/serialize.hpp"
#include "thermo/trace.hpp"

namespace thermo::cli {

namespace fs = std::filesystem;

namespace {

// Raised for bad flags or unreadable/malformed input (exit 2).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string short_number(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

std::string load_input(Report& report, const std::string& path) {
  std::string content;
  try {
    content = read_text_file(path);
  } catch (const std::exception&) {
    throw UsageError(path + ": cannot read file");
  }
  report.add_input(path, content);
  return content;
}

std::string describe(const std::string& path, const Error& e) { return path + ": " + e.what(); }

Trace load_trace(Report& report, const std::string& path) {
  const std::string content = load_input(report, path);
  try {
    return parse_trace(content);
  } catch (const Error& e) {
    throw UsageError(describe(path, e));
  }
}

void write_output(const std::string& path, std::string_view text) {
  try {
    write_text_file(path, text);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

Json error_json(const Error& e) {
  Json j{{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
  if (e.where()) j["index"] = *e.where();
  return j;
}

Json sign_test_json(const PairwiseTest& test) {
  Json j;
  j["a"] = std::string(to_string(test.a));
  j["b"] = std::string(to_string(test.b));
  if (test.result) {
    j["p_value"] = test.result->p_value;
    j["a_wins"] = test.result->a_wins;
    j["b_wins"] = test.result->b_wins;
    j["ties"] = test.result->ties;
  } else {
    j["p_value"] = nullptr;
  }
  j["excluded"] = test.excluded;
  if (!test.note.empty()) j["note"] = test.note;
  return j;
}

Json outcome_json(const FamilyOutcome& outcome) {
  if (outcome.fit) return to_json(*outcome.fit);
  return Json{{"failure", outcome.failure}};
}

// Sorted-by-temperature two-column series sharing the trace CSV rules.
std::string plot_series(const TraceMeta& meta, const std::string& series, std::vector<std::pair<double, double>> points) {
  std::stable_sort(points.begin(), points.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
  Table table;
  table.meta = {{"processor", meta.processor},
                {"freq_ghz", format_number(meta.freq_ghz)},
                {"cores", std::to_string(meta.cores)},
                {"series", series}};
  table.columns = {"temp_c", "power_w"};
  for (const auto& [t, p] : points) table.rows.push_back({t, p});
  return write_table(table);
}

std::string unique_stem(const std::string& path, std::map<std::string, int>& seen) {
  std::string stem = fs::path(path).stem().string();
  const int count = seen[stem]++;
  if (count > 0) stem += "-" + std::to_string(count);
  return stem;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw UsageError(dir + ": cannot create directory");
}

std::string group_key(const Trace& t, const std::string& group_by) {
  if (group_by == "none") return "all";
  return t.meta().processor + "/" + std::to_string(t.meta().cores) + "c";
}

template <typename Fn>
auto run_parallel(std::size_t n, unsigned jobs, Fn fn) {
  using R = decltype(fn(std::size_t{0}));
  std::vector<R> results(n);
  const std::size_t width = jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : jobs;
  for (std::size_t start = 0; start < n; start += width) {
    std::vector<std::future<R>> batch;
    const std::size_t end = std::min(n, start + width);
    for (std::size_t i = start; i < end; ++i) batch.push_back(std::async(std::launch::async, fn, i));
    for (std::size_t i = start; i < end; ++i) results[i] = batch[i - start].get();
  }
  return results;
}

SensorModel sensor_model_from(Report& report, const SensorOptions& o) {
  SensorModel model;
  if (!o.sensor_json.empty()) {
    const std::string text = load_input(report, o.sensor_json);
    try {
      model = sensor_model_from_json(Json::parse(text));
    } catch (const Json::exception& e) {
      throw UsageError(o.sensor_json + ": " + e.what());
    } catch (const Error& e) {
      throw UsageError(describe(o.sensor_json, e));
    }
  } else if (!o.t_init || !o.t_inf) {
    throw UsageError("--t-init and --t-inf are required without --sensor-json");
  }
  if (o.alpha) model.alpha = *o.alpha;
  if (o.a) model.a = *o.a;
  if (o.b) model.b = *o.b;
  if (o.t_init) model.t_init = *o.t_init;
  if (o.t_inf) model.t_inf = *o.t_inf;
  try {
    validate(model);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return model;
}

Json curvature_json(const CurvatureSummary& s) {
  return Json{{"interior", s.interior},
              {"positive", s.positive},
              {"negative", s.negative},
              {"convex_fraction", s.convex_fraction()},
              {"concave_fraction", s.concave_fraction()}};
}

template <typename Body>
int guarded(const Console& console, Report& report, const CommonOptions& common, Body body) {
  try {
    return finish(console, report, common.report, body());
  } catch (const UsageError& e) {
    console.error(e.what());
    return kUsageError;
  }
}

}  // namespace

int cmd_fit(const Console& console, Report& report, const CommonOptions& common, const FitOptions& options) {
  return guarded(console, report, common, [&]() -> int {
    std::vector<FitKind> kinds;
    if (options.model == "all") {
      kinds = {FitKind::Linear, FitKind::Quadratic, FitKind::Exponential};
    } else if (auto k = parse_fit_kind(options.model)) {
      kinds = {*k};
    } else {
      throw UsageError("--model must be one of linear, quad, exp, all");
    }
    if (options.group_by != "none" && options.group_by != "proc-cores") {
      throw UsageError("--group-by must be none or proc-cores");
    }

    std::vector<Trace> traces;
    traces.reserve(options.inputs.size());
    for (const auto& path : options.inputs) traces.push_back(load_trace(report, path));

    auto rows = run_parallel(traces.size(), options.jobs, [&](std::size_t i) {
      TraceComparison row;
      for (const FitKind kind : kinds) {
        FamilyOutcome outcome;
        try {
          outcome.fit = fit(kind, traces[i]);
        } catch (const Error& e) {
          outcome.failure = std::string(to_string(e.code()));
        }
        switch (kind) {
          case FitKind::Linear: row.linear = std::move(outcome); break;
          case FitKind::Quadratic: row.quadratic = std::move(outcome); break;
          case FitKind::Exponential: row.exponential = std::move(outcome); break;
        }
      }
      return row;
    });

    bool failed = false;
    auto& results = report.results();
    results["model"] = options.model;
    results["group_by"] = options.group_by;
    results["traces"] = Json::array();
    for (std::size_t i = 0; i < traces.size(); ++i) {
      const auto& meta = traces[i].meta();
      Json t{{"path", options.inputs[i]},
             {"processor", meta.processor},
             {"freq_ghz", meta.freq_ghz},
             {"cores", meta.cores},
             {"samples", traces[i].size()}};
      Json fits;
      for (const FitKind kind : kinds) {
        const auto& outcome = rows[i].outcome(kind);
        if (!outcome.fit) {
          failed = true;
          report.warn(options.inputs[i] + ": " + std::string(to_string(kind)) + " fit failed (" + outcome.failure + ")");
        }
        fits[std::string(to_string(kind))] = outcome_json(outcome);
      }
      t["fits"] = std::move(fits);
      results["traces"].push_back(std::move(t));
    }

    // Groups in order of first appearance.
    std::vector<std::string> group_order;
    std::map<std::string, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < traces.size(); ++i) {
      const auto key = group_key(traces[i], options.group_by);
      if (!members.count(key)) group_order.push_back(key);
      members[key].push_back(i);
    }

    results["groups"] = Json::array();
    std::string summary;
    for (const auto& key : group_order) {
      const auto& idx = members[key];
      std::vector<Trace> group_traces;
      std::vector<TraceComparison> group_rows;
      for (const auto i : idx) {
        group_traces.push_back(traces[i]);
        group_rows.push_back(rows[i]);
      }
      Json g{{"key", key}, {"traces", idx}};
      Json aggregate;
      for (const FitKind kind : kinds) {
        std::vector<TraceFit> pool;
        for (std::size_t j = 0; j < group_traces.size(); ++j) {
          const auto& outcome = group_rows[j].outcome(kind);
          if (outcome.fit) pool.push_back({&group_traces[j], &*outcome.fit});
        }
        if (pool.empty()) {
          aggregate[std::string(to_string(kind))] = nullptr;
        } else {
          aggregate[std::string(to_string(kind))] = aggregate_error(pool);
        }
      }
      summary += "group " + key + " (" + std::to_string(idx.size()) + " traces) aggregate error:";
      for (const FitKind kind : kinds) {
        const auto& v = aggregate[std::string(to_string(kind))];
        summary += " " + std::string(to_string(kind)) + "=" + (v.is_null() ? "n/a" : short_number(v.get<double>()));
      }
      summary += "\n";
      g["aggregate_error"] = std::move(aggregate);

      if (kinds.size() == 3) {
        auto comparison = summarize_comparison(group_traces, std::move(group_rows));
        // Report exclusions with global trace indices.
        for (auto* test : {&comparison.exp_vs_quad, &comparison.quad_vs_lin, &comparison.exp_vs_lin}) {
          for (auto& e : test->excluded) e = idx[e];
        }
        g["sign_tests"] = Json{{"exp_vs_quad", sign_test_json(comparison.exp_vs_quad)},
                               {"quad_vs_lin", sign_test_json(comparison.quad_vs_lin)},
                               {"exp_vs_lin", sign_test_json(comparison.exp_vs_lin)}};
        for (const auto* test : {&comparison.exp_vs_quad, &comparison.quad_vs_lin, &comparison.exp_vs_lin}) {
          summary += "  sign test " + std::string(to_string(test->a)) + " vs " + std::string(to_string(test->b)) + ": ";
          summary += test->result ? "p=" + short_number(test->result->p_value) + " (" +
                                        std::to_string(test->result->a_wins) + "/" +
                                        std::to_string(test->result->b_wins) + ")"
                                  : "n/a (" + test->note + ")";
          summary += "\n";
        }
      }
      results["groups"].push_back(std::move(g));
    }

    if (!options.plot_dir.empty()) {
      ensure_dir(options.plot_dir);
      std::map<std::string, int> seen;
      for (std::size_t i = 0; i < traces.size(); ++i) {
        const auto stem = unique_stem(options.inputs[i], seen);
        std::vector<std::pair<double, double>> measured;
        for (const auto& s : traces[i].samples()) measured.emplace_back(s.temp, s.power);
        write_output((fs::path(options.plot_dir) / (stem + ".measured.csv")).string(),
                     plot_series(traces[i].meta(), "measured", measured));
        for (const FitKind kind : kinds) {
          const auto& outcome = rows[i].outcome(kind);
          if (!outcome.fit) continue;
          std::vector<std::pair<double, double>> fitted;
          for (const auto& s : traces[i].samples()) fitted.emplace_back(s.temp, evaluate(*outcome.fit, s.temp));
          const std::string name = std::string(to_string(kind));
          write_output((fs::path(options.plot_dir) / (stem + "." + name + ".csv")).string(),
                       plot_series(traces[i].meta(), "fitted_" + name, fitted));
        }
      }
    }

    if (!console.quiet && !console.json) {
      for (std::size_t i = 0; i < traces.size(); ++i) {
        console.out << options.inputs[i] << ":";
        for (const FitKind kind : kinds) {
          const auto& outcome = rows[i].outcome(kind);
          console.out << " " << to_string(kind) << "="
                      << (outcome.fit ? short_number(outcome.fit->error) : "FAILED(" + outcome.failure + ")");
        }
        console.out << "\n";
      }
      console.out << summary;
    }
    if (!common.out.empty()) write_output(common.out, report.dump());
    return failed ? kComputeFailure : kOk;
  });
}

int cmd_model_eval(const Console& console, Report& report, const CommonOptions& common,
                   const ModelEvalOptions& options) {
  return guarded(console, report, common, [&]() -> int {
    CoefficientSet coeffs;
    if (!options.proc.empty() && !options.coeffs_path.empty()) {
      throw UsageError("use either --proc or --coeffs, not both");
    }
    if (!options.proc.empty()) {
      auto set = find_builtin(options.proc);
      if (!set) throw UsageError("unknown processor '" + options.proc + "' (built-ins: a7, a15)");
      coeffs = *set;
    } else if (!options.coeffs_path.empty()) {
      const std::string text = load_input(report, options.coeffs_path);
      try {
        coeffs = coefficient_set_from_json(Json::parse(text));
      } catch (const Json::exception& e) {
        throw UsageError(options.coeffs_path + ": " + e.what());
      } catch (const Error& e) {
        throw UsageError(describe(options.coeffs_path, e));
      }
    } else {
      throw UsageError("one of --proc or --coeffs is required");
    }

    ModelParams params;
    double watts = 0.0;
    try {
      params = derive_params(coeffs, options.freq, options.cores);
      watts = evaluate_power(coeffs, options.temp, options.freq, options.cores);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }

    auto& results = report.results();
    results["coefficients"] = to_json(coeffs);
    results["temp_c"] = options.temp;
    results["freq_ghz"] = options.freq;
    results["cores"] = options.cores;
    results["params"] = to_json(params);
    results["power_w"] = watts;

    if (!console.quiet && !console.json) console.out << short_number(watts, 12) << " W\n";
    if (!common.out.empty()) write_output(common.out, report.dump());
    return kOk;
  });
}

namespace {

const std::vector<std::string> kObservationColumns = {"freq_ghz", "cores", "a0", "a1", "a2"};

void collect_observations(Report& report, const std::string& path, std::vector<Observation>& observations,
                          Json& sources) {
  const std::string content = load_input(report, path);
  Table table;
  try {
    table = parse_table(content);
  } catch (const Error& e) {
    throw UsageError(describe(path, e));
  }
  if (table.columns == kObservationColumns) {
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const auto& row = table.rows[r];
      if (row[1] != static_cast<double>(static_cast<int>(row[1]))) {
        throw UsageError(path + ": line " + std::to_string(table.row_lines[r]) + ": cores must be an integer");
      }
      observations.push_back({row[0], static_cast<int>(row[1]), {row[2], row[3], row[4]}});
    }
    sources.push_back(Json{{"path", path}, {"kind", "observations"}, {"count", table.rows.size()}});
    return;
  }
  Trace trace = [&] {
    try {
      return parse_trace(content);
    } catch (const Error& e) {
      throw UsageError(describe(path, e));
    }
  }();
  try {
    const auto f = fit_exponential(trace);
    observations.push_back({trace.meta().freq_ghz, trace.meta().cores, {f.coeffs[0], f.coeffs[1], f.coeffs[2]}});
    sources.push_back(Json{{"path", path}, {"kind", "trace"}, {"fit", to_json(f)}});
  } catch (const Error& e) {
    report.warn(path + ": exponential fit failed (" + std::string(to_string(e.code())) + "), trace skipped");
    sources.push_back(Json{{"path", path}, {"kind", "trace"}, {"failure", std::string(to_string(e.code()))}});
  }
}

}  // namespace

int cmd_model_calibrate(const Console& console, Report& report, const CommonOptions& common,
                        const ModelCalibrateOptions& options) {
  return guarded(console, report, common, [&]() -> int {
    std::vector<std::string> files;
    std::error_code ec;
    if (fs::is_directory(options.input, ec)) {
      for (const auto& entry : fs::directory_iterator(options.input)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path().string());
      }
      std::sort(files.begin(), files.end());
      if (files.empty()) throw UsageError(options.input + ": no .csv files found");
    } else {
      files.push_back(options.input);
    }

    std::vector<Observation> observations;
    Json sources = Json::array();
    for (const auto& f : files) collect_observations(report, f, observations, sources);

    auto& results = report.results();
    results["sources"] = std::move(sources);
    results["observations"] = observations.size();

    Calibration cal;
    try {
      cal = calibrate(observations, options.label);
    } catch (const Error& e) {
      results["error"] = error_json(e);
      console.error(e.what());
      return kComputeFailure;
    }

    const auto& d = cal.diagnostics;
    results["coefficients"] = to_json(cal.coeffs);
    results["diagnostics"] = Json{{"observations", d.observations},
                                  {"frequencies_used", d.frequencies_used},
                                  {"a1_rms_c", d.a1_rms},
                                  {"a0_rms_w", d.a0_rms},
                                  {"a0_max_relative", d.a0_max_relative},
                                  {"a2_stddev_c", d.a2_stddev},
                                  {"m4_spread", d.m4_spread}};
    if (!common.out.empty()) write_output(common.out, to_json(cal.coeffs).dump(2) + "\n");
    if (!console.quiet && !console.json) {
      console.out << "calibrated '" << cal.coeffs.label << "' from " << d.observations << " observations\n";
      for (int i = 1; i <= 7; ++i) console.out << "  m" << i << " = " << format_number(cal.coeffs.m_at(i)) << "\n";
      console.out << "  a2 = " << format_number(cal.coeffs.a2) << "\n";
      console.out << "  a1 rms " << short_number(d.a1_rms) << " C, a0 rms " << short_number(d.a0_rms) << " W\n";
    }
    return kOk;
  });
}

int cmd_debias(const Console& console, Report& report, const CommonOptions& common, const DebiasOptions& options) {
  return guarded(console, report, common, [&]() -> int {
    const auto kind = parse_debias_kind(options.kind);
    if (!kind) throw UsageError("--kind must be one of linear, quad, exp");
    if (!std::isfinite(options.ref_temp)) throw UsageError("--ref-temp must be finite");
    const Trace trace = load_trace(report, options.input);

    auto& results = report.results();
    results["kind"] = std::string(to_string(*kind));
    results["ref_temp_c"] = options.ref_temp;

    DebiasSpec spec;
    if (!options.eta.empty()) {
      spec.kind = *kind;
      spec.eta = options.eta;
      results["eta_source"] = "given";
    } else {
      try {
        spec = fit_eta(trace, *kind);
      } catch (const Error& e) {
        results["error"] = error_json(e);
        console.error(describe(options.input, e));
        return kComputeFailure;
      }
      results["eta_source"] = "fitted";
    }
    spec.ref_temp = options.ref_temp;
    try {
      validate(spec);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }

    const DebiasedTrace out = debias(trace, spec);
    for (const auto& w : out.warnings) report.warn(w);
    results["eta"] = spec.eta;
    results["samples"] = trace.size();
    results["metrics"] = Json{{"afl", out.metrics.afl},
                              {"fl", out.metrics.fl ? Json(*out.metrics.fl) : Json(nullptr)},
                              {"rat", out.metrics.rat}};

    if (!common.out.empty()) write_output(common.out, write_debiased_trace(out));
    if (!options.plot_dir.empty()) {
      ensure_dir(options.plot_dir);
      const auto stem = fs::path(options.input).stem().string();
      std::vector<std::pair<double, double>> measured;
      std::vector<std::pair<double, double>> transformed;
      for (std::size_t i = 0; i < trace.size(); ++i) {
        measured.emplace_back(trace.samples()[i].temp, trace.samples()[i].power);
        transformed.emplace_back(trace.samples()[i].temp, out.ref_power[i]);
      }
      write_output((fs::path(options.plot_dir) / (stem + ".measured.csv")).string(),
                   plot_series(trace.meta(), "measured", measured));
      write_output((fs::path(options.plot_dir) / (stem + ".transformed.csv")).string(),
                   plot_series(trace.meta(), "transformed", transformed));
    }
    if (!console.quiet && !console.json) {
      console.out << "afl=" << short_number(out.metrics.afl) << "% fl="
                  << (out.metrics.fl ? short_number(*out.metrics.fl) : std::string("n/a"))
                  << " rat=" << short_number(out.metrics.rat) << "\n";
    }
    return kOk;
  });
}

int cmd_sensor_correct(const Console& console, Report& report, const CommonOptions& common,
                       const SensorOptions& options) {
  return guarded(console, report, common, [&]() -> int {
    const std::string content = load_input(report, options.input);
    Table table;
    try {
      table = parse_table(content);
    } catch (const Error& e) {
      throw UsageError(describe(options.input, e));
    }
    const auto time_col = table.column_index("time_s");
    const auto temp_col = table.column_index("temp_c");
    const auto power_col = table.column_index("power_w");
    if (!time_col || !temp_col) throw UsageError(options.input + ": needs time_s and temp_c columns");
    if (table.rows.size() < 3) throw UsageError(options.input + ": needs at least 3 samples");

    std::vector<SeriesPoint> series;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const double t = table.rows[r][*time_col];
      if (!(t > 0.0)) {
        throw UsageError(options.input + ": line " + std::to_string(table.row_lines[r]) +
                         ": time must be > 0 for sensor correction");
      }
      if (r > 0 && !(t > series.back().time)) {
        throw UsageError(options.input + ": line " + std::to_string(table.row_lines[r]) + ": time must increase");
      }
      series.push_back({t, table.rows[r][*temp_col]});
    }
    const SensorModel model = sensor_model_from(report, options);

    auto& results = report.results();
    results["model"] = to_json(model);
    results["samples"] = series.size();

    std::vector<SeriesPoint> corrected;
    try {
      corrected = correct_series(model, series);
    } catch (const Error& e) {
      results["error"] = error_json(e);
      console.error(describe(options.input, e));
      return kComputeFailure;
    }

    results["b_first"] = Json{{"time_s", series.front().time}, {"b", b_factor(model, series.front().time)}};
    results["b_last"] = Json{{"time_s", series.back().time}, {"b", b_factor(model, series.back().time)}};

    if (power_col) {
      std::vector<double> raw_t;
      std::vector<double> cor_t;
      std::vector<double> power;
      for (std::size_t r = 0; r < series.size(); ++r) {
        raw_t.push_back(series[r].temp);
        cor_t.push_back(corrected[r].temp);
        power.push_back(table.rows[r][*power_col]);
      }
      const auto raw = curvature(raw_t, power);
      const auto cor = curvature(cor_t, power);
      results["curvature"] = Json{{"raw", curvature_json(raw)}, {"corrected", curvature_json(cor)}};
      if (!console.quiet && !console.json) {
        console.out << "power vs temperature: raw concave on " << short_number(100.0 * raw.concave_fraction(), 4)
                    << "% of interior points, corrected convex on " << short_number(100.0 * cor.convex_fraction(), 4)
                    << "%\n";
      }
    }

    Table out = table;
    for (std::size_t r = 0; r < out.rows.size(); ++r) out.rows[r][*temp_col] = corrected[r].temp;
    if (!common.out.empty()) write_output(common.out, write_table(out));
    if (!console.quiet && !console.json) {
      console.out << "B(t) " << short_number(results["b_first"]["b"].get<double>()) << " at t="
                  << short_number(series.front().time) << " s, " << short_number(results["b_last"]["b"].get<double>())
                  << " at t=" << short_number(series.back().time) << " s\n";
    }
    return kOk;
  });
}

int cmd_gen(const Console& console, Report& report, const CommonOptions& common, const GenOptions& options) {
  return guarded(console, report, common, [&]() -> int {
    if (!common.seed) throw UsageError("gen requires an explicit --seed");
    if (common.out.empty()) throw UsageError("gen requires --out");

    TraceMeta meta;
    ModelParams params;
    const bool explicit_params = options.a0 || options.a1 || options.a2;
    if (!options.proc.empty()) {
      if (explicit_params) throw UsageError("use either --proc or --a0/--a1/--a2, not both");
      auto set = find_builtin(options.proc);
      if (!set) throw UsageError("unknown processor '" + options.proc + "' (built-ins: a7, a15)");
      if (!options.freq || !options.cores) throw UsageError("--proc needs --freq and --cores");
      try {
        params = derive_params(*set, *options.freq, *options.cores);
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
      meta.processor = set->label;
    } else {
      if (!options.a0 || !options.a1 || !options.a2) throw UsageError("--a0, --a1 and --a2 are all required");
      params = {*options.a0, *options.a1, *options.a2};
      meta.processor = "synthetic";
    }
    if (!options.processor.empty()) meta.processor = options.processor;
    meta.freq_ghz = options.freq.value_or(1.0);
    meta.cores = options.cores.value_or(1);

    Trace trace = [&] {
      try {
        if (options.distant_sensor) {
          const SensorModel model = sensor_model_from(report, options.sensor);
          const DistantSensorScenario scenario{options.sensor_start, options.sensor_end, options.duration, options.rate};
          return simulate_distant_sensor(model, params, scenario, meta);
        }
        const TemperatureSweep sweep{options.t_min, options.t_max, options.count, options.rate};
        const SyntheticNoise noise{options.noise, options.quantum};
        return generate_synthetic_trace(meta, params, sweep, noise, *common.seed);
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
    }();

    const std::string text = write_trace(trace);
    write_output(common.out, text);
    const std::string hash = content_hash(text);

    auto& results = report.results();
    results["params"] = to_json(params);
    results["processor"] = meta.processor;
    results["freq_ghz"] = meta.freq_ghz;
    results["cores"] = meta.cores;
    results["seed"] = *common.seed;
    results["samples"] = trace.size();
    results["out"] = common.out;
    results["fnv1a64"] = hash;
    if (!console.json && !console.quiet) console.out << hash << "  " << common.out << "\n";
    return kOk;
  });
}

}  // namespace thermo::cli
