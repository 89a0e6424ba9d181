#include <CLI11.hpp>

#include "commands.hpp"
#include "thermo/cli.hpp"

namespace thermo::cli {

namespace {

void add_common(CLI::App* cmd, CommonOptions& common) {
  cmd->add_option("--out", common.out, "Output path");
  cmd->add_option("--report", common.report, "Also write the JSON report to this path");
  cmd->add_flag("--json", common.json, "Print the JSON report to stdout");
  cmd->add_flag("--quiet", common.quiet, "Suppress human-readable output");
  cmd->add_option("--seed", common.seed, "Random seed (required by stochastic commands)");
}

void add_sensor_flags(CLI::App* cmd, SensorOptions& s) {
  cmd->add_option("--sensor-json", s.sensor_json, "JSON sidecar {alpha, a, b, t_init_c, t_inf_c}");
  cmd->add_option("--alpha", s.alpha, "Thermal diffusivity (default 4.125e-7)");
  cmd->add_option("--a", s.a, "Sensor distance parameter (default 8.25)");
  cmd->add_option("--b", s.b, "Hotspot time constant in seconds (default 36.7)");
  cmd->add_option("--t-init", s.t_init, "T_i, applied source temperature (C)");
  cmd->add_option("--t-inf", s.t_inf, "T_inf, far-field initial temperature (C)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool color) {
  CLI::App app{"thermo: CPU temperature/power modeling, debiasing and sensor correction", "thermo"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  CommonOptions common;

  FitOptions fit_opts;
  auto* fit = app.add_subcommand("fit", "Fit linear/quadratic/exponential curves to traces");
  fit->add_option("inputs", fit_opts.inputs, "Trace CSV files")->required();
  fit->add_option("--model", fit_opts.model, "linear | quad | exp | all")->capture_default_str();
  fit->add_option("--group-by", fit_opts.group_by, "none | proc-cores")->capture_default_str();
  fit->add_option("--plot-dir", fit_opts.plot_dir, "Write plot-ready CSV series here");
  fit->add_option("--jobs", fit_opts.jobs, "Parallel fits (0 = hardware concurrency)");
  add_common(fit, common);

  auto* model = app.add_subcommand("model", "Generalized frequency/core-count power model");
  model->require_subcommand(1);

  ModelEvalOptions eval_opts;
  auto* eval = model->add_subcommand("eval", "Evaluate the power model");
  eval->add_option("--proc", eval_opts.proc, "Built-in coefficient set (a7, a15)");
  eval->add_option("--coeffs", eval_opts.coeffs_path, "Coefficient set JSON");
  eval->add_option("--temp", eval_opts.temp, "Temperature (C)")->required();
  eval->add_option("--freq", eval_opts.freq, "Frequency (GHz)")->required();
  eval->add_option("--cores", eval_opts.cores, "Active core count (1..4)")->required();
  add_common(eval, common);

  ModelCalibrateOptions cal_opts;
  auto* cal = model->add_subcommand("calibrate", "Estimate a coefficient set from fitted observations");
  cal->add_option("input", cal_opts.input, "Directory (or file) of observation tables or traces")->required();
  cal->add_option("--label", cal_opts.label, "Label for the calibrated set")->capture_default_str();
  add_common(cal, common);

  DebiasOptions deb_opts;
  std::string eta_text;
  auto* deb = app.add_subcommand("debias", "Transform power to a reference temperature");
  deb->add_option("input", deb_opts.input, "Trace CSV")->required();
  deb->add_option("--ref-temp", deb_opts.ref_temp, "Reference temperature (C)")->required();
  deb->add_option("--kind", deb_opts.kind, "linear | quad | exp")->capture_default_str();
  deb->add_option("--eta", deb_opts.eta, "Coefficients instead of fitting: eta1 | eta2,eta1 | a1,a2")->delimiter(',');
  deb->add_option("--plot-dir", deb_opts.plot_dir, "Write plot-ready CSV series here");
  add_common(deb, common);

  SensorOptions sensor_opts;
  auto* sensor = app.add_subcommand("sensor-correct", "Correct distant-sensor temperature lag");
  sensor->add_option("input", sensor_opts.input, "CSV with time_s,temp_c[,power_w]")->required();
  add_sensor_flags(sensor, sensor_opts);
  add_common(sensor, common);

  GenOptions gen_opts;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic trace");
  gen->add_option("--a0", gen_opts.a0, "Exponential offset (W)");
  gen->add_option("--a1", gen_opts.a1, "Exponential shift (C)");
  gen->add_option("--a2", gen_opts.a2, "Exponential scale (C)");
  gen->add_option("--proc", gen_opts.proc, "Derive parameters from a built-in set (a7, a15)");
  gen->add_option("--processor", gen_opts.processor, "Processor label written to the trace");
  gen->add_option("--freq", gen_opts.freq, "Frequency (GHz)");
  gen->add_option("--cores", gen_opts.cores, "Active core count");
  gen->add_option("--t-min", gen_opts.t_min, "Sweep start (C)")->capture_default_str();
  gen->add_option("--t-max", gen_opts.t_max, "Sweep end (C)")->capture_default_str();
  gen->add_option("--count", gen_opts.count, "Sample count")->capture_default_str();
  gen->add_option("--rate", gen_opts.rate, "Sample rate (Hz)")->capture_default_str();
  gen->add_option("--noise", gen_opts.noise, "Gaussian noise std-dev (W)")->capture_default_str();
  gen->add_option("--quantum", gen_opts.quantum, "Power quantization step (W)")->capture_default_str();
  gen->add_flag("--distant-sensor", gen_opts.distant_sensor, "Simulate a lagging distant sensor instead");
  gen->add_option("--sensor-start", gen_opts.sensor_start, "Distant sensor start (C)")->capture_default_str();
  gen->add_option("--sensor-end", gen_opts.sensor_end, "Distant sensor end (C)")->capture_default_str();
  gen->add_option("--duration", gen_opts.duration, "Distant sensor sweep duration (s)")->capture_default_str();
  add_sensor_flags(gen, gen_opts.sensor);
  add_common(gen, common);

  std::vector<const char*> argv;
  argv.push_back("thermo");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }

  const Console console{out, err, color, common.quiet, common.json};
  Report report(args);

  if (fit->parsed()) return cmd_fit(console, report, common, fit_opts);
  if (eval->parsed()) return cmd_model_eval(console, report, common, eval_opts);
  if (cal->parsed()) return cmd_model_calibrate(console, report, common, cal_opts);
  if (deb->parsed()) return cmd_debias(console, report, common, deb_opts);
  if (sensor->parsed()) return cmd_sensor_correct(console, report, common, sensor_opts);
  if (gen->parsed()) return cmd_gen(console, report, common, gen_opts);
  err << "error: no command given\n";
  return kUsageError;
}

}  // namespace thermo::cli
