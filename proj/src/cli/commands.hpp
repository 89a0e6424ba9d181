#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "report.hpp"

namespace thermo::cli {

struct CommonOptions {
  std::string out;
  std::string report;
  bool json = false;
  bool quiet = false;
  std::optional<std::uint64_t> seed;
};

struct FitOptions {
  std::vector<std::string> inputs;
  std::string model = "all";
  std::string group_by = "none";
  std::string plot_dir;
  unsigned jobs = 0;  // 0: hardware concurrency
};

struct ModelEvalOptions {
  std::string proc;
  std::string coeffs_path;
  double temp = 0.0;
  double freq = 0.0;
  int cores = 0;
};

struct ModelCalibrateOptions {
  std::string input;
  std::string label = "calibrated";
};

struct DebiasOptions {
  std::string input;
  double ref_temp = 0.0;
  std::string kind = "quad";
  std::vector<double> eta;
  std::string plot_dir;
};

struct SensorOptions {
  std::string input;
  std::string sensor_json;
  std::optional<double> alpha;
  std::optional<double> a;
  std::optional<double> b;
  std::optional<double> t_init;
  std::optional<double> t_inf;
};

struct GenOptions {
  std::optional<double> a0;
  std::optional<double> a1;
  std::optional<double> a2;
  std::string proc;
  std::string processor;
  std::optional<double> freq;
  std::optional<int> cores;
  double t_min = 25.0;
  double t_max = 85.0;
  std::size_t count = 20;
  double rate = 5.0;
  double noise = 0.0;
  double quantum = 0.0;
  bool distant_sensor = false;
  SensorOptions sensor;
  double sensor_start = 25.0;
  double sensor_end = 50.0;
  double duration = 30.0;
};

int cmd_fit(const Console& console, Report& report, const CommonOptions& common, const FitOptions& options);
int cmd_model_eval(const Console& console, Report& report, const CommonOptions& common,
                   const ModelEvalOptions& options);
int cmd_model_calibrate(const Console& console, Report& report, const CommonOptions& common,
                        const ModelCalibrateOptions& options);
int cmd_debias(const Console& console, Report& report, const CommonOptions& common, const DebiasOptions& options);
int cmd_sensor_correct(const Console& console, Report& report, const CommonOptions& common,
                       const SensorOptions& options);
int cmd_gen(const Console& console, Report& report, const CommonOptions& common, const GenOptions& options);

}  // namespace thermo::cli
