#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "thermo/curve.hpp"

namespace thermo {

struct TraceSample {
  double time = 0.0;   // seconds
  double temp = 0.0;   // degrees Celsius
  double power = 0.0;  // watts

  bool operator==(const TraceSample&) const = default;
};

struct TraceMeta {
  std::string processor = "unknown";
  double freq_ghz = 1.0;
  int cores = 1;

  bool operator==(const TraceMeta&) const = default;
};

/// A time-ordered temperature/power recording plus the operating point it
/// was taken at. Construction validates every invariant, so a Trace that
/// exists is always well formed:
///   - freq_ghz > 0 and finite, 1 <= cores <= 4
///   - at least kMinSamples samples
///   - all fields finite, power > 0, time strictly increasing
class Trace {
 public:
  static constexpr std::size_t kMinSamples = 3;

  Trace(TraceMeta meta, std::vector<TraceSample> samples);

  const TraceMeta& meta() const noexcept { return meta_; }
  const std::vector<TraceSample>& samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }

  Eigen::VectorXd times() const;
  Eigen::VectorXd temperatures() const;
  Eigen::VectorXd powers() const;

  bool operator==(const Trace&) const = default;

 private:
  TraceMeta meta_;
  std::vector<TraceSample> samples_;
};

void validate_meta(const TraceMeta& meta);

// Generic `#key=value` + header + numeric rows document shared by every CSV
// the tool reads or writes.
struct Table {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> row_lines;  // 1-based source line of each row

  std::optional<std::string> find_meta(std::string_view key) const;
  std::optional<std::size_t> column_index(std::string_view name) const;
};

Table parse_table(std::string_view text);
std::string write_table(const Table& table);

Trace parse_trace(std::string_view text);
std::string write_trace(const Trace& trace);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);
Trace read_trace_file(const std::filesystem::path& path);

/// Shortest decimal that reads back to exactly `value`.
std::string format_number(double value);
std::optional<double> parse_number(std::string_view text);

struct TemperatureSweep {
  double t_min = 25.0;
  double t_max = 85.0;
  std::size_t count = 20;
  double rate_hz = 5.0;
};

struct SyntheticNoise {
  double sigma_w = 0.0;
  double quantum_w = 0.0;
};

/// Temperatures swept linearly over [t_min, t_max]; power follows the
/// exponential curve plus N(0, sigma) noise, then rounds to the nearest
/// multiple of quantum_w when it is positive. Bit-identical for equal inputs.
Trace generate_synthetic_trace(const TraceMeta& meta, const ModelParams& params,
                               const TemperatureSweep& sweep, const SyntheticNoise& noise,
                               std::uint64_t seed);

/// 64-bit FNV-1a, printed as 16 hex digits.
std::string content_hash(std::string_view bytes);

}  // namespace thermo
