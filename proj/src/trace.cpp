#include "thermo/trace.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "thermo/error.hpp"

namespace thermo {

namespace {

constexpr std::string_view kTraceColumns[] = {"time_s", "temp_c", "power_w"};

std::string at_line(std::size_t line, std::string_view what) {
  return "line " + std::to_string(line) + ": " + std::string(what);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

// Box-Muller on top of mt19937_64: std::normal_distribution is not
// specified bit-for-bit across standard libraries.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (spare_) {
      const double v = *spare_;
      spare_.reset();
      return v;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(angle);
    return r * std::cos(angle);
  }

 private:
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

}  // namespace

void validate_meta(const TraceMeta& meta) {
  if (!std::isfinite(meta.freq_ghz) || meta.freq_ghz <= 0.0) {
    throw Error(ErrorCode::InvalidMeta, "frequency must be positive, got " + format_number(meta.freq_ghz));
  }
  if (meta.cores < 1 || meta.cores > 4) {
    throw Error(ErrorCode::InvalidMeta, "active core count must be within 1..4, got " + std::to_string(meta.cores));
  }
}

Trace::Trace(TraceMeta meta, std::vector<TraceSample> samples)
    : meta_(std::move(meta)), samples_(std::move(samples)) {
  validate_meta(meta_);
  if (samples_.size() < kMinSamples) {
    throw Error(ErrorCode::EmptyTrace, "trace needs at least 3 samples, got " + std::to_string(samples_.size()));
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    if (!std::isfinite(s.time) || !std::isfinite(s.temp) || !std::isfinite(s.power)) {
      throw Error(ErrorCode::InvalidSample, "sample " + std::to_string(i) + " has a non-finite field", i);
    }
    if (s.power <= 0.0) {
      throw Error(ErrorCode::InvalidSample, "sample " + std::to_string(i) + " has non-positive power", i);
    }
    if (s.time < 0.0) {
      throw Error(ErrorCode::InvalidSample, "sample " + std::to_string(i) + " has negative time", i);
    }
    if (i > 0 && !(s.time > samples_[i - 1].time)) {
      throw Error(ErrorCode::NonMonotonicTime, "sample " + std::to_string(i) + " does not advance time", i);
    }
  }
}

Eigen::VectorXd Trace::times() const {
  Eigen::VectorXd v(samples_.size());
  for (std::size_t i = 0; i < samples_.size(); ++i) v[i] = samples_[i].time;
  return v;
}

Eigen::VectorXd Trace::temperatures() const {
  Eigen::VectorXd v(samples_.size());
  for (std::size_t i = 0; i < samples_.size(); ++i) v[i] = samples_[i].temp;
  return v;
}

Eigen::VectorXd Trace::powers() const {
  Eigen::VectorXd v(samples_.size());
  for (std::size_t i = 0; i < samples_.size(); ++i) v[i] = samples_[i].power;
  return v;
}

std::string format_number(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

std::optional<double> parse_number(std::string_view text) {
  if (text.empty()) return std::nullopt;
  // from_chars rejects a leading '+', which hand-edited files sometimes carry.
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::optional<std::string> Table::find_meta(std::string_view key) const {
  for (const auto& [k, v] : meta) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::optional<std::size_t> Table::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  return std::nullopt;
}

Table parse_table(std::string_view text) {
  Table table;
  bool have_header = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    if (line.front() == '#') {
      if (have_header) {
        throw Error(ErrorCode::MalformedRow, at_line(line_no, "comment after the column header"), line_no);
      }
      const auto body = line.substr(1);
      const auto eq = body.find('=');
      if (eq != std::string_view::npos) {
        table.meta.emplace_back(std::string(body.substr(0, eq)), std::string(body.substr(eq + 1)));
      }
      continue;
    }

    const auto fields = split_fields(line);
    if (!have_header) {
      for (const auto f : fields) table.columns.emplace_back(f);
      have_header = true;
      continue;
    }
    if (fields.size() != table.columns.size()) {
      throw Error(ErrorCode::MalformedRow,
                  at_line(line_no, "expected " + std::to_string(table.columns.size()) + " columns, got " +
                                       std::to_string(fields.size())),
                  line_no);
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto f : fields) {
      const auto v = parse_number(f);
      if (!v) {
        throw Error(ErrorCode::MalformedRow, at_line(line_no, "cannot parse number '" + std::string(f) + "'"),
                    line_no);
      }
      row.push_back(*v);
    }
    table.rows.push_back(std::move(row));
    table.row_lines.push_back(line_no);
  }
  if (!have_header) {
    throw Error(ErrorCode::EmptyTrace, "no column header found");
  }
  return table;
}

std::string write_table(const Table& table) {
  std::string out;
  for (const auto& [k, v] : table.meta) {
    out += '#';
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_number(row[i]);
    }
    out += '\n';
  }
  return out;
}

Trace parse_trace(std::string_view text) {
  const Table table = parse_table(text);

  const bool columns_ok = table.columns.size() == 3 && table.columns[0] == kTraceColumns[0] &&
                          table.columns[1] == kTraceColumns[1] && table.columns[2] == kTraceColumns[2];
  if (!columns_ok) {
    throw Error(ErrorCode::MalformedRow, "column header must be time_s,temp_c,power_w");
  }

  TraceMeta meta;
  if (auto p = table.find_meta("processor")) meta.processor = *p;

  const auto freq = table.find_meta("freq_ghz");
  if (!freq) throw Error(ErrorCode::MissingMeta, "missing #freq_ghz header");
  const auto freq_value = parse_number(*freq);
  if (!freq_value) throw Error(ErrorCode::InvalidMeta, "cannot parse #freq_ghz value '" + *freq + "'");
  meta.freq_ghz = *freq_value;

  const auto cores = table.find_meta("cores");
  if (!cores) throw Error(ErrorCode::MissingMeta, "missing #cores header");
  int cores_value = 0;
  const auto [ptr, ec] = std::from_chars(cores->data(), cores->data() + cores->size(), cores_value);
  if (ec != std::errc{} || ptr != cores->data() + cores->size()) {
    throw Error(ErrorCode::InvalidMeta, "cannot parse #cores value '" + *cores + "'");
  }
  meta.cores = cores_value;

  std::vector<TraceSample> samples;
  samples.reserve(table.rows.size());
  for (const auto& row : table.rows) samples.push_back({row[0], row[1], row[2]});

  try {
    return Trace(std::move(meta), std::move(samples));
  } catch (const Error& e) {
    // Map sample indices back to source lines.
    if (e.where() && *e.where() < table.row_lines.size()) {
      const auto line = table.row_lines[*e.where()];
      throw Error(e.code(), at_line(line, e.what()), line);
    }
    throw;
  }
}

std::string write_trace(const Trace& trace) {
  Table table;
  table.meta = {{"processor", trace.meta().processor},
                {"freq_ghz", format_number(trace.meta().freq_ghz)},
                {"cores", std::to_string(trace.meta().cores)}};
  table.columns.assign(std::begin(kTraceColumns), std::end(kTraceColumns));
  table.rows.reserve(trace.size());
  for (const auto& s : trace.samples()) table.rows.push_back({s.time, s.temp, s.power});
  return write_table(table);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

Trace read_trace_file(const std::filesystem::path& path) { return parse_trace(read_text_file(path)); }

Trace generate_synthetic_trace(const TraceMeta& meta, const ModelParams& params, const TemperatureSweep& sweep,
                               const SyntheticNoise& noise, std::uint64_t seed) {
  if (params.a2 == 0.0 || !std::isfinite(params.a0) || !std::isfinite(params.a1) || !std::isfinite(params.a2)) {
    throw Error(ErrorCode::InvalidParams, "exponential scalars must be finite with a2 != 0");
  }
  if (sweep.count < Trace::kMinSamples) {
    throw Error(ErrorCode::InvalidParams, "sample count must be at least 3");
  }
  if (!std::isfinite(sweep.t_min) || !std::isfinite(sweep.t_max) || !(sweep.rate_hz > 0.0)) {
    throw Error(ErrorCode::InvalidParams, "sweep bounds must be finite and the sample rate positive");
  }
  if (!(noise.sigma_w >= 0.0) || !(noise.quantum_w >= 0.0)) {
    throw Error(ErrorCode::InvalidParams, "noise and quantum must be non-negative");
  }

  GaussianSource gauss(seed);
  std::vector<TraceSample> samples;
  samples.reserve(sweep.count);
  const double span = sweep.t_max - sweep.t_min;
  const double last = static_cast<double>(sweep.count - 1);
  for (std::size_t i = 0; i < sweep.count; ++i) {
    const double idx = static_cast<double>(i);
    TraceSample s;
    s.time = idx / sweep.rate_hz;
    s.temp = i + 1 == sweep.count ? sweep.t_max : sweep.t_min + span * idx / last;
    s.power = exponential_power(s.temp, params);
    if (noise.sigma_w > 0.0) s.power += noise.sigma_w * gauss.next();
    if (noise.quantum_w > 0.0) s.power = std::round(s.power / noise.quantum_w) * noise.quantum_w;
    if (!(s.power > 0.0)) {
      throw Error(ErrorCode::InvalidParams, "generated a non-positive power at sample " + std::to_string(i), i);
    }
    samples.push_back(s);
  }
  return Trace(meta, std::move(samples));
}

std::string content_hash(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  static constexpr char kHex[] = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = kHex[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return buf;
}

}  // namespace thermo
