#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "doctest.h"
#include "thermo/cli.hpp"
#include "thermo/power_model.hpp"
#include "thermo/serialize.hpp"
#include "thermo/trace.hpp"

using namespace thermo;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run_cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  explicit TempDir(const std::string& name)
      : path_(fs::temp_directory_path() / ("thermo_cli_" + std::to_string(::getpid()) + "_" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string operator/(const std::string& leaf) const { return (path_ / leaf).string(); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string gen_a15(const TempDir& dir, const std::string& name, double freq, int seed,
                    std::vector<std::string> extra = {}) {
  const std::string out = dir / name;
  std::vector<std::string> args{"gen", "--proc", "a15", "--freq", format_number(freq), "--cores", "4",
                                "--noise", "0.002", "--seed", std::to_string(seed), "--out", out, "--quiet"};
  args.insert(args.end(), extra.begin(), extra.end());
  const auto r = run_cli(args);
  REQUIRE(r.code == 0);
  return out;
}

}  // namespace

TEST_CASE("help and version") {
  CHECK(run_cli({"--help"}).code == 0);
  CHECK(run_cli({"fit", "--help"}).code == 0);
  const auto v = run_cli({"--version"});
  CHECK(v.code == 0);
  CHECK(v.out == std::string(cli::kVersion) + "\n");
}

TEST_CASE("usage errors exit 2") {
  CHECK(run_cli({}).code == cli::kUsageError);
  CHECK(run_cli({"frobnicate"}).code == cli::kUsageError);
  CHECK(run_cli({"fit"}).code == cli::kUsageError);
  CHECK(run_cli({"fit", "/nonexistent/trace.csv"}).code == cli::kUsageError);
  CHECK(run_cli({"model", "eval", "--proc", "a9", "--temp", "50", "--freq", "1", "--cores", "2"}).code ==
        cli::kUsageError);
  CHECK(run_cli({"model", "eval", "--proc", "a7", "--temp", "50", "--freq", "1", "--cores", "9"}).code ==
        cli::kUsageError);
  CHECK(run_cli({"model", "eval", "--temp", "50", "--freq", "1", "--cores", "2"}).code == cli::kUsageError);
}

TEST_CASE("model eval prints the frozen values") {
  const auto a7 = run_cli({"model", "eval", "--proc", "a7", "--temp", "50", "--freq", "0.5", "--cores", "3"});
  CHECK(a7.code == 0);
  CHECK(a7.out == "0.273204762456 W\n");
  const auto a15 =
      run_cli({"model", "eval", "--proc", "A15", "--temp", "50", "--freq", "1.2", "--cores", "4", "--json"});
  REQUIRE(a15.code == 0);
  const Json j = Json::parse(a15.out);
  CHECK(j["schema"] == 1);
  CHECK(j["tool"] == "thermo");
  CHECK(j["command"].size() == 11);
  CHECK(j["results"]["power_w"].get<double>() == doctest::Approx(2.473886778818005).epsilon(1e-12));
  CHECK(j["results"]["params"]["a1"].get<double>() == doctest::Approx(106.3436).epsilon(1e-12));
}

TEST_CASE("model eval with a coefficient file") {
  TempDir dir("coeffs");
  const auto path = dir / "a7.json";
  write_text_file(path, to_json(*find_builtin("A7")).dump());
  const auto r = run_cli({"model", "eval", "--coeffs", path, "--temp", "50", "--freq", "0.5", "--cores", "3"});
  CHECK(r.code == 0);
  CHECK(r.out == "0.273204762456 W\n");
  write_text_file(path, "{not json");
  CHECK(run_cli({"model", "eval", "--coeffs", path, "--temp", "50", "--freq", "0.5", "--cores", "3"}).code ==
        cli::kUsageError);
}

TEST_CASE("fit reports malformed input with its line") {
  TempDir dir("malformed");
  const auto path = dir / "bad.csv";
  write_text_file(path, "#freq_ghz=1\n#cores=1\ntime_s,temp_c,power_w\n0,30,1\n1,31,abc\n2,32,1\n");
  const auto r = run_cli({"fit", path});
  CHECK(r.code == cli::kUsageError);
  CHECK(r.err.find("line 5") != std::string::npos);
}

TEST_CASE("fit a single linear model") {
  TempDir dir("linear");
  const auto path = dir / "line.csv";
  write_text_file(path, "#freq_ghz=1\n#cores=1\ntime_s,temp_c,power_w\n0,30,1.0\n1,40,1.2\n2,50,1.4\n");
  const auto r = run_cli({"fit", path, "--model", "linear", "--json"});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  const auto& fit = j["results"]["traces"][0]["fits"]["linear"];
  CHECK(fit["coeffs"][0].get<double>() == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(fit["coeffs"][1].get<double>() == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(j["results"]["groups"][0].count("sign_tests") == 0);
  CHECK(run_cli({"fit", path, "--model", "cubic"}).code == cli::kUsageError);
}

TEST_CASE("fit suite orders the families and is deterministic") {
  TempDir dir("suite");
  std::vector<std::string> args{"fit"};
  for (int i = 0; i < 12; ++i) args.push_back(gen_a15(dir, "t" + std::to_string(i) + ".csv", 0.8 + 0.8 * i / 11.0, i));
  args.insert(args.end(), {"--json", "--plot-dir", dir / "plots", "--out", dir / "report.json"});
  const auto first = run_cli(args);
  REQUIRE(first.code == 0);
  const std::string report_bytes = read_text_file(dir / "report.json");
  const std::string plot_bytes = read_text_file(dir / "plots/t3.exp.csv");

  args.push_back("--jobs");
  args.push_back("1");
  const auto second = run_cli(args);
  REQUIRE(second.code == 0);

  const Json j1 = Json::parse(first.out);
  const Json j2 = Json::parse(second.out);
  CHECK(j1["results"] == j2["results"]);
  CHECK(read_text_file(dir / "plots/t3.exp.csv") == plot_bytes);
  args.pop_back();
  args.pop_back();
  CHECK(run_cli(args).out == first.out);
  CHECK(read_text_file(dir / "report.json") == report_bytes);

  const auto& group = j1["results"]["groups"][0];
  const double lin = group["aggregate_error"]["linear"];
  const double quad = group["aggregate_error"]["quad"];
  const double exp = group["aggregate_error"]["exp"];
  CHECK(exp < quad);
  CHECK(quad < lin);
  CHECK(group["sign_tests"]["exp_vs_quad"]["p_value"].get<double>() < 0.01);
  CHECK(group["sign_tests"]["quad_vs_lin"]["p_value"].get<double>() < 0.01);

  const Table plot = parse_table(plot_bytes);
  CHECK(plot.columns == std::vector<std::string>{"temp_c", "power_w"});
  CHECK(plot.find_meta("series") == std::optional<std::string>("fitted_exp"));
  for (std::size_t r = 1; r < plot.rows.size(); ++r) CHECK(plot.rows[r - 1][0] <= plot.rows[r][0]);
  CHECK(fs::exists(dir / "plots/t0.measured.csv"));
}

TEST_CASE("fit failure is partial and exits 1") {
  TempDir dir("failure");
  const auto good = gen_a15(dir, "good.csv", 1.2, 0);
  const auto flat = dir / "flat.csv";
  write_text_file(flat, "#freq_ghz=1.2\n#cores=4\ntime_s,temp_c,power_w\n0,30,1\n1,40,1\n2,50,1\n");
  const auto r = run_cli({"fit", good, flat, "--json"});
  CHECK(r.code == cli::kComputeFailure);
  const Json j = Json::parse(r.out);
  CHECK(j["results"]["traces"][1]["fits"]["exp"]["failure"] == "DegenerateInput");
  CHECK(j["results"]["traces"][1]["fits"]["linear"].contains("coeffs"));
  CHECK(j["results"]["groups"][0]["sign_tests"]["exp_vs_quad"]["excluded"] == Json::array({1}));
  CHECK_FALSE(j["warnings"].empty());
}

TEST_CASE("fit groups by processor and core count") {
  TempDir dir("groups");
  const auto a = gen_a15(dir, "a.csv", 1.0, 1);
  const auto b = dir / "b.csv";
  REQUIRE(run_cli({"gen", "--proc", "a7", "--freq", "1.0", "--cores", "2", "--seed", "2", "--out", b, "--quiet"}).code ==
          0);
  const auto r = run_cli({"fit", a, b, "--group-by", "proc-cores", "--model", "exp", "--json"});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  REQUIRE(j["results"]["groups"].size() == 2);
  CHECK(j["results"]["groups"][0]["key"] == "A15/4c");
  CHECK(j["results"]["groups"][1]["key"] == "A7/2c");
}

TEST_CASE("gen requires seed and output") {
  TempDir dir("gen");
  CHECK(run_cli({"gen", "--a0", "0.25", "--a1", "185", "--a2", "33", "--out", dir / "x.csv"}).code ==
        cli::kUsageError);
  CHECK(run_cli({"gen", "--a0", "0.25", "--a1", "185", "--a2", "33", "--seed", "1"}).code == cli::kUsageError);
  CHECK(run_cli({"gen", "--a0", "0.25", "--a1", "185", "--seed", "1", "--out", dir / "x.csv"}).code ==
        cli::kUsageError);
}

TEST_CASE("gen is byte-deterministic and prints the content hash") {
  TempDir dir("gen_hash");
  const auto path = dir / "g.csv";
  const std::vector<std::string> args{"gen", "--a0", "0.25", "--a1", "185", "--a2", "33", "--noise", "0.002",
                                      "--seed", "5", "--out", path};
  const auto first = run_cli(args);
  REQUIRE(first.code == 0);
  const std::string bytes = read_text_file(path);
  CHECK(first.out == content_hash(bytes) + "  " + path + "\n");
  const auto second = run_cli(args);
  CHECK(second.out == first.out);
  CHECK(read_text_file(path) == bytes);
  const auto quiet = run_cli({"gen", "--a0", "0.25", "--a1", "185", "--a2", "33", "--seed", "5", "--out", path,
                              "--quiet"});
  CHECK(quiet.out.empty());
}

TEST_CASE("gen quantizes power") {
  TempDir dir("gen_quantum");
  const auto path = dir / "q.csv";
  REQUIRE(run_cli({"gen", "--a0", "0.25", "--a1", "185", "--a2", "33", "--noise", "0.002", "--quantum", "0.00125",
                   "--seed", "3", "--out", path, "--quiet"})
              .code == 0);
  for (const auto& s : read_trace_file(path).samples()) {
    const double k = s.power / 0.00125;
    CHECK(std::abs(k - std::round(k)) < 1e-9);
  }
}

TEST_CASE("debias with given eta cancels an exact linear trace") {
  TempDir dir("debias_exact");
  const auto in = dir / "line.csv";
  write_text_file(in, "#freq_ghz=1\n#cores=1\ntime_s,temp_c,power_w\n0,30,1.0\n1,40,1.2\n2,50,1.4\n3,60,1.6\n");
  const auto out = dir / "out.csv";
  const auto r = run_cli({"debias", in, "--kind", "linear", "--eta", "0.02", "--ref-temp", "45", "--out", out, "--json"});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(j["results"]["eta_source"] == "given");
  CHECK(j["results"]["metrics"]["fl"].get<double>() < 1e-10);
  const Table t = parse_table(read_text_file(out));
  REQUIRE(t.column_index("power_ref_w"));
  const auto col = *t.column_index("power_ref_w");
  for (const auto& row : t.rows) CHECK(row[col] == doctest::Approx(1.3).epsilon(1e-12));
  CHECK(t.find_meta("ref_temp_c") == "45");
}

TEST_CASE("debias warns about a distant reference temperature") {
  TempDir dir("debias_warn");
  const auto in = gen_a15(dir, "t.csv", 1.2, 0);
  const auto r = run_cli({"debias", in, "--ref-temp", "200", "--json"});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(j["warnings"].size() == 1);
  CHECK(j["results"]["eta_source"] == "fitted");
  const auto mid = run_cli({"debias", in, "--ref-temp", "55", "--json", "--plot-dir", dir / "plots"});
  const Json jm = Json::parse(mid.out);
  CHECK(jm["warnings"].empty());
  CHECK(jm["results"]["metrics"]["fl"].get<double>() <= 1.0 / 3.0);
  CHECK(fs::exists(dir / "plots/t.transformed.csv"));
}

TEST_CASE("debias rejects bad arguments") {
  TempDir dir("debias_bad");
  const auto in = gen_a15(dir, "t.csv", 1.2, 0);
  CHECK(run_cli({"debias", in}).code == cli::kUsageError);
  CHECK(run_cli({"debias", in, "--ref-temp", "50", "--kind", "cubic"}).code == cli::kUsageError);
  CHECK(run_cli({"debias", in, "--ref-temp", "50", "--kind", "quad", "--eta", "0.1"}).code == cli::kUsageError);
}

TEST_CASE("sensor-correct on a simulated lagging sensor") {
  TempDir dir("sensor");
  const auto in = dir / "lag.csv";
  REQUIRE(run_cli({"gen", "--distant-sensor", "--proc", "a15", "--freq", "1.2", "--cores", "4", "--t-init", "80",
                   "--t-inf", "30", "--seed", "0", "--out", in, "--quiet"})
              .code == 0);
  const auto out = dir / "corrected.csv";
  const std::vector<std::string> args{"sensor-correct", in, "--t-init", "80", "--t-inf", "30", "--out", out, "--json"};
  const auto r = run_cli(args);
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  const auto& raw = j["results"]["curvature"]["raw"];
  const auto& cor = j["results"]["curvature"]["corrected"];
  const double interior = raw["interior"];
  CHECK(raw["negative"].get<double>() >= 0.9 * interior);
  CHECK(cor["positive"].get<double>() >= 0.9 * interior);
  const std::string bytes = read_text_file(out);
  CHECK(run_cli(args).out == r.out);
  CHECK(read_text_file(out) == bytes);

  const auto sidecar = dir / "sensor.json";
  SensorModel m;
  m.t_init = 80.0;
  m.t_inf = 30.0;
  write_text_file(sidecar, to_json(m).dump());
  const auto via_json = run_cli({"sensor-correct", in, "--sensor-json", sidecar, "--json"});
  REQUIRE(via_json.code == 0);
  CHECK(Json::parse(via_json.out)["results"] == j["results"]);
}

TEST_CASE("sensor-correct input and model errors") {
  TempDir dir("sensor_bad");
  const auto zero_time = dir / "zero.csv";
  write_text_file(zero_time, "time_s,temp_c\n0,40\n1,41\n2,42\n");
  const auto r = run_cli({"sensor-correct", zero_time, "--t-init", "80", "--t-inf", "30"});
  CHECK(r.code == cli::kUsageError);
  CHECK(r.err.find("line 2") != std::string::npos);

  const auto ok = dir / "ok.csv";
  write_text_file(ok, "time_s,temp_c\n1,40\n2,41\n3,42\n");
  CHECK(run_cli({"sensor-correct", ok}).code == cli::kUsageError);

  // erf = 1/2 at a / sqrt(4 alpha t) = 0.47693627620446987; T_i = -1, T_inf = 1 zeroes the denominator.
  const double x = 0.47693627620446987;
  const double t = (8.25 / x) * (8.25 / x) / (4.0 * 4.125e-7);
  const auto singular = dir / "singular.csv";
  write_text_file(singular, "time_s,temp_c\n1,40\n2,41\n" + format_number(t) + ",42\n");
  CHECK(run_cli({"sensor-correct", singular, "--t-init", "-1", "--t-inf", "1"}).code == cli::kComputeFailure);
}

TEST_CASE("sensor-correct with nearly equal temperatures is an identity") {
  TempDir dir("sensor_flat");
  const auto in = dir / "in.csv";
  write_text_file(in, "time_s,temp_c\n1,40\n2,41\n3,42\n");
  const auto out = dir / "out.csv";
  REQUIRE(run_cli({"sensor-correct", in, "--t-init", "50", "--t-inf", "50.000000001", "--out", out, "--quiet"}).code ==
          0);
  const Table t = parse_table(read_text_file(out));
  CHECK(t.rows[0][1] == doctest::Approx(40.0).epsilon(1e-10));
  CHECK(t.rows[2][1] == doctest::Approx(42.0).epsilon(1e-10));
}

TEST_CASE("model calibrate round-trips an observation grid") {
  TempDir dir("calibrate");
  const auto set = *find_builtin("A15");
  Table table;
  table.columns = {"freq_ghz", "cores", "a0", "a1", "a2"};
  for (const double f : {0.6, 0.9, 1.2, 1.5, 1.8}) {
    for (int c = 1; c <= 4; ++c) {
      const auto p = derive_params(set, f, c);
      table.rows.push_back({f, double(c), p.a0, p.a1, p.a2});
    }
  }
  write_text_file(dir / "grid.csv", write_table(table));
  const auto out = dir / "coeffs.json";
  const auto r = run_cli({"model", "calibrate", dir.path().string(), "--label", "A15", "--out", out, "--quiet"});
  REQUIRE(r.code == 0);
  const auto back = coefficient_set_from_json(Json::parse(read_text_file(out)));
  for (int i = 1; i <= 7; ++i) CHECK(back.m_at(i) == doctest::Approx(set.m_at(i)).epsilon(1e-6));
  CHECK(back.a2 == doctest::Approx(set.a2).epsilon(1e-6));

  const auto eval = run_cli({"model", "eval", "--coeffs", out, "--temp", "50", "--freq", "1.2", "--cores", "4"});
  CHECK(eval.out == "2.47388677882 W\n");
}

TEST_CASE("model calibrate with too little data exits 1") {
  TempDir dir("calibrate_small");
  Table table;
  table.columns = {"freq_ghz", "cores", "a0", "a1", "a2"};
  const auto set = *find_builtin("A7");
  for (int c = 1; c <= 4; ++c) {
    const auto p = derive_params(set, 1.0, c);
    table.rows.push_back({1.0, double(c), p.a0, p.a1, p.a2});
  }
  write_text_file(dir / "few.csv", write_table(table));
  const auto r = run_cli({"model", "calibrate", dir / "few.csv", "--json"});
  CHECK(r.code == cli::kComputeFailure);
  CHECK(Json::parse(r.out)["results"]["error"]["code"] == "InsufficientSpan");
}
