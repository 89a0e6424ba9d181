#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "thermo/debias.hpp"
#include "thermo/error.hpp"

using namespace thermo;
using Eigen::VectorXd;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (const double x : v) out(i++) = x;
  return out;
}

Trace polynomial_trace(double q2, double q1, double q0, double t_min = 30.0, double t_max = 70.0, int n = 21) {
  std::vector<TraceSample> samples;
  for (int i = 0; i < n; ++i) {
    const double t = t_min + (t_max - t_min) * i / (n - 1);
    samples.push_back({0.2 * i, t, q2 * t * t + q1 * t + q0});
  }
  return Trace({"P", 1.0, 2}, samples);
}

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

}  // namespace

TEST_CASE("transform examples") {
  CHECK(transform_power({DebiasKind::Linear, {0.01}, 50.0}, 40.0, 1.0) == doctest::Approx(1.1).epsilon(1e-15));
  CHECK(transform_power({DebiasKind::Quadratic, {1e-4, 0.0}, 50.0}, 40.0, 1.0) == doctest::Approx(1.09).epsilon(1e-15));
  CHECK(transform_power({DebiasKind::Quadratic, {1e-4, 0.01}, 50.0}, 40.0, 1.0) == doctest::Approx(1.19).epsilon(1e-15));
  const double e = transform_power({DebiasKind::Exponential, {185.0, 33.0}, 50.0}, 40.0, 1.0);
  CHECK(e == doctest::Approx(1.0 + std::exp((50.0 - 185.0) / 33.0) - std::exp((40.0 - 185.0) / 33.0)).epsilon(1e-15));
}

TEST_CASE("reference equal to measurement is the identity") {
  for (const DebiasSpec spec : {DebiasSpec{DebiasKind::Linear, {0.3}, 45.0},
                                DebiasSpec{DebiasKind::Quadratic, {0.01, -0.2}, 45.0},
                                DebiasSpec{DebiasKind::Exponential, {100.0, 25.0}, 45.0}}) {
    CHECK(transform_power(spec, 45.0, 1.2345) == 1.2345);
  }
}

TEST_CASE("spec arity is validated") {
  CHECK_THROWS_AS(validate(DebiasSpec{DebiasKind::Linear, {}, 40.0}), Error);
  CHECK_THROWS_AS(validate(DebiasSpec{DebiasKind::Quadratic, {1.0}, 40.0}), Error);
  CHECK_THROWS_AS(validate(DebiasSpec{DebiasKind::Exponential, {1.0, 0.0}, 40.0}), Error);
  CHECK_NOTHROW(validate(DebiasSpec{DebiasKind::Exponential, {100.0, 30.0}, 40.0}));
}

TEST_CASE("fitted eta from exact traces") {
  CHECK(fit_eta(polynomial_trace(0, 0.02, 0.4), DebiasKind::Linear).eta[0] == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(std::abs(fit_eta(polynomial_trace(0, 0, 2.0), DebiasKind::Linear).eta[0]) < 1e-14);
  const auto quad = fit_eta(Trace({"P", 1.0, 1}, {{0, 30, 1.0}, {1, 40, 1.2}, {2, 50, 1.5}}), DebiasKind::Quadratic);
  REQUIRE(quad.eta.size() == 2);
  CHECK(quad.eta[0] == doctest::Approx(0.0005).epsilon(1e-9));
  CHECK(quad.eta[1] == doctest::Approx(-0.015).epsilon(1e-9));
  const auto expo = fit_eta(generate_synthetic_trace({"S", 1.0, 1}, {0.25, 185.0, 33.0}, {}, {}, 0),
                            DebiasKind::Exponential);
  CHECK(expo.eta[0] == doctest::Approx(185.0).epsilon(1e-6));
  CHECK(expo.eta[1] == doctest::Approx(33.0).epsilon(1e-6));
}

TEST_CASE("metric examples") {
  CHECK(metric_afl(vec({1.0, 1.015, 1.03})) == doctest::Approx(2.9556650246305423).epsilon(1e-12));
  CHECK(metric_afl(vec({2.0, 2.0, 2.0})) == 0.0);
  CHECK(metric_fl(vec({0.9, 1.0, 1.1}), vec({0.95, 1.0, 1.05})) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(metric_fl(vec({0.9, 1.0, 1.1}), vec({0.9, 1.0, 1.1})) == 1.0);
  CHECK_THROWS_AS(metric_fl(vec({1.0, 1.0}), vec({1.0, 2.0})), Error);
  CHECK(std::abs(metric_rat(vec({0.9, 1.0, 1.1}))) < 1e-15);
  CHECK(metric_rat(vec({1.0, 1.0, 4.0})) == 1.0);
  CHECK(metric_rat(vec({3.0})) == 0.0);
}

TEST_CASE("median") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK(median({7.0}) == 7.0);
}

TEST_CASE("exact linear trace cancels completely") {
  const Trace t = polynomial_trace(0.0, 0.02, 0.4);
  const auto out = debias(t, {DebiasKind::Linear, {0.02}, 50.0});
  CHECK(spread(out.ref_power) <= 1e-12);
  CHECK(out.ref_power.front() == doctest::Approx(0.02 * 50.0 + 0.4).epsilon(1e-12));
  REQUIRE(out.metrics.fl);
  CHECK(*out.metrics.fl <= 1e-10);
}

TEST_CASE("exact quadratic trace cancels completely") {
  const Trace t = polynomial_trace(0.0005, -0.015, 1.0);
  const auto out = debias(t, {DebiasKind::Quadratic, {0.0005, -0.015}, 55.0});
  CHECK(spread(out.ref_power) <= 1e-12);
  CHECK(std::abs(out.metrics.rat) <= 1e-12);
}

TEST_CASE("exact exponential trace cancels completely") {
  const ModelParams p{0.25, 185.0, 33.0};
  const Trace t = generate_synthetic_trace({"S", 1.0, 1}, p, {}, {}, 0);
  const auto out = debias(t, {DebiasKind::Exponential, {p.a1, p.a2}, 55.0});
  CHECK(spread(out.ref_power) <= 1e-12);
  CHECK(out.ref_power.front() == doctest::Approx(exponential_power(55.0, p)).epsilon(1e-12));
}

TEST_CASE("linear transform preserves order of samples at equal temperature") {
  const Trace t({"P", 1.0, 1}, {{0, 40, 1.0}, {1, 40, 1.3}, {2, 40, 1.1}, {3, 50, 2.0}});
  const auto out = debias(t, {DebiasKind::Linear, {0.05}, 60.0});
  CHECK(out.ref_power[0] < out.ref_power[2]);
  CHECK(out.ref_power[2] < out.ref_power[1]);
}

TEST_CASE("quadratic debias flattens an exponential sweep") {
  const Trace t = generate_synthetic_trace({"A15", 1.2, 4}, {0.9, 106.3, 33.1}, {}, {0.002, 0.0}, 4);
  auto spec = fit_eta(t, DebiasKind::Quadratic);
  spec.ref_temp = 55.0;
  const auto out = debias(t, spec);
  REQUIRE(out.metrics.fl);
  CHECK(*out.metrics.fl <= 1.0 / 3.0);
  CHECK(std::abs(out.metrics.rat) < 0.01);
  CHECK(out.metrics.afl == doctest::Approx(metric_afl(t)).epsilon(1e-15));
  CHECK(out.warnings.empty());
}

TEST_CASE("reference warnings") {
  const Trace t = polynomial_trace(0.0, 0.02, 0.4, 30.0, 70.0);
  CHECK(reference_warnings(t, 50.0).empty());
  CHECK(reference_warnings(t, 200.0).size() == 1);
  CHECK(reference_warnings(t, 10.0).size() == 1);
  CHECK(reference_warnings(t, 31.0).size() == 1);
  CHECK(reference_warnings(t, 69.5).size() == 1);
  CHECK(debias(t, {DebiasKind::Linear, {0.02}, 200.0}).warnings.size() == 1);
}

TEST_CASE("debiased CSV carries the reference column") {
  const Trace t({"P", 1.5, 3}, {{0, 40, 1.0}, {1, 45, 1.25}, {2, 50, 1.5}});
  const auto out = debias(t, {DebiasKind::Linear, {0.05}, 50.0});
  CHECK(write_debiased_trace(out) ==
        "#processor=P\n#freq_ghz=1.5\n#cores=3\n#ref_temp_c=50\n#debias_kind=linear\n"
        "time_s,temp_c,power_w,power_ref_w\n0,40,1,1.5\n1,45,1.25,1.5\n2,50,1.5,1.5\n");
}

TEST_CASE("debias kind names") {
  CHECK(parse_debias_kind("quad") == DebiasKind::Quadratic);
  CHECK(parse_debias_kind("exp") == DebiasKind::Exponential);
  CHECK(to_string(DebiasKind::Linear) == "linear");
  CHECK_FALSE(parse_debias_kind("none"));
}
