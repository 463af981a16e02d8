#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "absum/fit.hpp"

using namespace absum;

TEST_CASE("fit_slope") {
  const SamplePoint one[] = {{10, 25.0}};
  CHECK(fit_slope(one).coefficients.at(0) == doctest::Approx(2.5));

  std::vector<SamplePoint> line;
  for (std::uint64_t x : {100, 200, 400, 800}) line.push_back({x, 3.25 * static_cast<double>(x)});
  const auto rep = fit_slope(line);
  CHECK(rep.coefficients[0] == doctest::Approx(3.25).epsilon(1e-14));
  CHECK(rep.r_squared == doctest::Approx(1.0));
  CHECK(std::isnan(rep.residual_exponent));

  CHECK_THROWS_AS(fit_slope(std::vector<SamplePoint>{}), std::invalid_argument);
  const SamplePoint unordered[] = {{20, 1.0}, {10, 1.0}};
  CHECK_THROWS_AS(fit_slope(unordered), std::invalid_argument);
}

TEST_CASE("fit_log_poly recovers an exact log-polynomial") {
  std::vector<SamplePoint> s;
  for (const auto x : geometric_grid(1000, 10'000'000)) {
    const double t = std::log(static_cast<double>(x));
    s.push_back({x, static_cast<double>(x) * (0.5 - 0.2 * t + 0.03 * t * t)});
  }
  const auto rep = fit_log_poly(s, 2);
  REQUIRE(rep.coefficients.size() == 3);
  CHECK(rep.coefficients[0] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(rep.coefficients[1] == doctest::Approx(-0.2).epsilon(1e-8));
  CHECK(rep.coefficients[2] == doctest::Approx(0.03).epsilon(1e-8));
  CHECK(rep.condition < 1e12);

  const std::vector<SamplePoint> few(s.begin(), s.begin() + 3);
  CHECK_THROWS_AS(fit_log_poly(few, 2), std::invalid_argument);
}

TEST_CASE("fit_log_poly rejects a rank-deficient design") {
  std::vector<SamplePoint> narrow;
  for (std::uint64_t x = 1'000'000'000'000; x < 1'000'000'000'006; ++x)
    narrow.push_back({x, static_cast<double>(x)});
  CHECK_THROWS_AS(fit_log_poly(narrow, 3), std::invalid_argument);
}

TEST_CASE("residual_exponent recovers a power law") {
  std::vector<SamplePoint> s;
  std::vector<double> model;
  for (const auto x : geometric_grid(100, 1'000'000)) {
    const double xd = static_cast<double>(x);
    model.push_back(2.0 * xd);
    s.push_back({x, 2.0 * xd + 5.0 * std::pow(xd, 0.75), 2.0 * xd});
  }
  CHECK(residual_exponent(s, model) == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(residual_exponent(s) == doctest::Approx(0.75).epsilon(1e-9));
  const std::vector<SamplePoint> two(s.begin(), s.begin() + 2);
  const std::vector<double> two_model(model.begin(), model.begin() + 2);
  CHECK_THROWS_AS(residual_exponent(two, two_model), std::invalid_argument);
}

TEST_CASE("geometric_grid") {
  CHECK(geometric_grid(10, 100) == std::vector<std::uint64_t>{10, 20, 40, 80, 100});
  CHECK(geometric_grid(16, 64) == std::vector<std::uint64_t>{16, 32, 64});
  CHECK(geometric_grid(5, 5) == std::vector<std::uint64_t>{5});
  CHECK_THROWS_AS(geometric_grid(0, 5), std::invalid_argument);
  CHECK_THROWS_AS(geometric_grid(6, 5), std::invalid_argument);
}

TEST_CASE("prop1_report") {
  const Progression progs[] = {{1, 3}, {3, 3}, {1, 1}};
  const auto rows = prop1_report(10, progs);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].t == 5);
  CHECK(rows[0].flag);
  CHECK(rows[2].t == 14);  // sum_{n <= 10} a(n)

  const auto big = prop1_report(1'000'000, progs);
  for (const auto& r : big) {
    CHECK_FALSE(r.flag);
    CHECK(r.err == doctest::Approx(std::abs(static_cast<double>(r.t) - r.pred)));
    CHECK(r.err / r.pred < 0.01);
  }
  const Progression zero_k[] = {{0, 3}};
  CHECK_THROWS_AS(prop1_report(100, zero_k), std::invalid_argument);
}

TEST_CASE("kratzel_report") {
  const std::uint64_t xs[] = {100, 1000, 10'000, 100'000};
  const auto rows = kratzel_report(xs);
  CHECK(rows[0].a_max == 11);
  CHECK(rows[0].l_value == doctest::Approx(0.7951968456195118).epsilon(1e-13));
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].a_max >= rows[i - 1].a_max);
  CHECK(kKratzelLimit == doctest::Approx(std::log(5.0) / 4));
  const std::uint64_t tiny[] = {15};
  CHECK_THROWS_AS(kratzel_report(tiny), std::invalid_argument);
}
