#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "absum/arith.hpp"
#include "absum/euler.hpp"
#include "oracles.hpp"

using namespace absum;

namespace {

constexpr double kPi = std::numbers::pi;

TruncationConfig coarse() {
  TruncationConfig c;
  c.prime_cutoff = 3000;
  c.squarefull_cutoff = 400;
  c.d_cutoff = 150;
  return c;
}

// C by the defining triple sum, one c(r, k) evaluation per term.
double literal_c(const TruncationConfig& cfg) {
  double total = 0.0;
  for (std::uint64_t s = 1; s <= cfg.squarefull_cutoff; ++s) {
    if (!oracle::squarefull(s)) continue;
    const std::uint64_t k = oracle::a(s);
    std::uint64_t rad = 1;
    for (const auto& [p, e] : oracle::factor(s)) rad *= p;
    double inner = 0.0;
    for (std::uint64_t d = 1; d <= cfg.d_cutoff; ++d) {
      const int mu_d = oracle::mobius(d);
      if (mu_d == 0 || std::gcd(d, s) != 1) continue;
      for (const std::uint64_t delta : oracle::divisors(rad)) {
        const int mu_delta = oracle::mobius(delta);
        const double c = c_rk(d * d * delta * s, k, cfg).value;
        inner += mu_d * mu_delta * c / (static_cast<double>(d * d) * static_cast<double>(delta));
      }
    }
    total += inner / static_cast<double>(s);
  }
  return total;
}

}  // namespace

TEST_CASE("zeta at integers") {
  CHECK(std::abs(zeta_int(2) - kPi * kPi / 6) < 1e-12);
  CHECK(std::abs(zeta_int(4) - std::pow(kPi, 4) / 90) < 1e-12);
  CHECK(std::abs(zeta_int(3) - 1.2020569031595942) < 1e-12);
  CHECK(std::abs(zeta_int(10) - std::pow(kPi, 10) / 93555) < 1e-12);
  CHECK(std::abs(zeta_int(40) - 1.0) < 1e-11);
  CHECK(std::abs(zeta_int(3, 8) - zeta_int(3)) < 1e-10);
  CHECK_THROWS_AS(zeta_int(1), std::invalid_argument);
  CHECK(zeta_product(2, 2) == doctest::Approx(kPi * kPi / 6).epsilon(1e-14));
}

TEST_CASE("principal-character factors") {
  CHECK(l2_principal(1) == doctest::Approx(kPi * kPi / 6).epsilon(1e-14));
  CHECK(l2_principal(12) == doctest::Approx(kPi * kPi / 6 * 0.75 * (8.0 / 9)).epsilon(1e-14));
  // G(1) at r1 = 1 is prod_{j >= 3} zeta(j).
  const auto g = g1_principal(1);
  CHECK(std::abs(g.value - zeta_product(3, 64)) < 1e-9);
  CHECK_FALSE(g.flagged);
  CHECK(fu_principal(Factorization{}, 7).value == 1.0);
  // u = 4 with r1 = 2: only alpha = 0 survives, giving P(2) = 2.
  CHECK(fu_principal(factorize(4), 2).value == 2.0);
}

TEST_CASE("c(1,1) equals the zeta product") {
  const auto c = c_rk(1, 1);
  CHECK(std::abs(c.value - 2.294856591673) < 1e-11);
  CHECK(std::abs(c.value - zeta_product(2, 64)) < 1e-8);
  CHECK(c.tail_estimate < kTailTarget);
  CHECK_FALSE(c.flagged);
}

TEST_CASE("c(r,k) averages to c(1,1) over residues and depends only on gcd") {
  const EulerContext ctx;
  const double c11 = ctx.c_rk(1, 1).value;
  for (std::uint64_t r = 1; r <= 36; ++r) {
    double sum = 0.0;
    for (std::uint64_t k = 1; k <= r; ++k) sum += ctx.c_rk(r, k).value;
    REQUIRE(std::abs(sum / static_cast<double>(r) - c11) < 1e-11);
  }
  CHECK(ctx.c_rk(12, 1).value == doctest::Approx(ctx.c_rk(12, 5).value).epsilon(1e-15));
  CHECK(ctx.c_rk(12, 4).value == doctest::Approx(ctx.c_rk(12, 16).value).epsilon(1e-15));
}

TEST_CASE("cached context agrees with the direct composition") {
  const EulerContext ctx;
  for (std::uint64_t r : {1, 2, 4, 6, 9, 12, 16, 30, 97, 1024, 3600})
    for (std::uint64_t k : {std::uint64_t{1}, std::uint64_t{2}, std::uint64_t{3}, std::uint64_t{8}, r})
      REQUIRE(ctx.c_rk(r, k).value == doctest::Approx(c_rk(r, k).value).epsilon(1e-12));
  CHECK_THROWS_AS(c_rk(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(c_rk(3, 0), std::invalid_argument);
}

TEST_CASE("series for C matches the literal triple sum") {
  const auto cfg = coarse();
  const auto c = c_series(cfg);
  CHECK(c.value == doctest::Approx(literal_c(cfg)).epsilon(1e-11));
}

TEST_CASE("raising the squarefull cutoff moves C by less than the reported tail") {
  TruncationConfig lo;
  lo.squarefull_cutoff = 10'000;
  const auto small = c_series(lo);
  const auto big = c_series();
  CHECK(std::abs(small.value - big.value) < small.tail_estimate);
  CHECK(big.tail_estimate < small.tail_estimate);
  CHECK(big.value == doctest::Approx(2.39316950329).epsilon(1e-10));
  CHECK(std::isfinite(big.tail_estimate));
}

TEST_CASE("truncation config validation and flagging") {
  TruncationConfig bad;
  bad.prime_cutoff = 1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = {};
  bad.exponent_cutoff = 500;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_THROWS_AS(c_rk(1, 1, bad), std::invalid_argument);

  TruncationConfig crude;
  crude.prime_cutoff = 10;
  crude.exponent_cutoff = 4;
  const auto g = g1_principal(1, crude);
  CHECK(g.flagged);
  CHECK(g.tail_estimate > kTailTarget);
  CHECK(c_rk(1, 1, crude).flagged);
}
