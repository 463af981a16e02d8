#include <doctest.h>

#include <numeric>
#include <random>
#include <stdexcept>

#include "absum/arith.hpp"
#include "absum/error.hpp"
#include "oracles.hpp"

using namespace absum;

TEST_CASE("partition numbers agree with direct enumeration") {
  const auto& pt = default_partitions();
  REQUIRE(pt.max_index() == kDefaultPartitionCutoff);
  for (unsigned n = 0; n <= 60; ++n) CHECK(pt[n] == oracle::partitions(n));
  CHECK(pt[4] == 5);
  CHECK(pt[10] == 42);
  CHECK(pt[64] == 1741630);
  CHECK(pt[128] == 4351078600ull);
}

TEST_CASE("partition table overflows at index 417") {
  const auto big = partition_table(416);
  CHECK(big.max_index() == 416);
  CHECK(big[416] > big[415]);
  try {
    (void)partition_table(417);
    FAIL("expected overflow");
  } catch (const OverflowError& e) {
    CHECK(e.where() == 417);
  }
}

TEST_CASE("factorize") {
  CHECK_THROWS_AS(factorize(0), std::invalid_argument);
  CHECK(factorize(1).empty());
  const auto f = factorize(360);
  REQUIRE(f.size() == 3);
  CHECK(f.terms()[0] == PrimePower{2, 3});
  CHECK(f.terms()[1] == PrimePower{3, 2});
  CHECK(f.terms()[2] == PrimePower{5, 1});
  CHECK(f.value() == 360);
  CHECK(f.radical() == 30);

  const std::uint64_t big = 1'000'000'007ull * 998'244'353ull;
  const auto g = factorize(big);
  REQUIRE(g.size() == 2);
  CHECK(g.value() == big);

  CHECK_THROWS_AS(Factorization({{4, 1}, {2, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(Factorization({{3, 0}}), std::invalid_argument);
}

TEST_CASE("spf table matches trial division") {
  const SpfTable spf(50'000);
  for (std::uint64_t n = 1; n <= 50'000; ++n) REQUIRE(spf.factorize(n) == factorize(n));
  CHECK(spf.factorize(1'000'003ull * 7) == factorize(1'000'003ull * 7));
}

TEST_CASE("a(n) and d_k(n) against brute force") {
  const std::uint64_t first[] = {1, 1, 1, 2, 1, 1, 1, 3, 2, 1};
  for (std::uint64_t n = 1; n <= 10; ++n) CHECK(a_of(factorize(n)) == first[n - 1]);
  for (std::uint64_t n = 1; n <= 3000; ++n) REQUIRE(a_of(factorize(n)) == oracle::a(n));
  for (unsigned k = 2; k <= 4; ++k)
    for (std::uint64_t n = 1; n <= 600; ++n) REQUIRE(dk_of(factorize(n), k) == oracle::dk(n, k));
  CHECK_THROWS_AS(dk_of(factorize(6), 1), std::invalid_argument);
  CHECK_THROWS_AS(a_of(Factorization({{2, 200}})), std::invalid_argument);
}

TEST_CASE("multiplicativity on random coprime pairs") {
  std::mt19937_64 rng(7);
  int checked = 0;
  while (checked < 500) {
    const std::uint64_t m = rng() % 200'000 + 1, n = rng() % 200'000 + 1;
    if (std::gcd(m, n) != 1) continue;
    ++checked;
    const auto fm = factorize(m), fn = factorize(n), fmn = factorize(m * n);
    REQUIRE(a_of(fmn) == a_of(fm) * a_of(fn));
    REQUIRE(dk_of(fmn, 3) == dk_of(fm, 3) * dk_of(fn, 3));
    REQUIRE(mobius(fmn) == mobius(fm) * mobius(fn));
  }
}

TEST_CASE("mobius, squarefree/squarefull split, divisor count") {
  for (std::uint64_t n = 1; n <= 2000; ++n) {
    const auto f = factorize(n);
    REQUIRE(mobius(f) == oracle::mobius(n));
    REQUIRE(is_squarefull(f) == oracle::squarefull(n));
    REQUIRE(divisor_count(f) == oracle::divisors(n).size());
    const auto [q, s] = sf_decompose(f);
    REQUIRE(q * s == n);
    REQUIRE(oracle::mobius(q) != 0);
    REQUIRE(oracle::squarefull(s));
    if (mobius(f) != 0) REQUIRE(a_of(f) == 1);
  }
  CHECK(sf_decompose(factorize(1)) == SquarefreeSquarefull{1, 1});
  CHECK(sf_decompose(factorize(2 * 2 * 2 * 3 * 5 * 5)) == SquarefreeSquarefull{3, 200});
}

TEST_CASE("binomial and integer roots") {
  CHECK(binomial(10, 3) == 120);
  CHECK(binomial(66, 33) == 7219428434016265740ull);
  CHECK_THROWS_AS(binomial(68, 34), OverflowError);
  CHECK(isqrt(0) == 0);
  CHECK(isqrt(99) == 9);
  CHECK(isqrt(100) == 10);
  CHECK(isqrt(~0ull) == 4294967295ull);
  CHECK(icbrt(26) == 2);
  CHECK(icbrt(27) == 3);
  CHECK(icbrt(~0ull) == 2642245);
}

TEST_CASE("primes_up_to") {
  const auto p = primes_up_to(30);
  CHECK(p == std::vector<std::uint32_t>{2, 3, 5, 7, 11, 13, 17, 19, 23, 29});
  CHECK(primes_up_to(1).empty());
  CHECK(primes_up_to(100'000).size() == 9592);
}
