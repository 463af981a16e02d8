#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "absum/error.hpp"
#include "absum/sieve.hpp"
#include "oracles.hpp"

using namespace absum;

namespace {

SieveConfig with(std::uint64_t segment, unsigned threads, std::uint64_t margin = 0xFFFF) {
  SieveConfig c;
  c.segment_len = segment;
  c.threads = threads;
  c.margin = margin;
  return c;
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("sieve_a matches brute force, including offset windows") {
  const auto w = sieve_a(1, 5001);
  for (std::uint64_t n = 1; n <= 5000; ++n) REQUIRE(w.at(n) == oracle::a(n));
  const std::uint64_t lo = 10'000'000'000ull;
  const auto far = sieve_a(lo, lo + 1000);
  for (std::uint64_t n = lo; n < lo + 1000; ++n) REQUIRE(far.at(n) == oracle::a(n));
  CHECK_THROWS_AS(sieve_a(0, 10), std::invalid_argument);
  CHECK_THROWS_AS(sieve_a(10, 10), std::invalid_argument);
}

TEST_CASE("sieve_a reports 16-bit overflow at 2^44") {
  const std::uint64_t n = std::uint64_t{1} << 44;  // a(n) = P(44) = 75175
  try {
    (void)sieve_a(n - 3, n + 3);
    FAIL("expected overflow");
  } catch (const OverflowError& e) {
    CHECK(e.where() == n);
  }
  const auto w = try_sieve_a(n - 3, n + 3);
  CHECK(w.overflow);
  CHECK(w.overflow_at == n);
  CHECK(w.values.size() == 3);
  CHECK(w.end() == n);
}

TEST_CASE("sieve_dk matches ordered-tuple counts") {
  for (unsigned k = 2; k <= 4; ++k) {
    const auto w = sieve_dk(1, 801, k);
    for (std::uint64_t n = 1; n <= 800; ++n) REQUIRE(w.at(n) == oracle::dk(n, k));
    const auto far = sieve_dk(1'000'000, 1'000'200, k);
    for (std::uint64_t n = 1'000'000; n < 1'000'200; ++n) REQUIRE(far.at(n) == oracle::dk(n, k));
  }
  CHECK_THROWS_AS(sieve_dk(1, 10, 5), std::invalid_argument);
  CHECK_THROWS_AS(sieve_dk(1, 10, 1), std::invalid_argument);
}

TEST_CASE("small sums against brute force") {
  CHECK(q_sum(1) == 1);
  CHECK(q_sum(3) == 4);
  CHECK(q_sum(10) == 13);
  CHECK(q_sum(1000) == 2128);
  CHECK(q_sum(3000) == oracle::q_sum(3000));
  CHECK(t_sum(10, 1, 3) == 5);
  CHECK(max_a(100) == 11);
  CHECK(squarefull_count(100) == 14);
  for (std::uint64_t x : {1, 2, 17, 500, 2500}) {
    CHECK(max_a(x) == oracle::max_a(x));
    CHECK(squarefull_count(x) == oracle::squarefull_count(x));
  }
  for (std::uint64_t r = 1; r <= 12; ++r)
    for (std::uint64_t k = 0; k <= r; ++k) REQUIRE(t_sum(2000, k, r) == oracle::t_sum(2000, k, r));
  CHECK(t_sum(100, 25, 7) == t_sum(100, 4, 7));
  CHECK_THROWS_AS(t_sum(10, 1, 0), std::invalid_argument);
}

TEST_CASE("divisor shift sum against brute force") {
  for (unsigned k = 2; k <= 4; ++k) {
    std::uint64_t s = 0;
    for (std::uint64_t n = 1; n <= 400; ++n) s += oracle::dk(n + oracle::a(n), k);
    CHECK(dk_shift_sum(400, k) == s);
  }
}

TEST_CASE("Q is additive one step at a time") {
  const std::vector<std::uint64_t> xs = {1000, 1001, 1002, 77'777, 77'778};
  const auto q = q_sum_series(xs);
  const auto w = sieve_a(1, 80'000);
  CHECK(q[1] - q[0] == w.at(1001 + w.at(1001)));
  CHECK(q[2] - q[1] == w.at(1002 + w.at(1002)));
  CHECK(q[4] - q[3] == w.at(77'778 + w.at(77'778)));
}

TEST_CASE("series agree with single-point calls and with each other") {
  const std::vector<std::uint64_t> xs = {10, 1000, 70'000, 300'000};
  const auto q = q_sum_series(xs);
  const auto a = a_sum_series(xs);
  const auto m = max_a_series(xs);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CHECK(q[i] == q_sum(xs[i]));
    CHECK(m[i] == max_a(xs[i]));
    CHECK(a[i] == t_sum(xs[i], 0, 1));
  }
  const std::vector<std::uint64_t> bad = {10, 10};
  CHECK_THROWS_AS(q_sum_series(bad), std::invalid_argument);
}

TEST_CASE("results do not depend on segment length or worker count") {
  const std::uint64_t x = 400'000;
  const auto base = with(1 << 20, 1);
  const std::vector<Progression> progs = {{1, 1}, {1, 3}, {2, 3}, {0, 4}, {5, 12}};
  const auto q0 = q_sum(x, base);
  const auto t0 = t_sums(x, progs, base);
  const auto d0 = dk_shift_sum(x, 3, base);
  for (const auto& cfg : {with(1 << 16, 1), with(1 << 16, 4), with(100'003, 3)}) {
    CHECK(q_sum(x, cfg) == q0);
    CHECK(t_sums(x, progs, cfg) == t0);
    CHECK(dk_shift_sum(x, 3, cfg) == d0);
    CHECK(max_a(x, cfg) == max_a(x, base));
  }
}

TEST_CASE("margin smaller than A(x) is detected and retried") {
  const auto tight = with(1 << 16, 2, 4);
  const std::vector<std::uint64_t> xs = {1000};
  try {
    (void)q_sum_series_once(xs, tight);
    FAIL("expected MarginExceeded");
  } catch (const MarginExceeded& e) {
    CHECK(e.observed() == 30);  // A(1000)
  }
  CHECK_THROWS_AS(dk_shift_sum_series_once(xs, 2, tight), MarginExceeded);
  CHECK(q_sum(1000, tight) == 2128);
  CHECK(dk_shift_sum(1000, 2, tight) == dk_shift_sum(1000, 2));
}

TEST_CASE("sieve config validation") {
  CHECK_THROWS_AS(with(1000, 1).validate(), std::invalid_argument);
  CHECK_THROWS_AS(with(1 << 16, 0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(with(1 << 16, 1, 0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(q_sum(100, with(1000, 1)), std::invalid_argument);
}

TEST_CASE("squarefull enumeration") {
  const auto all = squarefull_iter(100'000);
  CHECK(all.size() == squarefull_count(100'000));
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (i > 0) REQUIRE(all[i].s > all[i - 1].s);
    REQUIRE(all[i].f.value() == all[i].s);
    REQUIRE(oracle::squarefull(all[i].s));
  }
  const double r4 = static_cast<double>(squarefull_count(10'000)) / 100.0;
  const double r8 = static_cast<double>(squarefull_count(100'000'000)) / 10'000.0;
  CHECK(r4 == doctest::Approx(1.85));
  CHECK(r8 > 1.5);
  CHECK(r8 < 2.5);
}

TEST_CASE("checkpoint round trip and corruption") {
  const auto w = sieve_a(1000, 1500);
  const auto path = temp_path("absum_ckpt_test.bin");
  write_checkpoint(path, w, 1234);
  CHECK(std::filesystem::file_size(path) == 32 + 2 * 500);
  const auto back = read_checkpoint(path);
  CHECK(back.margin == 1234);
  CHECK(back.window.offset == 1000);
  CHECK(back.window.values == w.values);

  {  // truncated payload
    std::filesystem::resize_file(path, 32 + 2 * 499 + 1);
    CHECK_THROWS_AS(read_checkpoint(path), std::runtime_error);
  }
  {  // trailing bytes
    write_checkpoint(path, w, 1);
    std::ofstream(path, std::ios::binary | std::ios::app) << 'x';
    CHECK_THROWS_AS(read_checkpoint(path), std::runtime_error);
  }
  {  // bad magic
    write_checkpoint(path, w, 1);
    std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(0);
    f << 'X';
    f.close();
    CHECK_THROWS_AS(read_checkpoint(path), std::runtime_error);
  }
  {  // header only, cut short
    write_checkpoint(path, w, 1);
    std::filesystem::resize_file(path, 10);
    CHECK_THROWS_AS(read_checkpoint(path), std::runtime_error);
  }
  CHECK_THROWS_AS(read_checkpoint(temp_path("absum_missing_ckpt.bin")), std::runtime_error);
  std::filesystem::remove(path);
}
