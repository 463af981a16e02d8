#include "absum/arith.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "absum/error.hpp"

namespace absum {

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, std::uint64_t where) {
  std::uint64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) throw OverflowError("64-bit product overflow", where);
  return out;
}

std::uint64_t checked_pow(std::uint64_t p, std::uint32_t e) {
  std::uint64_t out = 1;
  for (std::uint32_t i = 0; i < e; ++i) out = checked_mul(out, p, p);
  return out;
}

}  // namespace

Factorization::Factorization(std::vector<PrimePower> terms) : terms_(std::move(terms)) {
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].p < 2 || terms_[i].e == 0)
      throw std::invalid_argument("factorization term must have p >= 2 and e >= 1");
    if (i > 0 && terms_[i].p <= terms_[i - 1].p)
      throw std::invalid_argument("factorization primes must be strictly increasing");
  }
}

std::uint64_t Factorization::value() const {
  std::uint64_t n = 1;
  for (const auto& [p, e] : terms_) n = checked_mul(n, checked_pow(p, e), p);
  return n;
}

std::uint64_t Factorization::radical() const {
  std::uint64_t n = 1;
  for (const auto& t : terms_) n = checked_mul(n, t.p, t.p);
  return n;
}

PartitionTable partition_table(std::size_t a_max) {
  PartitionTable pt;
  pt.values_.reserve(a_max + 1);
  pt.values_.push_back(1);
  for (std::size_t n = 1; n <= a_max; ++n) {
    // P(n) = sum_{j>=1} (-1)^{j+1} [P(n - j(3j-1)/2) + P(n - j(3j+1)/2)]
    __int128 acc = 0;
    for (std::size_t j = 1;; ++j) {
      const std::size_t g1 = j * (3 * j - 1) / 2;
      if (g1 > n) break;
      const std::size_t g2 = j * (3 * j + 1) / 2;
      __int128 term = pt.values_[n - g1];
      if (g2 <= n) term += pt.values_[n - g2];
      acc += (j % 2 == 1) ? term : -term;
    }
    if (acc < 0 || acc > static_cast<__int128>(std::numeric_limits<std::uint64_t>::max()))
      throw OverflowError("partition number exceeds 64 bits", n);
    pt.values_.push_back(static_cast<std::uint64_t>(acc));
  }
  return pt;
}

const PartitionTable& default_partitions() {
  static const PartitionTable table = partition_table(kDefaultPartitionCutoff);
  return table;
}

Factorization factorize(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("factorize: n must be >= 1");
  std::vector<PrimePower> out;
  auto strip = [&](std::uint64_t p) {
    if (n % p != 0) return;
    std::uint32_t e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.push_back({p, e});
  };
  strip(2);
  strip(3);
  for (std::uint64_t p = 5; p <= n / p; p += 6) {
    strip(p);
    strip(p + 2);
  }
  if (n > 1) out.push_back({n, 1});
  return Factorization(std::move(out));
}

SpfTable::SpfTable(std::uint32_t bound) : spf_(static_cast<std::size_t>(bound) + 1, 0) {
  for (std::uint64_t i = 2; i <= bound; ++i) {
    if (spf_[i] != 0) continue;
    spf_[i] = static_cast<std::uint32_t>(i);
    for (std::uint64_t j = i * i; j <= bound; j += i)
      if (spf_[j] == 0) spf_[j] = static_cast<std::uint32_t>(i);
  }
}

Factorization SpfTable::factorize(std::uint64_t n) const {
  if (n == 0) throw std::invalid_argument("factorize: n must be >= 1");
  if (n >= spf_.size()) return absum::factorize(n);
  std::vector<PrimePower> out;
  while (n > 1) {
    const std::uint32_t p = spf_[n];
    std::uint32_t e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.push_back({p, e});
  }
  return Factorization(std::move(out));
}

std::vector<std::uint32_t> primes_up_to(std::uint32_t limit) {
  std::vector<std::uint32_t> primes;
  if (limit < 2) return primes;
  std::vector<bool> composite(static_cast<std::size_t>(limit) + 1, false);
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    primes.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return primes;
}

std::uint64_t a_of(const Factorization& f, const PartitionTable& pt) {
  std::uint64_t a = 1;
  for (const auto& [p, e] : f) {
    if (e > pt.max_index())
      throw std::invalid_argument("a_of: exponent " + std::to_string(e) +
                                  " exceeds partition table cutoff " +
                                  std::to_string(pt.max_index()));
    a = checked_mul(a, pt[e], p);
  }
  return a;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  // C(n-k+i, i) is an integer at every step, so the division is exact.
  unsigned __int128 c = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    c = c * (n - k + i) / i;
    if (c > std::numeric_limits<std::uint64_t>::max())
      throw OverflowError("binomial coefficient exceeds 64 bits", n);
  }
  return static_cast<std::uint64_t>(c);
}

std::uint64_t dk_of(const Factorization& f, unsigned k) {
  if (k < 2) throw std::invalid_argument("dk_of: k must be >= 2");
  std::uint64_t d = 1;
  for (const auto& [p, e] : f) d = checked_mul(d, binomial(e + k - 1, k - 1), p);
  return d;
}

int mobius(const Factorization& f) {
  for (const auto& t : f)
    if (t.e >= 2) return 0;
  return f.size() % 2 == 0 ? 1 : -1;
}

SquarefreeSquarefull sf_decompose(const Factorization& f) {
  SquarefreeSquarefull out{1, 1};
  for (const auto& [p, e] : f) {
    if (e == 1)
      out.q = checked_mul(out.q, p, p);
    else
      out.s = checked_mul(out.s, checked_pow(p, e), p);
  }
  return out;
}

bool is_squarefull(const Factorization& f) {
  for (const auto& t : f)
    if (t.e < 2) return false;
  return true;
}

std::uint64_t divisor_count(const Factorization& f) { return dk_of(f, 2); }

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r > n / r) --r;
  while ((r + 1) <= n / (r + 1)) ++r;
  return r;
}

std::uint64_t icbrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::cbrt(static_cast<double>(n)));
  auto cube_le = [n](std::uint64_t c) { return c == 0 || (c <= n / c && c * c <= n / c); };
  while (r > 0 && !cube_le(r)) --r;
  while (cube_le(r + 1)) ++r;
  return r;
}

}  // namespace absum
