#pragma once

// Exact evaluation of the elementary arithmetic functions: partition numbers,
// factorizations, a(n) (number of abelian groups of order n), d_k(n), mu(n)
// and the squarefree x squarefull split n = q*s.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace absum {

struct PrimePower {
  std::uint64_t p;
  std::uint32_t e;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

// n = prod p^e with primes strictly increasing and every e >= 1.
// The empty factorization represents n = 1.
class Factorization {
 public:
  Factorization() = default;
  // Throws std::invalid_argument if the terms violate the invariants.
  explicit Factorization(std::vector<PrimePower> terms);

  std::span<const PrimePower> terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }
  auto begin() const noexcept { return terms_.begin(); }
  auto end() const noexcept { return terms_.end(); }

  // Reconstructed integer; throws OverflowError past 64 bits.
  std::uint64_t value() const;
  // Product of the distinct primes.
  std::uint64_t radical() const;

  friend bool operator==(const Factorization&, const Factorization&) = default;

 private:
  std::vector<PrimePower> terms_;
};

// Exact partition numbers P(0..max_index()).
class PartitionTable {
 public:
  std::size_t max_index() const noexcept { return values_.size() - 1; }
  std::uint64_t operator[](std::size_t i) const { return values_.at(i); }
  std::span<const std::uint64_t> values() const noexcept { return values_; }

 private:
  friend PartitionTable partition_table(std::size_t a_max);
  std::vector<std::uint64_t> values_;
};

inline constexpr std::size_t kDefaultPartitionCutoff = 128;

// Euler's pentagonal-number recurrence. Throws OverflowError naming the first
// index whose value does not fit in 64 bits.
PartitionTable partition_table(std::size_t a_max = kDefaultPartitionCutoff);

// Shared immutable table with the default cutoff.
const PartitionTable& default_partitions();

// Trial division. n = 0 is rejected.
Factorization factorize(std::uint64_t n);

// Smallest-prime-factor table for bulk factorization below a bound; larger
// inputs fall back to trial division.
class SpfTable {
 public:
  explicit SpfTable(std::uint32_t bound);

  std::uint32_t bound() const noexcept { return static_cast<std::uint32_t>(spf_.size() - 1); }
  Factorization factorize(std::uint64_t n) const;

 private:
  std::vector<std::uint32_t> spf_;
};

// All primes p <= limit, ascending.
std::vector<std::uint32_t> primes_up_to(std::uint32_t limit);

// prod P(e); throws std::invalid_argument if some e exceeds the table.
std::uint64_t a_of(const Factorization& f, const PartitionTable& pt = default_partitions());

// prod binomial(e+k-1, k-1); throws OverflowError past 64 bits.
std::uint64_t dk_of(const Factorization& f, unsigned k);

int mobius(const Factorization& f);

struct SquarefreeSquarefull {
  std::uint64_t q;  // product of primes with exponent 1
  std::uint64_t s;  // product of prime powers with exponent >= 2

  friend bool operator==(const SquarefreeSquarefull&, const SquarefreeSquarefull&) = default;
};

// 1 counts as both squarefree and squarefull, so the split is total.
SquarefreeSquarefull sf_decompose(const Factorization& f);

bool is_squarefull(const Factorization& f);

// Number of divisors d(n) = d_2(n).
std::uint64_t divisor_count(const Factorization& f);

// Exact binomial coefficient; throws OverflowError past 64 bits.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

// Floor integer roots.
std::uint64_t isqrt(std::uint64_t n);
std::uint64_t icbrt(std::uint64_t n);

}  // namespace absum
