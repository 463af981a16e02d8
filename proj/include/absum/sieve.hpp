#pragma once

// Segmented sieving of a(n) and d_k(n) and the exact summatory functions
// built on them.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absum/arith.hpp"

namespace absum {

struct SieveConfig {
  std::uint64_t segment_len = std::uint64_t{1} << 20;
  // Lookahead for the shifted sums n + a(n); validated against A(x) after the pass.
  std::uint64_t margin = 0xFFFF;
  unsigned threads = 1;

  // Throws std::invalid_argument (segment_len < 2^16, margin == 0, threads == 0).
  void validate() const;
};

// values[i] = a(offset + i). On overflow the window stops before the first
// n with a(n) > 65535 and records that n.
struct AValueWindow {
  std::uint64_t offset = 1;
  std::vector<std::uint16_t> values;
  bool overflow = false;
  std::uint64_t overflow_at = 0;

  std::uint64_t end() const noexcept { return offset + values.size(); }
  std::uint16_t at(std::uint64_t n) const { return values.at(n - offset); }
};

struct DkWindow {
  std::uint64_t offset = 1;
  unsigned k = 2;
  std::vector<std::uint64_t> values;

  std::uint64_t at(std::uint64_t n) const { return values.at(n - offset); }
};

// a(n) for n in [lo, hi). Throws OverflowError naming the first n whose a(n)
// does not fit in 16 bits.
AValueWindow sieve_a(std::uint64_t lo, std::uint64_t hi, const SieveConfig& cfg = {});
// Same, but returns the window truncated at the first overflow with the flag set.
AValueWindow try_sieve_a(std::uint64_t lo, std::uint64_t hi, const SieveConfig& cfg = {});

// d_k(n) for n in [lo, hi), k in {2, 3, 4}.
DkWindow sieve_dk(std::uint64_t lo, std::uint64_t hi, unsigned k, const SieveConfig& cfg = {});

// Q(x) = sum_{n<=x} a(n + a(n)). Re-runs with margin 2*A(x) if the first
// pass reports MarginExceeded.
std::uint64_t q_sum(std::uint64_t x, const SieveConfig& cfg = {});
// Q at each checkpoint (strictly increasing) from a single pass per attempt.
std::vector<std::uint64_t> q_sum_series(std::span<const std::uint64_t> xs,
                                        const SieveConfig& cfg = {});
// Single pass without retry; throws MarginExceeded.
std::vector<std::uint64_t> q_sum_series_once(std::span<const std::uint64_t> xs,
                                             const SieveConfig& cfg);

// sum_{n<=x} d_k(n + a(n)), k in {2, 3, 4}; same margin handling as q_sum.
std::uint64_t dk_shift_sum(std::uint64_t x, unsigned k, const SieveConfig& cfg = {});
std::vector<std::uint64_t> dk_shift_sum_series(std::span<const std::uint64_t> xs, unsigned k,
                                               const SieveConfig& cfg = {});
std::vector<std::uint64_t> dk_shift_sum_series_once(std::span<const std::uint64_t> xs,
                                                    unsigned k, const SieveConfig& cfg);

struct Progression {
  std::uint64_t k;  // residue as given; reduced mod r internally
  std::uint64_t r;

  friend bool operator==(const Progression&, const Progression&) = default;
};

// T(x; k, r) = sum of a(m) over m <= x with m = k (mod r). r = 0 is rejected.
std::uint64_t t_sum(std::uint64_t x, std::uint64_t k, std::uint64_t r,
                    const SieveConfig& cfg = {});
// One pass for many progressions.
std::vector<std::uint64_t> t_sums(std::uint64_t x, std::span<const Progression> progs,
                                  const SieveConfig& cfg = {});

// sum_{n<=x} a(n) at each checkpoint.
std::vector<std::uint64_t> a_sum_series(std::span<const std::uint64_t> xs,
                                        const SieveConfig& cfg = {});

// A(x) = max_{n<=x} a(n).
std::uint64_t max_a(std::uint64_t x, const SieveConfig& cfg = {});
std::vector<std::uint64_t> max_a_series(std::span<const std::uint64_t> xs,
                                        const SieveConfig& cfg = {});

// Number of squarefull s <= u, including s = 1.
std::uint64_t squarefull_count(std::uint64_t u);

struct SquarefullEntry {
  std::uint64_t s;
  Factorization f;
};

// Every squarefull s <= s_max in ascending order, each exactly once.
std::vector<SquarefullEntry> squarefull_iter(std::uint64_t s_max);

// Resumable sieve output ("ABSUM1" checkpoint file).
struct Checkpoint {
  AValueWindow window;
  std::uint64_t margin = 0;
};

void write_checkpoint(const std::string& path, const AValueWindow& window,
                      std::uint64_t margin);
// Throws std::runtime_error on a malformed or truncated file.
Checkpoint read_checkpoint(const std::string& path);

}  // namespace absum
