#include "absum/sieve.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <exception>
#include <fstream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <thread>

#include "absum/error.hpp"

namespace absum {

void SieveConfig::validate() const {
  if (segment_len < (std::uint64_t{1} << 16))
    throw std::invalid_argument("segment_len must be >= 65536");
  if (margin == 0) throw std::invalid_argument("margin must be >= 1");
  if (threads == 0) throw std::invalid_argument("threads must be >= 1");
}

namespace {

constexpr std::uint32_t kA16Max = std::numeric_limits<std::uint16_t>::max();

std::uint64_t first_multiple_at_least(std::uint64_t lo, std::uint64_t m) {
  const std::uint64_t q = (lo + m - 1) / m;
  return q * m;
}

// Base primes for sieving any window that ends at or below `hi`.
std::vector<std::uint32_t> base_primes(std::uint64_t hi) {
  const std::uint64_t root = isqrt(hi > 0 ? hi - 1 : 0);
  return primes_up_to(static_cast<std::uint32_t>(root));
}

// a(n) = prod over p^2 | n of P(v_p(n)); primes dividing n once (including any
// cofactor above sqrt(hi)) contribute P(1) = 1, so only square multiples are
// visited. Values above 65535 saturate; the smallest such n is returned.
class ASieve {
 public:
  explicit ASieve(std::uint64_t hi) : primes_(base_primes(hi)), pt_(default_partitions()) {}

  std::optional<std::uint64_t> fill(std::uint64_t lo, std::uint64_t hi,
                                    std::span<std::uint16_t> out) const {
    std::fill(out.begin(), out.end(), std::uint16_t{1});
    std::optional<std::uint64_t> overflow;
    for (const std::uint64_t p : primes_) {
      const std::uint64_t p2 = p * p;
      if (p2 >= hi) break;
      for (std::uint64_t m = first_multiple_at_least(lo, p2); m < hi; m += p2) {
        std::uint64_t q = m / p2;
        std::uint32_t e = 2;
        while (q % p == 0) {
          q /= p;
          ++e;
        }
        std::uint16_t& slot = out[m - lo];
        const std::uint64_t v = static_cast<std::uint64_t>(slot) * pt_[e];
        if (v > kA16Max) {
          slot = static_cast<std::uint16_t>(kA16Max);
          if (!overflow || m < *overflow) overflow = m;
        } else {
          slot = static_cast<std::uint16_t>(v);
        }
      }
    }
    return overflow;
  }

 private:
  std::vector<std::uint32_t> primes_;
  const PartitionTable& pt_;
};

void check_dk(unsigned k) {
  if (k < 2 || k > 4) throw std::invalid_argument("divisor-function k must be 2, 3 or 4");
}

// d_k(n) via exponent accumulation with a per-entry cofactor; a cofactor left
// above 1 after all primes <= sqrt(hi) is a single prime and contributes k.
// For k <= 4 and n < 2^64 the values fit comfortably in 64 bits.
class DkSieve {
 public:
  DkSieve(std::uint64_t hi, unsigned k) : primes_(base_primes(hi)), k_(k) {
    check_dk(k);
    for (std::uint32_t e = 0; e < local_.size(); ++e) local_[e] = binomial(e + k - 1, k - 1);
  }

  void fill(std::uint64_t lo, std::uint64_t hi, std::span<std::uint64_t> out,
            std::vector<std::uint64_t>& cofactor) const {
    const std::size_t len = hi - lo;
    cofactor.resize(len);
    for (std::size_t i = 0; i < len; ++i) cofactor[i] = lo + i;
    std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(len), std::uint64_t{1});
    for (const std::uint64_t p : primes_) {
      if (p * p >= hi) break;
      for (std::uint64_t m = first_multiple_at_least(lo, p); m < hi; m += p) {
        std::uint64_t& c = cofactor[m - lo];
        std::uint32_t e = 0;
        while (c % p == 0) {
          c /= p;
          ++e;
        }
        out[m - lo] *= local_[e];
      }
    }
    for (std::size_t i = 0; i < len; ++i)
      if (cofactor[i] > 1) out[i] *= k_;
  }

 private:
  std::vector<std::uint32_t> primes_;
  unsigned k_;
  std::array<std::uint64_t, 65> local_{};
};

// Runs fn(seg_lo, seg_hi) over consecutive segments of [lo, hi) on up to
// cfg.threads workers. Results come back in segment order; the first failing
// segment (in order) decides the exception, so errors are deterministic too.
template <class Fn>
auto run_segments(std::uint64_t lo, std::uint64_t hi, const SieveConfig& cfg, Fn fn) {
  using Result = decltype(fn(lo, hi));
  const std::uint64_t len = cfg.segment_len;
  const std::size_t count = hi > lo ? static_cast<std::size_t>((hi - lo + len - 1) / len) : 0;
  std::vector<std::optional<Result>> results(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      const std::uint64_t s_lo = lo + i * len;
      const std::uint64_t s_hi = std::min(hi, s_lo + len);
      try {
        results[i].emplace(fn(s_lo, s_hi));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const std::size_t workers = std::min<std::size_t>(cfg.threads, count);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<Result> out;
  out.reserve(count);
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

void check_checkpoints(std::span<const std::uint64_t> xs) {
  if (xs.empty()) throw std::invalid_argument("at least one x is required");
  if (xs.front() < 1) throw std::invalid_argument("x must be >= 1");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (xs[i] <= xs[i - 1]) throw std::invalid_argument("x values must be strictly increasing");
}

// Per-segment partial sums, one bucket per checkpoint interval (x_{j-1}, x_j].
struct BucketSums {
  std::vector<std::uint64_t> sums;
  std::uint64_t max_a = 0;
};

std::vector<std::uint64_t> prefix(std::span<const BucketSums> parts, std::size_t m) {
  std::vector<std::uint64_t> total(m, 0);
  for (const auto& part : parts)
    for (std::size_t j = 0; j < m; ++j) total[j] += part.sums[j];
  for (std::size_t j = 1; j < m; ++j) total[j] += total[j - 1];
  return total;
}

std::size_t bucket_of(std::span<const std::uint64_t> xs, std::uint64_t n) {
  return static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), n) - xs.begin());
}

void throw_a_overflow(std::uint64_t n) {
  throw OverflowError("a(n) exceeds the 16-bit value store", n);
}

// Shared driver for sum_{n<=x} f(n + a(n)) where f is read from a window
// covering [L, R + margin).
template <class ShiftedValue>
std::vector<std::uint64_t> shifted_series(std::span<const std::uint64_t> xs,
                                          const SieveConfig& cfg, ShiftedValue make_value) {
  cfg.validate();
  check_checkpoints(xs);
  const std::uint64_t x = xs.back();
  const std::uint64_t margin = cfg.margin;
  const std::uint64_t window_end = x + 1 + margin;
  const ASieve a_sieve(window_end);
  auto value_source = make_value(window_end);

  auto parts = run_segments(1, x + 1, cfg, [&](std::uint64_t lo, std::uint64_t hi) {
    const std::uint64_t w_hi = hi + margin;
    std::vector<std::uint16_t> a(w_hi - lo);
    if (auto of = a_sieve.fill(lo, w_hi, a)) throw_a_overflow(*of);
    auto values = value_source.window(lo, w_hi, a);

    BucketSums part{std::vector<std::uint64_t>(xs.size(), 0), 0};
    std::size_t j = bucket_of(xs, lo);
    for (std::uint64_t n = lo; n < hi; ++n) {
      while (xs[j] < n) ++j;
      const std::uint64_t an = a[n - lo];
      part.max_a = std::max(part.max_a, an);
      if (an > margin) continue;
      part.sums[j] += values[n + an - lo];
    }
    return part;
  });

  std::uint64_t observed = 0;
  for (const auto& p : parts) observed = std::max(observed, p.max_a);
  if (observed > margin) throw MarginExceeded(observed, margin);
  return prefix(parts, xs.size());
}

struct AValues {
  struct Source {
    std::span<const std::uint16_t> window(std::uint64_t, std::uint64_t,
                                         std::span<const std::uint16_t> a) const {
      return a;
    }
  };
  Source operator()(std::uint64_t) const { return {}; }
};

struct DkValues {
  unsigned k;
  struct Source {
    DkSieve sieve;
    std::vector<std::uint64_t> window(std::uint64_t lo, std::uint64_t hi,
                                      std::span<const std::uint16_t>) const {
      std::vector<std::uint64_t> out(hi - lo);
      std::vector<std::uint64_t> cof;
      sieve.fill(lo, hi, out, cof);
      return out;
    }
  };
  Source operator()(std::uint64_t hi) const { return Source{DkSieve(hi, k)}; }
};

template <class Once>
std::vector<std::uint64_t> with_margin_retry(SieveConfig cfg, Once once) {
  for (;;) {
    try {
      return once(cfg);
    } catch (const MarginExceeded& e) {
      cfg.margin = 2 * e.observed();
    }
  }
}

// Plain (unshifted) pass over [1, x] with a(n) only.
template <class PerSegment>
auto a_pass(std::uint64_t x, const SieveConfig& cfg, PerSegment per_segment) {
  cfg.validate();
  if (x < 1) throw std::invalid_argument("x must be >= 1");
  const ASieve sieve(x + 1);
  return run_segments(1, x + 1, cfg, [&](std::uint64_t lo, std::uint64_t hi) {
    std::vector<std::uint16_t> a(hi - lo);
    if (auto of = sieve.fill(lo, hi, a)) throw_a_overflow(*of);
    return per_segment(lo, hi, std::span<const std::uint16_t>(a));
  });
}

}  // namespace

AValueWindow try_sieve_a(std::uint64_t lo, std::uint64_t hi, const SieveConfig& cfg) {
  cfg.validate();
  if (lo < 1 || hi <= lo) throw std::invalid_argument("sieve_a: need 1 <= L < R");
  AValueWindow w;
  w.offset = lo;
  w.values.resize(hi - lo);
  const ASieve sieve(hi);
  auto overflows = run_segments(lo, hi, cfg, [&](std::uint64_t s_lo, std::uint64_t s_hi) {
    std::span<std::uint16_t> slice(w.values.data() + (s_lo - lo), s_hi - s_lo);
    return sieve.fill(s_lo, s_hi, slice);
  });
  for (const auto& of : overflows) {
    if (of) {
      w.overflow = true;
      w.overflow_at = *of;
      w.values.resize(*of - lo);
      break;
    }
  }
  return w;
}

AValueWindow sieve_a(std::uint64_t lo, std::uint64_t hi, const SieveConfig& cfg) {
  AValueWindow w = try_sieve_a(lo, hi, cfg);
  if (w.overflow) throw_a_overflow(w.overflow_at);
  return w;
}

DkWindow sieve_dk(std::uint64_t lo, std::uint64_t hi, unsigned k, const SieveConfig& cfg) {
  cfg.validate();
  check_dk(k);
  if (lo < 1 || hi <= lo) throw std::invalid_argument("sieve_dk: need 1 <= L < R");
  DkWindow w{lo, k, std::vector<std::uint64_t>(hi - lo)};
  const DkSieve sieve(hi, k);
  run_segments(lo, hi, cfg, [&](std::uint64_t s_lo, std::uint64_t s_hi) {
    std::vector<std::uint64_t> cof;
    sieve.fill(s_lo, s_hi, std::span<std::uint64_t>(w.values.data() + (s_lo - lo), s_hi - s_lo),
               cof);
    return 0;
  });
  return w;
}

std::vector<std::uint64_t> q_sum_series_once(std::span<const std::uint64_t> xs,
                                             const SieveConfig& cfg) {
  return shifted_series(xs, cfg, AValues{});
}

std::vector<std::uint64_t> q_sum_series(std::span<const std::uint64_t> xs,
                                        const SieveConfig& cfg) {
  return with_margin_retry(cfg, [&](const SieveConfig& c) { return q_sum_series_once(xs, c); });
}

std::uint64_t q_sum(std::uint64_t x, const SieveConfig& cfg) {
  const std::uint64_t xs[] = {x};
  return q_sum_series(xs, cfg).back();
}

std::vector<std::uint64_t> dk_shift_sum_series_once(std::span<const std::uint64_t> xs,
                                                    unsigned k, const SieveConfig& cfg) {
  check_dk(k);
  return shifted_series(xs, cfg, DkValues{k});
}

std::vector<std::uint64_t> dk_shift_sum_series(std::span<const std::uint64_t> xs, unsigned k,
                                               const SieveConfig& cfg) {
  return with_margin_retry(
      cfg, [&](const SieveConfig& c) { return dk_shift_sum_series_once(xs, k, c); });
}

std::uint64_t dk_shift_sum(std::uint64_t x, unsigned k, const SieveConfig& cfg) {
  const std::uint64_t xs[] = {x};
  return dk_shift_sum_series(xs, k, cfg).back();
}

std::vector<std::uint64_t> t_sums(std::uint64_t x, std::span<const Progression> progs,
                                  const SieveConfig& cfg) {
  for (const auto& pr : progs)
    if (pr.r == 0) throw std::invalid_argument("t_sum: modulus r must be >= 1");
  auto parts = a_pass(x, cfg, [&](std::uint64_t lo, std::uint64_t hi,
                                  std::span<const std::uint16_t> a) {
    std::vector<std::uint64_t> sums(progs.size(), 0);
    for (std::size_t j = 0; j < progs.size(); ++j) {
      const std::uint64_t r = progs[j].r;
      const std::uint64_t res = progs[j].k % r;
      // smallest m >= lo with m = res (mod r)
      std::uint64_t m = lo + (res + r - lo % r) % r;
      std::uint64_t s = 0;
      for (; m < hi; m += r) s += a[m - lo];
      sums[j] = s;
    }
    return sums;
  });
  std::vector<std::uint64_t> total(progs.size(), 0);
  for (const auto& p : parts)
    for (std::size_t j = 0; j < total.size(); ++j) total[j] += p[j];
  return total;
}

std::uint64_t t_sum(std::uint64_t x, std::uint64_t k, std::uint64_t r, const SieveConfig& cfg) {
  const Progression prog[] = {{k, r}};
  return t_sums(x, prog, cfg).front();
}

std::vector<std::uint64_t> a_sum_series(std::span<const std::uint64_t> xs,
                                        const SieveConfig& cfg) {
  check_checkpoints(xs);
  auto parts = a_pass(xs.back(), cfg, [&](std::uint64_t lo, std::uint64_t hi,
                                          std::span<const std::uint16_t> a) {
    BucketSums part{std::vector<std::uint64_t>(xs.size(), 0), 0};
    std::size_t j = bucket_of(xs, lo);
    for (std::uint64_t n = lo; n < hi; ++n) {
      while (xs[j] < n) ++j;
      part.sums[j] += a[n - lo];
    }
    return part;
  });
  return prefix(parts, xs.size());
}

std::vector<std::uint64_t> max_a_series(std::span<const std::uint64_t> xs,
                                        const SieveConfig& cfg) {
  check_checkpoints(xs);
  auto parts = a_pass(xs.back(), cfg, [&](std::uint64_t lo, std::uint64_t hi,
                                          std::span<const std::uint16_t> a) {
    std::vector<std::uint64_t> maxima(xs.size(), 0);
    std::size_t j = bucket_of(xs, lo);
    for (std::uint64_t n = lo; n < hi; ++n) {
      while (xs[j] < n) ++j;
      maxima[j] = std::max<std::uint64_t>(maxima[j], a[n - lo]);
    }
    return maxima;
  });
  std::vector<std::uint64_t> out(xs.size(), 0);
  for (const auto& p : parts)
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::max(out[j], p[j]);
  for (std::size_t j = 1; j < out.size(); ++j) out[j] = std::max(out[j], out[j - 1]);
  return out;
}

std::uint64_t max_a(std::uint64_t x, const SieveConfig& cfg) {
  const std::uint64_t xs[] = {x};
  return max_a_series(xs, cfg).back();
}

namespace {

// mu(b) != 0 flags for b <= limit.
std::vector<bool> squarefree_flags(std::uint64_t limit) {
  std::vector<bool> sqfree(limit + 1, true);
  for (std::uint64_t p = 2; p * p <= limit; ++p)
    for (std::uint64_t m = p * p; m <= limit; m += p * p) sqfree[m] = false;
  return sqfree;
}

}  // namespace

std::uint64_t squarefull_count(std::uint64_t u) {
  if (u < 1) throw std::invalid_argument("squarefull_count: u must be >= 1");
  // Each squarefull s has exactly one form a^2 b^3 with b squarefree.
  const std::uint64_t b_max = icbrt(u);
  const auto sqfree = squarefree_flags(b_max);
  std::uint64_t count = 0;
  for (std::uint64_t b = 1; b <= b_max; ++b)
    if (sqfree[b]) count += isqrt(u / (b * b * b));
  return count;
}

std::vector<SquarefullEntry> squarefull_iter(std::uint64_t s_max) {
  if (s_max < 1) throw std::invalid_argument("squarefull_iter: S_max must be >= 1");
  const std::uint64_t a_max = isqrt(s_max);
  const std::uint64_t b_max = icbrt(s_max);
  const SpfTable spf(static_cast<std::uint32_t>(std::max(a_max, b_max)));
  const auto sqfree = squarefree_flags(b_max);

  std::vector<SquarefullEntry> out;
  for (std::uint64_t b = 1; b <= b_max; ++b) {
    if (!sqfree[b]) continue;
    const std::uint64_t b3 = b * b * b;
    const Factorization fb = spf.factorize(b);
    for (std::uint64_t a = 1; a <= isqrt(s_max / b3); ++a) {
      const Factorization fa = spf.factorize(a);
      std::vector<PrimePower> terms;
      terms.reserve(fa.size() + fb.size());
      auto ia = fa.begin();
      auto ib = fb.begin();
      while (ia != fa.end() || ib != fb.end()) {
        if (ib == fb.end() || (ia != fa.end() && ia->p < ib->p)) {
          terms.push_back({ia->p, 2 * ia->e});
          ++ia;
        } else if (ia == fa.end() || ib->p < ia->p) {
          terms.push_back({ib->p, 3});
          ++ib;
        } else {
          terms.push_back({ia->p, 2 * ia->e + 3});
          ++ia;
          ++ib;
        }
      }
      out.push_back({a * a * b3, Factorization(std::move(terms))});
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) { return l.s < r.s; });
  return out;
}

// Checkpoint layout (all integers little-endian):
//   0  6 bytes  magic "ABSUM1"
//   6  u64      range start L (inclusive)
//  14  u64      range end R (exclusive)
//  22  u64      margin
//  30  u16      value width in bits (16)
//  32  u16[R-L] a(L), ..., a(R-1)
namespace {

constexpr char kMagic[6] = {'A', 'B', 'S', 'U', 'M', '1'};

void put_le(std::ostream& os, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint64_t get_le(std::istream& is, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    const int c = is.get();
    if (c == std::char_traits<char>::eof()) throw std::runtime_error("checkpoint truncated");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}

}  // namespace

void write_checkpoint(const std::string& path, const AValueWindow& window, std::uint64_t margin) {
  if (window.overflow) throw std::invalid_argument("cannot checkpoint an overflowed window");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  os.write(kMagic, sizeof kMagic);
  put_le(os, window.offset, 8);
  put_le(os, window.end(), 8);
  put_le(os, margin, 8);
  put_le(os, 16, 2);
  for (const std::uint16_t v : window.values) put_le(os, v, 2);
  if (!os) throw std::runtime_error("failed writing checkpoint: " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[sizeof kMagic];
  if (!is.read(magic, sizeof magic) || !std::equal(magic, magic + sizeof magic, kMagic))
    throw std::runtime_error("not an ABSUM1 checkpoint: " + path);
  Checkpoint cp;
  const std::uint64_t lo = get_le(is, 8);
  const std::uint64_t hi = get_le(is, 8);
  cp.margin = get_le(is, 8);
  if (get_le(is, 2) != 16) throw std::runtime_error("unsupported checkpoint value width");
  if (lo < 1 || hi < lo) throw std::runtime_error("invalid checkpoint range");
  cp.window.offset = lo;
  cp.window.values.resize(hi - lo);
  for (auto& v : cp.window.values) v = static_cast<std::uint16_t>(get_le(is, 2));
  if (is.peek() != std::char_traits<char>::eof())
    throw std::runtime_error("trailing bytes in checkpoint");
  return cp;
}

}  // namespace absum
