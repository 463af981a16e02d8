#include "absum/euler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "absum/error.hpp"
#include "absum/numeric.hpp"
#include "absum/sieve.hpp"

namespace absum {

namespace {

constexpr double kZeta2 = std::numbers::pi * std::numbers::pi / 6.0;
// Partition numbers are exact in 64 bits up to P(416).
constexpr std::size_t kMaxPartitionIndex = 416;
constexpr std::uint64_t kSeriesCachePrimes = 1024;
constexpr unsigned kSeriesCacheExponents = 32;

// sum_{alpha=0}^{a_max} P(l + alpha) p^-alpha by Horner's rule.
double shifted_partition_series(const PartitionTable& pt, std::uint64_t p, unsigned l,
                                unsigned a_max) {
  if (l + a_max > pt.max_index())
    throw ComputationError("local series needs P(" + std::to_string(l + a_max) +
                           ") beyond the partition table");
  const double x = 1.0 / static_cast<double>(p);
  double acc = 0.0;
  for (unsigned alpha = a_max + 1; alpha-- > 0;)
    acc = acc * x + static_cast<double>(pt[l + alpha]);
  return acc;
}

double local_g_factor(const PartitionTable& pt, std::uint64_t p, unsigned a_max) {
  const double x = 1.0 / static_cast<double>(p);
  return (1.0 - x) * (1.0 - x * x) * shifted_partition_series(pt, p, 0, a_max);
}

// Heuristic majorant for sum_{alpha > a_max} P(l + alpha) p^-alpha: successive
// terms shrink by roughly (1 + pi/sqrt(6n))/p <= 0.6, so three times the last
// kept term covers the rest.
double series_tail_estimate(const PartitionTable& pt, std::uint64_t p, unsigned l,
                            unsigned a_max) {
  return 3.0 * static_cast<double>(pt[l + a_max]) *
         std::pow(static_cast<double>(p), -static_cast<double>(a_max) - 1.0);
}

// sum_{p > P} p^-3 ~ 1 / (2 P^2 log P) by the prime number theorem.
double prime_tail_estimate(std::uint64_t p_max) {
  const double p = static_cast<double>(p_max);
  return 1.0 / (2.0 * p * p * std::log(p));
}

PartitionTable table_for(const TruncationConfig& cfg) {
  return partition_table(std::min<std::size_t>(kMaxPartitionIndex, cfg.exponent_cutoff + 64));
}

bool over_target(double tail, double value) {
  return !(tail <= kTailTarget * std::max(1.0, std::abs(value)));
}

unsigned valuation(std::uint64_t n, std::uint64_t p) {
  unsigned e = 0;
  while (n != 0 && n % p == 0) {
    n /= p;
    ++e;
  }
  return e;
}

}  // namespace

void TruncationConfig::validate() const {
  if (prime_cutoff < 2 || exponent_cutoff < 2 || zeta_cutoff < 2 || squarefull_cutoff < 2 ||
      d_cutoff < 2)
    throw std::invalid_argument("truncation cutoffs must all be >= 2");
  if (exponent_cutoff >= kMaxPartitionIndex)
    throw std::invalid_argument("exponent cutoff must be below " +
                                std::to_string(kMaxPartitionIndex));
  if (prime_cutoff > 0xFFFFFFFFull) throw std::invalid_argument("prime cutoff too large");
}

double zeta_int(unsigned j, unsigned terms) {
  if (j < 2) throw std::invalid_argument("zeta_int: j must be >= 2");
  if (terms < 2) throw std::invalid_argument("zeta_int: need at least 2 terms");
  const double s = j;
  const double n = terms;
  // Euler-Maclaurin remainder for sum_{m >= N} m^-s.
  static constexpr double kBernoulliOverFactorial[] = {
      1.0 / 6.0 / 2.0,                   // B2 / 2!
      -1.0 / 30.0 / 24.0,                // B4 / 4!
      1.0 / 42.0 / 720.0,                // B6 / 6!
      -1.0 / 30.0 / 40320.0,             // B8 / 8!
      5.0 / 66.0 / 3628800.0,            // B10 / 10!
  };
  CompensatedSum tail;
  tail += std::pow(n, 1.0 - s) / (s - 1.0);
  tail += 0.5 * std::pow(n, -s);
  double rising = s;  // s (s+1) ... (s + 2k - 2)
  for (int k = 1; k <= 5; ++k) {
    tail += kBernoulliOverFactorial[k - 1] * rising * std::pow(n, -s - 2.0 * k + 1.0);
    rising *= (s + 2.0 * k - 1.0) * (s + 2.0 * k);
  }
  CompensatedSum head;
  head += tail.value();
  for (unsigned m = terms - 1; m >= 1; --m) head += std::pow(static_cast<double>(m), -s);
  return head.value();
}

double zeta_product(unsigned lo, unsigned hi) {
  if (lo < 2) throw std::invalid_argument("zeta_product: lo must be >= 2");
  CompensatedSum log_sum;
  for (unsigned j = lo; j <= hi; ++j) log_sum += std::log(zeta_int(j));
  return std::exp(log_sum.value());
}

double l2_principal(std::uint64_t r1) {
  if (r1 < 1) throw std::invalid_argument("l2_principal: r1 must be >= 1");
  double v = kZeta2;
  for (const auto& t : factorize(r1)) {
    const double p = static_cast<double>(t.p);
    v *= 1.0 - 1.0 / (p * p);
  }
  return v;
}

ConstantResult g1_principal(std::uint64_t r1, const TruncationConfig& cfg) {
  cfg.validate();
  if (r1 < 1) throw std::invalid_argument("g1_principal: r1 must be >= 1");
  const PartitionTable pt = table_for(cfg);
  CompensatedSum log_sum;
  for (const std::uint32_t p : primes_up_to(static_cast<std::uint32_t>(cfg.prime_cutoff))) {
    if (r1 % p == 0) continue;  // chi_0(p) = 0: local factor 1
    log_sum += std::log(local_g_factor(pt, p, cfg.exponent_cutoff));
  }
  ConstantResult out;
  out.config = cfg;
  out.value = std::exp(log_sum.value());
  const std::uint64_t q = r1 % 2 == 0 ? 3 : 2;  // smallest prime with nonzero character
  out.tail_estimate = out.value * (prime_tail_estimate(cfg.prime_cutoff) +
                                   series_tail_estimate(pt, q, 0, cfg.exponent_cutoff));
  out.flagged = over_target(out.tail_estimate, out.value);
  return out;
}

ConstantResult fu_principal(const Factorization& u, std::uint64_t r1,
                            const TruncationConfig& cfg) {
  cfg.validate();
  if (r1 < 1) throw std::invalid_argument("fu_principal: r1 must be >= 1");
  const PartitionTable pt = table_for(cfg);
  const unsigned a_max = cfg.exponent_cutoff;
  ConstantResult out;
  out.config = cfg;
  out.value = 1.0;
  double rel_tail = 0.0;
  for (const auto& [p, l] : u) {
    if (r1 % p == 0) {
      if (l > pt.max_index()) throw ComputationError("exponent beyond partition table");
      out.value *= static_cast<double>(pt[l]);
      continue;
    }
    const double num = shifted_partition_series(pt, p, l, a_max);
    const double den = shifted_partition_series(pt, p, 0, a_max);
    out.value *= num / den;
    rel_tail += series_tail_estimate(pt, p, l, a_max) / num +
                series_tail_estimate(pt, p, 0, a_max) / den;
  }
  out.tail_estimate = out.value * rel_tail;
  out.flagged = over_target(out.tail_estimate, out.value);
  return out;
}

ConstantResult c_rk(std::uint64_t r, std::uint64_t k, const TruncationConfig& cfg) {
  if (r < 1 || k < 1) throw std::invalid_argument("c_rk: r and k must be >= 1");
  const std::uint64_t u = std::gcd(r, k);
  const std::uint64_t r1 = r / u;
  const double l2 = l2_principal(r1);
  const ConstantResult g = g1_principal(r1, cfg);
  const ConstantResult f = fu_principal(factorize(u), r1, cfg);
  ConstantResult out;
  out.config = cfg;
  out.value = l2 * g.value * f.value;
  out.tail_estimate = l2 * (g.tail_estimate * f.value + g.value * f.tail_estimate);
  out.flagged = g.flagged || f.flagged;
  return out;
}

EulerContext::EulerContext(const TruncationConfig& cfg) : cfg_(cfg), pt_(table_for(cfg)) {
  cfg_.validate();
  const unsigned a_max = cfg_.exponent_cutoff;
  g_by_p_.assign(cfg_.prime_cutoff + 1, 0.0);
  CompensatedSum log_sum;
  for (const std::uint32_t p : primes_up_to(static_cast<std::uint32_t>(cfg_.prime_cutoff))) {
    g_by_p_[p] = local_g_factor(pt_, p, a_max);
    log_sum += std::log(g_by_p_[p]);
  }
  g1_.config = cfg_;
  g1_.value = std::exp(log_sum.value());
  g1_.tail_estimate =
      g1_.value * (prime_tail_estimate(cfg_.prime_cutoff) + series_tail_estimate(pt_, 2, 0, a_max));
  g1_.flagged = over_target(g1_.tail_estimate, g1_.value);

  const unsigned l_max = std::min<unsigned>(
      kSeriesCacheExponents, static_cast<unsigned>(pt_.max_index() - a_max));
  series_cache_.resize(kSeriesCachePrimes);
  for (const std::uint32_t p : primes_up_to(kSeriesCachePrimes - 1)) {
    auto& row = series_cache_[p];
    for (unsigned l = 0; l <= l_max; ++l) row.push_back(shifted_partition_series(pt_, p, l, a_max));
  }
}

double EulerContext::local_g(std::uint64_t p) const {
  if (p <= cfg_.prime_cutoff && g_by_p_[p] != 0.0) return g_by_p_[p];
  return local_g_factor(pt_, p, cfg_.exponent_cutoff);
}

double EulerContext::local_series(std::uint64_t p, unsigned l) const {
  if (p < series_cache_.size() && l < series_cache_[p].size()) return series_cache_[p][l];
  return shifted_partition_series(pt_, p, l, cfg_.exponent_cutoff);
}

double EulerContext::series_tail(std::uint64_t p, unsigned l) const {
  return series_tail_estimate(pt_, p, l, cfg_.exponent_cutoff);
}

double EulerContext::c_from_terms(std::span<const PrimePower> r_terms, std::uint64_t k,
                                  double* tail) const {
  double v = kZeta2 * g1_.value;
  double rel_tail = g1_.tail_estimate / g1_.value;
  for (const auto& [p, e] : r_terms) {
    const unsigned l = std::min(e, valuation(k, p));  // exponent of p in u = gcd(r, k)
    const bool divides_r1 = e > l;
    const double pd = static_cast<double>(p);
    if (divides_r1) {
      // L(2, chi_0 mod r1) loses (1 - p^-2)^-1; G(1, chi_0 mod r1) loses the local factor.
      v *= 1.0 - 1.0 / (pd * pd);
      if (p <= cfg_.prime_cutoff) v /= local_g(p);
    }
    if (l > 0) {
      if (divides_r1) {
        v *= static_cast<double>(pt_[l]);
      } else {
        const double num = local_series(p, l);
        const double den = local_series(p, 0);
        v *= num / den;
        if (tail) rel_tail += series_tail(p, l) / num + series_tail(p, 0) / den;
      }
    }
  }
  if (tail) *tail += std::abs(v) * rel_tail;
  return v;
}

ConstantResult EulerContext::c_rk(std::uint64_t r, std::uint64_t k) const {
  if (r < 1 || k < 1) throw std::invalid_argument("c_rk: r and k must be >= 1");
  const Factorization f = factorize(r);
  ConstantResult out;
  out.config = cfg_;
  out.value = c_from_terms(f.terms(), k, &out.tail_estimate);
  out.flagged = over_target(out.tail_estimate, out.value);
  return out;
}

ConstantResult c_series(const TruncationConfig& cfg) {
  cfg.validate();
  const EulerContext ctx(cfg);
  const PartitionTable& pt = default_partitions();

  struct SquarefreeD {
    std::uint64_t d;
    int mu;
    std::vector<PrimePower> squared;  // primes of d with exponent 2
  };
  std::vector<SquarefreeD> ds;
  {
    const SpfTable spf(static_cast<std::uint32_t>(cfg.d_cutoff));
    for (std::uint64_t d = 1; d <= cfg.d_cutoff; ++d) {
      const Factorization f = spf.factorize(d);
      const int mu = mobius(f);
      if (mu == 0) continue;
      SquarefreeD entry{d, mu, {}};
      for (const auto& t : f) entry.squared.push_back({t.p, 2});
      ds.push_back(std::move(entry));
    }
  }

  CompensatedSum total;
  double max_inner = 0.0;
  double d_tail_weight = 0.0;
  double c_tail = 0.0;
  bool flagged = false;
  std::vector<PrimePower> terms;

  // c(r, k) is K * prod_{p | r} (local factor), K = c(1, 1), so for coprime
  // moduli c(d^2 delta s, k) = c(d^2, k) c(delta s, k) / K exactly.
  const double c_one = ctx.c_from_terms({}, 1);
  struct DeltaTerm {
    double weight;  // mu(delta) / delta
    double c;       // c(delta s, k)
    double tail;
  };
  std::vector<DeltaTerm> deltas;

  for (const auto& [s, fs] : squarefull_iter(cfg.squarefull_cutoff)) {
    const std::uint64_t k = a_of(fs, pt);
    const std::uint64_t rad = fs.radical();
    const std::size_t m = fs.size();
    const double sd = static_cast<double>(s);

    deltas.clear();
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
      terms.clear();
      double delta = 1.0;
      for (std::size_t i = 0; i < m; ++i) {
        const auto& t = fs.terms()[i];
        const bool in_delta = (mask >> i) & 1u;
        terms.push_back({t.p, t.e + (in_delta ? 1u : 0u)});
        if (in_delta) delta *= static_cast<double>(t.p);
      }
      const double mu_delta = (std::popcount(mask) % 2 == 0) ? 1.0 : -1.0;
      DeltaTerm dt{mu_delta / delta, 0.0, 0.0};
      dt.c = ctx.c_from_terms(terms, k, &dt.tail);
      deltas.push_back(dt);
    }

    CompensatedSum inner;
    double c_max = 0.0;
    double tail_here = 0.0;
    for (const auto& d : ds) {
      if (std::gcd(d.d, rad) != 1) continue;
      const double dd = static_cast<double>(d.d);
      const double w_d = d.mu / (dd * dd);
      double d_tail = 0.0;
      const double c_d = ctx.c_from_terms(d.squared, k, &d_tail) / c_one;
      for (const auto& dt : deltas) {
        const double c = c_d * dt.c;
        const double w = w_d * dt.weight;
        inner += w * c;
        tail_here += std::abs(w) * (dt.tail * std::abs(c_d) + d_tail / c_one * std::abs(dt.c));
        c_max = std::max(c_max, std::abs(c));
      }
    }
    const double inner_v = inner.value();
    total += inner_v / sd;
    max_inner = std::max(max_inner, std::abs(inner_v));
    double delta_weight = 1.0;  // sum over squarefree delta | s of 1/delta
    for (const auto& t : fs) delta_weight *= 1.0 + 1.0 / static_cast<double>(t.p);
    d_tail_weight += c_max * delta_weight / sd;
    c_tail += tail_here / sd;
    if (over_target(tail_here, inner_v)) flagged = true;
  }

  ConstantResult out;
  out.config = cfg;
  out.value = total.value();
  // sum_{s > S, squarefull} 1/s <= 5/sqrt(S) given count(u) <= 2.5 sqrt(u);
  // sum_{d > D} 1/d^2 < 1/D.
  const double s_tail = max_inner * 5.0 / std::sqrt(static_cast<double>(cfg.squarefull_cutoff));
  const double d_tail = d_tail_weight / static_cast<double>(cfg.d_cutoff);
  out.tail_estimate = s_tail + d_tail + c_tail;
  out.flagged = flagged;
  return out;
}

}  // namespace absum
