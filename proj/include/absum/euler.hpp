#pragma once

// Zeta values, principal-character Euler products, the progression constant
// c(r, k) and the main constant C of Q(x) ~ C x. Every infinite sum or product
// is truncated according to a TruncationConfig and reports a heuristic tail.

#include <cstdint>
#include <span>
#include <vector>

#include "absum/arith.hpp"

namespace absum {

struct TruncationConfig {
  std::uint64_t prime_cutoff = 100000;        // primes p <= P_max in Euler products
  unsigned exponent_cutoff = 64;              // alpha <= A_max in local series
  unsigned zeta_cutoff = 64;                  // J_max for prod_{j<=J_max} zeta(j)
  std::uint64_t squarefull_cutoff = 1000000;  // squarefull s <= S_max in C
  std::uint64_t d_cutoff = 10000;             // squarefree d <= D_max in C

  // All cutoffs must be >= 2, and A_max must leave room in the partition
  // table for shifted series P(l + alpha).
  void validate() const;
};

// A truncated value is flagged when its tail estimate exceeds this.
inline constexpr double kTailTarget = 1e-9;

struct ConstantResult {
  double value = 0.0;
  double tail_estimate = 0.0;  // heuristic majorant, not a certified bound
  bool flagged = false;        // tail_estimate above the target for this quantity
  TruncationConfig config;
};

inline constexpr unsigned kZetaDefaultTerms = 64;

// zeta(j) for integer j >= 2: direct sum over n < terms plus an
// Euler-Maclaurin tail.
double zeta_int(unsigned j, unsigned terms = kZetaDefaultTerms);

// prod_{j=lo}^{hi} zeta(j), evaluated from zeta_int.
double zeta_product(unsigned lo, unsigned hi);

// L(2, chi_0 mod r1) = zeta(2) prod_{p | r1} (1 - p^-2).
double l2_principal(std::uint64_t r1);

// G(1, chi_0 mod r1): direct product over p <= P_max, p not dividing r1, of
// (1 - 1/p)(1 - 1/p^2) sum_{alpha <= A_max} P(alpha) p^-alpha.
ConstantResult g1_principal(std::uint64_t r1, const TruncationConfig& cfg = {});

// F_u(1, chi_0 mod r1) for u = prod p^l. Primes of u coprime to r1 contribute
// [sum P(alpha) p^-alpha]^-1 [sum P(l + alpha) p^-alpha]; primes dividing r1
// keep only alpha = 0 and contribute P(l). u = 1 gives exactly 1.
ConstantResult fu_principal(const Factorization& u, std::uint64_t r1,
                            const TruncationConfig& cfg = {});

// c(r, k) = L(2, chi_0) G(1, chi_0) F_u(1, chi_0) with u = gcd(r, k),
// r1 = r / u, composed from the three functions above.
ConstantResult c_rk(std::uint64_t r, std::uint64_t k, const TruncationConfig& cfg = {});

// Precomputed local factors for evaluating c(r, k) many times. G(1, chi_0 mod
// r1) is obtained from the full product by removing the local factors of the
// primes of r1, which agrees with g1_principal up to rounding.
class EulerContext {
 public:
  explicit EulerContext(const TruncationConfig& cfg = {});

  const TruncationConfig& config() const noexcept { return cfg_; }

  // (1 - 1/p)(1 - 1/p^2) sum_{alpha <= A_max} P(alpha) p^-alpha.
  double local_g(std::uint64_t p) const;
  // sum_{alpha <= A_max} P(l + alpha) p^-alpha.
  double local_series(std::uint64_t p, unsigned l) const;
  // G(1, chi_0) over all p <= P_max.
  const ConstantResult& g1_full() const noexcept { return g1_; }

  ConstantResult c_rk(std::uint64_t r, std::uint64_t k) const;
  // c(r, k) from the prime powers of r in any order (primes distinct).
  // Adds the truncation tail to *tail when given.
  double c_from_terms(std::span<const PrimePower> r_terms, std::uint64_t k,
                      double* tail = nullptr) const;

 private:
  double series_tail(std::uint64_t p, unsigned l) const;

  TruncationConfig cfg_;
  PartitionTable pt_;
  std::vector<double> g_by_p_;  // local_g(p) for p <= P_max, 0 elsewhere
  ConstantResult g1_;
  // local_series(p, l) for small p and l, indexed [p][l].
  std::vector<std::vector<double>> series_cache_;
};

// C = sum over squarefull s <= S_max (k = a(s)) of
//     (1/s) sum_{d <= D_max, (d,s)=1} mu(d)/d^2 sum_{delta | s} mu(delta) c(d^2 delta s, k)/delta.
ConstantResult c_series(const TruncationConfig& cfg = {});

}  // namespace absum
