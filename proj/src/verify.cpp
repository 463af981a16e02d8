#include "absum/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "absum/arith.hpp"
#include "absum/euler.hpp"
#include "absum/fit.hpp"
#include "absum/sieve.hpp"

namespace absum {

namespace {

constexpr std::uint64_t kFullX = 10'000'000;
constexpr std::uint64_t kGridStart = 10'000;
constexpr double kConstantTol = 1e-8;        // c(1,1) vs prod zeta(j)
constexpr double kMeanValueTolFull = 0.005;  // at x = 10^7
constexpr double kProp1Tol = 0.05;
constexpr double kSlopeTol = 0.05;
constexpr double kExponentCeiling = 1.0;
constexpr unsigned kZetaProductTop = 64;

class Detail {
 public:
  Detail& add(const std::string& key, const std::string& value) {
    if (!text_.empty()) text_ += ' ';
    text_ += key + '=' + value;
    return *this;
  }
  Detail& add(const std::string& key, std::uint64_t v) { return add(key, std::to_string(v)); }
  Detail& add(const std::string& key, int v) { return add(key, std::to_string(v)); }
  Detail& add(const std::string& key, double v) { return add(key, format_real(v)); }
  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

// Quantities shared between criteria, computed once per run.
struct SharedData {
  std::vector<std::uint64_t> grid;
  std::vector<SamplePoint> q_samples;
  ConstantResult c_const;
};

std::vector<Progression> prop1_moduli() {
  std::vector<Progression> out;
  for (const std::uint64_t r : {2, 3, 4, 5, 6, 9, 12})
    for (const std::uint64_t k : {std::uint64_t{1}, r}) out.push_back({k, r});
  return out;
}

CriterionResult oracle_equivalence(const BudgetPlan& plan, const SieveConfig& sc) {
  const SpfTable spf(static_cast<std::uint32_t>(plan.a_oracle_max));
  const PartitionTable& pt = default_partitions();
  const AValueWindow w = sieve_a(1, plan.a_oracle_max + 1, sc);
  std::uint64_t a_bad = 0;
  for (std::uint64_t n = 1; n <= plan.a_oracle_max; ++n)
    if (w.at(n) != a_of(spf.factorize(n), pt)) ++a_bad;
  std::uint64_t dk_bad = 0;
  for (unsigned k = 2; k <= 4; ++k) {
    const DkWindow dw = sieve_dk(1, plan.dk_oracle_max + 1, k, sc);
    for (std::uint64_t n = 1; n <= plan.dk_oracle_max; ++n)
      if (dw.at(n) != dk_of(spf.factorize(n), k)) ++dk_bad;
  }
  Detail d;
  d.add("a_checked", plan.a_oracle_max).add("a_mismatch", a_bad);
  d.add("dk_checked", plan.dk_oracle_max).add("dk_mismatch", dk_bad);
  return {1, "oracle equivalence", a_bad == 0 && dk_bad == 0, d.str()};
}

CriterionResult small_sums(const SieveConfig& sc) {
  // Values recomputed by brute force in tests/test_sieve.cpp.
  const std::uint64_t q3 = q_sum(3, sc);
  const std::uint64_t q10 = q_sum(10, sc);
  const std::uint64_t t10 = t_sum(10, 1, 3, sc);
  const std::uint64_t a100 = max_a(100, sc);
  const std::uint64_t sf100 = squarefull_count(100);
  Detail d;
  d.add("Q3", q3).add("Q10", q10).add("T10_1_3", t10).add("A100", a100).add("sqfull100", sf100);
  const bool ok = q3 == 4 && q10 == 13 && t10 == 5 && a100 == 11 && sf100 == 14;
  return {2, "small-sum oracles", ok, d.str()};
}

CriterionResult constant_pipeline() {
  const ConstantResult c = c_rk(1, 1);
  const double z = zeta_product(2, kZetaProductTop);
  const double diff = std::abs(c.value - z);
  Detail d;
  d.add("c11", c.value).add("zeta_product", z).add("abs_diff", diff).add("tol", kConstantTol);
  return {3, "c(1,1) vs zeta product", diff <= kConstantTol && !c.flagged, d.str()};
}

CriterionResult mean_value(const BudgetPlan& plan, const SieveConfig& sc) {
  const std::uint64_t xs[] = {plan.x_max};
  const std::uint64_t sum = a_sum_series(xs, sc).front();
  const double c11 = c_rk(1, 1).value;
  const double mean = static_cast<double>(sum) / static_cast<double>(plan.x_max);
  const double rel = std::abs(mean - c11) / c11;
  Detail d;
  d.add("x", plan.x_max).add("sum_a", sum).add("mean", mean).add("c11", c11);
  d.add("rel_dev", rel).add("tol", plan.mean_value_tol);
  return {4, "mean value of a(n)", rel <= plan.mean_value_tol, d.str()};
}

CriterionResult progression_constants(const BudgetPlan& plan, const SieveConfig& sc) {
  const auto moduli = prop1_moduli();
  const auto hi = prop1_report(plan.x_max, moduli, {}, sc);
  const auto lo = prop1_report(plan.x_prop1_low, moduli, {}, sc);
  bool ok = true;
  double worst = 0.0;
  Detail d;
  d.add("x_hi", plan.x_max).add("x_lo", plan.x_prop1_low);
  for (std::size_t i = 0; i < moduli.size(); ++i) {
    const double dev_hi = hi[i].err / hi[i].pred;
    const double dev_lo = lo[i].err / lo[i].pred;
    worst = std::max(worst, dev_hi);
    const bool row_ok = dev_hi < kProp1Tol && dev_hi < dev_lo;
    ok = ok && row_ok;
    d.add("r" + std::to_string(moduli[i].r) + "k" + std::to_string(moduli[i].k),
          format_real(dev_lo) + "->" + format_real(dev_hi));
  }
  d.add("worst_hi", worst).add("tol", kProp1Tol);
  return {5, "progression sums at two scales", ok, d.str()};
}

CriterionResult two_route_constant(const SharedData& sd) {
  const FitReport fit = fit_slope(sd.q_samples);
  const double slope = fit.coefficients.front();
  const double rel = std::abs(sd.c_const.value - slope) / sd.c_const.value;
  Detail d;
  d.add("C_series", sd.c_const.value).add("C_tail", sd.c_const.tail_estimate);
  d.add("slope", slope).add("rel_diff", rel).add("tol", kSlopeTol);
  return {6, "C series vs fitted slope", rel <= kSlopeTol && !sd.c_const.flagged, d.str()};
}

CriterionResult residual_behaviour(const SharedData& sd) {
  std::vector<double> model;
  for (const auto& s : sd.q_samples) model.push_back(sd.c_const.value * static_cast<double>(s.x));
  const double beta = residual_exponent(sd.q_samples, model);
  Detail d;
  d.add("points", static_cast<std::uint64_t>(sd.q_samples.size()));
  d.add("residual_exponent", beta).add("ceiling", kExponentCeiling);
  return {7, "residual exponent of Q(x) - Cx", beta < kExponentCeiling, d.str()};
}

CriterionResult divisor_shift(const SharedData& sd, const SieveConfig& sc) {
  const auto sums = dk_shift_sum_series(sd.grid, 2, sc);
  std::vector<SamplePoint> samples;
  for (std::size_t i = 0; i < sd.grid.size(); ++i)
    samples.push_back({sd.grid[i], static_cast<double>(sums[i])});
  const FitReport fit = fit_log_poly(samples, 1);
  const double lead = fit.coefficients.back();
  const bool ok = lead > 0.0 && fit.residual_exponent < kExponentCeiling;
  Detail d;
  d.add("coef0", fit.coefficients[0]).add("coef1", lead);
  d.add("residual_exponent", fit.residual_exponent).add("ceiling", kExponentCeiling);
  return {8, "divisor sum over shifted arguments", ok, d.str()};
}

CriterionResult invariant_suites(const BudgetPlan& plan, const SieveConfig& sc) {
  const PartitionTable& pt = default_partitions();
  const std::uint64_t n_max = plan.invariant_max;
  const SpfTable spf(static_cast<std::uint32_t>(std::max<std::uint64_t>(n_max, 1'000'000)));
  Detail d;
  bool ok = true;
  auto record = [&](const std::string& name, std::uint64_t failures) {
    d.add(name, failures);
    ok = ok && failures == 0;
  };

  {  // multiplicativity on coprime pairs m, n <= 10^6
    std::mt19937_64 rng(0x5eed);
    std::uint64_t bad = 0, tried = 0;
    while (tried < 2000) {
      const std::uint64_t m = rng() % 1'000'000 + 1;
      const std::uint64_t n = rng() % 1'000'000 + 1;
      if (std::gcd(m, n) != 1) continue;
      ++tried;
      const auto fm = spf.factorize(m), fn = spf.factorize(n), fmn = factorize(m * n);
      if (a_of(fmn, pt) != a_of(fm, pt) * a_of(fn, pt)) ++bad;
      for (unsigned k = 2; k <= 4; ++k)
        if (dk_of(fmn, k) != dk_of(fm, k) * dk_of(fn, k)) ++bad;
    }
    record("multiplicativity_fail", bad);
  }
  {  // a(q) = 1 on squarefree q, and the q*s decomposition
    std::uint64_t sqfree_bad = 0, split_bad = 0;
    for (std::uint64_t n = 1; n <= n_max; ++n) {
      const auto f = spf.factorize(n);
      if (mobius(f) != 0 && a_of(f, pt) != 1) ++sqfree_bad;
      const auto [q, s] = sf_decompose(f);
      const auto fq = spf.factorize(q);
      if (q * s != n || std::gcd(q, s) != 1 || mobius(fq) == 0 || !is_squarefull(spf.factorize(s)))
        ++split_bad;
    }
    record("squarefree_a_fail", sqfree_bad);
    record("sf_decompose_fail", split_bad);
  }
  {  // sum_{k mod r} T(x; k, r) = T(x; 1, 1)
    std::vector<Progression> progs{{1, 1}};
    for (std::uint64_t r = 1; r <= 20; ++r)
      for (std::uint64_t k = 0; k < r; ++k) progs.push_back({k, r});
    const auto t = t_sums(n_max, progs, sc);
    std::uint64_t bad = 0;
    std::size_t idx = 1;
    for (std::uint64_t r = 1; r <= 20; ++r) {
      std::uint64_t total = 0;
      for (std::uint64_t k = 0; k < r; ++k) total += t[idx++];
      if (total != t[0]) ++bad;
    }
    record("progression_partition_fail", bad);
  }
  {  // mu^2(n) = sum_{d^2 | n} mu(d)
    std::uint64_t bad = 0;
    for (std::uint64_t n = 1; n <= 10'000; ++n) {
      int s = 0;
      for (std::uint64_t dd = 1; dd * dd <= n; ++dd)
        if (n % (dd * dd) == 0) s += mobius(spf.factorize(dd));
      const int mu = mobius(spf.factorize(n));
      if (s != mu * mu) ++bad;
    }
    record("mu_squared_fail", bad);
  }
  {  // A(x) nondecreasing and A(x) >= P(floor(log2 x))
    const auto xs = geometric_grid(2, plan.x_max);
    const auto a = max_a_series(xs, sc);
    std::uint64_t bad = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i > 0 && a[i] < a[i - 1]) ++bad;
      const unsigned lg = 63 - static_cast<unsigned>(__builtin_clzll(xs[i]));
      if (a[i] < pt[lg]) ++bad;
    }
    record("max_a_fail", bad);
  }
  {  // count(u) / sqrt(u) in [1.5, 2.5] on [10^4, 10^8]
    std::uint64_t bad = 0;
    double lo = 1e300, hi = 0.0;
    for (const std::uint64_t u : geometric_grid(10'000, 100'000'000)) {
      const double ratio =
          static_cast<double>(squarefull_count(u)) / std::sqrt(static_cast<double>(u));
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      if (ratio < 1.5 || ratio > 2.5) ++bad;
    }
    record("squarefull_density_fail", bad);
    d.add("squarefull_ratio_min", lo).add("squarefull_ratio_max", hi);
  }
  return {9, "invariant suites", ok, d.str()};
}

template <class Fn>
CriterionResult timed(Fn fn) {
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r = fn();
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

VerifyReport run_criteria(Budget budget, const SieveConfig& sc) {
  const BudgetPlan plan = plan_for(budget);
  VerifyReport rep;
  rep.budget = budget;
  auto& out = rep.criteria;
  out.push_back(timed([&] { return oracle_equivalence(plan, sc); }));
  out.push_back(timed([&] { return small_sums(sc); }));
  out.push_back(timed([&] { return constant_pipeline(); }));
  out.push_back(timed([&] { return mean_value(plan, sc); }));
  out.push_back(timed([&] { return progression_constants(plan, sc); }));

  SharedData shared;
  const auto t0 = std::chrono::steady_clock::now();
  shared.grid = geometric_grid(kGridStart, plan.x_max);
  const auto q = q_sum_series(shared.grid, sc);
  for (std::size_t i = 0; i < shared.grid.size(); ++i)
    shared.q_samples.push_back({shared.grid[i], static_cast<double>(q[i])});
  shared.c_const = c_series();
  const double shared_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  out.push_back(timed([&] { return two_route_constant(shared); }));
  out.back().seconds += shared_seconds;
  out.push_back(timed([&] { return residual_behaviour(shared); }));
  out.push_back(timed([&] { return divisor_shift(shared, sc); }));
  out.push_back(timed([&] { return invariant_suites(plan, sc); }));
  return rep;
}

}  // namespace

Budget parse_budget(std::string_view name) {
  if (name == "small") return Budget::kSmall;
  if (name == "full") return Budget::kFull;
  throw std::invalid_argument("budget must be 'small' or 'full'");
}

std::string_view budget_name(Budget b) { return b == Budget::kSmall ? "small" : "full"; }

BudgetPlan plan_for(Budget b) {
  if (b == Budget::kFull) return {kFullX, 100'000, 1'000'000, 100'000, 100'000, kMeanValueTolFull};
  // The mean-value error decays like x^{-1/2}; its tolerance is scaled from 10^7 accordingly.
  constexpr std::uint64_t x = 100'000;
  const double tol = kMeanValueTolFull * std::sqrt(static_cast<double>(kFullX) / x);
  return {x, 1'000, 100'000, 10'000, 10'000, tol};
}

bool VerifyReport::all_pass() const {
  for (const auto& c : criteria)
    if (!c.pass) return false;
  return !criteria.empty();
}

VerifyReport run_verify(Budget budget, unsigned threads, bool with_determinism) {
  SieveConfig sc;
  sc.threads = threads;
  VerifyReport rep = run_criteria(budget, sc);
  if (with_determinism) {
    rep.criteria.push_back(timed([&] {
      SieveConfig one;
      one.threads = 1;
      SieveConfig many;
      many.threads = 3;
      many.segment_len = std::uint64_t{1} << 16;
      const std::string a = to_csv(run_criteria(Budget::kSmall, one));
      const std::string b = to_csv(run_criteria(Budget::kSmall, many));
      Detail d;
      d.add("bytes", static_cast<std::uint64_t>(a.size())).add("threads", "1_vs_3");
      return CriterionResult{10, "determinism", a == b, d.str()};
    }));
  }
  return rep;
}

std::string to_csv(const VerifyReport& report) {
  std::string out = "id,name,pass,detail\n";
  for (const auto& c : report.criteria) {
    out += std::to_string(c.id) + ",\"" + c.name + "\"," + (c.pass ? "pass" : "fail") + ",\"" +
           c.detail + "\"\n";
  }
  return out;
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

}  // namespace absum
