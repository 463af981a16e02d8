#pragma once

// The acceptance suite, shared by `absum verify` and the acceptance test binary.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace absum {

enum class Budget { kSmall, kFull };

Budget parse_budget(std::string_view name);  // "small" | "full"
std::string_view budget_name(Budget b);

// Scale parameters for one budget.
struct BudgetPlan {
  std::uint64_t x_max;          // largest x for summatory checks
  std::uint64_t x_prop1_low;    // the smaller scale of the two-scale progression check
  std::uint64_t a_oracle_max;   // sieve_a vs a_of(factorize) range
  std::uint64_t dk_oracle_max;  // sieve_dk vs dk_of range
  std::uint64_t invariant_max;  // range for the exhaustive invariant sweeps
  double mean_value_tol;        // relative, for sum a(n)/x against c(1,1)
};

BudgetPlan plan_for(Budget b);

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;    // key=value pairs, deterministic formatting
  double seconds = 0.0;  // wall time; never serialized
};

struct VerifyReport {
  Budget budget = Budget::kSmall;
  std::vector<CriterionResult> criteria;

  bool all_pass() const;
};

// Runs criteria 1-9 at the given budget, then (if requested) criterion 10,
// which re-runs the small budget with two worker counts and compares the
// serialized reports byte for byte.
VerifyReport run_verify(Budget budget, unsigned threads = 1, bool with_determinism = true);

// Header `id,name,pass,detail`; details are quoted.
std::string to_csv(const VerifyReport& report);

// Fixed 15-significant-digit rendering used by every text output.
std::string format_real(double v);

}  // namespace absum
