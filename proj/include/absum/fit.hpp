#pragma once

// Least-squares comparison of exact summatory data against asymptotic models.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "absum/euler.hpp"
#include "absum/sieve.hpp"

namespace absum {

// One observation of a summatory function. `value` holds the exact integer
// (exactly representable below 2^53); `model` is a prediction, when there is one.
struct SamplePoint {
  std::uint64_t x = 0;
  double value = 0.0;
  double model = 0.0;
};

struct FitReport {
  std::vector<double> coefficients;
  std::vector<double> residuals;  // value - fitted model, per sample
  // Slope of log|residual| against log x; NaN with fewer than 3 nonzero residuals.
  double residual_exponent = std::numeric_limits<double>::quiet_NaN();
  double r_squared = 0.0;
  double condition = 1.0;  // of the (column-scaled) design matrix
};

// value ~ C x through the origin.
FitReport fit_slope(std::span<const SamplePoint> samples);

// value / x ~ c_0 + c_1 log x + ... + c_degree (log x)^degree.
// Rejects rank-deficient designs, reporting the condition number.
FitReport fit_log_poly(std::span<const SamplePoint> samples, unsigned degree);

// Least-squares slope of log|value - model| against log x, skipping exact
// zeros. Throws std::invalid_argument with fewer than 3 usable points.
double residual_exponent(std::span<const SamplePoint> samples, std::span<const double> model);
double residual_exponent(std::span<const SamplePoint> samples);

// start * 2^i for every such value <= end, followed by end itself if missing.
std::vector<std::uint64_t> geometric_grid(std::uint64_t start, std::uint64_t end);

struct Prop1Row {
  std::uint64_t x = 0;
  std::uint64_t r = 0;
  std::uint64_t k = 0;
  std::uint64_t t = 0;     // exact T(x; k, r)
  double pred = 0.0;       // c(r, k) x / r
  double err = 0.0;        // |T - pred|
  double norm_err = 0.0;   // err / (d(r) sqrt(x) log(x)^2.5)
  bool flag = false;       // outside the regime r, k << sqrt(x) (x < 100 r^2 or k^2 > x)
};

std::vector<Prop1Row> prop1_report(std::uint64_t x, std::span<const Progression> moduli,
                                   const TruncationConfig& tcfg = {},
                                   const SieveConfig& scfg = {});

inline const double kKratzelLimit = std::log(5.0) / 4.0;

struct KratzelRow {
  std::uint64_t x = 0;
  std::uint64_t a_max = 0;  // A(x)
  double l_value = 0.0;     // log A(x) * log log x / log x
};

// Each x must be >= 16; rows follow the input order.
std::vector<KratzelRow> kratzel_report(std::span<const std::uint64_t> xs,
                                       const SieveConfig& cfg = {});

}  // namespace absum
