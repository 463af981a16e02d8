#include "absum/fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <stdexcept>
#include <string>

#include "absum/numeric.hpp"

namespace absum {

namespace {

void check_samples(std::span<const SamplePoint> samples, std::size_t min_count) {
  if (samples.size() < min_count)
    throw std::invalid_argument("need at least " + std::to_string(min_count) + " samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].x < 1) throw std::invalid_argument("sample x must be >= 1");
    if (i > 0 && samples[i].x <= samples[i - 1].x)
      throw std::invalid_argument("sample x values must be strictly increasing");
  }
}

// Slope and intercept of y against t by ordinary least squares.
std::pair<double, double> line_fit(std::span<const double> t, std::span<const double> y) {
  const double n = static_cast<double>(t.size());
  CompensatedSum st, sy;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sy += y[i];
  }
  const double tm = st.value() / n;
  const double ym = sy.value() / n;
  CompensatedSum stt, sty;
  for (std::size_t i = 0; i < t.size(); ++i) {
    stt += (t[i] - tm) * (t[i] - tm);
    sty += (t[i] - tm) * (y[i] - ym);
  }
  if (stt.value() == 0.0) throw std::invalid_argument("degenerate regression: all x equal");
  const double slope = sty.value() / stt.value();
  return {slope, ym - slope * tm};
}

double r_squared(std::span<const SamplePoint> samples, std::span<const double> residuals) {
  CompensatedSum mean;
  for (const auto& s : samples) mean += s.value;
  const double m = mean.value() / static_cast<double>(samples.size());
  CompensatedSum ss_tot, ss_res;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    ss_tot += (samples[i].value - m) * (samples[i].value - m);
    ss_res += residuals[i] * residuals[i];
  }
  return ss_tot.value() > 0.0 ? 1.0 - ss_res.value() / ss_tot.value() : 1.0;
}

double exponent_or_nan(std::span<const SamplePoint> samples, std::span<const double> residuals) {
  std::size_t usable = 0;
  for (double r : residuals)
    if (r != 0.0) ++usable;
  if (usable < 3) return std::numeric_limits<double>::quiet_NaN();
  std::vector<SamplePoint> pts(samples.begin(), samples.end());
  std::vector<double> model(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) model[i] = samples[i].value - residuals[i];
  return residual_exponent(pts, model);
}

}  // namespace

FitReport fit_slope(std::span<const SamplePoint> samples) {
  // A single point already fixes a line through the origin.
  check_samples(samples, 1);
  CompensatedSum sxv, sxx;
  for (const auto& s : samples) {
    const double x = static_cast<double>(s.x);
    sxv += x * s.value;
    sxx += x * x;
  }
  FitReport rep;
  const double slope = sxv.value() / sxx.value();
  rep.coefficients = {slope};
  for (const auto& s : samples) rep.residuals.push_back(s.value - slope * static_cast<double>(s.x));
  rep.r_squared = r_squared(samples, rep.residuals);
  rep.residual_exponent = exponent_or_nan(samples, rep.residuals);
  return rep;
}

FitReport fit_log_poly(std::span<const SamplePoint> samples, unsigned degree) {
  check_samples(samples, degree + 2);
  const Eigen::Index rows = static_cast<Eigen::Index>(samples.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(degree) + 1;

  // Columns use t / t_scale so the powers stay O(1).
  double t_scale = 0.0;
  for (const auto& s : samples) t_scale = std::max(t_scale, std::log(static_cast<double>(s.x)));
  if (t_scale == 0.0) t_scale = 1.0;

  Eigen::MatrixXd a(rows, cols);
  Eigen::VectorXd b(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    const double t = std::log(static_cast<double>(s.x)) / t_scale;
    double pw = 1.0;
    for (Eigen::Index j = 0; j < cols; ++j) {
      a(i, j) = pw;
      pw *= t;
    }
    b(i) = s.value / static_cast<double>(s.x);
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cond = sv(0) / sv(sv.size() - 1);
  if (!(sv(sv.size() - 1) > 0.0) || !(cond < 1e12))
    throw std::invalid_argument("log-polynomial design is rank deficient (condition " +
                                std::to_string(cond) + ")");
  const Eigen::VectorXd scaled = svd.solve(b);

  FitReport rep;
  rep.condition = cond;
  double scale_pow = 1.0;
  for (Eigen::Index j = 0; j < cols; ++j) {
    rep.coefficients.push_back(scaled(j) / scale_pow);
    scale_pow *= t_scale;
  }
  for (const auto& s : samples) {
    const double x = static_cast<double>(s.x);
    const double t = std::log(x);
    double poly = 0.0;
    for (auto c = rep.coefficients.rbegin(); c != rep.coefficients.rend(); ++c) poly = poly * t + *c;
    rep.residuals.push_back(s.value - x * poly);
  }
  rep.r_squared = r_squared(samples, rep.residuals);
  rep.residual_exponent = exponent_or_nan(samples, rep.residuals);
  return rep;
}

double residual_exponent(std::span<const SamplePoint> samples, std::span<const double> model) {
  if (model.size() != samples.size())
    throw std::invalid_argument("model and samples differ in length");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double r = samples[i].value - model[i];
    if (r == 0.0) continue;
    lx.push_back(std::log(static_cast<double>(samples[i].x)));
    ly.push_back(std::log(std::abs(r)));
  }
  if (lx.size() < 3) throw std::invalid_argument("residual_exponent: fewer than 3 nonzero residuals");
  return line_fit(lx, ly).first;
}

double residual_exponent(std::span<const SamplePoint> samples) {
  std::vector<double> model;
  model.reserve(samples.size());
  for (const auto& s : samples) model.push_back(s.model);
  return residual_exponent(samples, model);
}

std::vector<std::uint64_t> geometric_grid(std::uint64_t start, std::uint64_t end) {
  if (start < 1 || end < start) throw std::invalid_argument("geometric_grid: need 1 <= start <= end");
  std::vector<std::uint64_t> xs;
  for (std::uint64_t x = start; x <= end; x *= 2) {
    xs.push_back(x);
    if (x > end / 2) break;
  }
  if (xs.back() != end) xs.push_back(end);
  return xs;
}

std::vector<Prop1Row> prop1_report(std::uint64_t x, std::span<const Progression> moduli,
                                   const TruncationConfig& tcfg, const SieveConfig& scfg) {
  const std::vector<std::uint64_t> ts = t_sums(x, moduli, scfg);
  const EulerContext ctx(tcfg);
  const double xd = static_cast<double>(x);
  const double scale = std::sqrt(xd) * std::pow(std::log(xd), 2.5);
  std::vector<Prop1Row> rows;
  for (std::size_t i = 0; i < moduli.size(); ++i) {
    const auto [k, r] = moduli[i];
    if (k < 1) throw std::invalid_argument("prop1_report: k must be >= 1");
    Prop1Row row;
    row.x = x;
    row.r = r;
    row.k = k;
    row.t = ts[i];
    row.pred = ctx.c_rk(r, k).value * xd / static_cast<double>(r);
    row.err = std::abs(static_cast<double>(row.t) - row.pred);
    row.norm_err = scale > 0.0 ? row.err / (static_cast<double>(divisor_count(factorize(r))) * scale)
                               : std::numeric_limits<double>::infinity();
    row.flag = xd < 100.0 * static_cast<double>(r) * static_cast<double>(r) ||
               static_cast<double>(k) * static_cast<double>(k) > xd;
    rows.push_back(row);
  }
  return rows;
}

std::vector<KratzelRow> kratzel_report(std::span<const std::uint64_t> xs, const SieveConfig& cfg) {
  for (const auto x : xs)
    if (x < 16) throw std::invalid_argument("kratzel_report: x must be >= 16");
  std::vector<std::uint64_t> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  const auto maxima = max_a_series(sorted, cfg);
  std::vector<KratzelRow> rows;
  for (const auto x : xs) {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
    const std::uint64_t a = maxima[static_cast<std::size_t>(it - sorted.begin())];
    const double lx = std::log(static_cast<double>(x));
    rows.push_back({x, a, std::log(static_cast<double>(a)) * std::log(lx) / lx});
  }
  return rows;
}

}  // namespace absum
