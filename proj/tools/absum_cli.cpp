// absum: command-line front end for the library.
// Exit codes: 0 success, 1 computational error or flagged result, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "absum/arith.hpp"
#include "absum/error.hpp"
#include "absum/euler.hpp"
#include "absum/fit.hpp"
#include "absum/sieve.hpp"
#include "absum/verify.hpp"

namespace {

using absum::format_real;
using u64 = std::uint64_t;

struct Cell {
  std::string text;
  bool numeric = true;
};

Cell integer(u64 v) { return {std::to_string(v), true}; }
Cell real(double v) { return {format_real(v), true}; }
Cell text(std::string s) { return {std::move(s), false}; }

struct Section {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct Output {
  std::vector<Section> sections;
  bool flagged = false;  // result printed, but exit 1
};

struct Options {
  std::vector<u64> x;
  std::vector<u64> range;
  std::vector<u64> r;
  std::vector<u64> k;
  std::optional<unsigned> k_div;  // unset: 2, or for fit, fit Q instead
  std::optional<u64> pmax, amax, smax, dmax;
  std::string format = "csv";
  std::string out;
  unsigned threads = 1;
  std::string budget = "small";
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string render_csv(const Output& o) {
  std::string s;
  for (std::size_t i = 0; i < o.sections.size(); ++i) {
    const auto& sec = o.sections[i];
    if (i > 0) s += '\n';
    for (std::size_t c = 0; c < sec.columns.size(); ++c) s += (c ? "," : "") + sec.columns[c];
    s += '\n';
    for (const auto& row : sec.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) s += ',';
        s += row[c].numeric ? row[c].text : '"' + row[c].text + '"';
      }
      s += '\n';
    }
  }
  return s;
}

std::string render_json(const std::string& command, const Output& o) {
  nlohmann::ordered_json doc;
  doc["command"] = command;
  for (const auto& sec : o.sections) {
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : sec.rows) {
      nlohmann::ordered_json obj;
      for (std::size_t c = 0; c < row.size(); ++c) {
        const auto& cell = row[c];
        if (!cell.numeric)
          obj[sec.columns[c]] = cell.text;
        else if (cell.text == "nan" || cell.text == "inf" || cell.text == "-inf")
          obj[sec.columns[c]] = nullptr;
        else
          obj[sec.columns[c]] = nlohmann::ordered_json::parse(cell.text);
      }
      rows.push_back(std::move(obj));
    }
    doc[sec.name] = std::move(rows);
  }
  doc["flagged"] = o.flagged;
  return doc.dump(2) + '\n';
}

absum::SieveConfig sieve_config(const Options& o) {
  absum::SieveConfig c;
  c.threads = o.threads;
  return c;
}

absum::TruncationConfig truncation(const Options& o) {
  absum::TruncationConfig c;
  if (o.pmax) c.prime_cutoff = *o.pmax;
  if (o.amax) c.exponent_cutoff = static_cast<unsigned>(*o.amax);
  if (o.smax) c.squarefull_cutoff = *o.smax;
  if (o.dmax) c.d_cutoff = *o.dmax;
  c.validate();
  return c;
}

const std::vector<u64>& need_x(const Options& o) {
  if (o.x.empty()) throw UsageError("--x is required");
  return o.x;
}

std::pair<u64, u64> need_range(const Options& o) {
  if (o.range.size() != 2) throw UsageError("--range L R is required");
  if (o.range[0] < 1 || o.range[1] < o.range[0]) throw UsageError("--range needs 1 <= L <= R");
  return {o.range[0], o.range[1]};
}

// x values in increasing order, for the single-pass series operations.
std::vector<u64> sorted_x(const Options& o) {
  std::vector<u64> xs = need_x(o);
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (xs[i] <= xs[i - 1]) throw UsageError("repeated --x values must be strictly increasing");
  return xs;
}

std::vector<absum::Progression> progressions(const Options& o) {
  if (o.r.empty()) throw UsageError("--r is required");
  std::vector<absum::Progression> out;
  for (const u64 r : o.r) {
    if (o.k.empty()) throw UsageError("--k is required");
    for (const u64 k : o.k) out.push_back({k, r});
  }
  return out;
}

Output cmd_asieve(const Options& o) {
  const auto [lo, hi] = need_range(o);
  const auto w = absum::sieve_a(lo, hi + 1, sieve_config(o));
  Section s{"values", {"n", "a"}, {}};
  for (u64 n = lo; n <= hi; ++n) s.rows.push_back({integer(n), integer(w.at(n))});
  return {{s}};
}

Output cmd_dksieve(const Options& o) {
  const auto [lo, hi] = need_range(o);
  const auto w = absum::sieve_dk(lo, hi + 1, o.k_div.value_or(2), sieve_config(o));
  Section s{"values", {"n", "d_k"}, {}};
  for (u64 n = lo; n <= hi; ++n) s.rows.push_back({integer(n), integer(w.at(n))});
  return {{s}};
}

Output cmd_qsum(const Options& o) {
  const auto xs = sorted_x(o);
  const auto q = absum::q_sum_series(xs, sieve_config(o));
  Section s{"qsum", {"x", "Q"}, {}};
  for (std::size_t i = 0; i < xs.size(); ++i) s.rows.push_back({integer(xs[i]), integer(q[i])});
  return {{s}};
}

Output cmd_tsum(const Options& o) {
  const auto progs = progressions(o);
  Section s{"tsum", {"x", "r", "k", "T"}, {}};
  for (const u64 x : need_x(o)) {
    const auto t = absum::t_sums(x, progs, sieve_config(o));
    for (std::size_t i = 0; i < progs.size(); ++i)
      s.rows.push_back({integer(x), integer(progs[i].r), integer(progs[i].k), integer(t[i])});
  }
  return {{s}};
}

Output cmd_dkshift(const Options& o) {
  const auto xs = sorted_x(o);
  const unsigned k = o.k_div.value_or(2);
  const auto v = absum::dk_shift_sum_series(xs, k, sieve_config(o));
  Section s{"dkshift", {"x", "k", "S"}, {}};
  for (std::size_t i = 0; i < xs.size(); ++i)
    s.rows.push_back({integer(xs[i]), integer(k), integer(v[i])});
  return {{s}};
}

Output cmd_maxa(const Options& o) {
  const auto xs = sorted_x(o);
  const auto v = absum::max_a_series(xs, sieve_config(o));
  Section s{"maxa", {"x", "A"}, {}};
  for (std::size_t i = 0; i < xs.size(); ++i) s.rows.push_back({integer(xs[i]), integer(v[i])});
  return {{s}};
}

Output cmd_sqfull(const Options& o) {
  if (!o.range.empty()) {
    const auto [lo, hi] = need_range(o);
    Section s{"squarefull", {"s"}, {}};
    for (const auto& e : absum::squarefull_iter(hi))
      if (e.s >= lo) s.rows.push_back({integer(e.s)});
    return {{s}};
  }
  Section s{"count", {"x", "count"}, {}};
  for (const u64 x : need_x(o)) s.rows.push_back({integer(x), integer(absum::squarefull_count(x))});
  return {{s}};
}

Output cmd_crk(const Options& o) {
  const auto cfg = truncation(o);
  if (o.r.empty() || o.k.empty()) throw UsageError("--r and --k are required");
  Output out;
  Section s{"crk", {"r", "k", "L2", "G1", "Fu", "c", "tail"}, {}};
  for (const u64 r : o.r) {
    for (const u64 k : o.k) {
      if (r < 1 || k < 1) throw UsageError("--r and --k must be >= 1");
      const u64 u = std::gcd(r, k);
      const u64 r1 = r / u;
      const double l2 = absum::l2_principal(r1);
      const auto g1 = absum::g1_principal(r1, cfg);
      const auto fu = absum::fu_principal(absum::factorize(u), r1, cfg);
      const auto c = absum::c_rk(r, k, cfg);
      out.flagged = out.flagged || c.flagged;
      s.rows.push_back({integer(r), integer(k), real(l2), real(g1.value), real(fu.value),
                        real(c.value), real(c.tail_estimate)});
    }
  }
  out.sections.push_back(std::move(s));
  return out;
}

Output cmd_cconst(const Options& o) {
  const auto cfg = truncation(o);
  const auto c = absum::c_series(cfg);
  Section s{"cconst", {"S_max", "D_max", "C", "tail"}, {}};
  s.rows.push_back({integer(cfg.squarefull_cutoff), integer(cfg.d_cutoff), real(c.value),
                    real(c.tail_estimate)});
  return {{s}, c.flagged};
}

// Q(x) ~ C x by default; with --k-div k, the shifted divisor sum against
// x times a degree k-1 polynomial in log x. Grid: --range L R, or 10^4..x.
Output cmd_fit(const Options& o) {
  std::vector<u64> grid;
  if (!o.range.empty()) {
    const auto [lo, hi] = need_range(o);
    grid = absum::geometric_grid(lo, hi);
  } else {
    const u64 x = need_x(o).back();
    grid = absum::geometric_grid(std::min<u64>(10'000, x), x);
  }
  const auto sc = sieve_config(o);
  const auto values = o.k_div ? absum::dk_shift_sum_series(grid, *o.k_div, sc)
                              : absum::q_sum_series(grid, sc);
  std::vector<absum::SamplePoint> samples;
  for (std::size_t i = 0; i < grid.size(); ++i)
    samples.push_back({grid[i], static_cast<double>(values[i])});
  const auto fit = o.k_div ? absum::fit_log_poly(samples, *o.k_div - 1) : absum::fit_slope(samples);

  Output out;
  Section coef{"coefficients", {"coef_index", "coef_value"}, {}};
  for (std::size_t i = 0; i < fit.coefficients.size(); ++i)
    coef.rows.push_back({integer(i), real(fit.coefficients[i])});
  Section res{"residuals", {"x", "residual"}, {}};
  for (std::size_t i = 0; i < grid.size(); ++i) res.rows.push_back({integer(grid[i]), real(fit.residuals[i])});
  Section beta{"summary", {"residual_exponent"}, {{real(fit.residual_exponent)}}};
  out.sections = {std::move(coef), std::move(res), std::move(beta)};
  return out;
}

Output cmd_prop1(const Options& o) {
  const auto progs = progressions(o);
  const auto cfg = truncation(o);
  Section s{"prop1", {"x", "r", "k", "T", "pred", "err", "norm_err", "flag"}, {}};
  for (const u64 x : need_x(o)) {
    for (const auto& row : absum::prop1_report(x, progs, cfg, sieve_config(o)))
      s.rows.push_back({integer(row.x), integer(row.r), integer(row.k), integer(row.t), real(row.pred),
                        real(row.err), real(row.norm_err), integer(row.flag ? 1 : 0)});
  }
  return {{s}};
}

// Without --x, reports every decade 10^2..10^7.
Output cmd_kratzel(const Options& o) {
  std::vector<u64> xs = o.x;
  if (xs.empty())
    for (u64 x = 100; x <= 10'000'000; x *= 10) xs.push_back(x);
  Section s{"kratzel", {"x", "A", "L"}, {}};
  for (const auto& row : absum::kratzel_report(xs, sieve_config(o)))
    s.rows.push_back({integer(row.x), integer(row.a_max), real(row.l_value)});
  Section lim{"limit", {"L_limit"}, {{real(absum::kKratzelLimit)}}};
  return {{std::move(s), std::move(lim)}};
}

Output cmd_verify(const Options& o) {
  const auto rep = absum::run_verify(absum::parse_budget(o.budget), o.threads);
  Section s{"criteria", {"id", "name", "pass", "detail"}, {}};
  for (const auto& c : rep.criteria)
    s.rows.push_back({integer(static_cast<u64>(c.id)), text(c.name), text(c.pass ? "pass" : "fail"),
                      text(c.detail)});
  return {{s}, !rep.all_pass()};
}

struct Command {
  const char* name;
  const char* help;
  std::function<Output(const Options&)> run;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", o.out, "output file (default: stdout)");
  sub->add_option("--threads", o.threads, "sieve worker count")->check(CLI::Range(1u, 256u));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact sums over the number of abelian groups of order n, and their constants"};
  app.require_subcommand(1);
  Options o;

  const std::vector<Command> commands = {
      {"asieve", "a(n) for n in --range L R", cmd_asieve},
      {"dksieve", "d_k(n) for n in --range L R, k = --k-div", cmd_dksieve},
      {"qsum", "Q(x) = sum a(n + a(n)) for each --x", cmd_qsum},
      {"tsum", "T(x; k, r) for each --x, --r, --k", cmd_tsum},
      {"dkshift", "sum d_k(n + a(n)) for each --x", cmd_dkshift},
      {"maxa", "A(x) = max a(n), n <= x, for each --x", cmd_maxa},
      {"sqfull", "squarefull count up to --x, or list in --range", cmd_sqfull},
      {"crk", "progression constant c(r, k) and its factors", cmd_crk},
      {"cconst", "main constant C by its truncated series", cmd_cconst},
      {"fit", "least-squares fit of Q (or the d_k shifted sum with --k-div)", cmd_fit},
      {"prop1", "T(x; k, r) against c(r, k) x / r", cmd_prop1},
      {"kratzel", "A(x) and log A log log x / log x", cmd_kratzel},
      {"verify", "acceptance suite", cmd_verify},
  };

  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    add_common(sub, o);
    const std::string n = c.name;
    if (n != "crk" && n != "cconst" && n != "verify")
      sub->add_option("--x", o.x, "upper limit (repeatable)")->check(CLI::PositiveNumber);
    if (n == "asieve" || n == "dksieve" || n == "sqfull" || n == "fit")
      sub->add_option("--range", o.range, "L R")->expected(2);
    if (n == "tsum" || n == "prop1" || n == "crk") {
      sub->add_option("--r", o.r, "modulus (repeatable)")->check(CLI::PositiveNumber);
      sub->add_option("--k", o.k, "residue (repeatable)");
    }
    if (n == "dksieve" || n == "dkshift" || n == "fit")
      sub->add_option("--k-div", o.k_div, "divisor-function order")->check(CLI::Range(2u, 4u));
    if (n == "crk" || n == "cconst" || n == "prop1") {
      sub->add_option("--pmax", o.pmax, "prime cutoff");
      sub->add_option("--amax", o.amax, "exponent cutoff");
    }
    if (n == "cconst") {
      sub->add_option("--smax", o.smax, "squarefull cutoff");
      sub->add_option("--dmax", o.dmax, "squarefree d cutoff");
    }
    if (n == "verify") sub->add_option("--budget", o.budget, "small or full")->check(CLI::IsMember({"small", "full"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const Command* chosen = nullptr;
  for (const auto& c : commands)
    if (app.got_subcommand(c.name)) chosen = &c;

  try {
    const Output result = chosen->run(o);
    const std::string body = o.format == "json" ? render_json(chosen->name, result) : render_csv(result);
    if (o.out.empty()) {
      std::cout << body;
    } else {
      std::ofstream f(o.out, std::ios::binary);
      if (!(f << body)) {
        std::cerr << "error: cannot write " << o.out << '\n';
        return 1;
      }
    }
    if (result.flagged) {
      std::cerr << "warning: result flagged (truncation tail above target or failed criterion)\n";
      return 1;
    }
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const absum::OverflowError& e) {
    std::cerr << "overflow: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
