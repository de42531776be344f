#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "intgreen/expr.hpp"
#include "intgreen/format.hpp"
#include "intgreen/kernel.hpp"
#include "intgreen/numerics.hpp"
#include "intgreen/regions.hpp"
#include "intgreen/scan.hpp"
#include "intgreen/verify.hpp"

namespace intgreen::cli {

namespace {

using nlohmann::json;

struct Globals {
  bool json = false;
  std::uint64_t seed = 7;
  std::string out_path;
};

struct EvalArgs {
  double M = 0, d1 = 0, d2 = 0, t = 0, s = 0;
};

struct ClassifyArgs {
  double M = 0, d1 = 0, d2 = 0;
  bool empirical = false;
  int grid_n = 201;
};

struct SolveArgs {
  double M = 0, d1 = 0, d2 = 0;
  std::string sigma;
  std::string method = "green";
  int n = 256;
  int panels = 512;
  std::string job;
  // Set from the parsed options so a job file only fills what is missing.
  bool has_M = false, has_d1 = false, has_d2 = false, has_sigma = false, has_method = false, has_n = false,
       has_panels = false;
};

struct ScanArgs {
  std::string x, y, fix, svg;
  std::string provenance = "analytic";
  int grid_n = 41;
  unsigned threads = 0;
};

struct VerifyArgs {
  bool fast = false;
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Reports a failure as JSON on the primary stream with --json, else as a
// line on the diagnostic stream.
class Reporter {
 public:
  Reporter(const Globals& g, std::ostream& out, std::ostream& err) : g_(g), out_(out), err_(err) {}

  std::ostream& out() { return out_; }
  std::ostream& err() { return err_; }
  bool json_mode() const { return g_.json; }

  int fail(int code, json body) {
    if (g_.json) {
      out_ << body.dump() << '\n';
    } else {
      err_ << "error: " << body.at("message").get<std::string>() << '\n';
    }
    return code;
  }

  int usage(const std::string& message) { return fail(kExitUsage, {{"error", "usage"}, {"message", message}}); }

  int resonant(const Resonance& r) {
    return fail(kExitResonance, {{"error", "resonance"},
                                 {"reason", r.describe()},
                                 {"message", "not uniquely solvable: " + r.describe()},
                                 {"solvable", false}});
  }

 private:
  const Globals& g_;
  std::ostream& out_;
  std::ostream& err_;
};

json params_json(const ProblemParams& p) { return {{"M", p.M}, {"delta1", p.delta1}, {"delta2", p.delta2}}; }

void require_finite(const ProblemParams& p) {
  if (!std::isfinite(p.M) || !std::isfinite(p.delta1) || !std::isfinite(p.delta2))
    throw UsageError("--M, --d1 and --d2 must be finite");
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string optional_text(const std::optional<double>& v) { return v ? format_double(*v) : "n/a"; }

int cmd_eval(Reporter& r, const EvalArgs& a) {
  const ProblemParams p{a.M, a.d1, a.d2};
  require_finite(p);
  if (!std::isfinite(a.t) || !std::isfinite(a.s) || a.t < 0 || a.t > 1 || a.s < 0 || a.s > 1)
    throw UsageError("--t and --s must lie in [0, 1]");
  if (const Resonance res = resonance(p)) return r.resonant(res);

  const GreenKernel kernel(p);
  const double value = kernel.value(a.t, a.s);
  const double dt_left = kernel.dt(a.t, a.s, Side::Left);
  const double dt_right = kernel.dt(a.t, a.s, Side::Right);
  const char* branch = to_string(KernelPoint::at(a.t, a.s).branch);
  if (r.json_mode()) {
    r.out() << json{{"value", value}, {"dt_left", dt_left}, {"dt_right", dt_right}, {"branch", branch},
                    {"solvable", true}}.dump()
            << '\n';
  } else {
    r.out() << "value: " << format_double(value) << '\n'
            << "dt_left: " << format_double(dt_left) << '\n'
            << "dt_right: " << format_double(dt_right) << '\n'
            << "branch: " << branch << '\n'
            << "solvable: true\n";
  }
  return kExitOk;
}

// True when the empirical verdict does not contradict the analytic one.
bool compatible(SignClass analytic, SignClass empirical) {
  switch (analytic) {
    case SignClass::OnFrontier:
    case SignClass::OutsideTheory: return true;
    case SignClass::DegenerateNonNegative: return empirical == SignClass::OnFrontier;
    default: return analytic == empirical;
  }
}

int cmd_classify(Reporter& r, const ClassifyArgs& a) {
  const ProblemParams p{a.M, a.d1, a.d2};
  require_finite(p);
  if (a.grid_n < 41) throw UsageError("--grid-n must be at least 41");
  const ClassifyReport rep = classify(p);

  // Outside the theory the scanner's verdict is the only one available.
  const bool outside = rep.cls == SignClass::OutsideTheory;
  std::optional<SignClass> empirical;
  if ((a.empirical || outside) && rep.cls != SignClass::NotUniquelySolvable)
    empirical = empirical_classify(p, a.grid_n);
  const std::string label = outside ? "empirical (outside theory)" : "empirical";
  const bool checked = a.empirical && empirical.has_value();
  const bool agree = !checked || compatible(rep.cls, *empirical);

  const FrontierDistances& d = rep.frontier_distances;
  if (r.json_mode()) {
    json doc{{"params", params_json(p)},
             {"class", to_string(rep.cls)},
             {"delta1_bound", rep.delta1_bound},
             {"frontier_distances",
              {{"to_g", optional_json(d.to_g)},
               {"to_f", optional_json(d.to_f)},
               {"to_k", optional_json(d.to_k)},
               {"to_delta1", optional_json(d.to_delta1)}}}};
    if (empirical) doc["empirical"] = {{"class", to_string(*empirical)}, {"label", label}, {"grid_n", a.grid_n}};
    if (checked) doc["agreement"] = agree;
    r.out() << doc.dump() << '\n';
  } else {
    r.out() << "class: " << to_string(rep.cls) << '\n'
            << "delta1_bound: " << format_double(rep.delta1_bound) << '\n'
            << "distance_to_g: " << optional_text(d.to_g) << '\n'
            << "distance_to_f: " << optional_text(d.to_f) << '\n'
            << "distance_to_k: " << optional_text(d.to_k) << '\n'
            << "distance_to_delta1: " << optional_text(d.to_delta1) << '\n';
    if (empirical) r.out() << label << ": " << to_string(*empirical) << " (grid " << a.grid_n << ")\n";
    if (checked) r.out() << "agreement: " << (agree ? "yes" : "no") << '\n';
  }
  if (!agree) {
    r.err() << "error: analytic class " << to_string(rep.cls) << " disagrees with empirical class "
            << to_string(*empirical) << '\n';
    return kExitDisagreement;
  }
  return kExitOk;
}

void load_job(SolveArgs& a) {
  std::ifstream in(a.job);
  if (!in) throw UsageError("cannot open job file '" + a.job + "'");
  json job;
  try {
    job = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("job file '" + a.job + "' is not valid JSON: " + e.what());
  }
  if (!job.is_object()) throw UsageError("job file must hold a JSON object");
  try {
    auto fill = [&job](const char* key, auto& field, bool& has) {
      if (!has && job.contains(key)) {
        job.at(key).get_to(field);
        has = true;
      }
    };
    fill("M", a.M, a.has_M);
    fill("delta1", a.d1, a.has_d1);
    fill("delta2", a.d2, a.has_d2);
    fill("sigma", a.sigma, a.has_sigma);
    fill("method", a.method, a.has_method);
    fill("n", a.n, a.has_n);
    fill("panels", a.panels, a.has_panels);
  } catch (const json::exception& e) {
    throw UsageError("job file field has the wrong type: " + std::string(e.what()));
  }
}

void write_solution_header(std::ostream& out, const SolveReport& rep) {
  out << "# " << to_string(rep.method) << " bc_residual_1=" << format_double(rep.bc_residuals[0])
      << " bc_residual_2=" << format_double(rep.bc_residuals[1])
      << " ode_residual_max=" << format_double(rep.ode_residual_max) << '\n';
}

json solution_json(const SolveReport& rep) {
  return {{"method", to_string(rep.method)},
          {"u", rep.u},
          {"bc_residuals", rep.bc_residuals},
          {"ode_residual_max", rep.ode_residual_max}};
}

int cmd_solve(Reporter& r, SolveArgs a) {
  if (!a.job.empty()) load_job(a);
  if (!a.has_M || !a.has_d1 || !a.has_d2) throw UsageError("solve needs --M, --d1 and --d2 (flags or job file)");
  if (!a.has_sigma) throw UsageError("solve needs --sigma (flag or job file)");
  if (a.method != "green" && a.method != "fd" && a.method != "both")
    throw UsageError("--method must be green, fd or both");
  if (a.n < 8) throw UsageError("--n must be at least 8");
  if (a.panels < 2 || a.panels % 2 != 0) throw UsageError("--panels must be an even number >= 2");
  const ProblemParams p{a.M, a.d1, a.d2};
  require_finite(p);

  std::optional<SigmaFn> sigma;
  try {
    sigma = parse_sigma(a.sigma);
  } catch (const ParseError& e) {
    json expected = e.expected();
    return r.fail(kExitUsage, {{"error", "parse"},
                               {"message", std::string(e.what())},
                               {"offset", e.offset()},
                               {"expected", expected}});
  }
  if (const Resonance res = resonance(p)) return r.resonant(res);

  std::vector<SolveReport> reports;
  try {
    if (a.method != "fd") reports.push_back(solve_green(p, *sigma, {a.panels, true}, a.n + 1));
    if (a.method != "green") reports.push_back(solve_fd(p, *sigma, a.n));
  } catch (const IllConditionedSystem& e) {
    return r.fail(kExitResonance, {{"error", "ill-conditioned"},
                                   {"message", std::string(e.what())},
                                   {"condition_estimate", e.condition_estimate()}});
  } catch (const EvalError& e) {
    return r.fail(kExitUsage, {{"error", "evaluation"},
                               {"message", std::string(e.what())},
                               {"subexpression", e.subexpression()}});
  }

  const std::vector<double>& grid = reports.front().grid;
  std::vector<double> diff;
  double max_diff = 0.0;
  if (reports.size() == 2) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      diff.push_back(std::abs(reports[0].u[i] - reports[1].u[i]));
      max_diff = std::max(max_diff, diff.back());
    }
  }

  if (r.json_mode()) {
    json doc{{"params", params_json(p)}, {"sigma", a.sigma}, {"n", a.n}, {"t", grid}, {"solutions", json::array()}};
    if (a.method != "fd") doc["panels"] = a.panels;
    for (const auto& rep : reports) doc["solutions"].push_back(solution_json(rep));
    if (reports.size() == 2) doc["max_abs_diff"] = max_diff;
    r.out() << doc.dump() << '\n';
    return kExitOk;
  }

  std::ostream& out = r.out();
  out << "# M=" << format_double(p.M) << " delta1=" << format_double(p.delta1) << " delta2=" << format_double(p.delta2)
      << '\n'
      << "# sigma=" << a.sigma << '\n'
      << "# n=" << a.n;
  if (a.method != "fd") out << " panels=" << a.panels;
  out << '\n';
  for (const auto& rep : reports) write_solution_header(out, rep);
  if (reports.size() == 2) {
    out << "# max_abs_diff=" << format_double(max_diff) << '\n' << "t,u_green,u_fd,abs_diff\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
      out << format_double(grid[i]) << ',' << format_double(reports[0].u[i]) << ','
          << format_double(reports[1].u[i]) << ',' << format_double(diff[i]) << '\n';
  } else {
    out << "t,u\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
      out << format_double(grid[i]) << ',' << format_double(reports[0].u[i]) << '\n';
  }
  return kExitOk;
}

std::pair<Param, double> parse_fix(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) throw UsageError("--fix must look like name=value, got '" + spec + "'");
  const auto name = parse_param(spec.substr(0, eq));
  if (!name) throw UsageError("unknown parameter '" + spec.substr(0, eq) + "' in --fix");
  const std::string text = spec.substr(eq + 1);
  double value = 0.0;
  const char* first = text.data();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value))
    throw UsageError("invalid value '" + text + "' in --fix");
  return {*name, value};
}

int cmd_scan(Reporter& r, const ScanArgs& a) {
  Axis x, y;
  try {
    x = parse_axis(a.x);
    y = parse_axis(a.y);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto [fixed_name, fixed_value] = parse_fix(a.fix);
  ScanOptions opts;
  if (a.provenance == "analytic") {
    opts.provenance = Provenance::Analytic;
  } else if (a.provenance == "empirical") {
    opts.provenance = Provenance::Empirical;
  } else if (a.provenance == "both") {
    opts.provenance = Provenance::Both;
  } else {
    throw UsageError("--provenance must be analytic, empirical or both");
  }
  if (a.grid_n < 41) throw UsageError("--grid-n must be at least 41");
  opts.empirical_grid_n = a.grid_n;
  opts.threads = a.threads;

  ScanGrid grid;
  try {
    grid = run_scan(x, y, fixed_name, fixed_value, opts);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (!a.svg.empty()) {
    std::ofstream svg(a.svg);
    if (!svg) throw UsageError("cannot write '" + a.svg + "'");
    write_scan_svg(svg, grid);
  }
  if (r.json_mode()) {
    r.out() << scan_json(grid) << '\n';
  } else {
    write_scan_csv(r.out(), grid);
  }
  return kExitOk;
}

// Negative control for the suite itself: GREEN_VERIFY_TAMPER=jump shifts the
// right-hand derivative on the diagonal so kernel.jump must fail.
KernelOps verify_ops() {
  KernelOps ops = default_kernel_ops();
  const char* tamper = std::getenv("GREEN_VERIFY_TAMPER");
  if (tamper && std::string_view(tamper) == "jump") {
    ops.dt = [](const ProblemParams& p, double t, double s, Side side) {
      const double d = eval_green_dt(p, t, s, side);
      return t == s && side == Side::Right ? d + 0.5 : d;
    };
  }
  return ops;
}

int cmd_verify(Reporter& r, const Globals& g, const VerifyArgs& a) {
  VerifyOptions opts;
  opts.seed = g.seed;
  opts.fast = a.fast;
  const std::vector<CheckResult> results = run_verify(opts, verify_ops());

  std::vector<std::string> failed;
  for (const auto& c : results)
    if (!c.passed) failed.push_back(c.name);

  if (r.json_mode()) {
    json checks = json::array();
    for (const auto& c : results)
      checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}, {"seconds", c.seconds}});
    r.out() << json{{"seed", g.seed}, {"fast", a.fast}, {"passed", failed.empty()}, {"checks", checks}}.dump()
            << '\n';
  } else {
    for (const auto& c : results) {
      std::ostringstream line;
      line << (c.passed ? "PASS  " : "FAIL  ") << c.name;
      std::string text = line.str();
      text.resize(std::max<std::size_t>(text.size() + 1, 36), ' ');
      char secs[32];
      std::snprintf(secs, sizeof secs, "%7.3f s  ", c.seconds);
      r.out() << text << secs << c.detail << '\n';
    }
    r.out() << (results.size() - failed.size()) << '/' << results.size() << " checks passed (seed " << g.seed
            << (a.fast ? ", fast" : "") << ")\n";
  }
  if (!failed.empty()) {
    std::string names;
    for (const auto& n : failed) names += (names.empty() ? "" : ", ") + n;
    r.err() << "verify failed: " << names << '\n';
    return kExitVerifyFailed;
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Green's function kernels, sign regions and oracles for u'' + M u = sigma with integral boundary "
               "conditions",
               "intgreen"};
  app.require_subcommand(1);

  Globals g;
  app.add_flag("--json", g.json, "Machine-readable JSON output");
  app.add_option("--seed", g.seed, "Random seed for verify");
  app.add_option("--out", g.out_path, "Write primary output to this file");

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Evaluate G and its one-sided t-derivatives at (t, s)")->fallthrough();
  eval->add_option("--M", ev.M, "Coefficient M")->required();
  eval->add_option("--d1", ev.d1, "delta1")->required();
  eval->add_option("--d2", ev.d2, "delta2")->required();
  eval->add_option("--t", ev.t, "t in [0,1]")->required();
  eval->add_option("--s", ev.s, "s in [0,1]")->required();

  ClassifyArgs cl;
  auto* cls = app.add_subcommand("classify", "Analytic sign class of G on [0,1]^2")->fallthrough();
  cls->add_option("--M", cl.M, "Coefficient M")->required();
  cls->add_option("--d1", cl.d1, "delta1")->required();
  cls->add_option("--d2", cl.d2, "delta2")->required();
  cls->add_flag("--empirical", cl.empirical, "Also run the grid scanner and compare");
  cls->add_option("--grid-n", cl.grid_n, "Scanner grid size (>= 41)");

  SolveArgs so;
  auto* solve = app.add_subcommand("solve", "Solve the boundary value problem for a forcing term")->fallthrough();
  auto* o_M = solve->add_option("--M", so.M, "Coefficient M");
  auto* o_d1 = solve->add_option("--d1", so.d1, "delta1");
  auto* o_d2 = solve->add_option("--d2", so.d2, "delta2");
  auto* o_sigma = solve->add_option("--sigma", so.sigma, "Forcing term sigma(t)");
  auto* o_method = solve->add_option("--method", so.method, "green, fd or both");
  auto* o_n = solve->add_option("--n", so.n, "Intervals of the output grid");
  auto* o_panels = solve->add_option("--panels", so.panels, "Simpson panels over [0,1]");
  solve->add_option("--job", so.job, "JSON job file with M, delta1, delta2, sigma, method, n");

  ScanArgs sc;
  auto* scan = app.add_subcommand("scan", "Classify a 2-D grid of parameters")->fallthrough();
  scan->add_option("--x", sc.x, "Axis name:min:max:steps")->required();
  scan->add_option("--y", sc.y, "Axis name:min:max:steps")->required();
  scan->add_option("--fix", sc.fix, "Fixed parameter name=value")->required();
  scan->add_option("--svg", sc.svg, "Also write an SVG map");
  scan->add_option("--provenance", sc.provenance, "analytic, empirical or both");
  scan->add_option("--grid-n", sc.grid_n, "Scanner grid size for empirical cells");
  scan->add_option("--threads", sc.threads, "Worker threads (default GREEN_THREADS or all cores)");

  VerifyArgs vf;
  auto* verify = app.add_subcommand("verify", "Run the invariant suite")->fallthrough();
  verify->add_flag("--fast", vf.fast, "Halve grids and sample counts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    if (g.json) {
      out << json{{"error", "usage"}, {"message", std::string(e.what())}}.dump() << '\n';
    } else {
      app.exit(e, out, err);
    }
    return kExitUsage;
  }

  std::ofstream file;
  if (!g.out_path.empty()) {
    file.open(g.out_path);
    if (!file) {
      err << "error: cannot write '" << g.out_path << "'\n";
      return kExitUsage;
    }
  }
  Reporter reporter(g, g.out_path.empty() ? out : file, err);

  so.has_M = o_M->count() > 0;
  so.has_d1 = o_d1->count() > 0;
  so.has_d2 = o_d2->count() > 0;
  so.has_sigma = o_sigma->count() > 0;
  so.has_method = o_method->count() > 0;
  so.has_n = o_n->count() > 0;
  so.has_panels = o_panels->count() > 0;

  try {
    if (eval->parsed()) return cmd_eval(reporter, ev);
    if (cls->parsed()) return cmd_classify(reporter, cl);
    if (solve->parsed()) return cmd_solve(reporter, so);
    if (scan->parsed()) return cmd_scan(reporter, sc);
    if (verify->parsed()) return cmd_verify(reporter, g, vf);
  } catch (const UsageError& e) {
    return reporter.usage(e.what());
  } catch (const ResonanceError& e) {
    return reporter.resonant(e.resonance());
  }
  return kExitUsage;
}

}  // namespace intgreen::cli
