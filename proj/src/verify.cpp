#include "intgreen/verify.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "intgreen/format.hpp"
#include "intgreen/numerics.hpp"
#include "intgreen/regions.hpp"

namespace intgreen {

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Simpson over [0,1] in t for a kernel column, cut at t = s, `panels` per piece.
template <typename F>
double column_integral(F&& f, double s, int panels) {
  double total = 0.0;
  if (s > 0.0) total += simpson(f, 0.0, s, panels);
  if (s < 1.0) total += simpson(f, s, 1.0, panels);
  return total;
}

struct Tracker {
  double worst = 0.0;
  std::string where;

  void observe(double err, const ProblemParams& p, const std::string& at) {
    if (!(err <= worst) || std::isnan(err)) {
      worst = std::isnan(err) ? std::numeric_limits<double>::infinity() : err;
      where = "M=" + format_double(p.M) + " d1=" + format_double(p.delta1) + " d2=" + format_double(p.delta2) + " " + at;
    }
  }
  CheckResult result(std::string name, double limit) const {
    CheckResult r;
    r.name = std::move(name);
    r.passed = worst <= limit;
    r.detail = "max error " + format_double(worst) + " (limit " + format_double(limit) + ")";
    if (!r.passed) r.detail += " at " + where;
    return r;
  }
};

std::vector<ProblemParams> mixed_triples(std::mt19937_64& rng, int per_regime) {
  std::vector<ProblemParams> out;
  for (const Regime r : {Regime::PosM, Regime::NegM, Regime::ZeroM})
    for (int i = 0; i < per_regime; ++i) out.push_back(random_params(rng, r));
  return out;
}

class Suite {
 public:
  Suite(const VerifyOptions& opts, const KernelOps& ops) : opts_(opts), ops_(ops), rng_(opts.seed) {}

  std::vector<CheckResult> run() {
    timed(&Suite::kernel_jump);
    timed(&Suite::kernel_boundary_conditions);
    timed(&Suite::kernel_ode);
    timed(&Suite::kernel_symmetry);
    timed(&Suite::kernel_base_integral);
    timed(&Suite::kernel_omega);
    timed(&Suite::kernel_decomposition);
    timed(&Suite::kernel_monotone_delta2);
    timed(&Suite::regions_ordering);
    timed(&Suite::regions_k_continuity);
    timed(&Suite::regions_zero_limits);
    timed(&Suite::regions_delta1_symmetry);
    timed(&Suite::regions_frontier_sharpness);
    timed(&Suite::numerics_manufactured);
    timed(&Suite::numerics_oracle_equivalence);
    timed(&Suite::numerics_bc_residuals);
    timed(&Suite::numerics_empirical_agreement);
    return std::move(results_);
  }

 private:
  VerifyOptions opts_;
  KernelOps ops_;
  std::mt19937_64 rng_;
  std::vector<CheckResult> results_;

  int scaled(int full) const { return opts_.fast ? std::max(1, full / 2) : full; }

  void timed(CheckResult (Suite::*check)()) {
    const auto start = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = (this->*check)();
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results_.push_back(std::move(r));
  }

  CheckResult kernel_jump() {
    Tracker tr;
    for (const auto& p : mixed_triples(rng_, 4)) {
      for (int k = 0; k < scaled(50); ++k) {
        const double s = uniform(rng_, 0.02, 0.98);
        const double jump = ops_.dt(p, s, s, Side::Right) - ops_.dt(p, s, s, Side::Left);
        tr.observe(std::abs(jump - 1.0), p, "s=" + format_double(s));
      }
    }
    auto r = tr.result("kernel.jump", 1e-9);
    return r;
  }

  CheckResult kernel_boundary_conditions() {
    Tracker tr;
    const int panels = opts_.fast ? 128 : 256;
    for (const auto& p : mixed_triples(rng_, 4)) {
      for (int k = 0; k < scaled(10); ++k) {
        const double s = uniform(rng_, 0.02, 0.98);
        const double integral = column_integral([&](double t) { return ops_.value(p, t, s); }, s, panels);
        const double r1 = ops_.value(p, 0.0, s) - ops_.value(p, 1.0, s) - p.delta1 * integral;
        const double r2 = ops_.dt(p, 0.0, s, Side::Right) - ops_.dt(p, 1.0, s, Side::Left) - p.delta2 * integral;
        tr.observe(std::max(std::abs(r1), std::abs(r2)), p, "s=" + format_double(s));
      }
    }
    return tr.result("kernel.integral_bc", 1e-9);
  }

  CheckResult kernel_ode() {
    Tracker tr;
    const int n = opts_.fast ? 21 : 41;
    for (const auto& p : mixed_triples(rng_, 4)) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const double t = static_cast<double>(i) / (n - 1), s = static_cast<double>(j) / (n - 1);
          if (std::abs(t - s) <= 0.01) continue;
          tr.observe(std::abs(ops_.dtt(p, t, s) + p.M * ops_.value(p, t, s)), p,
                     "t=" + format_double(t) + " s=" + format_double(s));
        }
      }
    }
    return tr.result("kernel.ode", 1e-8);
  }

  CheckResult kernel_symmetry() {
    Tracker tr;
    const int n = opts_.fast ? 21 : 41;
    for (int k = 0; k < 12; ++k) {
      ProblemParams p;
      do {
        p = random_params(rng_, k % 3 == 0 ? Regime::PosM : (k % 3 == 1 ? Regime::NegM : Regime::ZeroM));
      } while (p.M >= kPi2);
      const ProblemParams mirrored{p.M, -p.delta1, p.delta2};
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const double t = static_cast<double>(i) / (n - 1), s = static_cast<double>(j) / (n - 1);
          const double g = ops_.value(p, t, s);
          const double h = ops_.value(mirrored, 1.0 - t, 1.0 - s);
          tr.observe(std::abs(g - h) / (1.0 + std::abs(g)), p, "t=" + format_double(t) + " s=" + format_double(s));
        }
      }
    }
    return tr.result("kernel.symmetry", 1e-12);
  }

  CheckResult kernel_base_integral() {
    Tracker tr;
    for (const double M : {0.5, -0.5, 1.0, -1.0, 4.0, -4.0, 9.0}) {
      const ProblemParams p{M, 0.0, 0.0};
      for (int k = 0; k < scaled(20); ++k) {
        const double s = uniform(rng_, 0.0, 1.0);
        const double integral = column_integral([&](double t) { return ops_.value(p, t, s); }, s, 256);
        tr.observe(std::abs(integral - 1.0 / M), p, "s=" + format_double(s));
      }
    }
    return tr.result("kernel.base_integral", 1e-10);
  }

  CheckResult kernel_omega() {
    Tracker tr;
    for (const double M : {0.5, -0.5, 1.0, -1.0, 4.0, -4.0, 9.0, 30.0, -30.0}) {
      const ProblemParams p{M, 0.0, 0.0};
      tr.observe(std::abs(eval_omega1(M, 0.0) - 0.5), p, "w1(0)");
      tr.observe(std::abs(eval_omega1(M, 1.0) + 0.5), p, "w1(1)");
      for (int i = 0; i <= 20; ++i) {
        const double t = i / 20.0;
        tr.observe(std::abs(eval_omega2(M, t) - ops_.value(p, t, 0.0)), p, "w2 t=" + format_double(t));
      }
    }
    return tr.result("kernel.omega", 1e-14);
  }

  CheckResult kernel_decomposition() {
    Tracker tr;
    for (const Regime r : {Regime::PosM, Regime::NegM}) {
      for (int k = 0; k < 6; ++k) {
        const ProblemParams p = random_params(rng_, r);
        const ProblemParams p0{p.M, 0.0, p.delta2};
        for (int i = 0; i <= 10; ++i) {
          const double t = i / 10.0, s = uniform(rng_, 0.0, 1.0);
          const double diff = ops_.value(p, t, s) - ops_.value(p0, t, s);
          const double expected = p.delta1 * eval_omega1(p.M, t) / (p.M - p.delta2);
          tr.observe(std::abs(diff - expected), p, "t=" + format_double(t));
        }
      }
    }
    return tr.result("kernel.decomposition", 1e-13);
  }

  CheckResult kernel_monotone_delta2() {
    CheckResult r{"kernel.monotone_delta2", true, "", 0.0};
    int checked = 0;
    for (int k = 0; k < scaled(200); ++k) {
      const double M = uniform(rng_, 0.1, kPi2 - 0.1);
      const double d2 = uniform(rng_, -20.0, M - 2e-3);
      const double t = uniform(rng_, 0.0, 1.0), s = uniform(rng_, 0.0, 1.0);
      const double a = ops_.value({M, 0.0, d2}, t, s);
      const double b = ops_.value({M, 0.0, d2 + 1e-3}, t, s);
      ++checked;
      if (!(b > a)) {
        r.passed = false;
        r.detail = "not increasing at M=" + format_double(M) + " d2=" + format_double(d2);
        return r;
      }
    }
    r.detail = std::to_string(checked) + " samples increasing";
    return r;
  }

  CheckResult regions_ordering() {
    CheckResult r{"regions.ordering", true, "", 0.0};
    for (int k = 0; k < 200; ++k) {
      double M = uniform(rng_, -25.0, kPi2);
      if (M == 0.0 || M == kPi2) continue;
      const double g = g_of_M(M), kk = k_of_M(M), f = f_of_M(M);
      if (!(g < kk && kk < M && M < f)) {
        r.passed = false;
        r.detail = "g<k<M<f violated at M=" + format_double(M);
        return r;
      }
    }
    r.detail = "g < k < M < f on 200 samples";
    return r;
  }

  CheckResult regions_k_continuity() {
    Tracker tr;
    for (const double M : {-4.0, -1.0, -0.25, 0.0, 0.25, 1.0, 4.0}) {
      const double k = k_of_M(M);
      const double m = std::sqrt(std::abs(M));
      double plateau;
      double root;
      if (M == 0.0) {
        plateau = 2.0;
        root = 0.5 * std::sqrt(-8.0 * k - k * k);
      } else if (M > 0.0) {
        plateau = m / std::tan(0.5 * m);
        const double c = std::cos(0.5 * m) * (m * m - k);
        root = std::sqrt(c * c - k * k) / m;
      } else {
        plateau = m / std::tanh(0.5 * m);
        const double c = (m * m + k) * std::cosh(0.5 * m);
        root = std::sqrt(k * k - c * c) / m;
      }
      tr.observe(std::abs(plateau - root), {M, 0.0, k}, "at k(M)");
      tr.observe(std::abs(delta1_bound_pos(M, k) - root), {M, 0.0, k}, "bound at k(M)");
    }
    return tr.result("regions.k_continuity", 1e-9);
  }

  CheckResult regions_zero_limits() {
    Tracker tr;
    for (const double M : {1e-4, -1e-4}) {
      const ProblemParams p{M, 0.0, 0.0};
      tr.observe(std::abs(f_of_M(M) - 8.0), p, "f");
      tr.observe(std::abs(g_of_M(M) + 8.0), p, "g");
      tr.observe(std::abs(k_of_M(M) + 4.0), p, "k");
      tr.observe(std::abs(delta1_bound_pos(M, -1.0) - 2.0), p, "bound_pos");
      tr.observe(std::abs(delta1_bound_neg(M, 4.0) - 1.0), p, "bound_neg");
    }
    return tr.result("regions.zero_limits", 1e-3);
  }

  CheckResult regions_delta1_symmetry() {
    CheckResult r{"regions.delta1_symmetry", true, "", 0.0};
    for (int k = 0; k < scaled(2000); ++k) {
      const ProblemParams p{uniform(rng_, -25.0, 45.0), uniform(rng_, -6.0, 6.0), uniform(rng_, -25.0, 45.0)};
      if (classify(p).cls != classify({p.M, -p.delta1, p.delta2}).cls) {
        r.passed = false;
        r.detail = "class differs under delta1 -> -delta1 at M=" + format_double(p.M);
        return r;
      }
    }
    r.detail = "class invariant under delta1 -> -delta1";
    return r;
  }

  CheckResult regions_frontier_sharpness() {
    CheckResult r{"regions.frontier_sharpness", true, "", 0.0};
    const int n = opts_.fast ? 101 : 201;
    for (const double M : {-1.0, 0.0, 1.0}) {
      const double f = f_of_M(M);
      auto edge_max = [&](double d2) {
        double hi = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) hi = std::max(hi, ops_.value({M, 0.0, d2}, 1.0, static_cast<double>(j) / (n - 1)));
        return hi;
      };
      const double below = edge_max(f - 1e-4), above = edge_max(f + 1e-4);
      if (!(below < 0.0 && above > 0.0)) {
        r.passed = false;
        r.detail = "edge maximum does not change sign across f(M) at M=" + format_double(M);
        return r;
      }
    }
    r.detail = "edge maximum changes sign across f(M) for M in {-1, 0, 1}";
    return r;
  }

  CheckResult numerics_manufactured() {
    Tracker tr;
    const int n = opts_.fast ? 128 : 256;
    const SigmaFn linear = parse_sigma("1*t");
    const SigmaFn quadratic = parse_sigma("-2 + 1*t*(1-t)");
    const ProblemParams p1{1.0, -2.0, 0.0}, p2{1.0, 0.0, 12.0};
    const SolveReport g1 = solve_green(p1, linear, {2 * n, true}, 33);
    const SolveReport f1 = solve_fd(p1, linear, n);
    for (std::size_t i = 0; i < g1.u.size(); ++i) tr.observe(std::abs(g1.u[i] - g1.grid[i]), p1, "green u=t");
    for (std::size_t i = 0; i < f1.u.size(); ++i) tr.observe(std::abs(f1.u[i] - f1.grid[i]), p1, "fd u=t");
    const SolveReport g2 = solve_green(p2, quadratic, {2 * n, true}, 33);
    for (std::size_t i = 0; i < g2.u.size(); ++i) {
      const double t = g2.grid[i];
      tr.observe(std::abs(g2.u[i] - t * (1.0 - t)), p2, "green u=t(1-t)");
    }
    for (const auto* rep : {&g1, &f1, &g2})
      for (const double res : rep->bc_residuals) tr.observe(std::abs(res), p1, "bc residual");
    return tr.result("numerics.manufactured", 1e-8);
  }

  CheckResult numerics_oracle_equivalence() {
    Tracker tr;
    const int n = opts_.fast ? 128 : 256;
    const char* sources[] = {"1", "t", "sin(2*pi*t)", "exp(t)"};
    const int triples = scaled(30);
    for (int k = 0; k < triples; ++k) {
      const ProblemParams p = random_params(rng_, k % 3 == 0 ? Regime::PosM : (k % 3 == 1 ? Regime::NegM : Regime::ZeroM));
      const SigmaFn sigma = parse_sigma(sources[k % 4]);
      const SolveReport fd = solve_fd(p, sigma, n);
      const SolveReport green = solve_green(p, sigma, {4 * n, true}, n + 1);
      double scale = 1.0, diff = 0.0;
      for (int i = 0; i <= n; ++i) {
        scale = std::max(scale, std::abs(green.u[i]));
        diff = std::max(diff, std::abs(fd.u[i] - green.u[i]));
      }
      tr.observe(diff / (5.0 * scale / (static_cast<double>(n) * n)), p, sources[k % 4]);
    }
    return tr.result("numerics.oracle_equivalence", 1.0);
  }

  CheckResult numerics_bc_residuals() {
    Tracker tr;
    const int n = opts_.fast ? 128 : 256;
    const SigmaFn sigma = parse_sigma("exp(t) + sin(2*pi*t)");
    for (const auto& p : mixed_triples(rng_, scaled(4))) {
      for (const SolveReport& rep : {solve_green(p, sigma, {2 * n, true}, n + 1), solve_fd(p, sigma, n)})
        tr.observe(std::max(std::abs(rep.bc_residuals[0]), std::abs(rep.bc_residuals[1])), p, to_string(rep.method));
    }
    return tr.result("numerics.bc_residuals", 1e-8);
  }

  CheckResult numerics_empirical_agreement() {
    CheckResult r{"numerics.empirical_agreement", true, "", 0.0};
    const int wanted = opts_.fast ? 100 : 500;
    const int grid_n = opts_.fast ? 101 : 201;
    int agreed = 0;
    while (agreed < wanted) {
      const double M = uniform(rng_, -25.0, 15.0);
      const double d2 = uniform(rng_, -25.0, 15.0);
      const double d1 = uniform(rng_, -4.0, 4.0);
      const ProblemParams p{M, d1, d2};
      const ClassifyReport rep = classify(p);
      if (!has_frontier_margin(p, rep, 0.01)) continue;
      const SignClass emp = empirical_classify(p, grid_n);
      if (emp != rep.cls) {
        r.passed = false;
        r.detail = "analytic " + std::string(to_string(rep.cls)) + " vs empirical " + std::string(to_string(emp)) +
                   " at M=" + format_double(M) + " d1=" + format_double(d1) + " d2=" + format_double(d2);
        return r;
      }
      ++agreed;
    }
    r.detail = std::to_string(agreed) + " triples agree";
    return r;
  }

};

}  // namespace

bool has_frontier_margin(const ProblemParams& p, const ClassifyReport& rep, double rel) {
  auto far = [rel](double d, double ref) { return std::abs(d) >= rel * std::max(1.0, std::abs(ref)); };
  if (rep.cls != SignClass::StrictlyPositive && rep.cls != SignClass::StrictlyNegative &&
      rep.cls != SignClass::SignChanging)
    return false;
  if (!far(p.delta2 - p.M, p.M) || !far(p.M - kPi2, kPi2)) return false;
  if (p.M > 0.0) {
    const double k = std::round(std::sqrt(p.M) / (2.0 * std::numbers::pi));
    if (k >= 1 && !far(p.M - 4.0 * k * k * kPi2, p.M)) return false;
  }
  if (p.M < kPi2) {
    const auto& d = rep.frontier_distances;
    if (d.to_g && !far(*d.to_g, p.delta2 - *d.to_g)) return false;
    if (d.to_f && !far(*d.to_f, p.delta2 + *d.to_f)) return false;
    if (d.to_delta1 && !far(*d.to_delta1, rep.delta1_bound)) return false;
  }
  return true;
}

KernelOps default_kernel_ops() {
  return {[](const ProblemParams& p, double t, double s) { return eval_green(p, t, s); },
          [](const ProblemParams& p, double t, double s, Side side) { return eval_green_dt(p, t, s, side); },
          [](const ProblemParams& p, double t, double s) { return eval_green_dtt(p, t, s); }};
}

ProblemParams random_params(std::mt19937_64& rng, Regime regime) {
  ProblemParams p;
  switch (regime) {
    case Regime::PosM: p.M = uniform(rng, 0.2, 20.0); break;
    case Regime::NegM: p.M = uniform(rng, -20.0, -0.2); break;
    case Regime::ZeroM: p.M = 0.0; break;
  }
  p.delta1 = uniform(rng, -3.0, 3.0);
  do {
    p.delta2 = uniform(rng, -3.0, 3.0);
  } while (std::abs(p.delta2 - p.M) < 0.5);
  return p;
}

std::vector<CheckResult> run_verify(const VerifyOptions& opts, const KernelOps& ops) {
  return Suite(opts, ops).run();
}

}  // namespace intgreen
