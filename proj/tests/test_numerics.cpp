#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "intgreen/numerics.hpp"
#include "intgreen/verify.hpp"
#include "oracles.hpp"

using namespace intgreen;

namespace {

constexpr double kPi = std::numbers::pi;

double max_abs_error(const SolveReport& r, const std::function<double(double)>& exact) {
  double e = 0.0;
  for (std::size_t i = 0; i < r.grid.size(); ++i) e = std::max(e, std::abs(r.u[i] - exact(r.grid[i])));
  return e;
}

// Exact 1-norm condition number via Gauss-Jordan inversion; small n only.
double exact_condition(const std::vector<double>& a, int n) {
  std::vector<double> aug(static_cast<std::size_t>(n) * 2 * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug[i * 2 * n + j] = a[i * n + j];
    aug[i * 2 * n + n + i] = 1.0;
  }
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(aug[r * 2 * n + c]) > std::abs(aug[piv * 2 * n + c])) piv = r;
    for (int j = 0; j < 2 * n; ++j) std::swap(aug[c * 2 * n + j], aug[piv * 2 * n + j]);
    const double d = aug[c * 2 * n + c];
    for (int j = 0; j < 2 * n; ++j) aug[c * 2 * n + j] /= d;
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = aug[r * 2 * n + c];
      for (int j = 0; j < 2 * n; ++j) aug[r * 2 * n + j] -= f * aug[c * 2 * n + j];
    }
  }
  auto norm1 = [n](auto at) {
    double best = 0.0;
    for (int j = 0; j < n; ++j) {
      double col = 0.0;
      for (int i = 0; i < n; ++i) col += std::abs(at(i, j));
      best = std::max(best, col);
    }
    return best;
  };
  return norm1([&](int i, int j) { return a[i * n + j]; }) *
         norm1([&](int i, int j) { return aug[i * 2 * n + n + j]; });
}

}  // namespace

TEST_CASE("simpson is exact on cubics and rejects odd panel counts") {
  const double v = simpson([](double x) { return 4 * x * x * x - 3 * x * x + 2; }, -1.0, 2.0, 2);
  CHECK(v == doctest::Approx(15.0 - 9.0 + 6.0).epsilon(1e-14));
  CHECK_THROWS_AS(simpson([](double) { return 1.0; }, 0, 1, 3), std::invalid_argument);
  CHECK_THROWS_AS(simpson([](double) { return 1.0; }, 0, 1, 0), std::invalid_argument);
}

TEST_CASE("green quadrature examples") {
  const SolveReport a = solve_green({1.0, -2.0, 0.0}, parse_sigma("1*t"), {512, true}, 65);
  CHECK(max_abs_error(a, [](double t) { return t; }) <= 1e-10);
  const SolveReport b = solve_green({1.0, 0.0, 12.0}, parse_sigma("-2 + 1*t*(1-t)"), {512, true}, 65);
  CHECK(max_abs_error(b, [](double t) { return t * (1 - t); }) <= 1e-7);
  const SolveReport c = solve_green({0.0, 0.0, 4.0}, parse_sigma("0"), {512, true}, 17);
  CHECK(max_abs_error(c, [](double) { return 0.0; }) <= 1e-14);
  CHECK(a.method == SolveMethod::GreenQuadrature);
  CHECK(a.grid.front() == 0.0);
  CHECK(a.grid.back() == 1.0);
  for (std::size_t i = 1; i < a.grid.size(); ++i) CHECK(a.grid[i] > a.grid[i - 1]);
  for (const auto* r : {&a, &b, &c}) {
    CHECK(std::abs(r->bc_residuals[0]) <= 1e-8);
    CHECK(std::abs(r->bc_residuals[1]) <= 1e-8);
    CHECK(std::isfinite(r->ode_residual_max));
  }
  CHECK(b.ode_residual_max <= 1e-6);
}

TEST_CASE("green quadrature argument checks") {
  const SigmaFn one = parse_sigma("1");
  CHECK_THROWS_AS(solve_green({1.0, 0.0, 0.0}, one, {0, true}, 10), std::invalid_argument);
  CHECK_THROWS_AS(solve_green({1.0, 0.0, 0.0}, one, {7, true}, 10), std::invalid_argument);
  CHECK_THROWS_AS(solve_green({1.0, 0.0, 0.0}, one, {8, true}, 2), std::invalid_argument);
  CHECK_THROWS_AS(solve_green({1.0, 0.0, 1.0}, one, {8, true}, 10), ResonanceError);
}

TEST_CASE("finite difference examples") {
  const SolveReport a = solve_fd({1.0, -2.0, 0.0}, parse_sigma("1*t"), 64);
  CHECK(max_abs_error(a, [](double t) { return t; }) <= 1e-12);
  CHECK(a.method == SolveMethod::FiniteDifference);
  CHECK(a.grid.size() == 65);

  const SigmaFn sigma = parse_sigma("-2+1*t*(1-t)");
  std::array<double, 3> errs{};
  const std::array<int, 3> ns{64, 128, 256};
  for (int i = 0; i < 3; ++i) {
    const SolveReport r = solve_fd({1.0, 0.0, 12.0}, sigma, ns[i]);
    errs[i] = max_abs_error(r, [](double t) { return t * (1 - t); });
  }
  const double p = std::log2(errs[0] / errs[1]);
  CHECK(p >= 1.8);
  CHECK(p <= 2.2);
  CHECK(std::log2(errs[1] / errs[2]) == doctest::Approx(2.0).epsilon(0.1));

  try {
    solve_fd({4 * kPi * kPi, 0.0, 1.0}, parse_sigma("1"), 64);
    FAIL("expected IllConditionedSystem");
  } catch (const IllConditionedSystem& e) {
    CHECK(e.condition_estimate() > 0.0);
  }
  CHECK_THROWS_AS(solve_fd({1.0, 0.0, 0.0}, parse_sigma("1"), 4), std::invalid_argument);
}

TEST_CASE("dense LU solves and estimates conditioning") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n : {3, 6, 12}) {
    std::vector<double> a(static_cast<std::size_t>(n) * n);
    for (auto& v : a) v = u(rng);
    for (int i = 0; i < n; ++i) a[i * n + i] += 0.5;
    std::vector<double> x(n), b(n, 0.0);
    for (auto& v : x) v = u(rng);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) b[i] += a[i * n + j] * x[j];
    const DenseLU lu(a, n);
    const auto sol = lu.solve(b);
    for (int i = 0; i < n; ++i) CHECK(sol[i] == doctest::Approx(x[i]).epsilon(1e-10));
    std::vector<double> bt(n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) bt[i] += a[j * n + i] * x[j];
    const auto solt = lu.solve_transposed(bt);
    for (int i = 0; i < n; ++i) CHECK(solt[i] == doctest::Approx(x[i]).epsilon(1e-10));
    // The estimate is a lower bound that is usually within a small factor.
    const double exact = exact_condition(a, n);
    CHECK(lu.condition_estimate() <= exact * (1 + 1e-10));
    CHECK(lu.condition_estimate() >= exact / 10.0);
  }
  const DenseLU singular({1.0, 2.0, 2.0, 4.0}, 2);
  CHECK(singular.singular());
}

TEST_CASE("convergence study examples") {
  const std::array<int, 4> ns{32, 64, 128, 256};
  const ConvergenceStudy fd = convergence_study({1.0, 0.0, 12.0}, parse_sigma("-2 + 1*t*(1-t)"),
                                                SolveMethod::FiniteDifference, ns,
                                                [](double t) { return t * (1 - t); });
  CHECK(fd.fitted_order == doctest::Approx(2.0).epsilon(0.1));
  const ConvergenceStudy fd_richardson = convergence_study({1.0, 0.0, 12.0}, parse_sigma("-2 + 1*t*(1-t)"),
                                                           SolveMethod::FiniteDifference, ns);
  CHECK(fd_richardson.fitted_order == doctest::Approx(2.0).epsilon(0.1));

  for (SolveMethod m : {SolveMethod::FiniteDifference, SolveMethod::GreenQuadrature}) {
    const ConvergenceStudy lin =
        convergence_study({1.0, -2.0, 0.0}, parse_sigma("1*t"), m, ns, [](double t) { return t; });
    // FD is exact on linear u; Simpson needs enough panels to reach 1e-10.
    CHECK(lin.points.back().max_error <= 1e-10);
    if (m == SolveMethod::FiniteDifference)
      for (const auto& pt : lin.points) CHECK(pt.max_error <= 1e-10);
  }

  const std::array<int, 4> cross{16, 32, 64, 128};
  const auto diffs = cross_method_differences({0.0, 1.0, 4.0}, parse_sigma("sin(2*pi*t)"), cross);
  for (std::size_t i = 1; i < diffs.size(); ++i) {
    const double ratio = diffs[i - 1] / diffs[i];
    CAPTURE(ratio);
    CHECK(ratio >= 3.4);
    CHECK(ratio <= 4.6);
  }

  const std::array<int, 2> too_short{8, 16};
  CHECK_THROWS_AS(convergence_study({1, 0, 0}, parse_sigma("1"), SolveMethod::FiniteDifference, too_short),
                  std::invalid_argument);
  const std::array<int, 3> not_multiple{8, 12, 16};
  CHECK_THROWS_AS(convergence_study({1, 0, 0}, parse_sigma("1"), SolveMethod::FiniteDifference, not_multiple),
                  std::invalid_argument);
}

TEST_CASE("kink splitting restores Simpson order") {
  const ProblemParams p{2.0, 0.5, -1.0};
  const GreenKernel kernel(p);
  const auto sigma = [](double s) { return std::exp(s); };
  // Worst case over kink positions; a single t can sit where the plain error cancels.
  const double ts[] = {0.1, 0.3, 1.0 / 3.0, 0.7, 0.9};
  std::vector<ConvergencePoint> split, plain;
  for (int n : {16, 32, 64, 128}) {
    split.push_back({n, 0.0});
    plain.push_back({n, 0.0});
  }
  for (double t : ts) {
    const auto ref = static_cast<double>(oracle::integral_split(
        [&](oracle::ld s) { return oracle::green(p.M, p.delta1, p.delta2, t, s) * std::exp(s); }, t, 20000));
    for (std::size_t i = 0; i < split.size(); ++i) {
      const int n = split[i].n;
      split[i].max_error = std::max(split[i].max_error, std::abs(green_integral(kernel, sigma, t, {n, true}) - ref));
      plain[i].max_error = std::max(plain[i].max_error, std::abs(green_integral(kernel, sigma, t, {n, false}) - ref));
    }
  }
  CAPTURE(fit_order(plain));
  CHECK(fit_order(split) >= 3.5);
  CHECK(fit_order(plain) < 2.5);
  CHECK(split.back().max_error * 100 < plain.back().max_error);
}

TEST_CASE("property: green quadrature and finite differences agree") {
  std::mt19937_64 rng(61);
  const char* sources[] = {"1", "t", "sin(2*pi*t)", "exp(t)"};
  const int n = 256;
  for (int k = 0; k < 12; ++k) {
    const ProblemParams p = random_params(rng, static_cast<Regime>(k % 3));
    const SigmaFn sigma = parse_sigma(sources[k % 4]);
    const SolveReport fd = solve_fd(p, sigma, n);
    const SolveReport green = solve_green(p, sigma, {4 * n, true}, n + 1);
    double scale = 1.0, diff = 0.0;
    for (int i = 0; i <= n; ++i) {
      scale = std::max(scale, std::abs(green.u[i]));
      diff = std::max(diff, std::abs(fd.u[i] - green.u[i]));
    }
    CAPTURE(p.M);
    CHECK(diff <= 5.0 * scale / (n * n));
    for (const auto* r : {&fd, &green}) {
      CHECK(std::abs(r->bc_residuals[0]) <= 1e-8);
      CHECK(std::abs(r->bc_residuals[1]) <= 1e-8);
    }
  }
}

TEST_CASE("empirical classifier examples") {
  CHECK(empirical_classify({1.0, 0.0, 0.0}, 41) == SignClass::StrictlyPositive);
  CHECK(empirical_classify({-1.0, 0.0, 0.0}, 41) == SignClass::StrictlyNegative);
  CHECK(empirical_classify({0.0, 0.0, 8.5}, 41) == SignClass::SignChanging);
  CHECK(empirical_classify({0.0, 0.0, 8.0}, 201) == SignClass::OnFrontier);
  CHECK(empirical_classify({kPi * kPi, 0.0, 0.0}, 201) == SignClass::OnFrontier);
  CHECK_THROWS_AS(empirical_classify({1.0, 0.0, 0.0}, 40), std::invalid_argument);
  CHECK_THROWS_AS(empirical_classify({1.0, 0.0, 1.0}, 41), ResonanceError);
  // An explicit tolerance overrides the default.
  CHECK(empirical_classify({1.0, 0.0, 0.0}, 41, 1e6) == SignClass::OnFrontier);
}

TEST_CASE("fit_order recovers a known slope") {
  std::vector<ConvergencePoint> pts;
  for (int n : {10, 20, 40, 80}) pts.push_back({n, 3.0 / std::pow(n, 2.5)});
  CHECK(fit_order(pts) == doctest::Approx(2.5).epsilon(1e-12));
}
