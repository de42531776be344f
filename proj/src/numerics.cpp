#include "intgreen/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "intgreen/format.hpp"

namespace intgreen {

namespace {

int even_panels(double exact) {
  int n = std::max(2, static_cast<int>(std::ceil(exact - 1e-9)));
  if (n % 2) ++n;
  return n;
}

void check_quadrature(const QuadratureSpec& quad) {
  if (quad.panels < 2)
    throw std::invalid_argument("quadrature needs at least 2 panels, got " + std::to_string(quad.panels));
  if (quad.panels % 2)
    throw std::invalid_argument("composite Simpson needs an even panel count, got " + std::to_string(quad.panels));
}

std::vector<double> uniform_grid(int points) {
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) g[i] = static_cast<double>(i) / (points - 1);
  g.back() = 1.0;
  return g;
}

// Integrates integrand(s, branch) over [0,1] for a kernel column at t.
template <typename Integrand>
double split_integral(Integrand&& integrand, double t, const QuadratureSpec& quad) {
  if (!quad.split_at_kink) {
    return simpson([&](double s) { return integrand(s, KernelPoint::at(t, s).branch); }, 0.0, 1.0,
                   quad.panels);
  }
  double total = 0.0;
  if (t > 0.0) {
    total += simpson([&](double s) { return integrand(s, Branch::LowerTriangle); }, 0.0, t,
                     even_panels(quad.panels * t));
  }
  if (t < 1.0) {
    total += simpson([&](double s) { return integrand(s, Branch::UpperTriangle); }, t, 1.0,
                     even_panels(quad.panels * (1.0 - t)));
  }
  return total;
}

double green_dt_integral(const GreenKernel& kernel, const std::function<double(double)>& sigma, double t,
                         const QuadratureSpec& quad) {
  return split_integral([&](double s, Branch b) { return kernel.dt(t, s, b) * sigma(s); }, t, quad);
}

double trapezoid(std::span<const double> u, double h) {
  double sum = 0.5 * (u.front() + u.back());
  for (std::size_t i = 1; i + 1 < u.size(); ++i) sum += u[i];
  return sum * h;
}

}  // namespace

const char* to_string(SolveMethod m) {
  return m == SolveMethod::GreenQuadrature ? "green-quadrature" : "finite-difference";
}

IllConditionedSystem::IllConditionedSystem(const std::string& what, double condition_estimate)
    : std::runtime_error(what), condition_estimate_(condition_estimate) {}

double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  if (panels < 2 || panels % 2) throw std::invalid_argument("simpson: panel count must be even and >= 2");
  const double h = (b - a) / panels;
  double odd = 0.0, even = 0.0;
  for (int i = 1; i < panels; ++i) {
    (i % 2 ? odd : even) += f(a + i * h);
  }
  return h / 3.0 * (f(a) + 4.0 * odd + 2.0 * even + f(b));
}

double green_integral(const GreenKernel& kernel, const std::function<double(double)>& sigma, double t,
                      const QuadratureSpec& quad) {
  check_quadrature(quad);
  return split_integral([&](double s, Branch b) { return kernel.value(t, s, b) * sigma(s); }, t, quad);
}

SolveReport solve_green(const ProblemParams& p, const SigmaFn& sigma, const QuadratureSpec& quad, int n_out) {
  check_quadrature(quad);
  if (n_out < 3) throw std::invalid_argument("solve_green needs n_out >= 3");
  const GreenKernel kernel(p);
  const std::function<double(double)> f = [&sigma](double s) { return sigma(s); };

  SolveReport report;
  report.method = SolveMethod::GreenQuadrature;
  report.grid = uniform_grid(n_out);
  report.u.resize(n_out);
  for (int i = 0; i < n_out; ++i) report.u[i] = green_integral(kernel, f, report.grid[i], quad);

  // int u by the same Simpson rule on the panel grid.
  const std::vector<double> panel_grid = uniform_grid(quad.panels + 1);
  std::vector<double> u_panel(panel_grid.size());
  for (std::size_t j = 0; j < panel_grid.size(); ++j) u_panel[j] = green_integral(kernel, f, panel_grid[j], quad);
  const double h = 1.0 / quad.panels;
  double odd = 0.0, even = 0.0;
  for (int j = 1; j < quad.panels; ++j) (j % 2 ? odd : even) += u_panel[j];
  const double integral = h / 3.0 * (u_panel.front() + 4.0 * odd + 2.0 * even + u_panel.back());

  const double du0 = green_dt_integral(kernel, f, 0.0, quad);
  const double du1 = green_dt_integral(kernel, f, 1.0, quad);
  report.bc_residuals = {u_panel.front() - u_panel.back() - p.delta1 * integral, du0 - du1 - p.delta2 * integral};

  const double ho = 1.0 / (n_out - 1);
  for (int i = 1; i + 1 < n_out; ++i) {
    const double upp = (report.u[i - 1] - 2.0 * report.u[i] + report.u[i + 1]) / (ho * ho);
    report.ode_residual_max =
        std::max(report.ode_residual_max, std::abs(upp + p.M * report.u[i] - sigma(report.grid[i])));
  }
  return report;
}

DenseLU::DenseLU(std::vector<double> a, int n) : n_(n), lu_(std::move(a)), piv_(n) {
  for (int j = 0; j < n_; ++j) {
    double col = 0.0;
    for (int i = 0; i < n_; ++i) col += std::abs(lu_[i * n_ + j]);
    norm1_ = std::max(norm1_, col);
  }
  for (int k = 0; k < n_; ++k) {
    int p = k;
    for (int i = k + 1; i < n_; ++i)
      if (std::abs(lu_[i * n_ + k]) > std::abs(lu_[p * n_ + k])) p = i;
    piv_[k] = p;
    if (p != k)
      for (int j = 0; j < n_; ++j) std::swap(lu_[k * n_ + j], lu_[p * n_ + j]);
    const double pivot = lu_[k * n_ + k];
    if (pivot == 0.0) {
      singular_ = true;
      continue;
    }
    for (int i = k + 1; i < n_; ++i) {
      const double l = lu_[i * n_ + k] / pivot;
      lu_[i * n_ + k] = l;
      if (l == 0.0) continue;
      for (int j = k + 1; j < n_; ++j) lu_[i * n_ + j] -= l * lu_[k * n_ + j];
    }
  }
}

std::vector<double> DenseLU::solve(std::vector<double> b) const {
  for (int k = 0; k < n_; ++k) std::swap(b[k], b[piv_[k]]);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < i; ++j) b[i] -= lu_[i * n_ + j] * b[j];
  for (int i = n_ - 1; i >= 0; --i) {
    for (int j = i + 1; j < n_; ++j) b[i] -= lu_[i * n_ + j] * b[j];
    b[i] /= lu_[i * n_ + i];
  }
  return b;
}

std::vector<double> DenseLU::solve_transposed(std::vector<double> b) const {
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < i; ++j) b[i] -= lu_[j * n_ + i] * b[j];
    b[i] /= lu_[i * n_ + i];
  }
  for (int i = n_ - 1; i >= 0; --i)
    for (int j = i + 1; j < n_; ++j) b[i] -= lu_[j * n_ + i] * b[j];
  for (int k = n_ - 1; k >= 0; --k) std::swap(b[k], b[piv_[k]]);
  return b;
}

double DenseLU::condition_estimate() const {
  if (singular_) return std::numeric_limits<double>::infinity();
  auto norm1 = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0, [](double acc, double x) { return acc + std::abs(x); });
  };
  std::vector<double> x(n_, 1.0 / n_);
  double est = 0.0;
  for (int iter = 0; iter < 5; ++iter) {
    const std::vector<double> y = solve(x);
    est = std::max(est, norm1(y));
    std::vector<double> xi(n_);
    for (int i = 0; i < n_; ++i) xi[i] = y[i] >= 0.0 ? 1.0 : -1.0;
    const std::vector<double> z = solve_transposed(xi);
    int jmax = 0;
    double ztx = 0.0;
    for (int i = 0; i < n_; ++i) {
      if (std::abs(z[i]) > std::abs(z[jmax])) jmax = i;
      ztx += z[i] * x[i];
    }
    if (std::abs(z[jmax]) <= ztx) break;
    std::fill(x.begin(), x.end(), 0.0);
    x[jmax] = 1.0;
  }
  // Higham's alternating-sign probe.
  std::vector<double> alt(n_);
  for (int i = 0; i < n_; ++i) alt[i] = (i % 2 ? -1.0 : 1.0) * (1.0 + static_cast<double>(i) / std::max(1, n_ - 1));
  est = std::max(est, 2.0 * norm1(solve(alt)) / (3.0 * n_));
  const double cond = norm1_ * est;
  return std::isfinite(cond) ? cond : std::numeric_limits<double>::infinity();
}

SolveReport solve_fd(const ProblemParams& p, const SigmaFn& sigma, int n) {
  if (n < 8) throw std::invalid_argument("solve_fd needs n >= 8 intervals");
  const int N = n + 1;
  const double h = 1.0 / n;
  std::vector<double> grid = uniform_grid(N);
  std::vector<double> a(static_cast<std::size_t>(N) * N, 0.0);
  std::vector<double> rhs(N, 0.0);
  auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * N + j]; };

  // Row 0: u_0 - u_n - delta1 * trapezoid(u) = 0.
  for (int j = 0; j < N; ++j) at(0, j) = -p.delta1 * h * (j == 0 || j == n ? 0.5 : 1.0);
  at(0, 0) += 1.0;
  at(0, n) -= 1.0;

  // Interior rows scaled by h^2.
  for (int i = 1; i < n; ++i) {
    at(i, i - 1) = 1.0;
    at(i, i) = p.M * h * h - 2.0;
    at(i, i + 1) = 1.0;
    rhs[i] = h * h * sigma(grid[i]);
  }

  // Row n: u'(0) - u'(1) - delta2 * trapezoid(u) = 0 with one-sided stencils.
  for (int j = 0; j < N; ++j) at(n, j) = -p.delta2 * h * (j == 0 || j == n ? 0.5 : 1.0);
  const double c = 0.5 / h;
  at(n, 0) += -3.0 * c;
  at(n, 1) += 4.0 * c;
  at(n, 2) += -1.0 * c;
  at(n, n) += -3.0 * c;
  at(n, n - 1) += 4.0 * c;
  at(n, n - 2) += -1.0 * c;

  const DenseLU lu(std::move(a), N);
  const double cond = lu.condition_estimate();
  if (const Resonance r = resonance(p)) {
    throw IllConditionedSystem("finite-difference system is ill-conditioned (" + r.describe() +
                                   "), condition estimate " + format_double(cond),
                               cond);
  }
  if (lu.singular() || !(cond < kMaxCondition)) {
    throw IllConditionedSystem("finite-difference system is ill-conditioned, condition estimate " +
                                   format_double(cond),
                               cond);
  }

  SolveReport report;
  report.method = SolveMethod::FiniteDifference;
  report.u = lu.solve(std::move(rhs));
  report.grid = std::move(grid);
  const auto& u = report.u;
  const double integral = trapezoid(u, h);
  const double du0 = (-3.0 * u[0] + 4.0 * u[1] - u[2]) * c;
  const double du1 = (3.0 * u[n] - 4.0 * u[n - 1] + u[n - 2]) * c;
  report.bc_residuals = {u[0] - u[n] - p.delta1 * integral, du0 - du1 - p.delta2 * integral};
  for (int i = 1; i < n; ++i) {
    const double upp = (u[i - 1] - 2.0 * u[i] + u[i + 1]) / (h * h);
    report.ode_residual_max =
        std::max(report.ode_residual_max, std::abs(upp + p.M * u[i] - sigma(report.grid[i])));
  }
  return report;
}

SignClass empirical_classify(const ProblemParams& p, int grid_n, std::optional<double> tol) {
  if (grid_n < 41) throw std::invalid_argument("empirical_classify needs grid_n >= 41");
  const GreenKernel kernel(p);
  const double h = 1.0 / (grid_n - 1);
  const double hb = 0.25 * h;
  constexpr double band = 0.05;
  const int band_steps = static_cast<int>(std::floor(band / hb + 1e-9));

  std::vector<double> t_base = uniform_grid(grid_n);
  for (int j = 1; j <= band_steps; ++j) {
    t_base.push_back(j * hb);
    t_base.push_back(1.0 - j * hb);
  }
  std::vector<double> s_values = uniform_grid(grid_n);
  s_values.push_back(0.5);

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  auto visit = [&](double t, double s) {
    const double g = kernel.value(t, s);
    lo = std::min(lo, g);
    hi = std::max(hi, g);
  };
  for (const double s : s_values) {
    for (const double t : t_base) visit(t, s);
    for (int j = -band_steps; j <= band_steps; ++j) {
      const double t = s + j * hb;
      if (t >= 0.0 && t <= 1.0) visit(t, s);
    }
  }
  const double threshold = tol.value_or(1e-10 * (1.0 + std::max(std::abs(lo), std::abs(hi))));
  if (lo > threshold) return SignClass::StrictlyPositive;
  if (hi < -threshold) return SignClass::StrictlyNegative;
  if (lo < -threshold && hi > threshold) return SignClass::SignChanging;
  return SignClass::OnFrontier;
}

double fit_order(std::span<const ConvergencePoint> points) {
  if (points.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& pt : points) {
    const double x = std::log(1.0 / pt.n);
    const double y = std::log(pt.max_error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(points.size());
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

ConvergenceStudy convergence_study(const ProblemParams& p, const SigmaFn& sigma, SolveMethod method,
                                   std::span<const int> n_list, const std::function<double(double)>& exact) {
  if (n_list.size() < 3) throw std::invalid_argument("convergence_study needs at least 3 resolutions");
  for (std::size_t i = 1; i < n_list.size(); ++i)
    if (n_list[i] <= n_list[i - 1]) throw std::invalid_argument("convergence_study: n_list must increase strictly");
  const int n0 = n_list.front();
  for (const int n : n_list)
    if (n % n0) throw std::invalid_argument("convergence_study: every n must be a multiple of the first");

  std::vector<std::vector<double>> sols;
  for (const int n : n_list) {
    std::vector<double> coarse(n0 + 1);
    if (method == SolveMethod::FiniteDifference) {
      const SolveReport r = solve_fd(p, sigma, n);
      for (int j = 0; j <= n0; ++j) coarse[j] = r.u[static_cast<std::size_t>(j) * (n / n0)];
    } else {
      coarse = solve_green(p, sigma, QuadratureSpec{n, true}, n0 + 1).u;
    }
    sols.push_back(std::move(coarse));
  }

  std::vector<double> ref(n0 + 1);
  if (exact) {
    for (int j = 0; j <= n0; ++j) ref[j] = exact(static_cast<double>(j) / n0);
  } else {
    const double order = method == SolveMethod::FiniteDifference ? 2.0 : 4.0;
    const double ratio = static_cast<double>(n_list.back()) / n_list[n_list.size() - 2];
    const double denom = std::pow(ratio, order) - 1.0;
    const auto& fine = sols.back();
    const auto& prev = sols[sols.size() - 2];
    for (int j = 0; j <= n0; ++j) ref[j] = fine[j] + (fine[j] - prev[j]) / denom;
  }

  ConvergenceStudy study;
  double scale = 1.0;
  for (const double v : ref) scale = std::max(scale, std::abs(v));
  std::vector<ConvergencePoint> fit_points;
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    double err = 0.0;
    for (int j = 0; j <= n0; ++j) err = std::max(err, std::abs(sols[i][j] - ref[j]));
    study.points.push_back({n_list[i], err});
    if (err > 1e-13 * scale) fit_points.push_back(study.points.back());
  }
  study.fitted_order = fit_order(fit_points);
  return study;
}

std::vector<double> cross_method_differences(const ProblemParams& p, const SigmaFn& sigma,
                                             std::span<const int> n_list) {
  std::vector<double> diffs;
  for (const int n : n_list) {
    const SolveReport fd = solve_fd(p, sigma, n);
    const SolveReport green = solve_green(p, sigma, QuadratureSpec{4 * n, true}, n + 1);
    double d = 0.0;
    for (int i = 0; i <= n; ++i) d = std::max(d, std::abs(fd.u[i] - green.u[i]));
    diffs.push_back(d);
  }
  return diffs;
}

}  // namespace intgreen
