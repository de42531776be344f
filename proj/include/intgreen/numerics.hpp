#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "intgreen/expr.hpp"
#include "intgreen/kernel.hpp"
#include "intgreen/regions.hpp"

namespace intgreen {

/// Composite Simpson rule. With split_at_kink the integral over s is cut at
/// s = t so each piece sees a smooth integrand; each piece then gets
/// ceil(panels * length) panels rounded up to even (at least 2).
struct QuadratureSpec {
  int panels = 512;
  bool split_at_kink = true;
};

enum class SolveMethod { GreenQuadrature, FiniteDifference };

const char* to_string(SolveMethod m);

struct SolveReport {
  std::vector<double> grid;  // strictly increasing, grid.front() == 0, grid.back() == 1
  std::vector<double> u;
  // u(0) - u(1) - delta1 * int u   and   u'(0) - u'(1) - delta2 * int u
  std::array<double, 2> bc_residuals{};
  double ode_residual_max = 0.0;
  SolveMethod method = SolveMethod::GreenQuadrature;
};

class IllConditionedSystem : public std::runtime_error {
 public:
  IllConditionedSystem(const std::string& what, double condition_estimate);
  double condition_estimate() const { return condition_estimate_; }

 private:
  double condition_estimate_;
};

/// Composite Simpson on [a, b] with an even number of panels.
double simpson(const std::function<double(double)>& f, double a, double b, int panels);

/// int_0^1 G(t, s) sigma(s) ds for a single t.
double green_integral(const GreenKernel& kernel, const std::function<double(double)>& sigma, double t,
                      const QuadratureSpec& quad);

/// u(t_i) = int_0^1 G(t_i, s) sigma(s) ds on n_out uniform points.
SolveReport solve_green(const ProblemParams& p, const SigmaFn& sigma, const QuadratureSpec& quad, int n_out);

/// Second-order finite differences on n uniform intervals: central second
/// differences inside, trapezoid for int u, three-point one-sided u'(0) and
/// u'(1), both nonlocal conditions as dense rows. Throws
/// IllConditionedSystem at resonant parameters or when the condition
/// estimate exceeds kMaxCondition.
SolveReport solve_fd(const ProblemParams& p, const SigmaFn& sigma, int n);

inline constexpr double kMaxCondition = 1e12;

/// Dense LU with partial pivoting, in place on a row-major n x n matrix.
class DenseLU {
 public:
  DenseLU(std::vector<double> a, int n);
  std::vector<double> solve(std::vector<double> b) const;
  std::vector<double> solve_transposed(std::vector<double> b) const;
  /// Hager-Higham estimate of the 1-norm condition number.
  double condition_estimate() const;
  bool singular() const { return singular_; }

 private:
  int n_;
  std::vector<double> lu_;
  std::vector<int> piv_;
  double norm1_ = 0.0;
  bool singular_ = false;
};

/// Brute-force sign of G on a grid_n x grid_n tensor grid with 4x refinement
/// bands within 0.05 of t = 0, t = 1 and t = s. tol defaults to
/// 1e-10 * (1 + max|G|).
SignClass empirical_classify(const ProblemParams& p, int grid_n = 201, std::optional<double> tol = std::nullopt);

struct ConvergencePoint {
  int n = 0;
  double max_error = 0.0;
};

struct ConvergenceStudy {
  std::vector<ConvergencePoint> points;
  double fitted_order = 0.0;  // NaN when every error is at round-off level
};

/// Errors on the coarsest grid's nodes. Every n must be a multiple of
/// n_list.front(). For GreenQuadrature n is the panel count. Without an exact
/// solution the reference is Richardson-extrapolated from the two finest
/// grids at the method's nominal order (2 for FD, 4 for Simpson).
ConvergenceStudy convergence_study(const ProblemParams& p, const SigmaFn& sigma, SolveMethod method,
                                   std::span<const int> n_list,
                                   const std::function<double(double)>& exact = {});

/// max |u_green - u_fd| on the FD nodes for each n (green uses 4n panels).
std::vector<double> cross_method_differences(const ProblemParams& p, const SigmaFn& sigma,
                                             std::span<const int> n_list);

/// Least-squares slope of log(error) against log(1/n).
double fit_order(std::span<const ConvergencePoint> points);

}  // namespace intgreen
