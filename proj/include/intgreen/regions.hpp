#pragma once

#include <optional>
#include <string_view>

#include "intgreen/kernel.hpp"

namespace intgreen {

enum class SignClass {
  StrictlyPositive,
  StrictlyNegative,
  SignChanging,
  DegenerateNonNegative,
  OnFrontier,
  NotUniquelySolvable,
  OutsideTheory,
};

std::string_view to_string(SignClass c);
std::optional<SignClass> parse_sign_class(std::string_view name);

/// Relative tolerance that turns an equality with a frontier into OnFrontier.
inline constexpr double kFrontierRelTol = 1e-10;

/// Half-width of the band around M = pi^2 that is treated as M = pi^2.
inline constexpr double kPiSquaredRelTol = 1e-8;

/// Signed distances to the frontier curves, positive on the constant-sign
/// side. Only the curves meaningful for the triple are present.
struct FrontierDistances {
  std::optional<double> to_g;       // delta2 - g(M)
  std::optional<double> to_f;       // f(M) - delta2
  std::optional<double> to_k;       // delta2 - k(M); switch point, not a sign frontier
  std::optional<double> to_delta1;  // delta1_bound - |delta1|

  /// Smallest magnitude among the sign frontiers (g, f, delta1).
  std::optional<double> min_sign_frontier() const;
};

struct ClassifyReport {
  SignClass cls = SignClass::SignChanging;
  /// Half-width in delta1 of the constant-sign band at (M, delta2); zero when
  /// no delta1 gives constant sign.
  double delta1_bound = 0.0;
  FrontierDistances frontier_distances;
};

// Frontier curves in the (M, delta2) plane, extended continuously to M = 0.
// All require M <= pi^2 and throw std::domain_error otherwise.
//
//   (g(M), M)  : delta2 range where G_{M,0,delta2} > 0
//   (M, f(M))  : delta2 range where G_{M,0,delta2} < 0
//   k(M)       : switch between the two delta1 bounds on the positive side
double f_of_M(double M);
double g_of_M(double M);
double k_of_M(double M);

/// delta1 half-width on the positive side; requires g(M) < delta2 < M.
double delta1_bound_pos(double M, double delta2);

/// delta1 half-width on the negative side; requires M < delta2 < f(M).
/// Uses 2 (M - delta2) G_{M,0,delta2}(1, 1/2) in every regime, which equals
/// 2 - delta2/4 at M = 0.
double delta1_bound_neg(double M, double delta2);

ClassifyReport classify(const ProblemParams& p);

}  // namespace intgreen
