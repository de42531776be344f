#include "intgreen/regions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "intgreen/format.hpp"

namespace intgreen {

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

void require_theory_range(double M, const char* fn) {
  if (!(M <= kPi2)) throw std::domain_error(std::string(fn) + ": M = " + format_double(M) + " exceeds pi^2");
}

double tol(double ref) { return kFrontierRelTol * std::max(1.0, std::abs(ref)); }

constexpr std::array<std::string_view, 7> kNames = {
    "StrictlyPositive", "StrictlyNegative", "SignChanging",  "DegenerateNonNegative",
    "OnFrontier",       "NotUniquelySolvable", "OutsideTheory",
};

}  // namespace

std::string_view to_string(SignClass c) { return kNames[static_cast<std::size_t>(c)]; }

std::optional<SignClass> parse_sign_class(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i)
    if (kNames[i] == name) return static_cast<SignClass>(i);
  return std::nullopt;
}

std::optional<double> FrontierDistances::min_sign_frontier() const {
  std::optional<double> best;
  for (const auto& d : {to_g, to_f, to_delta1}) {
    if (d && (!best || std::abs(*d) < *best)) best = std::abs(*d);
  }
  return best;
}

// 1 - cos(m/2) = 2 sin^2(m/4) and cosh(m/2) - 1 = 2 sinh^2(m/4) keep the
// small-m limits accurate.
double f_of_M(double M) {
  require_theory_range(M, "f_of_M");
  if (M == 0.0) return 8.0;
  const double m = std::sqrt(std::abs(M));
  if (M > 0.0) {
    const double sq = std::sin(0.25 * m);
    return m * m / (2.0 * sq * sq);
  }
  const double sh = std::sinh(0.25 * m);
  return m * m / (2.0 * sh * sh);
}

double g_of_M(double M) {
  require_theory_range(M, "g_of_M");
  if (M == 0.0) return -8.0;
  const double m = std::sqrt(std::abs(M));
  if (M > 0.0) {
    const double sq = std::sin(0.25 * m);
    return -m * m * std::cos(0.5 * m) / (2.0 * sq * sq);
  }
  if (m > 2.0) return -m * m / (1.0 - 1.0 / std::cosh(0.5 * m));
  const double sh = std::sinh(0.25 * m);
  return -m * m * std::cosh(0.5 * m) / (2.0 * sh * sh);
}

double k_of_M(double M) {
  require_theory_range(M, "k_of_M");
  if (M == 0.0) return -4.0;
  const double m = std::sqrt(std::abs(M));
  const double h = M > 0.0 ? std::tan(0.5 * m) : std::tanh(0.5 * m);
  return -m * m / (h * h);
}

double delta1_bound_pos(double M, double delta2) {
  const double g = g_of_M(M);
  if (!(delta2 > g && delta2 < M))
    throw std::domain_error("delta1_bound_pos: delta2 = " + format_double(delta2) + " outside (g(M), M) = (" +
                            format_double(g) + ", " + format_double(M) + ")");
  const double k = k_of_M(M);
  if (M == 0.0) {
    if (delta2 >= k) return 2.0;
    return 0.5 * std::sqrt(std::max(0.0, -8.0 * delta2 - delta2 * delta2));
  }
  const double m = std::sqrt(std::abs(M));
  if (delta2 > k) return M > 0.0 ? m / std::tan(0.5 * m) : m / std::tanh(0.5 * m);
  double radicand;
  if (M > 0.0) {
    const double c = std::cos(0.5 * m) * (m * m - delta2);
    radicand = c * c - delta2 * delta2;
  } else {
    const double c = (m * m + delta2) * std::cosh(0.5 * m);
    radicand = delta2 * delta2 - c * c;
  }
  return std::sqrt(std::max(0.0, radicand)) / m;
}

double delta1_bound_neg(double M, double delta2) {
  const double f = f_of_M(M);
  if (!(delta2 > M && delta2 < f))
    throw std::domain_error("delta1_bound_neg: delta2 = " + format_double(delta2) + " outside (M, f(M)) = (" +
                            format_double(M) + ", " + format_double(f) + ")");
  const GreenKernel kernel(ProblemParams{M, 0.0, delta2});
  return 2.0 * (M - delta2) * kernel.value(1.0, 0.5);
}

ClassifyReport classify(const ProblemParams& p) {
  ClassifyReport report;
  if (resonance(p)) {
    report.cls = SignClass::NotUniquelySolvable;
    return report;
  }
  if (std::abs(p.M - kPi2) <= kPiSquaredRelTol * kPi2) {
    if (std::abs(p.delta1) > tol(0.0)) {
      report.cls = SignClass::OutsideTheory;
    } else if (p.delta2 >= 0.0 && p.delta2 < p.M) {
      report.cls = SignClass::DegenerateNonNegative;
    } else {
      report.cls = SignClass::SignChanging;
    }
    return report;
  }
  if (p.M > kPi2) {
    report.cls = SignClass::SignChanging;
    return report;
  }

  const double g = g_of_M(p.M), f = f_of_M(p.M), k = k_of_M(p.M);
  auto& dist = report.frontier_distances;
  dist.to_g = p.delta2 - g;
  dist.to_f = f - p.delta2;
  dist.to_k = p.delta2 - k;

  if (std::abs(*dist.to_g) <= tol(g) || std::abs(*dist.to_f) <= tol(f)) {
    report.cls = SignClass::OnFrontier;
    return report;
  }

  const bool positive_band = p.delta2 > g && p.delta2 < p.M;
  const bool negative_band = p.delta2 > p.M && p.delta2 < f;
  if (!positive_band && !negative_band) {
    report.cls = SignClass::SignChanging;
    return report;
  }

  const double bound = positive_band ? delta1_bound_pos(p.M, p.delta2) : delta1_bound_neg(p.M, p.delta2);
  report.delta1_bound = bound;
  dist.to_delta1 = bound - std::abs(p.delta1);
  if (std::abs(*dist.to_delta1) <= tol(bound)) {
    report.cls = SignClass::OnFrontier;
  } else if (*dist.to_delta1 > 0.0) {
    report.cls = positive_band ? SignClass::StrictlyPositive : SignClass::StrictlyNegative;
  } else {
    report.cls = SignClass::SignChanging;
  }
  return report;
}

}  // namespace intgreen
