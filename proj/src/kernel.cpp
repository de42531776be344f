#include "intgreen/kernel.hpp"

#include <cmath>
#include <numbers>

#include "intgreen/format.hpp"

namespace intgreen {

namespace {

constexpr double kPi = std::numbers::pi;

// cosh(a) / sinh(b) for |a| <= b, b > 0, without overflow for large b and
// without cancellation for small b.
double cosh_over_sinh(double a, double b) {
  const double aa = std::abs(a);
  return std::exp(aa - b) * (1.0 + std::exp(-2.0 * aa)) / -std::expm1(-2.0 * b);
}

// sinh(a) / sinh(b) for |a| <= b, b > 0.
double sinh_over_sinh(double a, double b) {
  const double aa = std::abs(a);
  const double r = std::exp(aa - b) * std::expm1(-2.0 * aa) / std::expm1(-2.0 * b);
  return a < 0.0 ? -r : r;
}

Resonance periodic_eigenvalue(int k) {
  return {ResonanceKind::PeriodicEigenvalue, k, 4.0 * k * k * kPi * kPi};
}

}  // namespace

const char* to_string(Regime r) {
  switch (r) {
    case Regime::PosM: return "PosM";
    case Regime::NegM: return "NegM";
    case Regime::ZeroM: return "ZeroM";
  }
  return "?";
}

const char* to_string(Branch b) {
  return b == Branch::LowerTriangle ? "LowerTriangle" : "UpperTriangle";
}

std::string Resonance::describe() const {
  switch (kind) {
    case ResonanceKind::None: return "uniquely solvable";
    case ResonanceKind::PeriodicEigenvalue:
      return "M equals periodic eigenvalue 4k^2pi^2 = " + format_double(eigenvalue) + " (k = " +
             std::to_string(k) + ")";
    case ResonanceKind::Delta2EqualsM: return "delta2 equals M";
    case ResonanceKind::ZeroMZeroDelta2: return "delta2 equals 0 with M = 0";
  }
  return "?";
}

Resonance resonance(const ProblemParams& p) {
  if (p.M == 0.0) {
    if (std::abs(p.delta2) < kDelta2Guard) return {ResonanceKind::ZeroMZeroDelta2, 0, 0.0};
    return {};
  }
  if (p.M > 0.0) {
    const int k = static_cast<int>(std::lround(std::sqrt(p.M) / (2.0 * kPi)));
    if (k >= 1) {
      const Resonance r = periodic_eigenvalue(k);
      if (std::abs(p.M - r.eigenvalue) < kEigenvalueGuard) return r;
    }
  }
  if (std::abs(p.delta2 - p.M) < kDelta2Guard) return {ResonanceKind::Delta2EqualsM, 0, 0.0};
  return {};
}

ResonanceError::ResonanceError(Resonance r)
    : std::domain_error("problem is not uniquely solvable: " + r.describe()), r_(r) {}

GreenKernel::GreenKernel(const ProblemParams& p) : p_(p) {
  if (const Resonance r = resonance(p)) throw ResonanceError(r);
  if (p.M != 0.0) {
    m_ = std::sqrt(std::abs(p.M));
    if (p.M > 0.0) trig_scale_ = 0.5 / std::sin(0.5 * m_);
    corr1_ = p.delta1 / (p.M - p.delta2);
    corr2_ = p.delta2 / (p.M - p.delta2);
  }
}

// Periodic kernel as a function of the wrapped offset x in [0,1]; it also
// gives w2(t) = per(t) and w1(t) = per_d1(t).
double GreenKernel::per(double x) const {
  const double a = m_ * (x - 0.5);
  if (p_.M > 0.0) return trig_scale_ * std::cos(a) / m_;
  return -cosh_over_sinh(a, 0.5 * m_) / (2.0 * m_);
}

double GreenKernel::per_d1(double x) const {
  const double a = m_ * (x - 0.5);
  if (p_.M > 0.0) return -trig_scale_ * std::sin(a);
  return -0.5 * sinh_over_sinh(a, 0.5 * m_);
}

double GreenKernel::per_d2(double x) const {
  const double a = m_ * (x - 0.5);
  if (p_.M > 0.0) return -m_ * trig_scale_ * std::cos(a);
  return -0.5 * m_ * cosh_over_sinh(a, 0.5 * m_);
}

double GreenKernel::value(double t, double s) const { return value(t, s, KernelPoint::at(t, s).branch); }

double GreenKernel::value(double t, double s, Branch branch) const {
  const bool lower = branch == Branch::LowerTriangle;
  if (p_.M == 0.0) {
    const double d1 = p_.delta1, d2 = p_.delta2;
    const double common = -2.0 + d1 * (2.0 * t - 1.0);
    const double tail = lower ? s * d2 * (1.0 + s - 2.0 * t) : d2 * (s - 1.0) * (s - 2.0 * t);
    return (common - tail) / (2.0 * d2);
  }
  const double x = lower ? t - s : 1.0 + t - s;
  return per(x) + corr1_ * per_d1(t) + corr2_ * per(t);
}

double GreenKernel::dt(double t, double s, Side side) const {
  Branch b = KernelPoint::at(t, s).branch;
  if (t == s) b = side == Side::Right ? Branch::LowerTriangle : Branch::UpperTriangle;
  return dt(t, s, b);
}

double GreenKernel::dt(double t, double s, Branch branch) const {
  const bool lower = branch == Branch::LowerTriangle;
  if (p_.M == 0.0) {
    const double d1 = p_.delta1, d2 = p_.delta2;
    return lower ? (d1 + s * d2) / d2 : (d1 + d2 * (s - 1.0)) / d2;
  }
  const double x = lower ? t - s : 1.0 + t - s;
  return per_d1(x) + corr1_ * per_d2(t) + corr2_ * per_d1(t);
}

double GreenKernel::dtt(double t, double s) const {
  if (p_.M == 0.0) return 0.0;
  const double x = s <= t ? t - s : 1.0 + t - s;
  // Third derivative of the periodic kernel: -M * per_d1.
  return per_d2(x) + corr1_ * (-p_.M * per_d1(t)) + corr2_ * per_d2(t);
}

namespace {

GreenKernel base_kernel(double M) {
  if (std::abs(M) < kDelta2Guard) throw ResonanceError(periodic_eigenvalue(0));
  return GreenKernel(ProblemParams{M, 0.0, 0.0});
}

}  // namespace

double eval_base(double M, double t, double s) { return base_kernel(M).value(t, s); }

double eval_omega2(double M, double t) { return base_kernel(M).value(t, 0.0); }

double eval_omega1(double M, double t) { return base_kernel(M).dt(t, 0.0, Side::Right); }

double eval_green(const ProblemParams& p, double t, double s) { return GreenKernel(p).value(t, s); }

double eval_green_dt(const ProblemParams& p, double t, double s, Side side) {
  return GreenKernel(p).dt(t, s, side);
}

double eval_green_dtt(const ProblemParams& p, double t, double s) { return GreenKernel(p).dtt(t, s); }

}  // namespace intgreen
