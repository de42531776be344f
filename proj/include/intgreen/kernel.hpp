#pragma once

#include <stdexcept>
#include <string>

namespace intgreen {

// Green's function of
//
//     u''(t) + M u(t) = sigma(t),  t in [0,1],
//     u(0)  - u(1)  = delta1 * int_0^1 u,
//     u'(0) - u'(1) = delta2 * int_0^1 u.
//
// For M != 0 the kernel is the periodic kernel plus a rank-two correction
//
//     G(t,s) = G_per(t,s) + (delta1 * w1(t) + delta2 * w2(t)) / (M - delta2),
//
// where w2(t) = G_per(t,0) and w1 = w2'. For M = 0 a separate piecewise
// polynomial is used.

enum class Regime { PosM, NegM, ZeroM };

struct ProblemParams {
  double M = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;

  Regime regime() const { return M > 0.0 ? Regime::PosM : (M < 0.0 ? Regime::NegM : Regime::ZeroM); }
};

const char* to_string(Regime r);

// Within these distances the closed forms have lost all significant digits,
// so the parameters are treated as resonant.
inline constexpr double kEigenvalueGuard = 1e-9;
inline constexpr double kDelta2Guard = 1e-12;

enum class ResonanceKind {
  None,
  PeriodicEigenvalue,  // M = 4 k^2 pi^2, k >= 1 (k = 0 for eval_base at M = 0)
  Delta2EqualsM,       // delta2 = M, M != 0
  ZeroMZeroDelta2,     // M = 0 and delta2 = 0
};

struct Resonance {
  ResonanceKind kind = ResonanceKind::None;
  int k = 0;                // index of the nearest periodic eigenvalue
  double eigenvalue = 0.0;  // 4 k^2 pi^2

  explicit operator bool() const { return kind != ResonanceKind::None; }
  std::string describe() const;
};

Resonance resonance(const ProblemParams& p);
inline bool solvable(const ProblemParams& p) { return !resonance(p); }

class ResonanceError : public std::domain_error {
 public:
  explicit ResonanceError(Resonance r);
  const Resonance& resonance() const { return r_; }

 private:
  Resonance r_;
};

enum class Branch { LowerTriangle, UpperTriangle };
enum class Side { Left, Right };

const char* to_string(Branch b);

// Branch of the piecewise kernel; the tie t == s goes to LowerTriangle.
struct KernelPoint {
  double t = 0.0;
  double s = 0.0;
  Branch branch = Branch::LowerTriangle;

  static KernelPoint at(double t, double s) {
    return {t, s, s <= t ? Branch::LowerTriangle : Branch::UpperTriangle};
  }
};

// Pre-factored kernel for one parameter triple. Construction throws
// ResonanceError when the problem is not uniquely solvable; afterwards every
// member is a pure function of (t, s).
class GreenKernel {
 public:
  explicit GreenKernel(const ProblemParams& p);

  const ProblemParams& params() const { return p_; }

  double value(double t, double s) const;
  double value(double t, double s, Branch branch) const;

  // One-sided t-derivative. Only matters at t == s: Right is the limit from
  // t > s (LowerTriangle), Left the limit from t < s (UpperTriangle).
  double dt(double t, double s, Side side) const;
  double dt(double t, double s, Branch branch) const;

  // Second t-derivative off the diagonal.
  double dtt(double t, double s) const;

 private:
  ProblemParams p_;
  double m_ = 0.0;
  double trig_scale_ = 0.0;  // 1 / (2 sin(m/2)) for M > 0
  double corr1_ = 0.0;       // delta1 / (M - delta2)
  double corr2_ = 0.0;       // delta2 / (M - delta2)

  double per(double x) const;
  double per_d1(double x) const;
  double per_d2(double x) const;
};

// Periodic kernel G_{M,0,0}. Requires M != 0 and M != 4 k^2 pi^2.
double eval_base(double M, double t, double s);
double eval_omega2(double M, double t);
double eval_omega1(double M, double t);

double eval_green(const ProblemParams& p, double t, double s);
double eval_green_dt(const ProblemParams& p, double t, double s, Side side);
double eval_green_dtt(const ProblemParams& p, double t, double s);

}  // namespace intgreen
