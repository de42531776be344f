#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "intgreen/kernel.hpp"
#include "intgreen/regions.hpp"

namespace intgreen {

/// Kernel entry points exercised by the invariant suite. Swapping one of them
/// for a deliberately broken version is how the suite's own negative
/// controls are run.
struct KernelOps {
  std::function<double(const ProblemParams&, double, double)> value;
  std::function<double(const ProblemParams&, double, double, Side)> dt;
  std::function<double(const ProblemParams&, double, double)> dtt;
};

KernelOps default_kernel_ops();

struct VerifyOptions {
  std::uint64_t seed = 7;
  bool fast = false;  // halves grids and sample counts
};

struct CheckResult {
  std::string name;  // e.g. "kernel.jump"
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Draws a nonresonant triple away from resonance in the given regime, with
/// |M| <= 20 and |delta_i| <= 3.
ProblemParams random_params(std::mt19937_64& rng, Regime regime);

/// True when the analytic verdict is a strict one (positive, negative or
/// sign-changing) and every resonance line and frontier curve is at least
/// `rel` away, measured relative to max(1, |reference value|).
bool has_frontier_margin(const ProblemParams& p, const ClassifyReport& report, double rel);

std::vector<CheckResult> run_verify(const VerifyOptions& opts, const KernelOps& ops = default_kernel_ops());

}  // namespace intgreen
