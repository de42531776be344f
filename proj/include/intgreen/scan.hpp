#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "intgreen/regions.hpp"

namespace intgreen {

enum class Param { M, Delta1, Delta2 };

std::string_view to_string(Param p);
std::optional<Param> parse_param(std::string_view name);

struct Axis {
  Param name = Param::M;
  double min = 0.0;
  double max = 1.0;
  int steps = 2;

  /// Points are centre +- half-width * (2j - (steps-1)) / (steps-1), so an
  /// axis symmetric about zero yields exact negatives and the endpoints are
  /// exact.
  double value(int j) const;
};

/// "name:min:max:steps", e.g. "delta2:-20:15:351". Throws std::invalid_argument.
Axis parse_axis(std::string_view spec);

enum class Provenance { Analytic, Empirical, Both };

std::string_view to_string(Provenance p);

struct ScanCell {
  SignClass cls = SignClass::SignChanging;
  std::optional<SignClass> empirical;  // present for Empirical / Both
  double delta1_bound = 0.0;
  std::optional<double> frontier_min_distance;
};

struct ScanGrid {
  Axis x;
  Axis y;
  Param fixed_name = Param::Delta1;
  double fixed_value = 0.0;
  Provenance provenance = Provenance::Analytic;
  int empirical_grid_n = 41;
  std::vector<ScanCell> cells;  // row-major: index = i * y.steps + j for x index i, y index j

  const ScanCell& cell(int i, int j) const { return cells[static_cast<std::size_t>(i) * y.steps + j]; }
  ProblemParams params_at(int i, int j) const;
};

struct ScanOptions {
  Provenance provenance = Provenance::Analytic;
  int empirical_grid_n = 41;
  /// Worker threads; 0 means GREEN_THREADS or hardware concurrency.
  unsigned threads = 0;
};

/// GREEN_THREADS when it holds a positive integer, else hardware concurrency.
unsigned default_scan_threads();

/// Classifies every cell in parallel; the result does not depend on the
/// thread count. Axes must name two distinct parameters; the third is fixed.
ScanGrid run_scan(const Axis& x, const Axis& y, Param fixed_name, double fixed_value, const ScanOptions& opts = {});

/// Header "x,y,class,delta1_bound,frontier_min_distance" (plus
/// ",empirical_class" with Both provenance), LF line endings,
/// x-major row order, shortest round-trip numbers, empty field for a
/// missing distance. With Empirical provenance `class` holds the empirical
/// verdict.
void write_scan_csv(std::ostream& out, const ScanGrid& grid);
std::string scan_json(const ScanGrid& grid);
void write_scan_svg(std::ostream& out, const ScanGrid& grid);

}  // namespace intgreen
