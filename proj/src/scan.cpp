#include "intgreen/scan.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "intgreen/format.hpp"
#include "intgreen/numerics.hpp"

namespace intgreen {

namespace {

double parse_number(std::string_view text, std::string_view what) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || text.empty())
    throw std::invalid_argument("invalid " + std::string(what) + " '" + std::string(text) + "'");
  return v;
}

struct Colour {
  const char* fill;
  const char* label;
};

Colour colour_for(SignClass c) {
  switch (c) {
    case SignClass::StrictlyPositive: return {"#2f6fd6", "positive"};
    case SignClass::StrictlyNegative: return {"#d63a2f", "negative"};
    case SignClass::SignChanging: return {"#e8e8e8", "sign-changing"};
    case SignClass::NotUniquelySolvable: return {"#555555", "resonant"};
    case SignClass::OnFrontier:
    case SignClass::DegenerateNonNegative:
    case SignClass::OutsideTheory: return {"#f2b418", "frontier"};
  }
  return {"#000000", "?"};
}

}  // namespace

std::string_view to_string(Param p) {
  switch (p) {
    case Param::M: return "M";
    case Param::Delta1: return "delta1";
    case Param::Delta2: return "delta2";
  }
  return "?";
}

std::optional<Param> parse_param(std::string_view name) {
  if (name == "M") return Param::M;
  if (name == "delta1" || name == "d1") return Param::Delta1;
  if (name == "delta2" || name == "d2") return Param::Delta2;
  return std::nullopt;
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Analytic: return "analytic";
    case Provenance::Empirical: return "empirical";
    case Provenance::Both: return "both";
  }
  return "?";
}

double Axis::value(int j) const {
  if (j == 0) return min;
  if (j == steps - 1) return max;
  const double centre = 0.5 * (min + max);
  const double half = 0.5 * (max - min);
  return centre + half * (2.0 * j - (steps - 1)) / (steps - 1);
}

Axis parse_axis(std::string_view spec) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= spec.size(); ++i) {
    if (i == spec.size() || spec[i] == ':') {
      parts.push_back(spec.substr(start, i - start));
      start = i + 1;
    }
  }
  if (parts.size() != 4) throw std::invalid_argument("axis spec must be name:min:max:steps, got '" + std::string(spec) + "'");
  const auto name = parse_param(parts[0]);
  if (!name) throw std::invalid_argument("unknown axis name '" + std::string(parts[0]) + "'");
  Axis axis;
  axis.name = *name;
  axis.min = parse_number(parts[1], "axis minimum");
  axis.max = parse_number(parts[2], "axis maximum");
  const double steps = parse_number(parts[3], "axis steps");
  if (steps != std::floor(steps) || steps < 2 || steps > 1e6)
    throw std::invalid_argument("axis steps must be an integer >= 2, got '" + std::string(parts[3]) + "'");
  axis.steps = static_cast<int>(steps);
  if (!std::isfinite(axis.min) || !std::isfinite(axis.max) || !(axis.min < axis.max))
    throw std::invalid_argument("axis needs finite min < max");
  return axis;
}

ProblemParams ScanGrid::params_at(int i, int j) const {
  ProblemParams p;
  auto assign = [&p](Param name, double v) {
    switch (name) {
      case Param::M: p.M = v; break;
      case Param::Delta1: p.delta1 = v; break;
      case Param::Delta2: p.delta2 = v; break;
    }
  };
  assign(fixed_name, fixed_value);
  assign(x.name, x.value(i));
  assign(y.name, y.value(j));
  return p;
}

unsigned default_scan_threads() {
  if (const char* env = std::getenv("GREEN_THREADS")) {
    unsigned v = 0;
    const std::string_view text(env);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec == std::errc() && ptr == text.data() + text.size() && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ScanGrid run_scan(const Axis& x, const Axis& y, Param fixed_name, double fixed_value, const ScanOptions& opts) {
  if (x.steps < 2 || y.steps < 2) throw std::invalid_argument("scan axes need at least 2 steps");
  if (x.name == y.name || x.name == fixed_name || y.name == fixed_name)
    throw std::invalid_argument("scan axes and the fixed parameter must be three distinct parameters");

  ScanGrid grid;
  grid.x = x;
  grid.y = y;
  grid.fixed_name = fixed_name;
  grid.fixed_value = fixed_value;
  grid.provenance = opts.provenance;
  grid.empirical_grid_n = opts.empirical_grid_n;
  grid.cells.resize(static_cast<std::size_t>(x.steps) * y.steps);

  auto compute = [&grid, &opts](std::size_t idx) {
    const int i = static_cast<int>(idx / grid.y.steps);
    const int j = static_cast<int>(idx % grid.y.steps);
    const ProblemParams p = grid.params_at(i, j);
    const ClassifyReport report = classify(p);
    ScanCell cell;
    cell.cls = report.cls;
    cell.delta1_bound = report.delta1_bound;
    cell.frontier_min_distance = report.frontier_distances.min_sign_frontier();
    if (opts.provenance != Provenance::Analytic) {
      cell.empirical = report.cls == SignClass::NotUniquelySolvable
                           ? SignClass::NotUniquelySolvable
                           : empirical_classify(p, opts.empirical_grid_n);
      if (opts.provenance == Provenance::Empirical) cell.cls = *cell.empirical;
    }
    grid.cells[idx] = cell;
  };

  const unsigned workers =
      std::max(1u, std::min<unsigned>(opts.threads ? opts.threads : default_scan_threads(),
                                      static_cast<unsigned>(grid.cells.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t idx = next.fetch_add(1); idx < grid.cells.size(); idx = next.fetch_add(1)) compute(idx);
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  return grid;
}

void write_scan_csv(std::ostream& out, const ScanGrid& grid) {
  const bool with_empirical = grid.provenance == Provenance::Both;
  out << "x,y,class,delta1_bound,frontier_min_distance";
  if (with_empirical) out << ",empirical_class";
  out << '\n';
  for (int i = 0; i < grid.x.steps; ++i) {
    for (int j = 0; j < grid.y.steps; ++j) {
      const ScanCell& c = grid.cell(i, j);
      out << format_double(grid.x.value(i)) << ',' << format_double(grid.y.value(j)) << ',' << to_string(c.cls)
          << ',' << format_double(c.delta1_bound) << ',';
      if (c.frontier_min_distance) out << format_double(*c.frontier_min_distance);
      if (with_empirical) out << ',' << (c.empirical ? to_string(*c.empirical) : std::string_view{});
      out << '\n';
    }
  }
}

std::string scan_json(const ScanGrid& grid) {
  auto axis_json = [](const Axis& a) {
    return nlohmann::json{{"name", to_string(a.name)}, {"min", a.min}, {"max", a.max}, {"steps", a.steps}};
  };
  nlohmann::json cells = nlohmann::json::array();
  for (int i = 0; i < grid.x.steps; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < grid.y.steps; ++j) row.push_back(to_string(grid.cell(i, j).cls));
    cells.push_back(std::move(row));
  }
  nlohmann::json doc{
      {"axis1", axis_json(grid.x)},
      {"axis2", axis_json(grid.y)},
      {"fixed", {{"name", to_string(grid.fixed_name)}, {"value", grid.fixed_value}}},
      {"provenance", to_string(grid.provenance)},
      {"cells", std::move(cells)},
  };
  return doc.dump();
}

void write_scan_svg(std::ostream& out, const ScanGrid& grid) {
  const int cell = std::max(1, 700 / std::max(grid.x.steps, grid.y.steps));
  const int plot_w = cell * grid.x.steps;
  const int plot_h = cell * grid.y.steps;
  const int margin = 40;
  const int legend_w = 170;
  const int width = margin + plot_w + 20 + legend_w;
  const int height = margin + plot_h + margin;

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width << "\" height=\"" << height
      << "\" shape-rendering=\"crispEdges\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"#ffffff\"/>\n";
  for (int i = 0; i < grid.x.steps; ++i) {
    for (int j = 0; j < grid.y.steps; ++j) {
      // y grows upwards.
      const int px = margin + i * cell;
      const int py = margin + (grid.y.steps - 1 - j) * cell;
      out << "<rect x=\"" << px << "\" y=\"" << py << "\" width=\"" << cell << "\" height=\"" << cell
          << "\" fill=\"" << colour_for(grid.cell(i, j).cls).fill << "\"/>\n";
    }
  }
  out << "<text x=\"" << margin + plot_w / 2 << "\" y=\"" << height - 12 << "\" font-size=\"14\" text-anchor=\"middle\">"
      << to_string(grid.x.name) << " [" << format_double(grid.x.min) << ", " << format_double(grid.x.max)
      << "]</text>\n";
  out << "<text x=\"14\" y=\"" << margin + plot_h / 2 << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
      << margin + plot_h / 2 << ")\">" << to_string(grid.y.name) << " [" << format_double(grid.y.min) << ", "
      << format_double(grid.y.max) << "]</text>\n";
  out << "<text x=\"" << margin << "\" y=\"24\" font-size=\"14\">" << to_string(grid.fixed_name) << " = "
      << format_double(grid.fixed_value) << " (" << to_string(grid.provenance) << ")</text>\n";

  const SignClass legend[] = {SignClass::StrictlyPositive, SignClass::StrictlyNegative, SignClass::SignChanging,
                              SignClass::OnFrontier, SignClass::NotUniquelySolvable};
  const int lx = margin + plot_w + 20;
  for (int k = 0; k < 5; ++k) {
    const Colour c = colour_for(legend[k]);
    const int ly = margin + 24 * k;
    out << "<rect x=\"" << lx << "\" y=\"" << ly << "\" width=\"16\" height=\"16\" fill=\"" << c.fill
        << "\" stroke=\"#000000\"/>\n";
    out << "<text x=\"" << lx + 24 << "\" y=\"" << ly + 13 << "\" font-size=\"13\">" << c.label << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace intgreen
