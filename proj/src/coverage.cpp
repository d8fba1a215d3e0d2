#include "aralab/coverage.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "aralab/csv.hpp"
#include "aralab/error.hpp"

namespace aralab {

CoverageGrid::CoverageGrid(const GridSpec& spec) : spec_(spec) {
  if (spec.width < 1 || spec.height < 1) throw ValidationError("grid must have at least one cell");
  if (!(spec.cell_size_m > 0)) throw ValidationError("grid cell size must be > 0");
  values_.assign(static_cast<std::size_t>(spec.width) * spec.height, 0.0);
  mask_.assign(values_.size(), 0);
}

void CoverageGrid::set_sample(int col, int row, double v) {
  values_[index(col, row)] = v;
  mask_[index(col, row)] = 1;
}

namespace {

// Mean of the in-grid 4-neighbors of (c, r).
inline double neighbor_mean(const std::vector<double>& v, int w, int h, int c, int r) {
  double sum = 0.0;
  int n = 0;
  const std::size_t i = static_cast<std::size_t>(r) * w + c;
  if (c > 0) { sum += v[i - 1]; ++n; }
  if (c + 1 < w) { sum += v[i + 1]; ++n; }
  if (r > 0) { sum += v[i - w]; ++n; }
  if (r + 1 < h) { sum += v[i + w]; ++n; }
  return n ? sum / n : v[i];
}

}  // namespace

double CoverageGrid::max_residual() const {
  double worst = 0.0;
  for (int r = 0; r < spec_.height; ++r)
    for (int c = 0; c < spec_.width; ++c) {
      if (is_sample(c, r)) continue;
      const double d = std::abs(value(c, r) - neighbor_mean(values_, spec_.width, spec_.height, c, r));
      worst = std::max(worst, d);
    }
  return worst;
}

CoverageGrid fit_coverage_map(const std::vector<CoverageSample>& samples, const GridSpec& spec,
                              double tol, int max_iters) {
  if (!(tol > 0)) throw ValidationError("tolerance must be > 0");
  CoverageGrid grid(spec);
  const int w = spec.width, h = spec.height;

  std::vector<double> sum(static_cast<std::size_t>(w) * h, 0.0);
  std::vector<int> count(sum.size(), 0);
  for (const auto& s : samples) {
    const double fx = (s.position.x - spec.origin.x) / spec.cell_size_m;
    const double fy = (s.position.y - spec.origin.y) / spec.cell_size_m;
    if (fx < 0 || fy < 0 || fx >= w || fy >= h) continue;
    const std::size_t i = grid.index(static_cast<int>(fx), static_cast<int>(fy));
    sum[i] += s.capacity_bps;
    ++count[i];
  }
  double total = 0.0;
  int pinned = 0;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const std::size_t i = grid.index(c, r);
      if (count[i] == 0) continue;
      grid.set_sample(c, r, sum[i] / count[i]);
      total += grid.value(c, r);
      ++pinned;
    }
  if (pinned == 0) throw ValidationError("no coverage samples fall inside the grid");

  const double start = total / pinned;
  std::vector<double> v(grid.values());
  std::vector<unsigned char> free(v.size(), 0);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      if (!grid.is_sample(c, r)) {
        v[grid.index(c, r)] = start;
        free[grid.index(c, r)] = 1;
      }

  const double n = std::max(w, h);
  const double omega = 2.0 / (1.0 + std::sin(std::numbers::pi / (n + 1.0)));
  grid.converged = false;
  int it = 0;
  double res = 0.0;
  for (; it < max_iters; ++it) {
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        const std::size_t i = static_cast<std::size_t>(r) * w + c;
        if (!free[i]) continue;
        v[i] += omega * (neighbor_mean(v, w, h, c, r) - v[i]);
      }
    // Residual check every few sweeps; each check is a full pass.
    if (it % 8 == 7 || it + 1 == max_iters) {
      res = 0.0;
      for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
          const std::size_t i = static_cast<std::size_t>(r) * w + c;
          if (free[i]) res = std::max(res, std::abs(v[i] - neighbor_mean(v, w, h, c, r)));
        }
      if (res < tol) {
        grid.converged = true;
        ++it;
        break;
      }
    }
  }
  for (std::size_t i = 0; i < v.size(); ++i)
    if (free[i]) grid.value(static_cast<int>(i % w), static_cast<int>(i / w)) = v[i];
  grid.iterations = it;
  grid.residual = grid.max_residual();
  return grid;
}

std::string coverage_grid_to_csv(const CoverageGrid& grid) {
  std::ostringstream out;
  const auto& s = grid.spec();
  out << "# origin_x_m=" << format_double(s.origin.x) << " origin_y_m=" << format_double(s.origin.y)
      << " cell_size_m=" << format_double(s.cell_size_m) << " width=" << s.width
      << " height=" << s.height << " converged=" << (grid.converged ? 1 : 0) << "\n";
  for (int r = 0; r < grid.height(); ++r) {
    for (int c = 0; c < grid.width(); ++c) {
      if (c) out << ',';
      out << format_double(grid.value(c, r));
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace aralab
