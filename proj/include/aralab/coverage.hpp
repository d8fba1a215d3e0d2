#pragma once

#include <string>
#include <vector>

#include "aralab/topology.hpp"

namespace aralab {

struct GridSpec {
  Point origin;            // lower-left corner of cell (0, 0)
  double cell_size_m = 100.0;
  int width = 0;           // cells along x
  int height = 0;          // cells along y
};

struct CoverageSample {
  Point position;
  double capacity_bps = 0.0;
};

/// Capacity field over a regular grid. Cells holding samples are pinned;
/// the rest are harmonic (each equals the mean of its in-grid neighbors).
class CoverageGrid {
public:
  CoverageGrid() = default;
  explicit CoverageGrid(const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }
  int width() const { return spec_.width; }
  int height() const { return spec_.height; }
  double value(int col, int row) const { return values_[index(col, row)]; }
  double& value(int col, int row) { return values_[index(col, row)]; }
  bool is_sample(int col, int row) const { return mask_[index(col, row)] != 0; }
  void set_sample(int col, int row, double v);
  const std::vector<double>& values() const { return values_; }

  /// Max |v - mean(neighbors)| over free cells.
  double max_residual() const;

  bool converged = false;
  int iterations = 0;
  double residual = 0.0;

  std::size_t index(int col, int row) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(spec_.width) +
           static_cast<std::size_t>(col);
  }

private:
  GridSpec spec_;
  std::vector<double> values_;
  std::vector<unsigned char> mask_;
};

/// Pins samples (cell means when several share a cell) and relaxes the
/// free cells with successive over-relaxation until the residual drops
/// below `tol` or `max_iters` sweeps elapse (then `converged` is false).
/// Throws ValidationError when no sample falls inside the grid.
CoverageGrid fit_coverage_map(const std::vector<CoverageSample>& samples, const GridSpec& grid,
                              double tol = 1e-6, int max_iters = 100000);

/// Row-major CSV: one comment header line with the grid geometry, then one
/// line per row (row 0 first).
std::string coverage_grid_to_csv(const CoverageGrid& grid);

}  // namespace aralab
