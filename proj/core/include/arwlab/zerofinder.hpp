#pragma once

#include <cstddef>
#include <vector>

#include "arwlab/wavefield.hpp"

namespace arw {

struct Zero {
  TorusPoint position{};
  int charge = 0;           // sign of the Jacobian determinant of (T, That)
  double jacobian_det = 0;  // dT/dx1 dThat/dx2 - dT/dx2 dThat/dx1
};

struct ZeroDiagnostics {
  long cells_scanned = 0;
  long newton_failures = 0;
  long dedup_merges = 0;
  long refined_edges = 0;
  long subdivisions = 0;
  long dipole_probes = 0;
  long dipoles_found = 0;
};

struct ZeroSet {
  std::vector<Zero> zeros;
  ZeroDiagnostics diagnostics;

  std::size_t count() const { return zeros.size(); }
  int total_charge() const;
};

struct ZeroFinderOptions {
  int cells_per_axis = 0;  // 0 selects ceil(10 sqrt n)
  int samples_per_edge = 8;
  double dedup_tolerance = 1e-8;
  int max_subdivisions = 4;
  int max_newton_iterations = 50;
  double residual_tolerance = 1e-12;
  // Newton probe in zero-winding squares where |Theta| is small at all corners.
  bool probe_dipoles = true;
};

int default_cells_per_axis(long n);

// Winding scan on a lattice of cells_per_axis * samples_per_edge points per axis,
// then Newton refinement. Throws UnresolvedCellError when a cell cannot be resolved
// (including degenerate fields).
ZeroSet locate_zeros(const WaveSample& sample, const ZeroFinderOptions& options = {});

// Midpoint rule for (1/(4 eps^2)) * integral of 1{|T|<=eps, |That|<=eps} |det J|.
double epsilon_count(const WaveSample& sample, double epsilon, int m);

enum class Component { T, That };

struct NodalLength {
  double length = 0.0;
  long saddle_cells = 0;
};

// Marching squares on the m x m grid (i/m, j/m); saddles resolved by the cell-center sign.
NodalLength nodal_length(const WaveSample& sample, Component component, int m);

}  // namespace arw
