#pragma once

#include <array>
#include <vector>

#include "mbx4/areas.hpp"
#include "mbx4/core.hpp"

namespace mbx4 {

/// Peak time and peak magnitude of each channel at every recorded depth.
struct PeakTrack {
  std::vector<double> z;
  std::array<std::vector<double>, 4> time;
  std::array<std::vector<double>, 4> amplitude;
};

/// Everything the Z-march records. Per-step series have n_z + 1 entries (z = 0 included).
struct PropagationResult {
  RetardedGrid grid;
  std::vector<FieldSnapshot> snapshots;                // ordered by strictly increasing z
  std::vector<AreaRecord> area_records;                // coherent areas per Z step
  std::vector<std::array<double, 4>> magnitude_areas;  // integral of |Omega| dT per Z step
  PeakTrack peak_tracks;
  std::vector<double> field_energy;       // sum over channels of integral |Omega|^2 dT
  std::vector<double> excited_at_t_max;   // <rho33 + rho44> at the last grid time
  double min_population = 0.0;
  double max_population = 0.0;
};

}  // namespace mbx4
