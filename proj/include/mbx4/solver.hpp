#pragma once

// Z-marching solution of the coupled Maxwell / von Neumann system in the
// retarded frame. At each depth the whole ensemble is integrated across the
// T grid, then the envelopes are advanced by dOmega/dZ = -i mu <rho_ij>.

#include <span>

#include "mbx4/bloch.hpp"
#include "mbx4/core.hpp"
#include "mbx4/result.hpp"

namespace mbx4 {

enum class ZScheme { euler, heun };

struct SolverConfig {
  ZScheme scheme = ZScheme::heun;
  double snapshot_every = 0.0;  // Z interval between stored snapshots; <= 0 stores only z = 0 and z_max
  StabilityPolicy stability_policy = StabilityPolicy::warn;
  int threads = 0;              // 0: MBX4_THREADS or hardware concurrency
  bool log_progress = false;    // one stderr line per tenth of the medium
};

/// (-i mu <rho13>, -i mu <rho14>, -i mu <rho23>, -i mu <rho24>).
Rabi4 maxwell_rhs(const Rabi4& coherences, double mu);

/// Applies maxwell_rhs row by row to an n_t x 4 coherence matrix.
FieldMatrix maxwell_rhs(const FieldMatrix& coherences, double mu);

/// Propagates `initial` (the envelopes entering the medium at z = 0) through
/// medium.length, using grid.n_z steps. grid.z_max is overridden by medium.length.
///
/// Throws NumericalError with the last finite depth when a non-finite
/// envelope appears or the stability guard aborts.
PropagationResult propagate(const FieldSnapshot& initial, const MediumSpec& medium, RetardedGrid grid,
                            const SolverConfig& cfg);

/// Max elementwise difference between the finite-difference dH/dZ built from
/// two snapshots and -(mu/2)[W, <rho>], W = i diag(0, 0, 1, 1), over all grid times.
double commutator_consistency_check(const FieldSnapshot& before, const FieldSnapshot& after,
                                    std::span<const DensityMatrix4> averaged_rho, double mu);

}  // namespace mbx4
