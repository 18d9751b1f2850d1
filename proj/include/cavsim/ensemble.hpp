#pragma once

#include "cavsim/lindblad.hpp"
#include "cavsim/mcwf.hpp"
#include "cavsim/trajectory.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace cavsim {

using TrajectoryFn = std::function<TrajectoryRecord(std::uint64_t seed)>;

/// Runs M trajectories (seed_k = trajectory_seed(seed0, k)) and averages
/// |psi><psi| over the snapshot grid. Trajectories must record snapshots at
/// every sample point. Partial sums are accumulated per fixed-size block and
/// reduced in block order, so the result does not depend on the worker count.
EnsembleResult ensemble_mean_density_generic(const TrajectoryFn& run, long trajectories,
                                             std::uint64_t seed0, int workers);

/// Runs M trajectories and collects the final snapshot state of each,
/// in trajectory order. Used by the localization diagnostics.
std::vector<TrajectoryRecord> run_ensemble(const TrajectoryFn& run, long trajectories,
                                           std::uint64_t seed0, int workers);

}  // namespace cavsim
