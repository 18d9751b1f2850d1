#pragma once

#include "cavsim/fock.hpp"
#include "cavsim/lindblad.hpp"
#include "cavsim/rng.hpp"
#include "cavsim/trajectory.hpp"

#include <cstdint>
#include <optional>
#include <utility>

namespace cavsim {

struct TrajectoryOptions {
    bool exact_no_jump = false;   // exponential instead of first-order contraction
    long snapshot_every = 0;      // in sample points; 0 = no state snapshots
    bool record_events = true;
    bool record_wiener = false;   // diffusive engine only
    bool binary_wiener = false;   // diffusive engine only
    double leak_abort = 1e-4;
};

/// (rate_down, rate_up) = (Gamma(1+nbar)<a^dag a>, Gamma nbar <a a^dag>),
/// with the truncated ladder operators so the rates equal the squared
/// branch norms.
std::pair<double, double> jump_rates(const FieldState& s, const ReservoirParams& p);

/// No-jump contraction over dt, renormalized. Fock states are fixed points.
FieldState no_jump_step(const FieldState& s, const ReservoirParams& p, double dt,
                        bool exact = false);

/// C_m|psi>/||C_m|psi>||.
FieldState apply_jump(const FieldState& s, JumpKind kind);

/// One step: at most one jump, sampled with probability rate*dt, else the
/// no-jump contraction.
std::pair<FieldState, std::optional<JumpEvent>> mc_step(const FieldState& s,
                                                        const ReservoirParams& p,
                                                        double dt, double t, Rng& rng,
                                                        bool exact_no_jump = false);

TrajectoryRecord run_mc_trajectory(const FieldState& psi0, const ReservoirParams& p,
                                   double horizon, double dt, long sample_every,
                                   std::uint64_t seed,
                                   const TrajectoryOptions& opts = {});

struct EnsembleResult {
    std::vector<MasterSnapshot> mean;
    long aborted = 0;
    long total = 0;
};

/// (1/M) sum over trajectories of |psi_k(t)><psi_k(t)| on the sample grid.
/// Aborted trajectories are excluded and counted; more than 1% aborts is an
/// error. Deterministic in (seed0, M) regardless of worker count.
EnsembleResult ensemble_mean_density(const FieldState& psi0, const ReservoirParams& p,
                                     double horizon, double dt, long sample_every,
                                     long trajectories, std::uint64_t seed0,
                                     const TrajectoryOptions& opts = {},
                                     int workers = 1);

}  // namespace cavsim
