#pragma once

#include "cavsim/fock.hpp"
#include "cavsim/mcwf.hpp"
#include "cavsim/rng.hpp"
#include "cavsim/trajectory.hpp"

#include <cstdint>

namespace cavsim {

struct WienerPair {
    double dw1 = 0.0;  // drives the sqrt(Gamma(1+nbar)) a channel
    double dw2 = 0.0;  // drives the sqrt(Gamma nbar) a^dag channel
};

struct JumpCountMoments {
    double mu1, mu2;      // Gamma dt eps^2 (1+nbar), Gamma dt eps^2 nbar
    double mean1, mean2;  // mu_i (1 + (2/eps)<X1>)
    double var1, var2;    // mu_i
};

struct HssdeOptions {
    bool exact_drift = false;   // apply the quadratic drift as an exponential
    long snapshot_every = 0;
    bool record_wiener = false;
    bool binary_wiener = false;
    double leak_abort = 1e-4;
    long substeps = 1;          // Wiener increments drawn at dt/substeps and
                                // summed; couples runs across step sizes
};

/// The unnormalized increment of the homodyne stochastic Schrodinger
/// equation applied to |psi|: drift with the state-dependent <X1> term plus
/// the two Wiener-driven ladder terms.
FieldState hssde_increment(const FieldState& s, const ReservoirParams& p, double dt,
                           const WienerPair& w);

/// One Euler-Maruyama step, renormalized. With exact_drift the quadratic
/// (number-diagonal) part is applied as an exponential.
FieldState hssde_step(const FieldState& s, const ReservoirParams& p, double dt,
                      Rng& rng, const HssdeOptions& opts = {});

TrajectoryRecord run_hssde_trajectory(const FieldState& psi0, const ReservoirParams& p,
                                      double horizon, double dt, long sample_every,
                                      std::uint64_t seed, const HssdeOptions& opts = {});

EnsembleResult hssde_ensemble_mean_density(const FieldState& psi0,
                                           const ReservoirParams& p, double horizon,
                                           double dt, long sample_every,
                                           long trajectories, std::uint64_t seed0,
                                           const HssdeOptions& opts = {},
                                           int workers = 1);

/// Analytic jump-count moments for a counting window of length `horizon`
/// at drive amplitude eps, given the field state at the window start.
JumpCountMoments jump_count_moments(const FieldState& s, const ReservoirParams& p,
                                    double epsilon, double horizon);

}  // namespace cavsim
