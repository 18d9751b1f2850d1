#pragma once

#include "cavsim/fock.hpp"
#include "cavsim/mcwf.hpp"
#include "cavsim/rng.hpp"
#include "cavsim/trajectory.hpp"

#include <cstdint>
#include <optional>
#include <utility>

namespace cavsim {

enum class AtomModel { two_level, three_level };
enum class PrepLevel { excited_a, ground_b, ground_superposition_bc };
enum class DetectedLevel { a, b, superposition_bc };

struct AtomPrep {
    AtomModel model;
    PrepLevel level;
};

struct DetectionOutcome {
    DetectedLevel detected;
    bool flipped;
};

/// Atom injection schedule: deterministic spacing 1/(r_a+r_b), upper-state
/// atoms drawn Bernoulli with p = r_a/(r_a+r_b). Poisson arrivals are a
/// sensitivity-check mode.
struct BeamSchedule {
    double r_a;
    double r_b;
    bool poisson_arrivals = false;

    double rate() const { return r_a + r_b; }
    double spacing() const { return 1.0 / rate(); }
    double p_excited() const { return r_a / rate(); }
    double nbar() const;  // r_a/(r_b - r_a)
    void validate(double coupling_tau) const;
};

struct BeamOptions {
    bool record_atom_events = false;
    long snapshot_every = 0;  // in sample points
    double leak_abort = 1e-4;
};

/// One two-level atom through the cavity: detection outcome sampled from the
/// squared branch norms, conditional field state renormalized.
std::pair<FieldState, DetectionOutcome> two_level_pass(const FieldState& s,
                                                       const AtomPrep& prep,
                                                       double lambda_tau, Rng& rng);

/// One three-level atom (degenerate ground doublet, classical drive eps).
std::pair<FieldState, DetectionOutcome> three_level_pass(const FieldState& s,
                                                         const AtomPrep& prep,
                                                         double g_tau, double epsilon,
                                                         Rng& rng);

/// Gamma fed to the coarse-grained engines: (r_b-r_a)(lambda tau)^2 for the
/// two-level beam, (r_b-r_a)(g tau)^2/2 for the three-level one.
double effective_gamma(const BeamSchedule& sched, double coupling_tau, AtomModel model);

TrajectoryRecord run_beam_trajectory(const FieldState& psi0, const BeamSchedule& sched,
                                     AtomModel model, double coupling_tau,
                                     std::optional<double> epsilon, double horizon,
                                     double sample_dt, std::uint64_t seed,
                                     const BeamOptions& opts = {});

EnsembleResult beam_ensemble_mean_density(const FieldState& psi0,
                                          const BeamSchedule& sched, AtomModel model,
                                          double coupling_tau,
                                          std::optional<double> epsilon, double horizon,
                                          double sample_dt, long trajectories,
                                          std::uint64_t seed0, int workers = 1);

}  // namespace cavsim
