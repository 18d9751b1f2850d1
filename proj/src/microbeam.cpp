#include "cavsim/microbeam.hpp"

#include "cavsim/ensemble.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cavsim {

namespace {

const char* level_name(PrepLevel l) {
    switch (l) {
        case PrepLevel::excited_a: return "a";
        case PrepLevel::ground_b: return "b";
        default: return "bc";
    }
}

const char* level_name(DetectedLevel l) {
    switch (l) {
        case DetectedLevel::a: return "a";
        case DetectedLevel::b: return "b";
        default: return "bc";
    }
}

/// (eps + a)|psi> or (eps + a^dag)|psi>, unnormalized.
FieldState drive_plus_ladder(const FieldState& s, double eps, bool dagger) {
    FieldState lad = dagger ? apply_raise(s) : apply_lower(s);
    lad.amps += eps * s.amps;
    return lad;
}

}  // namespace

double BeamSchedule::nbar() const {
    if (r_b <= r_a) throw std::domain_error("BeamSchedule: need r_b > r_a");
    return r_a / (r_b - r_a);
}

void BeamSchedule::validate(double coupling_tau) const {
    if (r_a < 0.0 || r_b <= 0.0)
        throw std::domain_error("BeamSchedule: rates must be nonnegative, r_b > 0");
    if (r_b <= r_a) throw std::domain_error("BeamSchedule: need r_b > r_a");
    (void)coupling_tau;
}

std::pair<FieldState, DetectionOutcome> two_level_pass(const FieldState& s,
                                                       const AtomPrep& prep,
                                                       double lambda_tau, Rng& rng) {
    if (prep.model != AtomModel::two_level)
        throw std::domain_error("two_level_pass: wrong atom model");
    if (prep.level == PrepLevel::ground_superposition_bc)
        throw std::domain_error("two_level_pass: superposition prep needs three levels");
    const double lt2 = lambda_tau * lambda_tau;
    const bool excited = prep.level == PrepLevel::excited_a;

    // Flip branch: a (ground prep) or a^dag (excited prep).
    FieldState flip = excited ? apply_raise(s) : apply_lower(s);
    const double w_flip = lt2 * norm_sq(flip);

    // No-flip branch: 1 - (lambda tau)^2/2 * (a^dag a or a a^dag).
    FieldState keep = s;
    const int d = s.dim();
    for (int n = 0; n < d; ++n) {
        const double wn = excited ? ((n + 1 < d) ? n + 1 : 0) : n;
        keep.amps[n] *= 1.0 - 0.5 * lt2 * wn;
    }
    const double w_keep = norm_sq(keep);

    const double total = w_flip + w_keep;
    const bool flipped = rng.uniform() < w_flip / total;
    DetectionOutcome out;
    out.flipped = flipped;
    if (flipped) {
        out.detected = excited ? DetectedLevel::b : DetectedLevel::a;
        return {normalized(std::move(flip)), out};
    }
    out.detected = excited ? DetectedLevel::a : DetectedLevel::b;
    return {normalized(std::move(keep)), out};
}

std::pair<FieldState, DetectionOutcome> three_level_pass(const FieldState& s,
                                                         const AtomPrep& prep,
                                                         double g_tau, double epsilon,
                                                         Rng& rng) {
    if (prep.model != AtomModel::three_level)
        throw std::domain_error("three_level_pass: wrong atom model");
    if (prep.level == PrepLevel::ground_b)
        throw std::domain_error("three_level_pass: prep must be excited or superposition");
    const double gt2 = g_tau * g_tau;
    const bool excited = prep.level == PrepLevel::excited_a;

    // Flip branch operator: (eps + a) for superposition prep, (eps + a^dag)
    // for excited prep, weight (g tau)^2/2 times the squared branch norm.
    FieldState flip = drive_plus_ladder(s, epsilon, excited);
    const double w_flip = 0.5 * gt2 * norm_sq(flip);

    // No-flip branch from unitarity at second order:
    // 1 - (g tau)^2/4 (eps + a^dag)(eps + a) (superposition prep) and the
    // conjugate-ordered product for the excited prep.
    FieldState inner = drive_plus_ladder(s, epsilon, excited);
    FieldState outer = drive_plus_ladder(inner, epsilon, !excited);
    FieldState keep = s;
    keep.amps -= 0.25 * gt2 * outer.amps;
    keep.leak = outer.leak;
    const double w_keep = norm_sq(keep);

    const double total = w_flip + w_keep;
    const bool flipped = rng.uniform() < w_flip / total;
    DetectionOutcome out;
    out.flipped = flipped;
    if (flipped) {
        out.detected = excited ? DetectedLevel::superposition_bc : DetectedLevel::a;
        return {normalized(std::move(flip)), out};
    }
    out.detected = excited ? DetectedLevel::a : DetectedLevel::superposition_bc;
    return {normalized(std::move(keep)), out};
}

double effective_gamma(const BeamSchedule& sched, double coupling_tau, AtomModel model) {
    if (sched.r_b <= sched.r_a)
        throw std::domain_error("effective_gamma: need r_b > r_a");
    const double ct2 = coupling_tau * coupling_tau;
    return model == AtomModel::two_level ? (sched.r_b - sched.r_a) * ct2
                                         : (sched.r_b - sched.r_a) * ct2 / 2.0;
}

TrajectoryRecord run_beam_trajectory(const FieldState& psi0, const BeamSchedule& sched,
                                     AtomModel model, double coupling_tau,
                                     std::optional<double> epsilon, double horizon,
                                     double sample_dt, std::uint64_t seed,
                                     const BeamOptions& opts) {
    sched.validate(coupling_tau);
    if (model == AtomModel::three_level && !epsilon)
        throw std::domain_error("run_beam_trajectory: three-level model needs epsilon");
    if (sample_dt <= 0.0 || horizon < 0.0)
        throw std::domain_error("run_beam_trajectory: bad time grid");

    TrajectoryRecord rec;
    rec.engine = model == AtomModel::two_level ? "micro2" : "micro3";
    rec.seed = seed;
    Rng rng(seed);
    FieldState psi = normalized(psi0);

    long sample_count = 0;
    auto take_sample = [&](double t) {
        rec.samples.push_back(sample_observables(t, psi));
        if (opts.snapshot_every > 0 && sample_count % opts.snapshot_every == 0)
            rec.snapshots.emplace_back(t, psi);
        ++sample_count;
    };
    take_sample(0.0);

    double t_atom = 0.0;
    double next_sample = sample_dt;
    long index = 0;
    for (;;) {
        t_atom += sched.poisson_arrivals
                      ? -std::log(1.0 - rng.uniform()) * sched.spacing()
                      : sched.spacing();
        if (t_atom > horizon) break;
        // The interaction-picture state is frozen between atoms.
        while (next_sample <= t_atom + 1e-15 && next_sample <= horizon + 1e-15) {
            take_sample(next_sample);
            next_sample += sample_dt;
        }
        const bool excited = rng.uniform() < sched.p_excited();
        AtomPrep prep;
        prep.model = model;
        prep.level = excited ? PrepLevel::excited_a
                             : (model == AtomModel::two_level
                                    ? PrepLevel::ground_b
                                    : PrepLevel::ground_superposition_bc);
        DetectionOutcome det;
        try {
            auto result = model == AtomModel::two_level
                              ? two_level_pass(psi, prep, coupling_tau, rng)
                              : three_level_pass(psi, prep, coupling_tau, *epsilon, rng);
            psi = std::move(result.first);
            det = result.second;
        } catch (const std::runtime_error& e) {
            rec.abort_reason = e.what();
            return rec;
        }
        if (opts.record_atom_events)
            rec.atom_events.push_back(
                {index, level_name(prep.level), level_name(det.detected), det.flipped});
        ++index;
        if (psi.leak > opts.leak_abort) {
            std::ostringstream os;
            os << "truncation leak " << psi.leak << " at atom " << index;
            rec.abort_reason = os.str();
            return rec;
        }
    }
    while (next_sample <= horizon + 1e-15) {
        take_sample(next_sample);
        next_sample += sample_dt;
    }
    return rec;
}

EnsembleResult beam_ensemble_mean_density(const FieldState& psi0,
                                          const BeamSchedule& sched, AtomModel model,
                                          double coupling_tau,
                                          std::optional<double> epsilon, double horizon,
                                          double sample_dt, long trajectories,
                                          std::uint64_t seed0, int workers) {
    BeamOptions o;
    o.snapshot_every = 1;
    auto run = [&](std::uint64_t seed) {
        return run_beam_trajectory(psi0, sched, model, coupling_tau, epsilon, horizon,
                                   sample_dt, seed, o);
    };
    return ensemble_mean_density_generic(run, trajectories, seed0, workers);
}

}  // namespace cavsim
