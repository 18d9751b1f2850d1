#include "cavsim/mcwf.hpp"

#include "cavsim/ensemble.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cavsim {

namespace {
/// Diagonal of sum_m C_m^dag C_m in the number basis, truncated.
inline double decay_diag(int n, int dim, double gd, double gu) {
    const double w = (n + 1 < dim) ? n + 1 : 0;
    return gd * n + gu * w;
}
}  // namespace

std::pair<double, double> jump_rates(const FieldState& s, const ReservoirParams& p) {
    const double gd = p.gamma * (1.0 + p.nbar);
    const double gu = p.gamma * p.nbar;
    return {gd * expval_number(s), gu * expval_aad(s)};
}

FieldState no_jump_step(const FieldState& s, const ReservoirParams& p, double dt,
                        bool exact) {
    const int d = s.dim();
    const double gd = p.gamma * (1.0 + p.nbar);
    const double gu = p.gamma * p.nbar;
    FieldState out = s;
    for (int n = 0; n < d; ++n) {
        const double k = decay_diag(n, d, gd, gu);
        out.amps[n] *= exact ? std::exp(-0.5 * dt * k) : (1.0 - 0.5 * dt * k);
    }
    if (norm_sq(out) < 1e-12)
        throw std::runtime_error("no_jump_step: norm collapsed, step too large");
    return normalize(out);
}

FieldState apply_jump(const FieldState& s, JumpKind kind) {
    FieldState out = kind == JumpKind::down ? apply_lower(s) : apply_raise(s);
    if (norm_sq(out) <= 0.0)
        throw std::logic_error("apply_jump: zero-norm branch selected");
    return normalize(out);
}

std::pair<FieldState, std::optional<JumpEvent>> mc_step(const FieldState& s,
                                                        const ReservoirParams& p,
                                                        double dt, double t, Rng& rng,
                                                        bool exact_no_jump) {
    const auto [rd, ru] = jump_rates(s, p);
    const double p_down = rd * dt;
    const double p_up = ru * dt;
    if (p_down + p_up >= 0.5) {
        std::ostringstream os;
        os << "mc_step: jump probability " << p_down + p_up << " per step at t=" << t
           << "; reduce dt";
        throw std::runtime_error(os.str());
    }
    const double u = rng.uniform();
    if (u < p_down)
        return {apply_jump(s, JumpKind::down), JumpEvent{t + dt, JumpKind::down}};
    if (u < p_down + p_up)
        return {apply_jump(s, JumpKind::up), JumpEvent{t + dt, JumpKind::up}};
    return {no_jump_step(s, p, dt, exact_no_jump), std::nullopt};
}

TrajectoryRecord run_mc_trajectory(const FieldState& psi0, const ReservoirParams& p,
                                   double horizon, double dt, long sample_every,
                                   std::uint64_t seed, const TrajectoryOptions& opts) {
    p.validate();
    if (dt <= 0.0 || horizon < 0.0 || sample_every < 1)
        throw std::domain_error("run_mc_trajectory: bad time grid");

    TrajectoryRecord rec;
    rec.engine = "mcwf";
    rec.seed = seed;
    Rng rng(seed);
    FieldState psi = normalized(psi0);

    const long steps = std::lround(horizon / dt);
    long sample_count = 0;
    auto take_sample = [&](double t) {
        rec.samples.push_back(sample_observables(t, psi));
        if (opts.snapshot_every > 0 && sample_count % opts.snapshot_every == 0)
            rec.snapshots.emplace_back(t, psi);
        ++sample_count;
    };
    take_sample(0.0);

    for (long k = 0; k < steps; ++k) {
        const double t = k * dt;
        try {
            auto [next, ev] = mc_step(psi, p, dt, t, rng, opts.exact_no_jump);
            psi = std::move(next);
            if (ev && opts.record_events) rec.events.push_back(*ev);
        } catch (const std::runtime_error& e) {
            rec.abort_reason = e.what();
            return rec;
        }
        if ((k + 1) % sample_every == 0 || k + 1 == steps) {
            if (psi.leak > opts.leak_abort) {
                std::ostringstream os;
                os << "truncation leak " << psi.leak << " at t=" << (k + 1) * dt;
                rec.abort_reason = os.str();
                return rec;
            }
            take_sample((k + 1) * dt);
        }
    }
    return rec;
}

EnsembleResult ensemble_mean_density(const FieldState& psi0, const ReservoirParams& p,
                                     double horizon, double dt, long sample_every,
                                     long trajectories, std::uint64_t seed0,
                                     const TrajectoryOptions& opts, int workers) {
    TrajectoryOptions o = opts;
    o.snapshot_every = 1;
    o.record_events = false;
    auto run = [&](std::uint64_t seed) {
        return run_mc_trajectory(psi0, p, horizon, dt, sample_every, seed, o);
    };
    return ensemble_mean_density_generic(run, trajectories, seed0, workers);
}

}  // namespace cavsim
