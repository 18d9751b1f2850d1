#include "cavsim/hssde.hpp"

#include "cavsim/ensemble.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cavsim {

namespace {

WienerPair draw_wiener(Rng& rng, double dt, const HssdeOptions& opts) {
    const long sub = std::max<long>(1, opts.substeps);
    WienerPair w;
    for (long i = 0; i < sub; ++i) {
        const auto [a, b] = rng.wiener_pair(dt / double(sub), opts.binary_wiener);
        w.dw1 += a;
        w.dw2 += b;
    }
    return w;
}

FieldState apply_step(const FieldState& s, const ReservoirParams& p, double dt,
                      const WienerPair& w, bool exact_drift) {
    const int d = s.dim();
    FieldState out;
    if (exact_drift) {
        // Quadratic drift as a diagonal exponential; the remaining linear
        // terms keep the coherent family exactly closed at nbar = 0.
        const double gd = p.gamma * (1.0 + p.nbar);
        const double gu = p.gamma * p.nbar;
        const FieldState low = apply_lower(s);
        const FieldState rai = apply_raise(s);
        const double x1 = expval_a(s).real();
        out.amps = s.amps
                   + (2.0 * gd * x1 * dt + std::sqrt(gd) * w.dw1) * low.amps
                   + (2.0 * gu * x1 * dt + std::sqrt(gu) * w.dw2) * rai.amps;
        out.leak = rai.leak;
        for (int n = 0; n < d; ++n) {
            const double wn = (n + 1 < d) ? n + 1 : 0;
            out.amps[n] *= std::exp(-0.5 * dt * (gd * n + gu * wn));
        }
    } else {
        const FieldState delta = hssde_increment(s, p, dt, w);
        out.amps = s.amps + delta.amps;
        out.leak = delta.leak;
    }
    if (norm_sq(out) < 1e-12)
        throw std::runtime_error("hssde_step: norm collapsed, step too large");
    return normalize(out);
}

}  // namespace

FieldState hssde_increment(const FieldState& s, const ReservoirParams& p, double dt,
                           const WienerPair& w) {
    const int d = s.dim();
    const double gd = p.gamma * (1.0 + p.nbar);
    const double gu = p.gamma * p.nbar;
    const double x1 = expval_a(s).real();

    const FieldState low = apply_lower(s);
    const FieldState rai = apply_raise(s);

    FieldState out;
    out.amps = Vec::Zero(d);
    out.leak = rai.leak;
    for (int n = 0; n < d; ++n) {
        const double wn = (n + 1 < d) ? n + 1 : 0;
        out.amps[n] = -0.5 * (gd * n + gu * wn) * dt * s.amps[n];
    }
    out.amps += (2.0 * gd * x1 * dt + std::sqrt(gd) * w.dw1) * low.amps;
    out.amps += (2.0 * gu * x1 * dt + std::sqrt(gu) * w.dw2) * rai.amps;
    return out;
}

FieldState hssde_step(const FieldState& s, const ReservoirParams& p, double dt,
                      Rng& rng, const HssdeOptions& opts) {
    return apply_step(s, p, dt, draw_wiener(rng, dt, opts), opts.exact_drift);
}

TrajectoryRecord run_hssde_trajectory(const FieldState& psi0, const ReservoirParams& p,
                                      double horizon, double dt, long sample_every,
                                      std::uint64_t seed, const HssdeOptions& opts) {
    p.validate();
    if (dt <= 0.0 || horizon < 0.0 || sample_every < 1)
        throw std::domain_error("run_hssde_trajectory: bad time grid");

    TrajectoryRecord rec;
    rec.engine = "hssde";
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
        const WienerPair w = draw_wiener(rng, dt, opts);
        if (opts.record_wiener) rec.wiener.push_back({w.dw1, w.dw2});
        try {
            psi = apply_step(psi, p, dt, w, opts.exact_drift);
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

EnsembleResult hssde_ensemble_mean_density(const FieldState& psi0,
                                           const ReservoirParams& p, double horizon,
                                           double dt, long sample_every,
                                           long trajectories, std::uint64_t seed0,
                                           const HssdeOptions& opts, int workers) {
    HssdeOptions o = opts;
    o.snapshot_every = 1;
    o.record_wiener = false;
    auto run = [&](std::uint64_t seed) {
        return run_hssde_trajectory(psi0, p, horizon, dt, sample_every, seed, o);
    };
    return ensemble_mean_density_generic(run, trajectories, seed0, workers);
}

JumpCountMoments jump_count_moments(const FieldState& s, const ReservoirParams& p,
                                    double epsilon, double horizon) {
    if (epsilon <= 0.0) throw std::domain_error("jump_count_moments: epsilon <= 0");
    JumpCountMoments m;
    m.mu1 = p.gamma * horizon * epsilon * epsilon * (1.0 + p.nbar);
    m.mu2 = p.gamma * horizon * epsilon * epsilon * p.nbar;
    const double x1 = expval_a(s).real();
    const double corr = 1.0 + 2.0 / epsilon * x1;
    m.mean1 = m.mu1 * corr;
    m.mean2 = m.mu2 * corr;
    m.var1 = m.mu1;
    m.var2 = m.mu2;
    return m;
}

}  // namespace cavsim
