#pragma once

#include "cavsim/fock.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cavsim {

enum class JumpKind { down, up };  // action of a / of a^dag

struct JumpEvent {
    double time;
    JumpKind kind;
};

/// Per-atom detection log entry for the beam engines.
struct AtomEvent {
    long index;
    std::string prep;
    std::string detected;
    bool flipped;
};

struct SamplePoint {
    double t;
    double n_mean;
    double q1, q2;
    double mean_x1, var_x1, mean_x2, var_x2;
};

/// One stochastic realization: what was sampled, what happened, and the
/// seed that reproduces all of it bit-exactly.
struct TrajectoryRecord {
    std::string engine;
    std::uint64_t seed = 0;
    std::vector<SamplePoint> samples;
    std::vector<JumpEvent> events;                    // jump engines
    std::vector<std::array<double, 2>> wiener;        // diffusive engine (optional)
    std::vector<AtomEvent> atom_events;               // beam engines (optional)
    std::vector<std::pair<double, FieldState>> snapshots;
    std::optional<std::string> abort_reason;

    bool ok() const { return !abort_reason.has_value(); }
};

inline SamplePoint sample_observables(double t, const FieldState& s) {
    SamplePoint p;
    p.t = t;
    p.n_mean = expval_number(s);
    const auto [q1, q2] = coherence_and_fock_distance(s);
    p.q1 = q1;
    p.q2 = q2;
    const QuadStats q = quad_stats(s);
    p.mean_x1 = q.mean_x1;
    p.var_x1 = q.var_x1;
    p.mean_x2 = q.mean_x2;
    p.var_x2 = q.var_x2;
    return p;
}

}  // namespace cavsim
