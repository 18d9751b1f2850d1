#include "cavsim/mcwf.hpp"

#include "cavsim/ensemble.hpp"

#include <doctest.h>

#include <cmath>

using namespace cavsim;

namespace {

ReservoirParams params(double gamma, double nbar) {
    ReservoirParams p;
    p.gamma = gamma;
    p.nbar = nbar;
    return p;
}

bool is_fock(const FieldState& s) {
    int nonzero = 0;
    for (int n = 0; n < s.dim(); ++n)
        if (std::norm(s.amps[n]) > 1e-24) ++nonzero;
    return nonzero == 1;
}

}  // namespace

TEST_CASE("jump rates") {
    const auto [d0, u0] = jump_rates(make_fock(0, 20), params(1.0, 1.0));
    CHECK(d0 == doctest::Approx(0.0));
    CHECK(u0 == doctest::Approx(1.0));

    const auto [d3, u3] = jump_rates(make_fock(3, 20), params(1.0, 0.0));
    CHECK(d3 == doctest::Approx(3.0));
    CHECK(u3 == doctest::Approx(0.0));

    const auto [dc, uc] = jump_rates(make_coherent(2.0, 40), params(1.0, 1.0));
    CHECK(dc == doctest::Approx(8.0).epsilon(1e-8));
    CHECK(uc == doctest::Approx(5.0).epsilon(1e-8));
}

TEST_CASE("no-jump step") {
    const ReservoirParams p = params(1.0, 2.0);

    SUBCASE("fock states are fixed points") {
        for (int n : {0, 2, 7}) {
            const FieldState s = make_fock(n, 12);
            const FieldState out = no_jump_step(s, p, 1e-3);
            CHECK((out.amps - s.amps).norm() < 1e-14);
            // Q2 invariant for fock inputs
            CHECK(coherence_and_fock_distance(out).second == doctest::Approx(0.0));
        }
    }

    SUBCASE("coherent amplitude contracts at rate Gamma(2nbar+1)/2") {
        const double nbar = 0.5, t = 0.2, dt = 1e-4;
        FieldState s = make_coherent(1.5, 40);
        for (int k = 0; k < std::lround(t / dt); ++k)
            s = no_jump_step(s, params(1.0, nbar), dt, true);
        const double expect = 1.5 * std::exp(-(2.0 * nbar + 1.0) * t / 2.0);
        CHECK(expval_a(s).real() == doctest::Approx(expect).epsilon(1e-6));
        CHECK(coherence_and_fock_distance(s).first < 1e-10);
    }

    SUBCASE("first-order propagator agrees with the exponential to O(dt)") {
        const FieldState s = make_coherent(1.0, 30);
        const double dt = 1e-4;
        const FieldState a = no_jump_step(s, p, dt, false);
        const FieldState b = no_jump_step(s, p, dt, true);
        CHECK((a.amps - b.amps).norm() < 50 * dt * dt);
    }
}

TEST_CASE("apply jump") {
    CHECK((apply_jump(make_fock(3, 8), JumpKind::down).amps -
           make_fock(2, 8).amps).norm() < 1e-15);

    const FieldState coh = make_coherent(1.2, 40);
    const FieldState up = apply_jump(coh, JumpKind::up);
    CHECK(coherence_and_fock_distance(up).first > 0.01);  // not coherent any more

    const FieldState down = apply_jump(coh, JumpKind::down);
    CHECK(std::abs(overlap(down, coh)) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(apply_jump(make_fock(0, 8), JumpKind::down), std::logic_error);
}

TEST_CASE("mc step") {
    SUBCASE("vacuum at T=0 is dark") {
        Rng rng(7);
        FieldState s = make_fock(0, 10);
        for (int k = 0; k < 100; ++k) {
            auto [next, ev] = mc_step(s, params(1.0, 0.0), 1e-3, k * 1e-3, rng);
            CHECK(!ev.has_value());
            s = std::move(next);
        }
        CHECK(std::norm(s.amps[0]) == doctest::Approx(1.0));
    }

    SUBCASE("fock family is closed") {
        Rng rng(21);
        FieldState s = make_fock(3, 30);
        for (int k = 0; k < 2000; ++k) {
            s = mc_step(s, params(1.0, 3.0), 1e-3, k * 1e-3, rng).first;
            REQUIRE(is_fock(s));
        }
    }

    SUBCASE("norm is preserved") {
        Rng rng(5);
        FieldState s = make_coherent(Complex(1.0, 1.0), 40);
        for (int k = 0; k < 500; ++k) {
            s = mc_step(s, params(1.0, 1.0), 1e-3, k * 1e-3, rng).first;
            CHECK(std::abs(norm_sq(s) - 1.0) < 1e-9);
        }
    }

    SUBCASE("oversized steps abort") {
        Rng rng(1);
        CHECK_THROWS_AS(mc_step(make_fock(20, 22), params(1.0, 3.0), 0.1, 0.0, rng),
                        std::runtime_error);
    }
}

TEST_CASE("mc trajectory") {
    SUBCASE("replay is bit-exact") {
        const FieldState psi0 = make_coherent(std::sqrt(3.0), 30);
        const auto a = run_mc_trajectory(psi0, params(1.0, 0.5), 2.0, 1e-3, 100, 42);
        const auto b = run_mc_trajectory(psi0, params(1.0, 0.5), 2.0, 1e-3, 100, 42);
        REQUIRE(a.samples.size() == b.samples.size());
        for (std::size_t i = 0; i < a.samples.size(); ++i) {
            CHECK(a.samples[i].n_mean == b.samples[i].n_mean);
            CHECK(a.samples[i].q2 == b.samples[i].q2);
        }
        REQUIRE(a.events.size() == b.events.size());
        for (std::size_t i = 0; i < a.events.size(); ++i)
            CHECK(a.events[i].time == b.events[i].time);
    }

    SUBCASE("no up-jumps at T=0") {
        const auto rec = run_mc_trajectory(make_coherent(2.0, 40), params(1.0, 0.0), 4.0,
                                           1e-3, 100, 1234);
        REQUIRE(rec.ok());
        for (const JumpEvent& e : rec.events) CHECK(e.kind == JumpKind::down);
    }

    SUBCASE("fock start gives a unit-step staircase") {
        const auto rec = run_mc_trajectory(make_fock(3, 30), params(1.0, 3.0), 5.0, 1e-3,
                                           10, 7);
        REQUIRE(rec.ok());
        for (const SamplePoint& s : rec.samples) {
            CHECK(s.n_mean == doctest::Approx(std::round(s.n_mean)).epsilon(1e-9));
            CHECK(s.q2 < 1e-9);
        }
    }
}

TEST_CASE("ensemble mean density") {
    const FieldState psi0 = make_fock(1, 20);
    const ReservoirParams p = params(1.0, 0.0);

    SUBCASE("single trajectory stays pure") {
        const auto res = ensemble_mean_density(psi0, p, 1.0, 1e-3, 200, 1, 9);
        for (const auto& s : res.mean) CHECK(purity(s.rho) == doctest::Approx(1.0));
    }

    SUBCASE("small ensemble tracks the oracle loosely") {
        const auto res = ensemble_mean_density(psi0, p, 1.0, 1e-3, 500, 400, 11);
        const auto oracle = evolve_master(from_pure(psi0), p, 5e-4, 2000, 1000);
        REQUIRE(res.mean.size() >= 2);
        const double d = trace_distance(res.mean.back().rho, oracle.back().rho);
        CHECK(d < 0.12);
        CHECK(std::abs(res.mean.back().rho.rho.trace().real() - 1.0) < 1e-9);
    }

    SUBCASE("worker count does not change the result") {
        const auto one = ensemble_mean_density(psi0, p, 0.5, 1e-3, 250, 64, 3, {}, 1);
        const auto four = ensemble_mean_density(psi0, p, 0.5, 1e-3, 250, 64, 3, {}, 4);
        REQUIRE(one.mean.size() == four.mean.size());
        for (std::size_t i = 0; i < one.mean.size(); ++i)
            CHECK((one.mean[i].rho.rho - four.mean[i].rho.rho).cwiseAbs().maxCoeff() ==
                  0.0);
    }
}
