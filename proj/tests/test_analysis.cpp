#include "cavsim/analysis.hpp"

#include "cavsim/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace cavsim;

namespace {
constexpr double kInvPi = 1.0 / std::numbers::pi;

double grid_value_at(const QGrid& g, double re, double im) {
    int bi = 0, bj = 0;
    double best = 1e300;
    for (int i = 0; i < g.re_axis.size(); ++i)
        for (int j = 0; j < g.im_axis.size(); ++j) {
            const double d = std::hypot(g.re_axis[i] - re, g.im_axis[j] - im);
            if (d < best) {
                best = d;
                bi = i;
                bj = j;
            }
        }
    REQUIRE(best < 1e-9);
    return g.values(bi, bj);
}
}  // namespace

TEST_CASE("husimi Q") {
    SUBCASE("vacuum peaks at 1/pi at the origin") {
        const QGrid g = husimi_q(make_fock(0, 12));
        CHECK(grid_value_at(g, 0.0, 0.0) == doctest::Approx(kInvPi).epsilon(1e-12));
        CHECK(g.values.maxCoeff() == doctest::Approx(kInvPi).epsilon(1e-12));
    }

    SUBCASE("coherent state gives the gaussian bump") {
        const Complex beta(1.5, -0.5);
        const QGrid g = husimi_q(make_coherent(beta, 60));
        for (double re : {0.0, 1.5, 3.0})
            for (double im : {-0.5, 1.0}) {
                const Complex alpha(re, im);
                const double expect = kInvPi * std::exp(-std::norm(alpha - beta));
                CHECK(grid_value_at(g, re, im) == doctest::Approx(expect).epsilon(1e-9));
            }
    }

    SUBCASE("fock state is phase symmetric with a ring maximum") {
        const int n = 3;
        const QGrid g = husimi_q(make_fock(n, 20));
        // Q(alpha) = |alpha|^{2n} e^{-|alpha|^2} / (pi n!)
        const double r2 = 2.25;  // alpha = 1.5
        const double expect = kInvPi * std::pow(r2, n) * std::exp(-r2) / 6.0;
        CHECK(grid_value_at(g, 1.5, 0.0) == doctest::Approx(expect).epsilon(1e-9));
        CHECK(grid_value_at(g, 0.0, 1.5) == doctest::Approx(expect).epsilon(1e-9));
        CHECK(grid_value_at(g, -1.5, 0.0) == doctest::Approx(expect).epsilon(1e-9));
        CHECK(grid_value_at(g, 0.0, 0.0) < 1e-12);
    }

    SUBCASE("bounded by 1/pi for random states") {
        Rng rng(42);
        for (int k = 0; k < 20; ++k) {
            FieldState s = make_fock(0, 10);
            for (int n = 0; n < 10; ++n) s.amps[n] = Complex(rng.gaussian(), rng.gaussian());
            s.amps /= s.amps.norm();
            QGridSpec spec;
            spec.nx = spec.ny = 33;
            CHECK(husimi_q(s, spec).values.maxCoeff() <= kInvPi + 1e-12);
        }
    }

    SUBCASE("riemann sum normalizes to one within 2%") {
        QGridSpec spec;
        spec.re_min = spec.im_min = -7.0;
        spec.re_max = spec.im_max = 7.0;
        spec.nx = spec.ny = 141;
        const QGrid g = husimi_q(make_coherent(Complex(1.0, 1.0), 60), spec);
        const double dx = (spec.re_max - spec.re_min) / (spec.nx - 1);
        const double dy = (spec.im_max - spec.im_min) / (spec.ny - 1);
        CHECK(g.values.sum() * dx * dy == doctest::Approx(1.0).epsilon(0.02));
    }
}

TEST_CASE("time averaged photon pmf") {
    SUBCASE("stationary fock snapshots give a delta pmf") {
        std::vector<std::pair<double, FieldState>> snaps;
        for (int k = 0; k <= 10; ++k) snaps.emplace_back(0.1 * k, make_fock(2, 6));
        const auto pmf = time_avg_photon_pmf(snaps, 0.25);
        REQUIRE(pmf.size() == 6);
        CHECK(pmf[2] == doctest::Approx(1.0));
        CHECK(pmf[0] == doctest::Approx(0.0));
    }

    SUBCASE("alternating snapshots average their weights") {
        std::vector<std::pair<double, FieldState>> snaps;
        for (int k = 0; k < 8; ++k) snaps.emplace_back(double(k), make_fock(k % 2, 4));
        const auto pmf = time_avg_photon_pmf(snaps, -1.0);
        CHECK(pmf[0] == doctest::Approx(0.5));
        CHECK(pmf[1] == doctest::Approx(0.5));
    }

    SUBCASE("burn-in past the last snapshot throws") {
        std::vector<std::pair<double, FieldState>> snaps{{0.0, make_fock(0, 4)}};
        CHECK_THROWS_AS(time_avg_photon_pmf(snaps, 1.0), std::domain_error);
    }
}

TEST_CASE("compare pmf") {
    CHECK(compare_pmf({0.5, 0.5}, {0.5, 0.5}) == doctest::Approx(0.0));
    CHECK(compare_pmf({1.0, 0.0}, {0.0, 1.0}) == doctest::Approx(1.0));
    CHECK(compare_pmf({0.7, 0.3}, {0.5, 0.5}) == doctest::Approx(0.2));
    CHECK_THROWS_AS(compare_pmf({1.0}, {0.5, 0.5}), std::domain_error);
}

TEST_CASE("localization drift law") {
    ReservoirParams p;
    p.gamma = 1.0;
    p.nbar = 0.5;

    SUBCASE("fock states have zero drift") {
        CHECK(localization_drift_rhs(make_fock(3, 12), p) == doctest::Approx(0.0));
        CHECK(localization_drift_rhs(make_fock(0, 12), p) == doctest::Approx(0.0));
    }

    SUBCASE("coherent state value matches the closed form") {
        // Q2 = |alpha|^2, <n> = |alpha|^2, <a a^dag> = |alpha|^2 + 1
        const double a2 = 4.0;
        const FieldState s = make_coherent(2.0, 60);
        const double expect = -p.gamma * (p.nbar + 1.0) * a2 - p.gamma * p.nbar * a2 * a2 / (a2 + 1.0);
        CHECK(localization_drift_rhs(s, p) == doctest::Approx(expect).epsilon(1e-6));
    }

    SUBCASE("rhs is never positive") {
        Rng rng(7);
        for (int k = 0; k < 200; ++k) {
            FieldState s = make_fock(0, 14);
            for (int n = 0; n < 14; ++n) s.amps[n] = Complex(rng.gaussian(), rng.gaussian());
            s.amps /= s.amps.norm();
            CHECK(localization_drift_rhs(s, p) <= 1e-12);
        }
    }
}

TEST_CASE("coherent drift law") {
    ReservoirParams p;
    p.gamma = 2.0;
    p.nbar = 0.0;

    SUBCASE("coherent states have zero drift") {
        CHECK(std::abs(coherent_drift_rhs(make_coherent(Complex(1.0, 0.5), 50), p)) < 1e-8);
    }

    SUBCASE("fock state |1> drifts at -Gamma") {
        // Q1 = 1, the covariance term vanishes
        CHECK(coherent_drift_rhs(make_fock(1, 10), p) == doctest::Approx(-2.0));
    }

    SUBCASE("finite temperature throws") {
        ReservoirParams warm = p;
        warm.nbar = 0.5;
        std::vector<FieldState> a{make_fock(1, 8)}, b{make_fock(1, 8)};
        CHECK_THROWS_AS(coherent_drift_check(a, b, warm, 0.1), std::domain_error);
    }

    SUBCASE("rhs is never positive") {
        Rng rng(11);
        for (int k = 0; k < 200; ++k) {
            FieldState s = make_fock(0, 12);
            for (int n = 0; n < 12; ++n) s.amps[n] = Complex(rng.gaussian(), rng.gaussian());
            s.amps /= s.amps.norm();
            CHECK(coherent_drift_rhs(s, p) <= 1e-12);
        }
    }
}

TEST_CASE("drift check plumbing") {
    ReservoirParams p;
    p.gamma = 1.0;
    p.nbar = 0.0;
    // hand-built pair of ensembles: Q2 identical at both times => empirical 0
    std::vector<FieldState> at_t{make_fock(2, 8), make_fock(3, 8)};
    std::vector<FieldState> at_tp = at_t;
    const DriftCheck c = localization_drift_check(at_t, at_tp, p, 0.1);
    CHECK(c.empirical == doctest::Approx(0.0));
    CHECK(c.analytic == doctest::Approx(0.0));
    CHECK(c.se_empirical == doctest::Approx(0.0));

    std::vector<FieldState> one{make_fock(1, 8)};
    CHECK_THROWS_AS(localization_drift_check(one, at_t, p, 0.1), std::domain_error);
}
