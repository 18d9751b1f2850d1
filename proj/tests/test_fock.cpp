#include "cavsim/fock.hpp"
#include "cavsim/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace cavsim;

namespace {

FieldState random_state(Rng& rng, int dim) {
    FieldState s;
    s.amps = Vec::Zero(dim);
    for (int n = 0; n < dim; ++n) s.amps[n] = Complex(rng.gaussian(), rng.gaussian());
    return normalize(s);
}

}  // namespace

TEST_CASE("fock state construction") {
    const FieldState vac = make_fock(0, 4);
    CHECK(vac.amps[0] == Complex(1.0));
    CHECK(vac.amps.tail(3).norm() == 0.0);

    const FieldState f3 = make_fock(3, 8);
    CHECK(f3.amps[3] == Complex(1.0));
    CHECK(f3.leak == 0.0);

    CHECK_THROWS_AS(make_fock(8, 8), std::domain_error);
    CHECK_THROWS_AS(make_fock(-1, 8), std::domain_error);
}

TEST_CASE("coherent state construction") {
    const FieldState vac = make_coherent(0.0, 10);
    CHECK(std::abs(vac.amps[0] - Complex(1.0)) < 1e-15);

    const Complex alpha0 = std::sqrt(15.0 / 2.0) * Complex(1.0, 1.0);
    const FieldState big = make_coherent(alpha0, 60);
    CHECK(expval_number(big) == doctest::Approx(15.0).epsilon(1e-6));
    CHECK(big.leak < 1e-8);

    // Poisson tail for alpha=1 truncated at two levels: 1 - 2/e.
    const FieldState tiny = make_coherent(1.0, 2);
    CHECK(tiny.leak == doctest::Approx(1.0 - 2.0 * std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("ladder operators") {
    const FieldState f3 = make_fock(3, 8);
    const FieldState low = apply_lower(f3);
    CHECK(std::abs(low.amps[2] - std::sqrt(3.0)) < 1e-15);

    const FieldState dead = apply_lower(make_fock(0, 4));
    CHECK(norm_sq(dead) == 0.0);

    const FieldState up = apply_raise(make_fock(2, 8));
    CHECK(std::abs(up.amps[3] - std::sqrt(3.0)) < 1e-15);

    // ||a|n>||^2 = n for every level below truncation
    for (int n = 0; n < 12; ++n)
        CHECK(norm_sq(apply_lower(make_fock(n, 12))) == doctest::Approx(n).epsilon(1e-12));

    // raising at the edge moves the mass into leak
    const FieldState edge = apply_raise(make_fock(7, 8));
    CHECK(norm_sq(edge) == 0.0);
    CHECK(edge.leak == doctest::Approx(1.0));
}

TEST_CASE("scalar observables") {
    const FieldState f3 = make_fock(3, 8);
    CHECK(expval_number(f3) == doctest::Approx(3.0));
    CHECK(std::abs(expval_a(f3)) < 1e-15);

    const FieldState coh = make_coherent(2.0, 40);
    CHECK(expval_number(coh) == doctest::Approx(4.0).epsilon(1e-10));
    const QuadStats q = quad_stats(coh);
    CHECK(q.var_x1 == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(q.var_x2 == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(q.mean_x1 == doctest::Approx(2.0).epsilon(1e-9));

    FieldState plus;
    plus.amps = Vec::Zero(4);
    plus.amps[0] = plus.amps[1] = 1.0 / std::sqrt(2.0);
    CHECK(expval_a(plus).real() == doctest::Approx(0.5));
    CHECK(expval_number(plus) == doctest::Approx(0.5));

    FieldState unnorm = make_fock(1, 4);
    unnorm.amps *= 2.0;
    CHECK_THROWS_AS(expval_number(unnorm), std::logic_error);
}

TEST_CASE("coherence and fock distance") {
    const FieldState coh = make_coherent(Complex(1.2, -0.7), 40);
    const auto [q1c, q2c] = coherence_and_fock_distance(coh);
    CHECK(q1c == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(q2c == doctest::Approx(std::norm(Complex(1.2, -0.7))).epsilon(1e-8));

    const auto [q1f, q2f] = coherence_and_fock_distance(make_fock(5, 12));
    CHECK(q1f == doctest::Approx(5.0));
    CHECK(q2f == doctest::Approx(0.0));

    FieldState cat;
    cat.amps = Vec::Zero(4);
    cat.amps[0] = cat.amps[2] = 1.0 / std::sqrt(2.0);
    CHECK(coherence_and_fock_distance(cat).second == doctest::Approx(1.0));
}

TEST_CASE("Q1 and Q2 are nonnegative for random states") {
    Rng rng(1234);
    for (int trial = 0; trial < 200; ++trial) {
        const FieldState s = random_state(rng, 16);
        const auto [q1, q2] = coherence_and_fock_distance(s);
        CHECK(q1 >= -1e-12);
        CHECK(q2 >= -1e-12);
    }
}

TEST_CASE("bose einstein pmf") {
    CHECK(bose_einstein_pmf(3.0, 0) == doctest::Approx(0.25));
    CHECK(bose_einstein_pmf(0.0, 0) == 1.0);
    CHECK(bose_einstein_pmf(0.0, 3) == 0.0);
    CHECK(bose_einstein_pmf(1.0, 2) == doctest::Approx(0.125));
    CHECK_THROWS_AS(bose_einstein_pmf(-0.5, 0), std::domain_error);

    // partial sums follow the geometric tail: sum_{n<N} p = 1 - (nbar/(1+nbar))^N
    for (double nbar : {0.3, 1.0, 4.5}) {
        double sum = 0.0;
        const int N = 25;
        for (int n = 0; n < N; ++n) sum += bose_einstein_pmf(nbar, n);
        const double tail = std::pow(nbar / (1.0 + nbar), N);
        CHECK(sum == doctest::Approx(1.0 - tail).epsilon(1e-12));
    }
}

TEST_CASE("overlap") {
    CHECK(overlap(make_fock(0, 4), make_fock(0, 4)) == Complex(1.0));
    CHECK(overlap(make_fock(0, 4), make_fock(1, 4)) == Complex(0.0));
    CHECK_THROWS_AS(overlap(make_fock(0, 4), make_fock(0, 5)), std::domain_error);

    const Complex alpha(0.9, 0.4), beta(-0.3, 1.1);
    const Complex got = overlap(make_coherent(alpha, 50), make_coherent(beta, 50));
    const Complex expect = std::exp(-0.5 * std::norm(alpha) - 0.5 * std::norm(beta) +
                                    std::conj(alpha) * beta);
    CHECK(std::abs(got - expect) < 1e-10);
}

TEST_CASE("normalize is idempotent") {
    Rng rng(99);
    FieldState s = random_state(rng, 10);
    FieldState once = normalized(s);
    FieldState twice = normalized(once);
    CHECK((once.amps - twice.amps).norm() < 1e-15);
}

TEST_CASE("default truncation rule") {
    CHECK(default_dim(0.0, 0.0) == 30);
    CHECK(default_dim(15.0, 2.0) >= 4 * (15 + 2));
}

TEST_CASE("reservoir params validation") {
    ReservoirParams p;
    p.gamma = 1.0;
    p.nbar = 0.5;
    CHECK_NOTHROW(p.validate());

    p.gamma = 0.0;
    CHECK_THROWS_AS(p.validate(), std::domain_error);

    p.gamma = 1.0;
    p.r_a = 200.0;
    p.r_b = 600.0;  // 200/600 = 1/3 = 0.5/1.5
    CHECK_NOTHROW(p.validate());
    p.coupling_tau = 0.05;  // (600-200)*0.0025 = 1 = gamma
    CHECK_NOTHROW(p.validate());
    p.gamma = 0.5;
    CHECK_THROWS_AS(p.validate(), std::domain_error);
    CHECK_NOTHROW(p.validate(true));  // three-level: gamma = (r_b-r_a)(g tau)^2/2

    p.gamma = 1.0;
    p.r_a = 100.0;
    CHECK_THROWS_AS(p.validate(), std::domain_error);
}
