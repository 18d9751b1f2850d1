#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <utility>

namespace cavsim {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

/// Pure state of the cavity mode in the truncated number basis.
/// `leak` accumulates probability mass dropped at the truncation edge;
/// it only ever grows along a trajectory.
struct FieldState {
    Vec amps;
    double leak = 0.0;

    int dim() const { return static_cast<int>(amps.size()); }
};

/// Reservoir description: decay rate and thermal occupation, plus the
/// microscopic beam parameters when a beam model is in play.
struct ReservoirParams {
    double gamma = 1.0;
    double nbar = 0.0;
    std::optional<double> r_a;
    std::optional<double> r_b;
    std::optional<double> coupling_tau;  // lambda*tau (two-level) or g*tau (three-level)
    std::optional<double> epsilon;       // classical drive amplitude, homodyne model

    /// Throws std::domain_error on inconsistent parameters.
    void validate(bool three_level = false) const;
};

double norm_sq(const FieldState& s);
FieldState& normalize(FieldState& s);
FieldState normalized(FieldState s);

FieldState make_fock(int n, int dim);
FieldState make_coherent(Complex alpha, int dim);

/// a|psi>, unnormalized. Never leaks.
FieldState apply_lower(const FieldState& s);
/// a^dag|psi>, unnormalized; mass at the truncation edge goes to `leak`.
FieldState apply_raise(const FieldState& s);

/// Default truncation rule for a given initial occupation and temperature.
int default_dim(double n0, double nbar);

double expval_number(const FieldState& s);
double expval_number_sq(const FieldState& s);
Complex expval_a(const FieldState& s);
/// <a a^dag> with the truncated operator (top level contributes zero).
double expval_aad(const FieldState& s);
/// <a^dag a a> (appears in the coherent-drift correlator).
Complex expval_naa(const FieldState& s);

struct QuadStats {
    double mean_x1, var_x1, mean_x2, var_x2;
};
/// X1 = (a+a^dag)/2, X2 = (a-a^dag)/2i.
QuadStats quad_stats(const FieldState& s);

/// (Q1, Q2): distance from the coherent family and from the Fock family.
/// Q1 = <a^dag a> - |<a>|^2, Q2 = <n^2> - <n>^2.
std::pair<double, double> coherence_and_fock_distance(const FieldState& s);

/// Bose-Einstein photon number distribution p(n) = nbar^n/(1+nbar)^(n+1).
double bose_einstein_pmf(double nbar, int n);

/// <s1|s2>, conjugating s1.
Complex overlap(const FieldState& s1, const FieldState& s2);

}  // namespace cavsim
