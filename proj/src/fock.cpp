#include "cavsim/fock.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cavsim {

namespace {
constexpr double kNormTol = 1e-9;

void require_normalized(const FieldState& s, const char* where) {
    if (std::abs(norm_sq(s) - 1.0) > kNormTol)
        throw std::logic_error(std::string(where) + ": state is not normalized");
}
}  // namespace

void ReservoirParams::validate(bool three_level) const {
    if (gamma <= 0.0) throw std::domain_error("gamma must be positive");
    if (nbar < 0.0) throw std::domain_error("nbar must be nonnegative");
    if (r_a.has_value() != r_b.has_value())
        throw std::domain_error("r_a and r_b must be given together");
    if (r_a) {
        if (*r_a < 0.0 || *r_b <= 0.0)
            throw std::domain_error("injection rates must be nonnegative, r_b > 0");
        const double lhs = *r_a / *r_b;
        const double rhs = nbar / (1.0 + nbar);
        if (std::abs(lhs - rhs) > 1e-12)
            throw std::domain_error("r_a/r_b must equal nbar/(1+nbar)");
        if (coupling_tau) {
            const double ct2 = *coupling_tau * *coupling_tau;
            const double g = three_level ? (*r_b - *r_a) * ct2 / 2.0
                                         : (*r_b - *r_a) * ct2;
            if (std::abs(g - gamma) > 1e-9 * std::max(1.0, gamma))
                throw std::domain_error("gamma inconsistent with (r_b - r_a) and couplingatau");
        }
    }
    if (epsilon && *epsilon < 0.0)
        throw std::domain_error("epsilon must be nonnegative");
}

double norm_sq(const FieldState& s) { return s.amps.squaredNorm(); }

FieldState& normalize(FieldState& s) {
    const double n = std::sqrt(norm_sq(s));
    if (n <= 0.0) throw std::runtime_error("normalize: zero-norm state");
    if (n != 1.0) s.amps /= n;
    return s;
}

FieldState normalized(FieldState s) {
    normalize(s);
    return s;
}

FieldState make_fock(int n, int dim) {
    if (dim < 2) throw std::domain_error("make_fock: dim must be >= 2");
    if (n < 0 || n >= dim) throw std::domain_error("make_fock: n out of range");
    FieldState s;
    s.amps = Vec::Zero(dim);
    s.amps[n] = 1.0;
    return s;
}

FieldState make_coherent(Complex alpha, int dim) {
    if (dim < 2) throw std::domain_error("make_coherent: dim must be >= 2");
    FieldState s;
    s.amps = Vec::Zero(dim);
    s.amps[0] = 1.0;
    for (int n = 1; n < dim; ++n)
        s.amps[n] = s.amps[n - 1] * alpha / std::sqrt(static_cast<double>(n));
    // Tail mass of the untruncated Poisson weights, recorded before normalizing.
    const double kept = s.amps.squaredNorm() * std::exp(-std::norm(alpha));
    s.leak = std::max(0.0, 1.0 - kept);
    normalize(s);
    return s;
}

FieldState apply_lower(const FieldState& s) {
    const int d = s.dim();
    FieldState out;
    out.amps = Vec::Zero(d);
    out.leak = s.leak;
    for (int n = 1; n < d; ++n)
        out.amps[n - 1] = std::sqrt(static_cast<double>(n)) * s.amps[n];
    return out;
}

FieldState apply_raise(const FieldState& s) {
    const int d = s.dim();
    FieldState out;
    out.amps = Vec::Zero(d);
    for (int n = 0; n + 1 < d; ++n)
        out.amps[n + 1] = std::sqrt(static_cast<double>(n + 1)) * s.amps[n];
    const double lost = static_cast<double>(d) * std::norm(s.amps[d - 1]);
    const double total = out.amps.squaredNorm() + lost;
    out.leak = s.leak + (total > 0.0 ? lost / total : 0.0);
    return out;
}

int default_dim(double n0, double nbar) {
    const double m = n0 + nbar;
    const double d = 4.0 * (m + 3.0 * std::sqrt(m + 1.0));
    return std::max(30, static_cast<int>(std::ceil(d)));
}

double expval_number(const FieldState& s) {
    require_normalized(s, "expval_number");
    double acc = 0.0;
    for (int n = 1; n < s.dim(); ++n) acc += n * std::norm(s.amps[n]);
    return acc;
}

double expval_number_sq(const FieldState& s) {
    require_normalized(s, "expval_number_sq");
    double acc = 0.0;
    for (int n = 1; n < s.dim(); ++n)
        acc += static_cast<double>(n) * n * std::norm(s.amps[n]);
    return acc;
}

Complex expval_a(const FieldState& s) {
    require_normalized(s, "expval_a");
    Complex acc = 0.0;
    for (int n = 0; n + 1 < s.dim(); ++n)
        acc += std::conj(s.amps[n]) * std::sqrt(static_cast<double>(n + 1)) * s.amps[n + 1];
    return acc;
}

double expval_aad(const FieldState& s) {
    require_normalized(s, "expval_aad");
    double acc = 0.0;
    for (int n = 0; n + 1 < s.dim(); ++n) acc += (n + 1) * std::norm(s.amps[n]);
    return acc;
}

Complex expval_naa(const FieldState& s) {
    require_normalized(s, "expval_naa");
    Complex acc = 0.0;
    for (int n = 0; n + 1 < s.dim(); ++n)
        acc += std::conj(s.amps[n]) * static_cast<double>(n)
               * std::sqrt(static_cast<double>(n + 1)) * s.amps[n + 1];
    return acc;
}

QuadStats quad_stats(const FieldState& s) {
    const Complex a = expval_a(s);
    const double n = expval_number(s);
    // <a^2> over the bidiagonal ladder.
    Complex a2 = 0.0;
    for (int k = 0; k + 2 < s.dim(); ++k)
        a2 += std::conj(s.amps[k]) * std::sqrt(static_cast<double>((k + 1) * (k + 2)))
              * s.amps[k + 2];
    QuadStats q;
    q.mean_x1 = a.real();
    q.mean_x2 = a.imag();
    // <X1^2> = (Re<a^2> + <n> + 1/2)/2 + ... expanded explicitly:
    const double x1sq = 0.25 * (2.0 * a2.real() + 2.0 * n + 1.0);
    const double x2sq = 0.25 * (-2.0 * a2.real() + 2.0 * n + 1.0);
    q.var_x1 = x1sq - q.mean_x1 * q.mean_x1;
    q.var_x2 = x2sq - q.mean_x2 * q.mean_x2;
    return q;
}

std::pair<double, double> coherence_and_fock_distance(const FieldState& s) {
    const double n = expval_number(s);
    const double n2 = expval_number_sq(s);
    const Complex a = expval_a(s);
    return {n - std::norm(a), n2 - n * n};
}

double bose_einstein_pmf(double nbar, int n) {
    if (nbar < 0.0) throw std::domain_error("bose_einstein_pmf: nbar < 0");
    if (n < 0) throw std::domain_error("bose_einstein_pmf: n < 0");
    if (nbar == 0.0) return n == 0 ? 1.0 : 0.0;
    return std::pow(nbar / (1.0 + nbar), n) / (1.0 + nbar);
}

Complex overlap(const FieldState& s1, const FieldState& s2) {
    if (s1.dim() != s2.dim()) throw std::domain_error("overlap: dimension mismatch");
    return s1.amps.dot(s2.amps);  // Eigen dot conjugates the left argument
}

}  // namespace cavsim
