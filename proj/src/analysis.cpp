#include "cavsim/analysis.hpp"

#include <cmath>
#include <stdexcept>

namespace cavsim {

QGrid husimi_q(const FieldState& s, const QGridSpec& spec) {
    if (spec.nx < 2 || spec.ny < 2) throw std::domain_error("husimi_q: bad grid");
    QGrid g;
    g.re_axis = Eigen::VectorXd::LinSpaced(spec.nx, spec.re_min, spec.re_max);
    g.im_axis = Eigen::VectorXd::LinSpaced(spec.ny, spec.im_min, spec.im_max);
    g.values.resize(spec.nx, spec.ny);
    const int d = s.dim();
    // <alpha|psi> via the conjugated coherent expansion; one pass per cell.
    for (int i = 0; i < spec.nx; ++i) {
        for (int j = 0; j < spec.ny; ++j) {
            const Complex alpha(g.re_axis[i], g.im_axis[j]);
            Complex term = 1.0;  // conj(alpha)^n / sqrt(n!) before the Gaussian
            Complex acc = s.amps[0];
            for (int n = 1; n < d; ++n) {
                term *= std::conj(alpha) / std::sqrt(static_cast<double>(n));
                acc += term * s.amps[n];
            }
            g.values(i, j) = std::norm(acc) * std::exp(-std::norm(alpha)) / M_PI;
        }
    }
    return g;
}

std::vector<double> time_avg_photon_pmf(
    const std::vector<std::pair<double, FieldState>>& snapshots, double burn_in) {
    std::vector<double> pmf;
    long count = 0;
    for (const auto& [t, s] : snapshots) {
        if (t < burn_in) continue;
        if (pmf.empty()) pmf.assign(s.dim(), 0.0);
        const double nsq = norm_sq(s);
        for (int n = 0; n < s.dim(); ++n) pmf[n] += std::norm(s.amps[n]) / nsq;
        ++count;
    }
    if (count == 0)
        throw std::domain_error("time_avg_photon_pmf: no snapshots after burn-in");
    for (double& p : pmf) p /= static_cast<double>(count);
    return pmf;
}

double compare_pmf(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw std::domain_error("compare_pmf: support mismatch");
    double tv = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - q[i]);
    return 0.5 * tv;
}

std::vector<SqueezingPoint> squeezing_track(const TrajectoryRecord& rec) {
    std::vector<SqueezingPoint> out;
    out.reserve(rec.samples.size());
    for (const SamplePoint& s : rec.samples)
        out.push_back({s.t, s.var_x1, s.var_x2, s.var_x1 / s.var_x2});
    return out;
}

double localization_drift_rhs(const FieldState& s, const ReservoirParams& p) {
    const double n = expval_number(s);
    const double naa = expval_aad(s);
    const double q2 = coherence_and_fock_distance(s).second;
    double rhs = 0.0;
    // <(Delta n) n> = Q2 and <(Delta a a^dag) a a^dag> = Var(a a^dag) = Q2,
    // so both numerators are Q2^2.
    if (n > 1e-12) rhs -= p.gamma * (p.nbar + 1.0) * q2 * q2 / n;
    if (naa > 1e-12) rhs -= p.gamma * p.nbar * q2 * q2 / naa;
    return rhs;
}

double coherent_drift_rhs(const FieldState& s, const ReservoirParams& p) {
    const double n = expval_number(s);
    const double q1 = coherence_and_fock_distance(s).first;
    double rhs = -p.gamma * q1;
    if (n > 1e-12) {
        const Complex corr = expval_naa(s) - n * expval_a(s);
        rhs -= p.gamma * std::norm(corr) / n;
    }
    return rhs;
}

namespace {

DriftCheck drift_check_impl(const std::vector<FieldState>& at_t,
                            const std::vector<FieldState>& at_t_plus,
                            const ReservoirParams& p, double dt, bool fock_law) {
    if (at_t.size() != at_t_plus.size() || at_t.empty())
        throw std::domain_error("drift check: mismatched or empty ensembles");
    if (dt <= 0.0) throw std::domain_error("drift check: dt must be positive");
    const std::size_t m = at_t.size();
    double sum_e = 0.0, sum_a = 0.0, sum_e2 = 0.0, sum_d2 = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const auto [q1a, q2a] = coherence_and_fock_distance(at_t[k]);
        const auto [q1b, q2b] = coherence_and_fock_distance(at_t_plus[k]);
        const double emp = fock_law ? (q2b - q2a) / dt : (q1b - q1a) / dt;
        const double ana = fock_law ? localization_drift_rhs(at_t[k], p)
                                    : coherent_drift_rhs(at_t[k], p);
        sum_e += emp;
        sum_a += ana;
        sum_e2 += emp * emp;
        sum_d2 += (emp - ana) * (emp - ana);
    }
    DriftCheck out;
    out.empirical = sum_e / m;
    out.analytic = sum_a / m;
    const double var_e = std::max(0.0, sum_e2 / m - out.empirical * out.empirical);
    const double mean_d = out.empirical - out.analytic;
    const double var_d = std::max(0.0, sum_d2 / m - mean_d * mean_d);
    out.se_empirical = std::sqrt(var_e / m);
    out.se_diff = std::sqrt(var_d / m);
    return out;
}

}  // namespace

DriftCheck localization_drift_check(const std::vector<FieldState>& at_t,
                                    const std::vector<FieldState>& at_t_plus,
                                    const ReservoirParams& p, double dt) {
    return drift_check_impl(at_t, at_t_plus, p, dt, true);
}

DriftCheck coherent_drift_check(const std::vector<FieldState>& at_t,
                                const std::vector<FieldState>& at_t_plus,
                                const ReservoirParams& p, double dt) {
    if (p.nbar > 0.0)
        throw std::domain_error(
            "coherent_drift_check: only defined at nbar = 0 (not sign-definite otherwise)");
    return drift_check_impl(at_t, at_t_plus, p, dt, false);
}

}  // namespace cavsim
