#pragma once

#include "cavsim/fock.hpp"
#include "cavsim/trajectory.hpp"

#include <utility>
#include <vector>

namespace cavsim {

/// Husimi Q values on a rectangular grid in the complex-alpha plane,
/// normalized so cell values never exceed 1/pi.
struct QGrid {
    Eigen::VectorXd re_axis;
    Eigen::VectorXd im_axis;
    Eigen::MatrixXd values;  // values(i,j) = Q(re_axis[i] + i*im_axis[j])
};

struct QGridSpec {
    double re_min = -6.0, re_max = 6.0;
    double im_min = -6.0, im_max = 6.0;
    int nx = 97, ny = 97;
};

QGrid husimi_q(const FieldState& s, const QGridSpec& spec = {});

/// Time-weighted average of |c_n|^2 over snapshots taken after burn_in.
/// Uniform sampling grid, so this is a plain mean; sums to one.
std::vector<double> time_avg_photon_pmf(
    const std::vector<std::pair<double, FieldState>>& snapshots, double burn_in);

/// Total variation distance (1/2) sum |p - q|.
double compare_pmf(const std::vector<double>& p, const std::vector<double>& q);

struct SqueezingPoint {
    double t;
    double var_x1, var_x2, ratio;
};
std::vector<SqueezingPoint> squeezing_track(const TrajectoryRecord& rec);

struct DriftCheck {
    double empirical;   // ensemble-mean finite difference of the variance
    double analytic;    // ensemble mean of the per-state drift law
    double se_empirical;
    double se_diff;     // standard error of (empirical - analytic) per state
};

/// Mean-decrease law for Q2 = <(Delta a^dag a)^2>: compares the finite
/// difference of the ensemble-mean Q2 over [t, t+dt] against
///   -Gamma(nbar+1) Q2^2/<a^dag a> - Gamma nbar Q2^2/<a a^dag>
/// evaluated per state. States with <a^dag a> below 1e-12 contribute zero
/// to the first term (the 0/0 limit).
DriftCheck localization_drift_check(const std::vector<FieldState>& at_t,
                                    const std::vector<FieldState>& at_t_plus,
                                    const ReservoirParams& p, double dt);

/// Per-state analytic right-hand side of the Q2 mean-decrease law.
double localization_drift_rhs(const FieldState& s, const ReservoirParams& p);

/// T=0 analog for Q1 = <|Delta a|^2>; throws std::domain_error if nbar > 0
/// (the finite-temperature expression is not sign-definite).
DriftCheck coherent_drift_check(const std::vector<FieldState>& at_t,
                                const std::vector<FieldState>& at_t_plus,
                                const ReservoirParams& p, double dt);

double coherent_drift_rhs(const FieldState& s, const ReservoirParams& p);

}  // namespace cavsim
