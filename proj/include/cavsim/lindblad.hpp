#pragma once

#include "cavsim/fock.hpp"

#include <vector>

namespace cavsim {

/// Ensemble-level field state. Hermitian, trace one, numerically positive.
struct DensityMatrix {
    Mat rho;

    int dim() const { return static_cast<int>(rho.rows()); }

    /// Throws std::runtime_error with a diagnostic on invariant breach.
    void check_invariants(double herm_tol = 1e-10, double trace_tol = 1e-10,
                          double pos_tol = 1e-8) const;
};

struct MasterSnapshot {
    double t;
    DensityMatrix rho;
};

DensityMatrix from_pure(const FieldState& s);
DensityMatrix thermal_state(double nbar, int dim);

/// Right-hand side of the finite-temperature cavity master equation.
/// Ladder operators are the truncated D x D matrices, so the truncated
/// thermal state is an exact fixed point.
Mat lindblad_rhs(const Mat& rho, const ReservoirParams& p);

/// Fixed-step classical RK4 integration of the master equation.
/// Returns snapshots every `sample_every` steps (always includes t=0 and
/// the final time). Invariants are checked at every snapshot.
std::vector<MasterSnapshot> evolve_master(const DensityMatrix& rho0,
                                          const ReservoirParams& p, double dt,
                                          long steps, long sample_every = 1);

/// (1/2)||r1 - r2||_1 via the eigenvalues of the Hermitian difference.
double trace_distance(const DensityMatrix& r1, const DensityMatrix& r2);

double purity(const DensityMatrix& r);
double expval_number(const DensityMatrix& r);

}  // namespace cavsim
