#include "cavsim/lindblad.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cavsim {

void DensityMatrix::check_invariants(double herm_tol, double trace_tol,
                                     double pos_tol) const {
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > herm_tol) {
        std::ostringstream os;
        os << "density matrix not Hermitian: max deviation " << herm;
        throw std::runtime_error(os.str());
    }
    const double tr = rho.trace().real();
    if (std::abs(tr - 1.0) > trace_tol) {
        std::ostringstream os;
        os << "density matrix trace " << tr << " differs from 1";
        throw std::runtime_error(os.str());
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (rho + rho.adjoint()),
                                          Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin < -pos_tol) {
        std::ostringstream os;
        os << "density matrix not positive: smallest eigenvalue " << lmin;
        throw std::runtime_error(os.str());
    }
}

DensityMatrix from_pure(const FieldState& s) {
    if (std::abs(norm_sq(s) - 1.0) > 1e-9)
        throw std::logic_error("from_pure: state is not normalized");
    DensityMatrix d;
    d.rho = s.amps * s.amps.adjoint();
    return d;
}

DensityMatrix thermal_state(double nbar, int dim) {
    if (nbar < 0.0) throw std::domain_error("thermal_state: nbar < 0");
    DensityMatrix d;
    d.rho = Mat::Zero(dim, dim);
    double tr = 0.0;
    for (int n = 0; n < dim; ++n) {
        const double p = bose_einstein_pmf(nbar, n);
        d.rho(n, n) = p;
        tr += p;
    }
    d.rho /= tr;
    return d;
}

Mat lindblad_rhs(const Mat& rho, const ReservoirParams& p) {
    const int d = static_cast<int>(rho.rows());
    const double gd = p.gamma * (1.0 + p.nbar);  // down channel, sqrt(gd) a
    const double gu = p.gamma * p.nbar;          // up channel, sqrt(gu) a^dag
    Mat out = Mat::Zero(d, d);
    for (int m = 0; m < d; ++m) {
        const double wm = (m + 1 < d) ? m + 1 : 0;  // truncated a a^dag diagonal
        for (int n = 0; n < d; ++n) {
            const double wn = (n + 1 < d) ? n + 1 : 0;
            Complex v = -0.5 * (gd * (m + n) + gu * (wm + wn)) * rho(m, n);
            if (m + 1 < d && n + 1 < d)
                v += gd * std::sqrt(double(m + 1) * (n + 1)) * rho(m + 1, n + 1);
            if (m > 0 && n > 0)
                v += gu * std::sqrt(double(m) * n) * rho(m - 1, n - 1);
            out(m, n) = v;
        }
    }
    return out;
}

std::vector<MasterSnapshot> evolve_master(const DensityMatrix& rho0,
                                          const ReservoirParams& p, double dt,
                                          long steps, long sample_every) {
    p.validate();
    rho0.check_invariants();
    if (dt <= 0.0 || steps < 0 || sample_every < 1)
        throw std::domain_error("evolve_master: bad time grid");

    std::vector<MasterSnapshot> out;
    Mat rho = rho0.rho;
    out.push_back({0.0, DensityMatrix{rho}});
    for (long k = 0; k < steps; ++k) {
        const Mat k1 = lindblad_rhs(rho, p);
        const Mat k2 = lindblad_rhs(rho + 0.5 * dt * k1, p);
        const Mat k3 = lindblad_rhs(rho + 0.5 * dt * k2, p);
        const Mat k4 = lindblad_rhs(rho + dt * k3, p);
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if ((k + 1) % sample_every == 0 || k + 1 == steps) {
            DensityMatrix snap{rho};
            try {
                snap.check_invariants(1e-9, 1e-9, 1e-8);
            } catch (const std::runtime_error& e) {
                std::ostringstream os;
                os << "evolve_master aborted at t=" << dt * (k + 1) << ": " << e.what();
                throw std::runtime_error(os.str());
            }
            out.push_back({dt * (k + 1), std::move(snap)});
        }
    }
    return out;
}

double trace_distance(const DensityMatrix& r1, const DensityMatrix& r2) {
    if (r1.dim() != r2.dim())
        throw std::domain_error("trace_distance: dimension mismatch");
    Mat diff = r1.rho - r2.rho;
    diff = 0.5 * (diff + diff.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<Mat> es(diff, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double purity(const DensityMatrix& r) {
    return (r.rho * r.rho).trace().real();
}

double expval_number(const DensityMatrix& r) {
    double acc = 0.0;
    for (int n = 1; n < r.dim(); ++n) acc += n * r.rho(n, n).real();
    return acc;
}

}  // namespace cavsim
