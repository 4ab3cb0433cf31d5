// Density matrices, trajectories and their validity checks.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace exciton {

struct DensityMatrix {
  Eigen::MatrixXcd m;
  double time = 0.0;  // fs (or dimensionless time)

  int n_sites() const { return static_cast<int>(m.rows()); }

  double trace_real() const { return m.trace().real(); }

  Eigen::VectorXd populations() const { return m.diagonal().real(); }

  double hermiticity_error() const {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
  }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> s(m);
    return s.eigenvalues().minCoeff();
  }

  double purity() const { return (m * m).trace().real(); }

  static DensityMatrix site_state(int site, int n_sites) {
    DensityMatrix rho;
    rho.m = Eigen::MatrixXcd::Zero(n_sites, n_sites);
    rho.m(site, site) = 1.0;
    return rho;
  }

  static DensityMatrix pure(const Eigen::VectorXcd& psi) {
    DensityMatrix rho;
    rho.m = psi * psi.adjoint();
    return rho;
  }
};

struct DensityMatrixTolerances {
  double hermiticity = 1e-10;
  double trace = 1e-8;
  double positivity = 1e-8;
  bool check_positivity = true;  // eigenvalue check is O(n^3); optional for big chains
};

// Throws std::runtime_error naming the first violated invariant. The trace
// must be real and in (0, 1 + tol]; it equals 1 when there is no loss, which
// callers assert separately.
inline void validate_density_matrix(const DensityMatrix& rho,
                                    const DensityMatrixTolerances& tol = {}) {
  if (rho.hermiticity_error() > tol.hermiticity)
    throw std::runtime_error("density matrix not Hermitian at t=" +
                             std::to_string(rho.time));
  const double tr = rho.trace_real();
  if (!(tr > 0.0) || tr > 1.0 + tol.trace)
    throw std::runtime_error("density matrix trace out of (0,1] at t=" +
                             std::to_string(rho.time));
  if (tol.check_positivity && rho.min_eigenvalue() < -tol.positivity)
    throw std::runtime_error("density matrix not positive at t=" +
                             std::to_string(rho.time));
}

enum class Provenance { simulated, ingested };

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  Provenance provenance = Provenance::simulated;
  std::string provenance_detail;

  int n_sites() const { return states.empty() ? 0 : states.front().n_sites(); }
  std::size_t size() const { return times.size(); }
};

}  // namespace exciton
