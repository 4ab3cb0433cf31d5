// Time evolution: Lindblad master equation (Hamiltonian + site dephasing +
// site loss) via fixed-step RK4, and exact coherent dynamics via the spectral
// decomposition.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "exciton/density_matrix.hpp"
#include "exciton/model.hpp"
#include "exciton/units.hpp"

namespace exciton {

struct IntegratorSettings {
  double step = 0.25;              // fs; chains in dimensionless units use ~0.01
  bool convergence_check = false;  // re-run at step/2 and compare populations
  bool validate = true;            // check density-matrix invariants at samples
  DensityMatrixTolerances tolerances{};
};

namespace detail {

// Right-hand side of the master equation with preallocated workspace.
// For tridiagonal Hamiltonians the commutator is evaluated with banded
// products, which keeps long-chain ensembles tractable.
class LindbladSystem {
 public:
  LindbladSystem(const Hamiltonian& h, const DecoherenceSpec& dec,
                 const UnitSystem& units)
      : n_(h.n_sites()), tridiagonal_(h.is_tridiagonal()) {
    dec.validate(n_);
    if (!h.is_symmetric(1e-10 * (1.0 + h.elements.cwiseAbs().maxCoeff())))
      throw std::invalid_argument("LindbladSystem: Hamiltonian not symmetric");
    const Eigen::MatrixXd hs = h.elements / units.hbar;
    diag_ = hs.diagonal();
    if (n_ > 1) offdiag_ = hs.diagonal(1);
    hc_ = hs.cast<std::complex<double>>();
    decay_.resize(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        double r = 0.5 * (dec.loss[i] + dec.loss[j]);
        if (i != j) r += 0.5 * (dec.dephasing[i] + dec.dephasing[j]);
        decay_(i, j) = r;
      }
    tmp_a_.resize(n_, n_);
    tmp_b_.resize(n_, n_);
  }

  int n_sites() const { return n_; }

  // out = -i [H, rho] / hbar - decay .* rho
  void rhs(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) {
    const std::complex<double> minus_i(0.0, -1.0);
    if (tridiagonal_) {
      // H*rho by rows
      tmp_a_.noalias() = diag_.asDiagonal() * rho;
      if (n_ > 1) {
        tmp_a_.topRows(n_ - 1).noalias() += offdiag_.asDiagonal() * rho.bottomRows(n_ - 1);
        tmp_a_.bottomRows(n_ - 1).noalias() += offdiag_.asDiagonal() * rho.topRows(n_ - 1);
      }
      // rho*H by columns
      tmp_b_.noalias() = rho * diag_.asDiagonal();
      if (n_ > 1) {
        tmp_b_.leftCols(n_ - 1).noalias() += rho.rightCols(n_ - 1) * offdiag_.asDiagonal();
        tmp_b_.rightCols(n_ - 1).noalias() += rho.leftCols(n_ - 1) * offdiag_.asDiagonal();
      }
      out = minus_i * (tmp_a_ - tmp_b_);
    } else {
      tmp_a_.noalias() = hc_ * rho;
      tmp_b_.noalias() = rho * hc_;
      out = minus_i * (tmp_a_ - tmp_b_);
    }
    out.array() -= decay_.array() * rho.array();
  }

 private:
  int n_;
  bool tridiagonal_;
  Eigen::VectorXd diag_;
  Eigen::VectorXd offdiag_;
  Eigen::MatrixXcd hc_;
  Eigen::MatrixXd decay_;
  Eigen::MatrixXcd tmp_a_, tmp_b_;
};

class Rk4Stepper {
 public:
  explicit Rk4Stepper(int n) { k1_.resize(n, n); k2_.resize(n, n); k3_.resize(n, n); k4_.resize(n, n); stage_.resize(n, n); }

  void step(LindbladSystem& sys, Eigen::MatrixXcd& rho, double dt) {
    sys.rhs(rho, k1_);
    stage_ = rho + (0.5 * dt) * k1_;
    sys.rhs(stage_, k2_);
    stage_ = rho + (0.5 * dt) * k2_;
    sys.rhs(stage_, k3_);
    stage_ = rho + dt * k3_;
    sys.rhs(stage_, k4_);
    rho += (dt / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
  }

 private:
  Eigen::MatrixXcd k1_, k2_, k3_, k4_, stage_;
};

inline void check_time_grid(const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw std::invalid_argument("empty time grid");
  if (t_grid.front() != 0.0) throw std::invalid_argument("time grid must start at 0");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1]))
      throw std::invalid_argument("time grid must be strictly increasing");
}

}  // namespace detail

// Master-equation right-hand side, d(rho)/dt in fs^-1.
inline Eigen::MatrixXcd lindblad_rhs(const DensityMatrix& rho, const Hamiltonian& h,
                                     const DecoherenceSpec& dec, const UnitSystem& units) {
  if (rho.n_sites() != h.n_sites())
    throw std::invalid_argument("lindblad_rhs: dimension mismatch");
  detail::LindbladSystem sys(h, dec, units);
  Eigen::MatrixXcd out(rho.n_sites(), rho.n_sites());
  sys.rhs(rho.m, out);
  return out;
}

using SampleObserver = std::function<void(double t, const Eigen::MatrixXcd& rho)>;

// Integrates the master equation and invokes the observer at every grid time
// (including t=0) without storing the trajectory.
inline void propagate_master_observe(const DensityMatrix& rho0, const Hamiltonian& h,
                                     const DecoherenceSpec& dec,
                                     const std::vector<double>& t_grid,
                                     const IntegratorSettings& settings,
                                     const UnitSystem& units,
                                     const SampleObserver& observe) {
  detail::check_time_grid(t_grid);
  if (!(settings.step > 0.0)) throw std::invalid_argument("integrator step must be > 0");
  if (rho0.n_sites() != h.n_sites())
    throw std::invalid_argument("propagate_master: dimension mismatch");
  if (settings.validate) validate_density_matrix(rho0, settings.tolerances);

  detail::LindbladSystem sys(h, dec, units);
  detail::Rk4Stepper rk4(h.n_sites());
  Eigen::MatrixXcd rho = rho0.m;
  observe(t_grid.front(), rho);
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    const double span = t_grid[i] - t_grid[i - 1];
    const int n_sub = std::max(1, static_cast<int>(std::ceil(span / settings.step - 1e-12)));
    const double dt = span / n_sub;
    for (int s = 0; s < n_sub; ++s) rk4.step(sys, rho, dt);
    if (settings.validate) {
      DensityMatrix probe{rho, t_grid[i]};
      validate_density_matrix(probe, settings.tolerances);
    }
    observe(t_grid[i], rho);
  }
}

inline Trajectory propagate_master(const DensityMatrix& rho0, const Hamiltonian& h,
                                   const DecoherenceSpec& dec,
                                   const std::vector<double>& t_grid,
                                   const IntegratorSettings& settings,
                                   const UnitSystem& units) {
  Trajectory traj;
  traj.provenance = Provenance::simulated;
  traj.provenance_detail = "rk4 step=" + std::to_string(settings.step);
  traj.times.reserve(t_grid.size());
  traj.states.reserve(t_grid.size());
  propagate_master_observe(rho0, h, dec, t_grid, settings, units,
                           [&](double t, const Eigen::MatrixXcd& rho) {
                             traj.times.push_back(t);
                             traj.states.push_back(DensityMatrix{rho, t});
                           });

  if (settings.convergence_check) {
    IntegratorSettings halved = settings;
    halved.step = settings.step / 2.0;
    halved.convergence_check = false;
    halved.validate = false;
    std::size_t idx = 0;
    double max_rel = 0.0;
    propagate_master_observe(rho0, h, dec, t_grid, halved, units,
                             [&](double, const Eigen::MatrixXcd& rho) {
                               const Eigen::VectorXd pa = traj.states[idx].populations();
                               const Eigen::VectorXd pb = rho.diagonal().real();
                               const double scale = std::max(pb.cwiseAbs().maxCoeff(), 1e-300);
                               max_rel = std::max(max_rel, (pa - pb).cwiseAbs().maxCoeff() / scale);
                               ++idx;
                             });
    if (max_rel >= 1e-6)
      throw std::runtime_error("propagate_master: step-halving check failed, rel diff " +
                               std::to_string(max_rel));
  }
  return traj;
}

// Site populations |psi_n(t)|^2 under strict Hamiltonian dynamics, computed
// exactly from the spectral decomposition. Rows follow t_grid.
inline Eigen::MatrixXd coherent_populations(const Eigen::VectorXcd& psi0,
                                            const Hamiltonian& h,
                                            const std::vector<double>& t_grid,
                                            const UnitSystem& units) {
  if (psi0.size() != h.n_sites())
    throw std::invalid_argument("coherent_populations: dimension mismatch");
  if (std::abs(psi0.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("coherent_populations: state not normalized");
  const Spectrum spec = eigendecompose(h);
  const Eigen::VectorXcd c = spec.eigenvectors.transpose().cast<std::complex<double>>() * psi0;
  Eigen::MatrixXd pops(t_grid.size(), h.n_sites());
  Eigen::VectorXcd phase(c.size()), psi(psi0.size());
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    for (int j = 0; j < c.size(); ++j)
      phase(j) = std::polar(1.0, -spec.eigenvalues(j) * t_grid[k] / units.hbar) * c(j);
    psi.noalias() = spec.eigenvectors.cast<std::complex<double>>() * phase;
    pops.row(k) = psi.cwiseAbs2().transpose();
  }
  return pops;
}

// Full pure-state trajectory |psi(t)><psi(t)| under coherent dynamics.
inline Trajectory propagate_coherent(const Eigen::VectorXcd& psi0, const Hamiltonian& h,
                                     const std::vector<double>& t_grid,
                                     const UnitSystem& units) {
  detail::check_time_grid(t_grid);
  if (psi0.size() != h.n_sites())
    throw std::invalid_argument("propagate_coherent: dimension mismatch");
  if (std::abs(psi0.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("propagate_coherent: state not normalized");
  const Spectrum spec = eigendecompose(h);
  const Eigen::MatrixXcd v = spec.eigenvectors.cast<std::complex<double>>();
  const Eigen::VectorXcd c = v.adjoint() * psi0;
  Trajectory traj;
  traj.provenance = Provenance::simulated;
  traj.provenance_detail = "spectral coherent propagation";
  Eigen::VectorXcd phase(c.size());
  for (double t : t_grid) {
    for (int j = 0; j < c.size(); ++j)
      phase(j) = std::polar(1.0, -spec.eigenvalues(j) * t / units.hbar) * c(j);
    const Eigen::VectorXcd psi = v * phase;
    DensityMatrix rho = DensityMatrix::pure(psi);
    rho.time = t;
    traj.times.push_back(t);
    traj.states.push_back(std::move(rho));
  }
  return traj;
}

// Uniform grid helper: n_samples+1 points spanning [0, t_max].
inline std::vector<double> linear_grid(double t_max, int n_samples) {
  std::vector<double> t(n_samples + 1);
  for (int i = 0; i <= n_samples; ++i) t[i] = t_max * i / n_samples;
  return t;
}

// Grid with t=0 followed by log-spaced points in [t_min, t_max].
inline std::vector<double> log_grid(double t_min, double t_max, int n_samples) {
  std::vector<double> t;
  t.push_back(0.0);
  for (int i = 0; i < n_samples; ++i)
    t.push_back(t_min * std::pow(t_max / t_min, static_cast<double>(i) / (n_samples - 1)));
  return t;
}

}  // namespace exciton
