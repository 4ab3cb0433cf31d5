// Closed-form and reduced-model transport results: the dephasing-only MSD
// formula, the quasi-stationary classical random-walk reduction, diffusion
// coefficients and empirical diffusion-constant extraction.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "exciton/analysis.hpp"
#include "exciton/model.hpp"
#include "exciton/units.hpp"

namespace exciton {

// MSD of a dephasing-only infinite chain (E_n = 0, uniform Gamma):
//   <x^2>(t) = (4 J^2 / hbar^2 Gamma) [t - (1 - e^{-Gamma t}) / Gamma],
// ballistic 2 J^2 t^2 / hbar^2 at short times, slope 4 J^2 / hbar^2 Gamma at
// long times.
inline double analytic_msd_dephasing(double coupling, double gamma_deph, double t,
                                     const UnitSystem& units) {
  if (!(gamma_deph > 0.0))
    throw std::invalid_argument("analytic_msd_dephasing: Gamma must be > 0 (use ballistic_msd)");
  if (t < 0.0) throw std::invalid_argument("analytic_msd_dephasing: t < 0");
  const double j2 = coupling * coupling / (units.hbar * units.hbar);
  // expm1 keeps the small-Gamma*t limit accurate
  return 4.0 * j2 / gamma_deph * (t + std::expm1(-gamma_deph * t) / gamma_deph);
}

// Coherent infinite-line quantum walk, <x^2> = 2 J^2 t^2 / hbar^2.
inline double ballistic_msd(double coupling, double t, const UnitSystem& units) {
  const double v = coupling * t / units.hbar;
  return 2.0 * v * v;
}

// Per-bond data of a chain: coupling J_n, energy step Delta_n = E_{n+1}-E_n
// and mean dephasing Gamma'_n = (Gamma_n + Gamma_{n+1})/2.
struct ChainBondData {
  std::vector<double> coupling;     // J_n, cm^-1
  std::vector<double> energy_step;  // Delta_n, cm^-1
  std::vector<double> dephasing;    // Gamma'_n, fs^-1

  int n_bonds() const { return static_cast<int>(coupling.size()); }

  void validate() const {
    if (energy_step.size() != coupling.size() || dephasing.size() != coupling.size())
      throw std::invalid_argument("ChainBondData: inconsistent lengths");
    for (double g : dephasing)
      if (!(g >= 0.0)) throw std::invalid_argument("ChainBondData: Gamma' < 0");
  }

  static ChainBondData from_chain(const Hamiltonian& h, const DecoherenceSpec& dec) {
    if (!h.is_tridiagonal())
      throw std::invalid_argument("ChainBondData: Hamiltonian is not a chain");
    dec.validate(h.n_sites());
    ChainBondData b;
    const int n = h.n_sites();
    for (int i = 0; i + 1 < n; ++i) {
      b.coupling.push_back(h.elements(i, i + 1));
      b.energy_step.push_back(h.elements(i + 1, i + 1) - h.elements(i, i));
      b.dephasing.push_back(0.5 * (dec.dephasing[i] + dec.dephasing[i + 1]));
    }
    return b;
  }
};

struct HoppingRates {
  std::vector<double> k;  // per bond, fs^-1

  int n_bonds() const { return static_cast<int>(k.size()); }
};

// Quasi-stationary reduction of the master equation to a classical random
// walk: k_n = 2 J_n^2 Gamma'_n / (Delta_n^2 + hbar^2 Gamma'_n^2).
inline HoppingRates classical_hopping_rates(const ChainBondData& bonds,
                                            const UnitSystem& units) {
  bonds.validate();
  HoppingRates rates;
  rates.k.reserve(bonds.n_bonds());
  for (int i = 0; i < bonds.n_bonds(); ++i) {
    const double gp = bonds.dephasing[i];
    if (!(gp > 0.0))
      throw std::invalid_argument("classical_hopping_rates: Gamma' = 0, reduction invalid");
    const double j = bonds.coupling[i];
    const double d = bonds.energy_step[i];
    rates.k.push_back(2.0 * j * j * gp / (d * d + units.hbar * units.hbar * gp * gp));
  }
  return rates;
}

// dp_n/dt = k_n (p_{n+1} - p_n) + k_{n-1} (p_{n-1} - p_n); RK4 on the same
// grid conventions as the quantum propagator. Total population conserved.
inline std::vector<Eigen::VectorXd> propagate_classical(const Eigen::VectorXd& p0,
                                                        const HoppingRates& rates,
                                                        const std::vector<double>& t_grid,
                                                        double step = 0.01) {
  const int n = static_cast<int>(p0.size());
  if (rates.n_bonds() != n - 1)
    throw std::invalid_argument("propagate_classical: need n-1 bond rates");
  if (p0.minCoeff() < 0.0)
    throw std::invalid_argument("propagate_classical: negative initial population");
  if (t_grid.empty() || t_grid.front() != 0.0)
    throw std::invalid_argument("propagate_classical: grid must start at 0");

  const double total0 = p0.sum();
  auto rhs = [&](const Eigen::VectorXd& p, Eigen::VectorXd& out) {
    out.setZero();
    for (int i = 0; i < n - 1; ++i) {
      const double flow = rates.k[i] * (p(i + 1) - p(i));
      out(i) += flow;
      out(i + 1) -= flow;
    }
  };

  std::vector<Eigen::VectorXd> result;
  result.reserve(t_grid.size());
  Eigen::VectorXd p = p0, k1(n), k2(n), k3(n), k4(n), stage(n);
  result.push_back(p);
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    const double span = t_grid[i] - t_grid[i - 1];
    if (!(span > 0.0))
      throw std::invalid_argument("propagate_classical: grid not increasing");
    const int n_sub = std::max(1, static_cast<int>(std::ceil(span / step - 1e-12)));
    const double dt = span / n_sub;
    for (int s = 0; s < n_sub; ++s) {
      rhs(p, k1);
      stage = p + (0.5 * dt) * k1;
      rhs(stage, k2);
      stage = p + (0.5 * dt) * k2;
      rhs(stage, k3);
      stage = p + dt * k3;
      rhs(stage, k4);
      p += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (std::abs(p.sum() - total0) > 1e-8 * std::max(1.0, std::abs(total0)))
      throw std::runtime_error("propagate_classical: population not conserved");
    if (p.minCoeff() < -1e-8)
      throw std::runtime_error("propagate_classical: negative population");
    result.push_back(p);
  }
  return result;
}

// Long-time diffusion coefficient of a disordered chain,
//   D = < (Delta_n^2 + hbar^2 Gamma'_n^2) / (2 J_n^2 Gamma'_n) >^-1,
// the harmonic-mean structure of resistances in series. A zero coupling
// gives infinite resistance and D = 0.
inline double diffusion_coefficient(const ChainBondData& bonds, const UnitSystem& units) {
  bonds.validate();
  if (bonds.n_bonds() == 0)
    throw std::invalid_argument("diffusion_coefficient: no bonds");
  double acc = 0.0;
  for (int i = 0; i < bonds.n_bonds(); ++i) {
    const double gp = bonds.dephasing[i];
    if (!(gp > 0.0))
      throw std::invalid_argument("diffusion_coefficient: Gamma' = 0");
    const double j = bonds.coupling[i];
    if (j == 0.0) return 0.0;
    const double d = bonds.energy_step[i];
    acc += (d * d + units.hbar * units.hbar * gp * gp) / (2.0 * j * j * gp);
  }
  return bonds.n_bonds() / acc;
}

// Constant-coupling, constant-dephasing special case,
//   D = 2 J^2 Gamma / (<Delta^2> + hbar^2 Gamma^2).
inline double diffusion_coefficient_uniform(double coupling, double gamma_deph,
                                            double delta_sq, const UnitSystem& units) {
  if (!(gamma_deph > 0.0))
    throw std::invalid_argument("diffusion_coefficient_uniform: Gamma must be > 0");
  if (delta_sq < 0.0)
    throw std::invalid_argument("diffusion_coefficient_uniform: <Delta^2> < 0");
  return 2.0 * coupling * coupling * gamma_deph /
         (delta_sq + units.hbar * units.hbar * gamma_deph * gamma_deph);
}

// Dephasing rate that maximizes the uniform diffusion coefficient at fixed
// static disorder: hbar Gamma* = <Delta^2>^{1/2}.
inline double optimal_dephasing(double delta_sq, const UnitSystem& units) {
  if (delta_sq < 0.0) throw std::invalid_argument("optimal_dephasing: <Delta^2> < 0");
  return std::sqrt(delta_sq) / units.hbar;
}

struct DiffusionFit {
  double value = 0.0;        // D
  double uncertainty = 0.0;  // standard error from the ensemble spread
};

namespace detail {

// slope of an affine least-squares fit over samples with t in [t_lo, t_hi]
inline double window_slope(const Series& s, double t_lo, double t_hi, int min_samples) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.times[i] < t_lo || s.times[i] > t_hi) continue;
    sx += s.times[i];
    sy += s.values[i];
    sxx += s.times[i] * s.times[i];
    sxy += s.times[i] * s.values[i];
    ++m;
  }
  if (m < min_samples) throw std::invalid_argument("diffusion fit window too short");
  const double denom = m * sxx - sx * sx;
  return (m * sxy - sx * sy) / denom;
}

}  // namespace detail

// D = slope/2 of the ensemble-mean MSD over [t_lo, t_hi], with the standard
// error estimated from the spread of per-member fits.
inline DiffusionFit empirical_diffusion(const std::vector<Series>& ensemble, double t_lo,
                                        double t_hi) {
  if (ensemble.empty()) throw std::invalid_argument("empirical_diffusion: empty ensemble");
  const std::size_t n_t = ensemble.front().size();
  for (const auto& s : ensemble)
    if (s.size() != n_t)
      throw std::invalid_argument("empirical_diffusion: members on different grids");

  Series mean;
  mean.times = ensemble.front().times;
  mean.values.assign(n_t, 0.0);
  for (const auto& s : ensemble)
    for (std::size_t i = 0; i < n_t; ++i) mean.values[i] += s.values[i] / ensemble.size();

  DiffusionFit fit;
  fit.value = 0.5 * detail::window_slope(mean, t_lo, t_hi, 10);
  if (ensemble.size() > 1) {
    double ss = 0.0;
    for (const auto& s : ensemble) {
      const double d = 0.5 * detail::window_slope(s, t_lo, t_hi, 10);
      ss += (d - fit.value) * (d - fit.value);
    }
    fit.uncertainty = std::sqrt(ss / (ensemble.size() - 1) / ensemble.size());
  }
  return fit;
}

}  // namespace exciton
