// Model construction: tight-binding Hamiltonians (FMO preset and disordered
// chains), decoherence specifications, bath-derived dephasing rates, site
// maps and spectral decompositions.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "exciton/units.hpp"

namespace exciton {

// ---------------------------------------------------------------------------
// Hamiltonian

struct Hamiltonian {
  Eigen::MatrixXd elements;    // symmetric, cm^-1 (or dimensionless)
  double energy_offset = 0.0;  // global diagonal offset kept as metadata only
  std::string label;

  int n_sites() const { return static_cast<int>(elements.rows()); }

  bool is_symmetric(double tol = 1e-12) const {
    return (elements - elements.transpose()).cwiseAbs().maxCoeff() <= tol;
  }

  // True if all couplings beyond the first off-diagonal vanish. Propagators
  // use this to pick a banded multiply.
  bool is_tridiagonal() const {
    const int n = n_sites();
    for (int i = 0; i < n; ++i)
      for (int j = i + 2; j < n; ++j)
        if (elements(i, j) != 0.0) return false;
    return true;
  }
};

// ---------------------------------------------------------------------------
// Disorder

enum class DisorderKind { none, anderson, stark, combined };

struct DisorderSpec {
  DisorderKind kind = DisorderKind::none;
  double sigma = 0.0;  // Anderson: target sample standard deviation, cm^-1
  double delta = 0.0;  // Stark: energy step per site, cm^-1
  std::uint64_t seed = 0;
};

namespace detail {

// Deterministic standard-normal draws. mt19937_64 output is fixed by the
// standard; Box-Muller avoids the implementation-defined behaviour of
// std::normal_distribution, so sequences are identical across platforms.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : gen_(seed) {}

  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace detail

// Site energies for an n-site chain under the given disorder. Anderson draws
// are recentred and rescaled so the sample standard deviation (n-1 norm)
// equals sigma exactly; a fixed seed reproduces the sequence bit for bit.
inline std::vector<double> disorder_energies(const DisorderSpec& spec, int n_sites) {
  if (n_sites < 1) throw std::invalid_argument("disorder_energies: n_sites < 1");
  if (spec.sigma < 0.0) throw std::invalid_argument("disorder_energies: sigma < 0");
  std::vector<double> e(n_sites, 0.0);

  if (spec.kind == DisorderKind::anderson || spec.kind == DisorderKind::combined) {
    if (spec.sigma > 0.0 && n_sites >= 2) {
      detail::NormalSampler normal(spec.seed);
      double mean = 0.0;
      for (auto& x : e) {
        x = normal();
        mean += x;
      }
      mean /= n_sites;
      double ss = 0.0;
      for (const auto& x : e) ss += (x - mean) * (x - mean);
      const double sample_std = std::sqrt(ss / (n_sites - 1));
      const double scale = sample_std > 0.0 ? spec.sigma / sample_std : 0.0;
      for (auto& x : e) x = (x - mean) * scale;
    }
  }
  if (spec.kind == DisorderKind::stark || spec.kind == DisorderKind::combined) {
    for (int i = 0; i < n_sites; ++i) e[i] += spec.delta * i;
  }
  return e;
}

// ---------------------------------------------------------------------------
// Builders

// Nearest-neighbour chain with constant coupling and diagonal drawn from the
// disorder spec.
inline Hamiltonian chain_hamiltonian(int n_sites, double coupling,
                                     const DisorderSpec& disorder = {}) {
  if (n_sites < 2) throw std::invalid_argument("chain_hamiltonian: n_sites must be >= 2");
  Hamiltonian h;
  h.elements = Eigen::MatrixXd::Zero(n_sites, n_sites);
  const auto energies = disorder_energies(disorder, n_sites);
  for (int i = 0; i < n_sites; ++i) h.elements(i, i) = energies[i];
  for (int i = 0; i + 1 < n_sites; ++i) {
    h.elements(i, i + 1) = coupling;
    h.elements(i + 1, i) = coupling;
  }
  h.label = "chain";
  return h;
}

// Per-bond coupling variant; couplings.size() must be n_sites - 1.
inline Hamiltonian chain_hamiltonian(int n_sites, const std::vector<double>& couplings,
                                     const DisorderSpec& disorder = {}) {
  if (n_sites < 2) throw std::invalid_argument("chain_hamiltonian: n_sites must be >= 2");
  if (static_cast<int>(couplings.size()) != n_sites - 1)
    throw std::invalid_argument("chain_hamiltonian: need n_sites-1 couplings");
  Hamiltonian h;
  h.elements = Eigen::MatrixXd::Zero(n_sites, n_sites);
  const auto energies = disorder_energies(disorder, n_sites);
  for (int i = 0; i < n_sites; ++i) h.elements(i, i) = energies[i];
  for (int i = 0; i + 1 < n_sites; ++i) {
    h.elements(i, i + 1) = couplings[i];
    h.elements(i + 1, i) = couplings[i];
  }
  h.label = "chain";
  return h;
}

// Seven-site FMO Hamiltonian of C. tepidum (Adolphs & Renger), site basis,
// cm^-1. Diagonal entries are stored relative to the 12210 cm^-1 offset,
// which is kept as metadata; a global offset drops out of all dynamics.
inline Hamiltonian fmo_hamiltonian() {
  Hamiltonian h;
  h.elements.resize(7, 7);
  h.elements << 200.0, -96.0, 5.0, -4.4, 4.7, -12.6, -6.2,
      -96.0, 320.0, 33.1, 6.8, 4.5, 7.4, -0.3,
      5.0, 33.1, 0.0, -51.1, 0.8, -8.4, 7.6,
      -4.4, 6.8, -51.1, 110.0, -76.6, -14.2, -67.0,
      4.7, 4.5, 0.8, -76.6, 270.0, 78.3, -0.1,
      -12.6, 7.4, -8.4, -14.2, 78.3, 420.0, 38.3,
      -6.2, -0.3, 7.6, -67.0, -0.1, 38.3, 230.0;
  h.energy_offset = 12210.0;
  h.label = "fmo";
  return h;
}

// Bonds of the dominant-coupling path 1-2-3-4-5-6-7 plus the 4-7 shortcut
// (the couplings drawn bold in the FMO model). 0-based site pairs.
inline std::vector<std::pair<int, int>> fmo_strong_coupling_bonds() {
  return {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {3, 6}};
}

// ---------------------------------------------------------------------------
// Site maps

enum class SiteMapVariant { path_index, hops_from_trap, real_space };

struct SiteMap {
  std::vector<double> positions;  // displacement per site, lattice units
  int origin_site = 0;
  SiteMapVariant variant = SiteMapVariant::path_index;

  double origin_position() const { return positions.at(origin_site); }
};

// Identity map for an N-site chain: x_i = i.
inline SiteMap chain_site_map(int n_sites, int origin_site) {
  if (origin_site < 0 || origin_site >= n_sites)
    throw std::invalid_argument("chain_site_map: origin out of range");
  SiteMap m;
  m.positions.resize(n_sites);
  for (int i = 0; i < n_sites; ++i) m.positions[i] = i;
  m.origin_site = origin_site;
  m.variant = SiteMapVariant::path_index;
  return m;
}

// One-dimensional displacement coordinate for the seven FMO sites.
//   path_index:     position along the strong-coupling path, x = 0..6
//   hops_from_trap: graph distance to site 3 over the strong couplings
//   real_space:     bond lengths estimated from the dipolar J ~ 1/r^3
//                   scaling of the path couplings (strongest bond = 1)
inline SiteMap fmo_site_map(SiteMapVariant variant, int origin_site = 5) {
  SiteMap m;
  m.variant = variant;
  m.origin_site = origin_site;
  switch (variant) {
    case SiteMapVariant::path_index: {
      m.positions = {0, 1, 2, 3, 4, 5, 6};
      break;
    }
    case SiteMapVariant::hops_from_trap: {
      // breadth-first distance to the trap (site 3, index 2)
      constexpr int kTrap = 2;
      std::vector<int> dist(7, -1);
      std::queue<int> q;
      dist[kTrap] = 0;
      q.push(kTrap);
      const auto bonds = fmo_strong_coupling_bonds();
      while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (const auto& [a, b] : bonds) {
          const int v = (a == u) ? b : (b == u ? a : -1);
          if (v >= 0 && dist[v] < 0) {
            dist[v] = dist[u] + 1;
            q.push(v);
          }
        }
      }
      m.positions.assign(dist.begin(), dist.end());
      break;
    }
    case SiteMapVariant::real_space: {
      const Eigen::MatrixXd h = fmo_hamiltonian().elements;
      const double j_max = 96.0;
      double x = 0.0;
      m.positions.assign(7, 0.0);
      for (int i = 0; i + 1 < 7; ++i) {
        x += std::cbrt(j_max / std::abs(h(i, i + 1)));
        m.positions[i + 1] = x;
      }
      break;
    }
    default:
      throw std::invalid_argument("fmo_site_map: unknown variant");
  }
  if (origin_site < 0 || origin_site >= 7)
    throw std::invalid_argument("fmo_site_map: origin out of range");
  return m;
}

// ---------------------------------------------------------------------------
// Spectral decomposition

struct Spectrum {
  Eigen::VectorXd eigenvalues;   // ascending, cm^-1
  Eigen::MatrixXd eigenvectors;  // columns, orthonormal site-basis amplitudes
};

inline Spectrum eigendecompose(const Hamiltonian& h) {
  if (!h.is_symmetric(1e-10 * (1.0 + h.elements.cwiseAbs().maxCoeff())))
    throw std::invalid_argument("eigendecompose: Hamiltonian is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.elements);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigendecompose: eigensolver failed");
  return Spectrum{solver.eigenvalues(), solver.eigenvectors()};
}

// ---------------------------------------------------------------------------
// Decoherence

struct DecoherenceSpec {
  std::vector<double> dephasing;  // Gamma_n, fs^-1
  std::vector<double> loss;       // gamma_n, fs^-1

  static DecoherenceSpec none(int n_sites) {
    return DecoherenceSpec{std::vector<double>(n_sites, 0.0),
                           std::vector<double>(n_sites, 0.0)};
  }

  static DecoherenceSpec uniform_dephasing(int n_sites, double gamma_deph) {
    return DecoherenceSpec{std::vector<double>(n_sites, gamma_deph),
                           std::vector<double>(n_sites, 0.0)};
  }

  DecoherenceSpec& with_trap(int site, double rate) {
    loss.at(site) = rate;
    return *this;
  }

  void validate(int n_sites) const {
    if (static_cast<int>(dephasing.size()) != n_sites ||
        static_cast<int>(loss.size()) != n_sites)
      throw std::invalid_argument("DecoherenceSpec: rate lengths != n_sites");
    for (double g : dephasing)
      if (!(g >= 0.0)) throw std::invalid_argument("DecoherenceSpec: Gamma < 0");
    for (double g : loss)
      if (!(g >= 0.0)) throw std::invalid_argument("DecoherenceSpec: gamma < 0");
  }
};

struct BathSpec {
  double temperature = 0.0;            // K
  double reorganization_energy = 0.0;  // E_R, cm^-1
  double cutoff_frequency = 1.0;       // hbar*omega_c as an energy, cm^-1
};

// Haken-Strobl dephasing rate for an ohmic spin-boson bath,
// Gamma = 2 pi kB T E_R / (hbar^2 omega_c), returned in fs^-1.
inline double dephasing_rate(const BathSpec& bath, const UnitSystem& units) {
  if (!(bath.cutoff_frequency > 0.0))
    throw std::invalid_argument("dephasing_rate: omega_c must be > 0");
  if (bath.temperature < 0.0 || bath.reorganization_energy < 0.0)
    throw std::invalid_argument("dephasing_rate: negative bath parameter");
  return 2.0 * M_PI * units.kB * bath.temperature * bath.reorganization_energy /
         (units.hbar * bath.cutoff_frequency);
}

}  // namespace exciton
