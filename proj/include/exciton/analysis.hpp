// Transport observables: mean squared displacement, local power-law
// exponent, inverse participation ratio, localization-time bound, coherence
// band sums and the sub-diffusive onset detector.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "exciton/density_matrix.hpp"
#include "exciton/model.hpp"
#include "exciton/units.hpp"

namespace exciton {

struct Series {
  std::vector<double> times;
  std::vector<double> values;

  std::size_t size() const { return times.size(); }
};

// <x^2> = sum_n rho_nn (x_n - x0)^2 / sum_n rho_nn for one set of populations.
inline double msd_point(const Eigen::VectorXd& populations, const SiteMap& map) {
  if (populations.size() != static_cast<int>(map.positions.size()))
    throw std::invalid_argument("msd: map dimension mismatch");
  const double x0 = map.origin_position();
  double num = 0.0, tr = 0.0;
  for (int n = 0; n < populations.size(); ++n) {
    const double dx = map.positions[n] - x0;
    num += populations(n) * dx * dx;
    tr += populations(n);
  }
  if (!(std::abs(tr) > 0.0)) throw std::invalid_argument("msd: zero trace");
  return num / tr;
}

inline Series msd(const Trajectory& traj, const SiteMap& map) {
  Series s;
  s.times = traj.times;
  s.values.reserve(traj.size());
  for (const auto& state : traj.states)
    s.values.push_back(msd_point(state.populations(), map));
  return s;
}

// Population-matrix overload (rows = times), used for long coherent chains
// where storing full density matrices is wasteful.
inline Series msd(const std::vector<double>& times, const Eigen::MatrixXd& populations,
                  const SiteMap& map) {
  if (static_cast<int>(times.size()) != populations.rows())
    throw std::invalid_argument("msd: times/populations mismatch");
  Series s;
  s.times = times;
  s.values.reserve(times.size());
  for (int k = 0; k < populations.rows(); ++k)
    s.values.push_back(msd_point(populations.row(k).transpose(), map));
  return s;
}

struct PowerLawSettings {
  double window_decades = 0.5;  // width of the log-time fit window
  int window_points = 0;        // if > 0, use a fixed point count instead
  int smoothing_order = 1;      // 1 = straight-line fit; >1 = local polynomial
};

// Local best-fit exponent b(t) of value ~ t^b: least-squares slope of
// log(value) against log(time) over a sliding window, reported at window
// centers. Samples with t <= 0 or value <= 0 are dropped.
inline Series power_law_exponent(const Series& input, const PowerLawSettings& settings = {}) {
  if (!(settings.window_decades > 0.0) && settings.window_points < 3)
    throw std::invalid_argument("power_law_exponent: invalid window");
  if (settings.smoothing_order < 1)
    throw std::invalid_argument("power_law_exponent: polynomial order must be >= 1");

  std::vector<double> lt, lv;
  for (std::size_t i = 0; i < input.size(); ++i) {
    if (input.times[i] > 0.0 && input.values[i] > 0.0) {
      lt.push_back(std::log(input.times[i]));
      lv.push_back(std::log(input.values[i]));
    }
  }
  const int n = static_cast<int>(lt.size());
  if (n < 3) throw std::invalid_argument("power_law_exponent: fewer than 3 usable points");

  Series out;
  const double half_width = 0.5 * settings.window_decades * std::log(10.0);
  for (int i = 0; i < n; ++i) {
    int lo, hi;  // inclusive window [lo, hi]
    if (settings.window_points >= 3) {
      const int half = settings.window_points / 2;
      lo = std::max(0, i - half);
      hi = std::min(n - 1, lo + settings.window_points - 1);
      lo = std::max(0, hi - settings.window_points + 1);
    } else {
      lo = i;
      while (lo > 0 && lt[i] - lt[lo - 1] <= half_width) --lo;
      hi = i;
      while (hi < n - 1 && lt[hi + 1] - lt[i] <= half_width) ++hi;
    }
    const int m = hi - lo + 1;
    if (m < 3) continue;

    const int order = std::min(settings.smoothing_order, m - 1);
    // polynomial fit of log v vs (log t - log t_i); slope = derivative at 0
    Eigen::MatrixXd a(m, order + 1);
    Eigen::VectorXd y(m);
    for (int r = 0; r < m; ++r) {
      const double dx = lt[lo + r] - lt[i];
      double p = 1.0;
      for (int c = 0; c <= order; ++c) {
        a(r, c) = p;
        p *= dx;
      }
      y(r) = lv[lo + r];
    }
    const Eigen::VectorXd coeff = a.colPivHouseholderQr().solve(y);
    out.times.push_back(std::exp(lt[i]));
    out.values.push_back(coeff(1));
  }
  if (out.times.empty())
    throw std::invalid_argument("power_law_exponent: no window with 3 points");
  return out;
}

// Inverse participation ratio xi = (sum |psi|^2)^2 / sum |psi|^4; the number
// of sites a state effectively occupies.
inline double ipr(const Eigen::VectorXcd& psi) {
  const double n2 = psi.squaredNorm();
  if (!(n2 > 0.0)) throw std::invalid_argument("ipr: zero vector");
  double n4 = 0.0;
  for (int i = 0; i < psi.size(); ++i) {
    const double a2 = std::norm(psi(i));
    n4 += a2 * a2;
  }
  return n2 * n2 / n4;
}

inline double ipr(const Eigen::VectorXd& psi) {
  return ipr(Eigen::VectorXcd(psi.cast<std::complex<double>>()));
}

// Arithmetic mean of the IPR over all eigenstates.
inline double mean_ipr(const Hamiltonian& h) {
  const Spectrum spec = eigendecompose(h);
  double acc = 0.0;
  for (int k = 0; k < spec.eigenvectors.cols(); ++k)
    acc += ipr(Eigen::VectorXd(spec.eigenvectors.col(k)));
  return acc / spec.eigenvectors.cols();
}

// Lower bound on the localization time, t_loc >= hbar xi / (g J), with
// geometry factor g = sqrt(2) on the infinite line or sqrt(3) from an end.
inline double localization_bound(double xi, double coupling, double g,
                                 const UnitSystem& units) {
  if (!(xi >= 1.0) || !(coupling > 0.0) || !(g > 0.0))
    throw std::invalid_argument("localization_bound: non-positive input");
  return units.hbar * xi / (g * coupling);
}

struct CoherenceBands {
  std::vector<double> band;  // band[k] = sum_n |rho_{n+k,n}|, k = 0..n-1
  double total = 0.0;        // both triangles, all k >= 1
};

inline CoherenceBands coherence_bands(const DensityMatrix& rho) {
  const int n = rho.n_sites();
  CoherenceBands out;
  out.band.assign(n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i + k < n; ++i) out.band[k] += std::abs(rho.m(i + k, i));
  for (int k = 1; k < n; ++k) out.total += 2.0 * out.band[k];
  return out;
}

inline double total_coherence(const DensityMatrix& rho) {
  return coherence_bands(rho).total;
}

// Earliest time t > t_min with b(t) < threshold that stays below threshold
// throughout [t, t + hold_window]; nullopt if no such time exists.
inline std::optional<double> subdiffusive_onset(const Series& b, double threshold = 1.0,
                                                double t_min = 20.0,
                                                double hold_window = 50.0) {
  if (b.size() == 0) throw std::invalid_argument("subdiffusive_onset: empty series");
  const int n = static_cast<int>(b.size());
  for (int i = 0; i < n; ++i) {
    if (b.times[i] <= t_min || b.values[i] >= threshold) continue;
    bool holds = true;
    for (int j = i; j < n && b.times[j] <= b.times[i] + hold_window; ++j) {
      if (b.values[j] >= threshold) {
        holds = false;
        break;
      }
    }
    if (holds) return b.times[i];
  }
  return std::nullopt;
}

// Plateau level of a saturating series: mean over the last decade of time.
inline double saturation_level(const Series& s) {
  if (s.size() == 0) throw std::invalid_argument("saturation_level: empty series");
  const double t_lo = s.times.back() / 10.0;
  double acc = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.times[i] >= t_lo) {
      acc += s.values[i];
      ++count;
    }
  }
  return acc / count;
}

// Number of sign changes of (values - their mean) over t >= t_start; used to
// detect the wild power-law oscillation of a localized instance.
inline int sign_change_count(const Series& s, double t_start) {
  double mean = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.times[i] >= t_start) {
      mean += s.values[i];
      ++count;
    }
  if (count < 2) return 0;
  mean /= count;
  int changes = 0;
  int prev_sign = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.times[i] < t_start) continue;
    const double d = s.values[i] - mean;
    const int sign = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
    if (sign != 0 && prev_sign != 0 && sign != prev_sign) ++changes;
    if (sign != 0) prev_sign = sign;
  }
  return changes;
}

}  // namespace exciton
