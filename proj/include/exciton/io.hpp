// CSV export and trajectory file ingestion. All writes are atomic
// (write to a temp file, then rename) and use fixed significant digits so
// identical runs produce byte-identical files.
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "exciton/analysis.hpp"
#include "exciton/density_matrix.hpp"
#include "exciton/model.hpp"

namespace exciton {

namespace detail {

inline std::string format_value(double v, int sig_digits = 12) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", sig_digits, v);
  return buf;
}

inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace detail

// Two-column CSV (time, value) with a header naming the quantity and units.
inline void export_series(const Series& s, const std::filesystem::path& path,
                          const std::string& value_name = "value",
                          const std::string& time_name = "time_fs") {
  std::ostringstream out;
  out << time_name << "," << value_name << "\n";
  for (std::size_t i = 0; i < s.size(); ++i)
    out << detail::format_value(s.times[i]) << "," << detail::format_value(s.values[i])
        << "\n";
  detail::atomic_write(path, out.str());
}

// Wide CSV: one time column followed by one column per named series.
inline void export_table(const std::vector<double>& times,
                         const std::vector<std::pair<std::string, std::vector<double>>>& columns,
                         const std::filesystem::path& path,
                         const std::string& time_name = "time_fs") {
  std::ostringstream out;
  out << time_name;
  for (const auto& [name, values] : columns) {
    if (values.size() != times.size())
      throw std::invalid_argument("export_table: column length mismatch: " + name);
    out << "," << name;
  }
  out << "\n";
  for (std::size_t i = 0; i < times.size(); ++i) {
    out << detail::format_value(times[i]);
    for (const auto& [name, values] : columns) out << "," << detail::format_value(values[i]);
    out << "\n";
  }
  detail::atomic_write(path, out.str());
}

// Hamiltonian as CSV, one row per site, 6 significant figures.
inline void export_hamiltonian(const Hamiltonian& h, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "# hamiltonian n_sites=" << h.n_sites() << " units=cm^-1 offset="
      << detail::format_value(h.energy_offset, 6) << "\n";
  for (int i = 0; i < h.n_sites(); ++i) {
    for (int j = 0; j < h.n_sites(); ++j) {
      if (j) out << ",";
      out << detail::format_value(h.elements(i, j), 6);
    }
    out << "\n";
  }
  detail::atomic_write(path, out.str());
}

// ---------------------------------------------------------------------------
// Trajectory files
//
// Header line:  # trajectory n_sites=<N> time_unit=fs
// CSV rows:     t, re_0_0, im_0_0, re_0_1, im_0_1, ...  (row-major)
// The format is intentionally plain so external propagators can produce it.

inline void export_trajectory(const Trajectory& traj, const std::filesystem::path& path) {
  const int n = traj.n_sites();
  std::ostringstream out;
  out << "# trajectory n_sites=" << n << " time_unit=fs\n";
  out << "t";
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out << ",re_" << i << "_" << j << ",im_" << i << "_" << j;
  out << "\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out << detail::format_value(traj.times[k]);
    const auto& m = traj.states[k].m;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        out << "," << detail::format_value(m(i, j).real()) << ","
            << detail::format_value(m(i, j).imag());
    out << "\n";
  }
  detail::atomic_write(path, out.str());
}

struct IngestOptions {
  int expected_sites = 0;         // 0 = accept whatever the header declares
  double hermiticity_tol = 1e-6;  // ingested data carries its own integration error
  double trace_tol = 1e-6;
};

inline Trajectory ingest_trajectory(const std::filesystem::path& path,
                                    const IngestOptions& options = {}) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty trajectory file");
  int n_sites = 0;
  if (const auto pos = line.find("n_sites="); pos != std::string::npos)
    n_sites = std::stoi(line.substr(pos + 8));
  if (n_sites <= 0) throw std::runtime_error("trajectory header missing n_sites");
  if (options.expected_sites > 0 && n_sites != options.expected_sites)
    throw std::runtime_error("trajectory has " + std::to_string(n_sites) +
                             " sites, expected " + std::to_string(options.expected_sites));
  if (!std::getline(in, line)) throw std::runtime_error("trajectory missing column header");

  Trajectory traj;
  traj.provenance = Provenance::ingested;
  traj.provenance_detail = path.string();
  const std::size_t n_fields = 1 + 2 * static_cast<std::size_t>(n_sites) * n_sites;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++row;
    std::vector<double> fields;
    fields.reserve(n_fields);
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      std::size_t used = 0;
      double v;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        throw std::runtime_error("malformed trajectory row " + std::to_string(row));
      }
      if (used == 0) throw std::runtime_error("malformed trajectory row " + std::to_string(row));
      fields.push_back(v);
    }
    if (fields.size() != n_fields)
      throw std::runtime_error("malformed trajectory row " + std::to_string(row) + ": got " +
                               std::to_string(fields.size()) + " fields");
    DensityMatrix rho;
    rho.time = fields[0];
    rho.m.resize(n_sites, n_sites);
    std::size_t f = 1;
    for (int i = 0; i < n_sites; ++i)
      for (int j = 0; j < n_sites; ++j) {
        rho.m(i, j) = std::complex<double>(fields[f], fields[f + 1]);
        f += 2;
      }
    if (!traj.times.empty() && !(rho.time > traj.times.back()))
      throw std::runtime_error("trajectory times not strictly increasing at row " +
                               std::to_string(row));
    if (rho.hermiticity_error() > options.hermiticity_tol)
      throw std::runtime_error("ingested matrix not Hermitian at t=" +
                               std::to_string(rho.time));
    const double tr = rho.trace_real();
    if (!(tr > 0.0) || tr > 1.0 + options.trace_tol)
      throw std::runtime_error("ingested matrix trace out of range at t=" +
                               std::to_string(rho.time));
    traj.times.push_back(rho.time);
    traj.states.push_back(std::move(rho));
  }
  if (traj.times.empty()) throw std::runtime_error("trajectory file has no rows");
  return traj;
}

// Interpolates every density-matrix element onto a uniform grid with spacing
// dt, using sliding local polynomial (Lagrange) interpolation of the given
// order; order 4 matches the treatment of sparsely sampled external data.
inline Trajectory interpolate_trajectory(const Trajectory& traj, int order, double dt) {
  if (order < 1) throw std::invalid_argument("interpolate_trajectory: order < 1");
  if (!(dt > 0.0)) throw std::invalid_argument("interpolate_trajectory: dt <= 0");
  const int n_in = static_cast<int>(traj.size());
  if (n_in < order + 1)
    throw std::invalid_argument("interpolate_trajectory: need at least order+1 samples");
  const int n = traj.n_sites();
  const int stencil = order + 1;

  Trajectory out;
  out.provenance = traj.provenance;
  out.provenance_detail = traj.provenance_detail + " (interpolated order " +
                          std::to_string(order) + ")";
  const double t0 = traj.times.front(), t1 = traj.times.back();
  for (double t = t0; t <= t1 + 1e-12 * (t1 - t0); t += dt) {
    // centered stencil around the nearest input interval
    int hi = static_cast<int>(std::lower_bound(traj.times.begin(), traj.times.end(), t) -
                              traj.times.begin());
    const int lo = std::max(0, std::min(hi - (stencil + 1) / 2, n_in - stencil));
    // Lagrange weights at t over nodes lo..lo+order
    std::vector<double> w(stencil, 1.0);
    for (int a = 0; a < stencil; ++a) {
      for (int b = 0; b < stencil; ++b) {
        if (a == b) continue;
        w[a] *= (t - traj.times[lo + b]) / (traj.times[lo + a] - traj.times[lo + b]);
      }
    }
    DensityMatrix rho;
    rho.time = t;
    rho.m = Eigen::MatrixXcd::Zero(n, n);
    for (int a = 0; a < stencil; ++a) rho.m += w[a] * traj.states[lo + a].m;
    out.times.push_back(t);
    out.states.push_back(std::move(rho));
  }
  return out;
}

}  // namespace exciton
