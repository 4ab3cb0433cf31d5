// Unit conventions for exciton transport calculations.
//
// Energies are expressed in wavenumbers (cm^-1), times in femtoseconds.
// Chain models are typically run in dimensionless units with hbar = J = 1.
#pragma once

namespace exciton {

struct UnitSystem {
  double hbar;  // action constant, cm^-1 * fs (or 1 in dimensionless units)
  double kB;    // Boltzmann constant, cm^-1 / K (or 1)

  // hbar = 1e15 / (2 pi c) with c in cm/s: 5308.84 cm^-1 fs.
  static constexpr double kHbarWavenumberFs = 1.0e15 / (6.28318530717958647692 * 2.99792458e10);
  // kB / (h c) = 0.695035 cm^-1 / K.
  static constexpr double kBoltzmannWavenumberPerK = 0.695034800;

  static UnitSystem wavenumber_fs() {
    return UnitSystem{kHbarWavenumberFs, kBoltzmannWavenumberPerK};
  }

  static UnitSystem dimensionless() { return UnitSystem{1.0, 1.0}; }
};

}  // namespace exciton
