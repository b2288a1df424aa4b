#ifndef SWAPQOC_UNITS_HPP
#define SWAPQOC_UNITS_HPP

#include <numbers>

// Natural units used throughout the core: hbar = 1, lengths in micrometers,
// times in milliseconds. Energies are then in units of hbar/ms; user-facing
// I/O converts to kHz*h via E = 2*pi*f.
namespace swq {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kAmuKg = 1.66053906660e-27;
inline constexpr double kHbarSI = 1.054571817e-34;  // J*s

struct UnitSystem {
  double mass_amu = 87.0;

  // hbar/m in um^2/ms for the configured atomic mass.
  double hbar_over_m() const {
    // m^2/s = 1e12 um^2 / 1e3 ms = 1e9 um^2/ms
    return kHbarSI / (mass_amu * kAmuKg) * 1e9;
  }
};

inline double khz_to_natural(double f_khz) { return 2.0 * kPi * f_khz; }
inline double natural_to_khz(double e) { return e / (2.0 * kPi); }

}  // namespace swq

#endif
