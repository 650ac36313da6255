#pragma once

namespace microstack::units {

// Internal storage is SI throughout: mol/m^3, m^2/s, A/m^2, V, m, Pa·s.
// Input files use the mixed units of the parameter tables (mol/L, cm^2/s,
// A/cm^2); conversion happens here and nowhere else.

inline constexpr double kMolPerLiter = 1.0e3;       // -> mol/m^3
inline constexpr double kCm2PerSecond = 1.0e-4;     // -> m^2/s
inline constexpr double kAmperePerCm2 = 1.0e4;      // -> A/m^2
inline constexpr double kWattPerCm2 = 1.0e4;        // -> W/m^2

inline double concentration_to_si(double mol_per_l) { return mol_per_l * kMolPerLiter; }
inline double concentration_from_si(double si) { return si / kMolPerLiter; }

inline double diffusion_to_si(double cm2_per_s) { return cm2_per_s * kCm2PerSecond; }
inline double diffusion_from_si(double si) { return si / kCm2PerSecond; }

inline double current_density_to_si(double a_per_cm2) { return a_per_cm2 * kAmperePerCm2; }
inline double current_density_from_si(double si) { return si / kAmperePerCm2; }

inline double power_density_from_si(double w_per_m2) { return w_per_m2 / kWattPerCm2; }

}  // namespace microstack::units
