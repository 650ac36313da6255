#pragma once

#include "microstack/domain.hpp"

namespace microstack::electrochem {

/// Concentrations below this floor are clamped inside the Nernst and
/// Butler-Volmer prefactors; the clamp is reported via KineticsFlags.
inline constexpr double kConcFloor = 1.0e-9;  // mol/m^3

/// Exponent arguments in the Butler-Volmer exponentials are clamped here
/// instead of overflowing; reported as saturated.
inline constexpr double kExpClamp = 500.0;

struct KineticsFlags {
  bool concentration_clamped = false;
  bool saturated = false;

  void merge(const KineticsFlags& o) {
    concentration_clamped |= o.concentration_clamped;
    saturated |= o.saturated;
  }
};

struct ElectrodeState {
  Conc surface_conc{};       // mol/m^3
  double overpotential = 0;  // V, loss convention (>= 0 at discharge)
  double current_density = 0;  // A/m^2, per active area
};

struct CellPotential {
  double e0_anode = 0;
  double e0_cathode = 0;
  double eta_anode = 0;
  double eta_cathode = 0;
  double e_cell = 0;
};

/// Equilibrium potential of an electrode from its surface concentrations.
/// Participating concentrations must be > 0 (NonPositiveConcentration
/// otherwise); values below kConcFloor are clamped with a flag.
double nernst_potential(const ElectrodeParams& electrode, const HalfReaction& reaction,
                        const Conc& conc, double temperature,
                        KineticsFlags* flags = nullptr);

/// Current density [A/m^2 of active area] at overpotential eta (the
/// electrode's own sign convention: oxidation positive).
double butler_volmer_j(const ElectrodeParams& electrode, const HalfReaction& reaction,
                       const Conc& conc, double eta, double temperature,
                       KineticsFlags* flags = nullptr);

/// Analytic d j / d eta; matches central finite differences of
/// butler_volmer_j.
double butler_volmer_djdeta(const ElectrodeParams& electrode, const HalfReaction& reaction,
                            const Conc& conc, double eta, double temperature);

/// Inverse of butler_volmer_j: finds eta with |j(eta) - j_target| <=
/// 1e-8 * max(1, |j_target|). Safeguarded Newton inside a maintained bracket.
/// Throws Unreachable when j_target lies outside the attainable range and
/// NoConvergence after 200 iterations.
double solve_overpotential(const ElectrodeParams& electrode, const HalfReaction& reaction,
                           const Conc& conc, double j_target, double temperature,
                           KineticsFlags* flags = nullptr);

/// Molar flux R_i^e = A^e theta_i j / (n F) [mol/(m^2 s)]; consumption is
/// negative. j is the reaction current density in the electrode's operating
/// direction (positive at discharge for both electrodes).
double faraday_rate(const HalfReaction& reaction, SpeciesId species, double j,
                    double active_area_ratio,
                    double faraday = PhysicalConstants{}.faraday);

/// E_cell = E0_C - E0_A - eta_C - eta_A (overpotentials in loss convention).
double cell_potential(double e0_anode, double e0_cathode, double eta_anode,
                      double eta_cathode);

}  // namespace microstack::electrochem
