#pragma once

#include <array>
#include <string>
#include <vector>

#include "microstack/errors.hpp"

namespace microstack {

inline constexpr int kNumSpecies = 4;

enum class SpeciesId : int { H2 = 0, O2 = 1, OH = 2, H2O = 3 };

inline constexpr std::array<SpeciesId, kNumSpecies> kAllSpecies = {
    SpeciesId::H2, SpeciesId::O2, SpeciesId::OH, SpeciesId::H2O};

const char* species_name(SpeciesId id);
SpeciesId species_from_name(const std::string& name);

/// Per-species array indexed by SpeciesId.
template <typename T>
using PerSpecies = std::array<T, kNumSpecies>;

using Conc = PerSpecies<double>;  // mol/m^3

inline double& at(Conc& c, SpeciesId s) { return c[static_cast<int>(s)]; }
inline double at(const Conc& c, SpeciesId s) { return c[static_cast<int>(s)]; }

struct PhysicalConstants {
  double faraday = 96485.33212;      // C/mol
  double gas_constant = 8.314462618; // J/(mol K)
  double t_ref = 298.15;             // K; operating temperature (config-exposed)
};

/// Which side of the channel cross-section an inlet step hugs.
enum class InletAnchor { Low, High };  // Low = y* = 0 (anode side)

struct Species {
  SpeciesId id = SpeciesId::H2;
  double diffusion = 0.0;    // m^2/s
  int valence = 0;           // z_i
  double inlet_conc = 0.0;   // mol/m^3
  double inlet_fraction = 1.0;  // In_i: width fraction carrying inlet_conc
  InletAnchor inlet_anchor = InletAnchor::Low;
};

struct SpeciesSet {
  PerSpecies<Species> items;

  const Species& operator[](SpeciesId s) const { return items[static_cast<int>(s)]; }
  Species& operator[](SpeciesId s) { return items[static_cast<int>(s)]; }
};

enum class ElectrodeSide { Anode, Cathode };

enum class RedoxRole { Reduced, Oxidized, Spectator };

/// A half reaction in its operating direction (anode: oxidation as written,
/// cathode: reduction as written). stoich is signed: negative = consumed.
struct HalfReaction {
  ElectrodeSide electrode = ElectrodeSide::Anode;
  int n_electrons = 0;
  PerSpecies<int> stoich{};
  PerSpecies<RedoxRole> role{};

  int stoich_of(SpeciesId s) const { return stoich[static_cast<int>(s)]; }
  RedoxRole role_of(SpeciesId s) const { return role[static_cast<int>(s)]; }
  bool participates(SpeciesId s) const { return stoich_of(s) != 0; }
};

/// H2 + 2OH- -> 2H2O + 2e-
HalfReaction anode_hor();
/// O2 + 2H2O + 4e- -> 4OH-
HalfReaction cathode_orr();

struct ElectrodeParams {
  double e0_ref = 0.0;            // V
  double exchange_current = 0.0;  // A/m^2, per active area
  double alpha_plus = 0.5;
  double alpha_minus = 0.5;
  Conc c_ref_nernst{};  // mol/m^3, zero for spectators
  Conc c_ref_bv{};      // mol/m^3
  double active_area_ratio = 1.0;  // A^e
};

enum class SideKind { Wall, Anode, Cathode };

struct ChannelSegment {
  double length = 0.0;          // m
  SideKind bottom = SideKind::Wall;  // y* = 0
  SideKind top = SideKind::Wall;     // y* = 1
  bool has_electrode() const { return bottom != SideKind::Wall || top != SideKind::Wall; }
};

struct ChannelGeometry {
  double length = 0.0;           // cL [m], total
  double width = 0.0;            // cW [m]
  double height = 0.0;           // cH [m], used to reduce dimensionality
  double electrode_length = 0.0; // eL [m]
  std::vector<ChannelSegment> segments;

  bool is_plain() const;
  /// Throws ConfigError when dimensions are non-positive or segments do not
  /// partition the length.
  void validate() const;
};

/// Plain channel: layout [Wall(length)].
ChannelGeometry plain_channel(double length, double width, double height);
/// Cell channel: [Wall(L/4)][Anode|Cathode(L/2)][Wall(L/4)], anode at y*=0.
ChannelGeometry cell_channel(double length, double width, double height);

struct ParameterSet {
  PhysicalConstants constants;
  SpeciesSet species;
  ElectrodeParams anode;
  ElectrodeParams cathode;
  ChannelGeometry geometry;
  double viscosity = 1.0e-3;  // Pa s

  const ElectrodeParams& electrode(ElectrodeSide e) const {
    return e == ElectrodeSide::Anode ? anode : cathode;
  }
};

/// The validation-case parameter tables (geometry, flow, electrochemistry).
ParameterSet default_parameters();

}  // namespace microstack
