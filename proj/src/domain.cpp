#include "microstack/domain.hpp"

#include <cmath>

#include "microstack/units.hpp"

namespace microstack {

const char* species_name(SpeciesId id) {
  switch (id) {
    case SpeciesId::H2: return "H2";
    case SpeciesId::O2: return "O2";
    case SpeciesId::OH: return "OH";
    case SpeciesId::H2O: return "H2O";
  }
  return "?";
}

SpeciesId species_from_name(const std::string& name) {
  for (SpeciesId s : kAllSpecies) {
    if (name == species_name(s)) return s;
  }
  throw ConfigError("unknown species name: " + name);
}

HalfReaction anode_hor() {
  HalfReaction r;
  r.electrode = ElectrodeSide::Anode;
  r.n_electrons = 2;
  r.stoich = {-1, 0, -2, 2};  // H2, O2, OH, H2O
  r.role = {RedoxRole::Reduced, RedoxRole::Spectator, RedoxRole::Reduced,
            RedoxRole::Oxidized};
  return r;
}

HalfReaction cathode_orr() {
  HalfReaction r;
  r.electrode = ElectrodeSide::Cathode;
  r.n_electrons = 4;
  r.stoich = {0, -1, 4, -2};
  r.role = {RedoxRole::Spectator, RedoxRole::Oxidized, RedoxRole::Reduced,
            RedoxRole::Oxidized};
  return r;
}

bool ChannelGeometry::is_plain() const {
  for (const auto& s : segments) {
    if (s.has_electrode()) return false;
  }
  return true;
}

void ChannelGeometry::validate() const {
  if (!(length > 0.0) || !(width > 0.0) || !(height > 0.0)) {
    throw ConfigError("channel dimensions must be positive");
  }
  if (segments.empty()) throw ConfigError("channel has no segments");
  double sum = 0.0;
  for (const auto& s : segments) {
    if (!(s.length > 0.0)) throw ConfigError("segment length must be positive");
    sum += s.length;
  }
  if (std::abs(sum - length) > 1e-12 * length) {
    throw ConfigError("segment lengths do not sum to channel length");
  }
}

ChannelGeometry plain_channel(double length, double width, double height) {
  ChannelGeometry g;
  g.length = length;
  g.width = width;
  g.height = height;
  g.electrode_length = 0.0;
  g.segments = {{length, SideKind::Wall, SideKind::Wall}};
  g.validate();
  return g;
}

ChannelGeometry cell_channel(double length, double width, double height) {
  ChannelGeometry g;
  g.length = length;
  g.width = width;
  g.height = height;
  g.electrode_length = 0.5 * length;
  g.segments = {{0.25 * length, SideKind::Wall, SideKind::Wall},
                {0.50 * length, SideKind::Anode, SideKind::Cathode},
                {0.25 * length, SideKind::Wall, SideKind::Wall}};
  g.validate();
  return g;
}

namespace {

Species make_species(SpeciesId id, double d_cm2_s, int z, double c_mol_l,
                     double fraction, InletAnchor anchor) {
  Species s;
  s.id = id;
  s.diffusion = units::diffusion_to_si(d_cm2_s);
  s.valence = z;
  s.inlet_conc = units::concentration_to_si(c_mol_l);
  s.inlet_fraction = fraction;
  s.inlet_anchor = anchor;
  return s;
}

}  // namespace

ParameterSet default_parameters() {
  ParameterSet p;

  p.species[SpeciesId::H2] =
      make_species(SpeciesId::H2, 5.1324e-5, 0, 0.1, 0.1, InletAnchor::Low);
  p.species[SpeciesId::O2] =
      make_species(SpeciesId::O2, 2.0094e-5, 0, 0.1, 0.1, InletAnchor::High);
  p.species[SpeciesId::OH] =
      make_species(SpeciesId::OH, 2.6880e-5, -1, 1.0, 1.0, InletAnchor::Low);
  p.species[SpeciesId::H2O] =
      make_species(SpeciesId::H2O, 2.2990e-5, 0, 55.4, 1.0, InletAnchor::Low);

  p.anode.e0_ref = -0.8277;
  p.anode.exchange_current = units::current_density_to_si(6.743e-4);
  p.anode.alpha_plus = 0.638995;
  p.anode.alpha_minus = 0.361005;
  p.anode.active_area_ratio = 1.0e3;
  at(p.anode.c_ref_nernst, SpeciesId::H2) = units::concentration_to_si(0.59705);
  at(p.anode.c_ref_nernst, SpeciesId::OH) = units::concentration_to_si(1.0);
  at(p.anode.c_ref_nernst, SpeciesId::H2O) = units::concentration_to_si(54.918);
  at(p.anode.c_ref_bv, SpeciesId::H2) = units::concentration_to_si(0.77612);
  at(p.anode.c_ref_bv, SpeciesId::OH) = units::concentration_to_si(100.0);
  at(p.anode.c_ref_bv, SpeciesId::H2O) = units::concentration_to_si(55.373);

  p.cathode.e0_ref = 0.401;
  p.cathode.exchange_current = units::current_density_to_si(4.2e-11);
  p.cathode.alpha_plus = 0.595925;
  p.cathode.alpha_minus = 0.404075;
  p.cathode.active_area_ratio = 1.0e3;
  at(p.cathode.c_ref_nernst, SpeciesId::O2) = units::concentration_to_si(0.85206);
  at(p.cathode.c_ref_nernst, SpeciesId::OH) = units::concentration_to_si(1.0);
  at(p.cathode.c_ref_nernst, SpeciesId::H2O) = units::concentration_to_si(54.918);
  at(p.cathode.c_ref_bv, SpeciesId::O2) = units::concentration_to_si(0.083457);
  at(p.cathode.c_ref_bv, SpeciesId::OH) = units::concentration_to_si(6.880);
  at(p.cathode.c_ref_bv, SpeciesId::H2O) = units::concentration_to_si(49.982);

  p.geometry.length = 1.0e-3;
  p.geometry.width = 1.0e-4;
  p.geometry.height = 1.0e-4;
  p.geometry.electrode_length = 1.0e-3;
  p.geometry.segments = {{1.0e-3, SideKind::Wall, SideKind::Wall}};

  p.viscosity = 1.0e-3;
  return p;
}

}  // namespace microstack
