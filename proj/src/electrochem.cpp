#include "microstack/electrochem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace microstack::electrochem {

namespace {

double clamped_conc(double c, KineticsFlags* flags) {
  if (c < kConcFloor) {
    if (flags) flags->concentration_clamped = true;
    return kConcFloor;
  }
  return c;
}

double clamped_exp(double arg, KineticsFlags* flags, bool* clamped) {
  *clamped = false;
  if (arg > kExpClamp) {
    if (flags) flags->saturated = true;
    *clamped = true;
    arg = kExpClamp;
  } else if (arg < -kExpClamp) {
    if (flags) flags->saturated = true;
    *clamped = true;
    arg = -kExpClamp;
  }
  return std::exp(arg);
}

/// Product over species with the given role of (c/c_ref)^|theta|.
double role_prefactor(const HalfReaction& reaction, const Conc& conc,
                      const Conc& c_ref, RedoxRole role, KineticsFlags* flags) {
  double p = 1.0;
  for (SpeciesId s : kAllSpecies) {
    if (reaction.role_of(s) != role) continue;
    const double c = clamped_conc(at(conc, s), flags);
    const double ref = at(c_ref, s);
    const int order = std::abs(reaction.stoich_of(s));
    p *= std::pow(c / ref, order);
  }
  return p;
}

}  // namespace

double nernst_potential(const ElectrodeParams& electrode, const HalfReaction& reaction,
                        const Conc& conc, double temperature, KineticsFlags* flags) {
  const PhysicalConstants k{};
  for (SpeciesId s : kAllSpecies) {
    if (reaction.role_of(s) == RedoxRole::Spectator) continue;
    if (!(at(conc, s) > 0.0)) {
      throw NonPositiveConcentration(std::string("non-positive concentration of ") +
                                     species_name(s) + " in Nernst evaluation");
    }
  }
  const double pre_red =
      role_prefactor(reaction, conc, electrode.c_ref_nernst, RedoxRole::Reduced, flags);
  const double pre_ox =
      role_prefactor(reaction, conc, electrode.c_ref_nernst, RedoxRole::Oxidized, flags);
  const double rt_nf =
      k.gas_constant * temperature / (reaction.n_electrons * k.faraday);
  return electrode.e0_ref - rt_nf * std::log(pre_red / pre_ox);
}

double butler_volmer_j(const ElectrodeParams& electrode, const HalfReaction& reaction,
                       const Conc& conc, double eta, double temperature,
                       KineticsFlags* flags) {
  const PhysicalConstants k{};
  const double pre_red =
      role_prefactor(reaction, conc, electrode.c_ref_bv, RedoxRole::Reduced, flags);
  const double pre_ox =
      role_prefactor(reaction, conc, electrode.c_ref_bv, RedoxRole::Oxidized, flags);
  const double nf_rt =
      reaction.n_electrons * k.faraday / (k.gas_constant * temperature);
  bool clamped = false;
  const double fwd = clamped_exp(electrode.alpha_plus * nf_rt * eta, flags, &clamped);
  const double bwd = clamped_exp(-electrode.alpha_minus * nf_rt * eta, flags, &clamped);
  return electrode.exchange_current * (pre_red * fwd - pre_ox * bwd);
}

double butler_volmer_djdeta(const ElectrodeParams& electrode, const HalfReaction& reaction,
                            const Conc& conc, double eta, double temperature) {
  const PhysicalConstants k{};
  const double pre_red =
      role_prefactor(reaction, conc, electrode.c_ref_bv, RedoxRole::Reduced, nullptr);
  const double pre_ox =
      role_prefactor(reaction, conc, electrode.c_ref_bv, RedoxRole::Oxidized, nullptr);
  const double nf_rt =
      reaction.n_electrons * k.faraday / (k.gas_constant * temperature);
  const double arg_fwd = electrode.alpha_plus * nf_rt * eta;
  const double arg_bwd = -electrode.alpha_minus * nf_rt * eta;
  // Clamped exponentials are flat; their derivative contribution vanishes.
  double d = 0.0;
  if (std::abs(arg_fwd) <= kExpClamp) {
    d += pre_red * electrode.alpha_plus * nf_rt * std::exp(arg_fwd);
  }
  if (std::abs(arg_bwd) <= kExpClamp) {
    d += pre_ox * electrode.alpha_minus * nf_rt * std::exp(arg_bwd);
  }
  return electrode.exchange_current * d;
}

double solve_overpotential(const ElectrodeParams& electrode, const HalfReaction& reaction,
                           const Conc& conc, double j_target, double temperature,
                           KineticsFlags* flags) {
  const auto f = [&](double eta) {
    return butler_volmer_j(electrode, reaction, conc, eta, temperature, flags) - j_target;
  };

  double lo = -0.5, hi = 0.5;
  double flo = f(lo), fhi = f(hi);
  while (flo > 0.0 && lo > -16.0) {
    lo *= 2.0;
    flo = f(lo);
  }
  while (fhi < 0.0 && hi < 16.0) {
    hi *= 2.0;
    fhi = f(hi);
  }
  if (flo > 0.0 || fhi < 0.0) {
    throw Unreachable("target current density unattainable for given concentrations");
  }
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;

  const double tol_j = 1e-8 * std::max(1.0, std::abs(j_target));
  double x = 0.5 * (lo + hi);
  double fx = f(x);
  for (int it = 0; it < 200; ++it) {
    if (std::abs(fx) <= tol_j) return x;
    const double d = butler_volmer_djdeta(electrode, reaction, conc, x, temperature);
    double x_new = (d > 0.0) ? x - fx / d : lo - 1.0;  // force bisection if flat
    if (!(x_new > lo) || !(x_new < hi)) {
      x_new = 0.5 * (lo + hi);
    }
    if (fx > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    if (x_new <= lo || x_new >= hi) x_new = 0.5 * (lo + hi);
    if (std::abs(x_new - x) < 1e-15 && hi - lo < 1e-14) return x_new;
    x = x_new;
    fx = f(x);
  }
  throw NoConvergence("overpotential solve did not converge", std::abs(fx));
}

double faraday_rate(const HalfReaction& reaction, SpeciesId species, double j,
                    double active_area_ratio, double faraday) {
  return active_area_ratio * reaction.stoich_of(species) * j /
         (reaction.n_electrons * faraday);
}

double cell_potential(double e0_anode, double e0_cathode, double eta_anode,
                      double eta_cathode) {
  return e0_cathode - e0_anode - eta_cathode - eta_anode;
}

}  // namespace microstack::electrochem
