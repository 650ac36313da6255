#pragma once

#include <Eigen/Dense>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "microstack/domain.hpp"

namespace microstack::transport {

/// Cross-channel concentration distribution as coefficients of the cosine
/// (Fourier) basis: c(y*) = a0 + sum_k a_k cos(k pi y*), y* in [0,1].
struct ConcentrationProfile {
  SpeciesId species = SpeciesId::H2;
  double width = 0.0;           // channel width the profile lives on [m]
  std::vector<double> coeffs;   // a_0 .. a_{K-1} [mol/m^3]

  int modes() const { return static_cast<int>(coeffs.size()); }
  double mean() const { return coeffs.empty() ? 0.0 : coeffs[0]; }
  double evaluate(double ystar) const;
  /// Minimum over a uniform sampling; used to flag Gibbs undershoot.
  double min_sampled(int samples = 256) const;
};

struct TransportOptions {
  int modes = 64;
  int quad_panels = 0;     // quadrature panels (8-pt Gauss each); 0 = 2*modes
  double bc_tol = 1.0e-6;  // consistent-boundary relative tolerance
  int bc_max_iters = 100;
  double bc_damping = 0.5;
};

/// Sturm-Liouville eigensystem of c_tau = c_yy (+ migration) on y* in [0,1]
/// with quasi-Robin side conditions. Migration (drift bhat = z F dphi / RT)
/// is removed by the substitution c = exp(-beta y*) v, beta = bhat/2, which
/// shifts the Robin numbers and the eigenvalues.
struct EigenSystem {
  double bi0 = 0.0;   // q0 w / D at y* = 0
  double bi1 = 0.0;   // q1 w / D at y* = 1
  double beta_hat = 0.0;
  double beta = 0.0;
  bool fourier = false;  // exact wall-wall system, lambda_k = (k pi)^2

  double robin0 = 0.0;  // transformed bottom Robin number bi0 + beta

  std::vector<double> nu;      // transformed-problem eigenvalues
  std::vector<double> lambda;  // decay eigenvalues of the physical problem
  std::vector<double> psi_end;    // psi_k(1) (psi_k(0) == 1 by construction)
  std::vector<double> norm;       // int psi_k^2 dy
  std::vector<double> mean_weight;  // int e^{-beta y} psi_k dy
  Eigen::MatrixXd proj;   // K x Nq: w_q e^{+beta y_q} psi_k(y_q) / norm_k
  Eigen::MatrixXd recon;  // K x Nq: e^{-beta y_q} psi_k(y_q)

  int modes() const { return static_cast<int>(lambda.size()); }
  /// Physical eigenfunction value at a surface (0 -> bottom, 1 -> top).
  double surface_value(int k, int side) const {
    return side == 0 ? 1.0 : std::exp(-beta) * psi_end[k];
  }
  /// Transformed eigenfunction psi_k at arbitrary y (physical value is
  /// exp(-beta y) psi_k).
  double psi_value(int k, double y) const;
};

using EigenSystemPtr = std::shared_ptr<const EigenSystem>;

struct SectionPropagation {
  ConcentrationProfile out;
  double surf_avg[2] = {0, 0};  // along-section average surface conc
  double surf_end[2] = {0, 0};  // surface conc at section exit
};

/// Quadrature tables, Fourier tables and the eigensystem cache shared by one
/// solver instance. Thread-safe for concurrent propagation.
class TransportContext {
 public:
  explicit TransportContext(TransportOptions opts);

  const TransportOptions& options() const { return opts_; }
  int modes() const { return opts_.modes; }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

  /// Cached Sturm-Liouville system for the given Robin numbers and migration
  /// coefficient (cache key rounded to 1e-10 relative).
  EigenSystemPtr electrode_system(double bi0, double bi1, double beta_hat) const;

  /// Evaluate a Fourier profile at the quadrature nodes.
  Eigen::VectorXd values_at_nodes(const ConcentrationProfile& p) const;
  /// Fourier coefficients of nodal values.
  std::vector<double> fourier_from_values(const Eigen::VectorXd& v) const;

 private:
  TransportOptions opts_;
  std::vector<double> nodes_, weights_;
  Eigen::MatrixXd cos_table_;   // K x Nq: cos(k pi y_q)
  Eigen::MatrixXd fproj_;       // K x Nq: (2 - delta_k0) w_q cos(k pi y_q)

  mutable std::mutex mu_;
  mutable std::unordered_map<uint64_t, EigenSystemPtr> cache_;
};

/// Fourier projection of a one-sided step: value `hi` on a width fraction
/// `ratio` anchored at the given side, `lo` elsewhere. Mean is exact:
/// ratio*hi + (1-ratio)*lo.
ConcentrationProfile project_inlet_step(SpeciesId species, double lo, double hi,
                                        double ratio, InletAnchor anchor, int modes,
                                        double width);

/// Insulated-ends decay: a_k *= exp(-(k pi)^2 D dx / (u w^2)). Mean exact.
void propagate_wall(ConcentrationProfile& p, double dx, double u, double diffusion);

/// Build the eigensystem directly (uncached); bi = q w / D per side.
EigenSystemPtr build_electrode_eigensystem(const TransportContext& ctx, double bi0,
                                           double bi1, double beta_hat);

/// Modal decay in the electrode-section basis; profile re-projected to the
/// plain Fourier basis on exit.
SectionPropagation propagate_electrode(const TransportContext& ctx,
                                       const ConcentrationProfile& p, double dx,
                                       double u, double diffusion,
                                       const EigenSystem& es);

/// Linearized electrode flux model q_i^e = A theta_i j / (n F c~) [m/s].
struct BoundaryModel {
  double q = 0.0;
  double c_tilde = 0.0;
};

struct SpeciesSectionState {
  BoundaryModel bottom, top;
  double reaction_rate[2] = {0, 0};  // R_i^e per side [mol/(m^2 s)]
  bool converged = true;
  int iterations = 0;
};

struct ElectrodeSectionSpec {
  double dx = 0.0;   // section length [m]
  double u = 0.0;    // mean velocity [m/s]
  SideKind bottom = SideKind::Wall;
  SideKind top = SideKind::Wall;
  double j_geo = 0.0;      // geometric current density A^e j [A/m^2]
  double delta_phi = 0.0;  // electrolyte potential difference phi_C - phi_A [V]
};

struct SectionResult {
  PerSpecies<ConcentrationProfile> profiles;
  PerSpecies<SpeciesSectionState> species;
  PerSpecies<SectionPropagation> propagation;
  PerSpecies<EigenSystemPtr> systems;  // null for wall-path species
  bool converged = true;
};

/// Damped fixed-point iteration on the approximate electrode concentration
/// c~ until the propagated surface average is consistent with it. Warm-start
/// values (previous c~) may be supplied per species and side.
SectionResult consistent_electrode_section(
    const TransportContext& ctx, const ParameterSet& params,
    const PerSpecies<ConcentrationProfile>& in, const ElectrodeSectionSpec& spec,
    const PerSpecies<std::array<double, 2>>* warm_c_tilde = nullptr);

/// Restrict a parent profile to contiguous width fractions (child ordering =
/// caller's branch ordering). Species flux is conserved.
std::vector<ConcentrationProfile> split_profile(const TransportContext& ctx,
                                                const ConcentrationProfile& p,
                                                const std::vector<double>& fractions);

/// Stack child profiles side by side with widths proportional to their flow
/// rates and re-project.
ConcentrationProfile merge_profiles(const TransportContext& ctx,
                                    const std::vector<ConcentrationProfile>& ps,
                                    const std::vector<double>& flows);

/// Electrolyte potential difference phi_C - phi_A across a cell channel from
/// ionic current continuity: the hydroxide migration-diffusion flux carries
/// the geometric current density through the electrolyte gap.
double electrolyte_potential_drop(double j_geo, double width, double d_oh,
                                  double c_oh_mean, const PhysicalConstants& k);

}  // namespace microstack::transport
