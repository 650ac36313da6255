#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "microstack/electrical.hpp"
#include "microstack/hydraulics.hpp"
#include "microstack/transport.hpp"

namespace microstack::stack {

struct SweepSpec {
  double i_max = 0.0;  // [A]
  int points = 21;
};

struct SolverOptions {
  double outer_tol = 1.0e-5;
  int outer_max = 50;
  bool newton_enabled = true;
  electrical::SolveOptions electrical;
};

struct StackConfig {
  ParameterSet params;
  hydraulics::FlowNetwork network;
  electrical::ElectricalTree tree;
  transport::TransportOptions transport;
  SolverOptions solver;
  SweepSpec sweep;

  /// Cell leaves and electrode-bearing channels must match one-to-one.
  void validate();
};

struct CellState {
  int channel = -1;
  double current = 0.0;      // [A]
  double j_geo = 0.0;        // [A/m^2]
  double eta_anode = 0.0;    // [V]
  double eta_cathode = 0.0;  // [V]
  double e0_anode = 0.0;
  double e0_cathode = 0.0;
  double voltage = 0.0;
  double area = 0.0;  // geometric electrode area [m^2]
  Conc surf_anode{};
  Conc surf_cathode{};
  PerSpecies<std::array<double, 2>> c_tilde{};  // warm start, [species][side]
  bool bc_converged = true;
};

struct OperatingPoint {
  double stack_current = 0.0;
  double stack_voltage = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<CellState> cells;  // by cell ordinal
  PerSpecies<double> inflow{};    // mol/s
  PerSpecies<double> outflow{};   // mol/s
  PerSpecies<double> reactions{}; // mol/s, consumption negative

  double power() const { return stack_current * stack_voltage; }
  double j_geo_max() const;
};

struct PolarizationCurve {
  std::vector<OperatingPoint> points;
  double electrode_area = 0.0;  // total geometric electrode area [m^2]

  int peak_power_index() const;
  double peak_power() const;          // [W]
  double peak_power_density() const;  // [W/m^2]
};

/// Per-section modal snapshot of a solved channel; evaluates the full
/// concentration field pseudo-analytically.
struct SectionTrace {
  double x0 = 0.0;  // section start along the channel [m]
  double dx = 0.0;
  PerSpecies<std::vector<double>> fourier_entry;  // wall sections
  PerSpecies<std::vector<double>> modal_entry;    // electrode sections
  PerSpecies<transport::EigenSystemPtr> systems;  // null = wall behaviour
};

struct ChannelTrace {
  double u = 0.0;
  double width = 0.0;
  double length = 0.0;
  PerSpecies<transport::ConcentrationProfile> inlet, outlet;
  std::vector<SectionTrace> sections;

  double value(const ParameterSet& params, SpeciesId s, double x, double ystar) const;
  double cross_mean(const ParameterSet& params, SpeciesId s, double x) const;
};

class StackSolver {
 public:
  explicit StackSolver(StackConfig cfg);

  const StackConfig& config() const { return cfg_; }
  const hydraulics::FlowSolution& flow() const { return flow_; }
  const hydraulics::RankOrder& ranks() const { return ranks_; }
  transport::TransportContext& transport_context() { return *ctx_; }
  double electrode_area() const;

  /// Alg. 1 inner scheme for one stack current, warm-started from the
  /// previous call. Returns converged=false instead of throwing when the
  /// outer fixed point stalls.
  OperatingPoint solve_operating_point(double stack_current);

  /// Exactly `iterations` outer sweeps regardless of convergence.
  OperatingPoint fixed_iteration_point(double stack_current, int iterations,
                                       bool newton_enabled);

  PolarizationCurve polarization_sweep();

  /// Validation protocol: all cells at a fixed geometric current density,
  /// one rank-ordered propagation pass (exact on a DAG).
  OperatingPoint propagate_fixed_current(double j_geo);

  void reset_state();
  long propagation_sweeps() const { return sweeps_; }
  const ChannelTrace& trace(int channel) const { return traces_[channel]; }

 private:
  OperatingPoint run_point(double stack_current, int min_iters, int max_iters,
                           bool newton_enabled, bool check_convergence);
  void propagate_all();
  void propagate_channel(int edge, const PerSpecies<transport::ConcentrationProfile>& in);
  PerSpecies<transport::ConcentrationProfile> source_profiles(double width) const;
  std::vector<electrical::CellInputs> cell_inputs() const;
  void apply_equal_split(double stack_current);

  StackConfig cfg_;
  std::unique_ptr<transport::TransportContext> ctx_;
  hydraulics::FlowSolution flow_;
  hydraulics::RankOrder ranks_;
  std::vector<int> cell_of_channel_;   // channel -> cell ordinal or -1
  std::vector<int> channel_of_cell_;   // cell ordinal -> channel
  int num_threads_ = 1;

  // mutable solve state
  std::vector<CellState> cells_;
  std::vector<double> warm_unknowns_;
  bool warm_ = false;
  std::vector<PerSpecies<transport::ConcentrationProfile>> inlet_profiles_;
  std::vector<PerSpecies<transport::ConcentrationProfile>> outlet_profiles_;
  std::vector<ChannelTrace> traces_;
  PerSpecies<double> inflow_{}, outflow_{}, reactions_{};
  bool bc_all_converged_ = true;
  long sweeps_ = 0;
};

/// Stack current divided structurally: parallel children split evenly.
std::vector<double> equal_split_currents(const electrical::ElectricalTree& tree,
                                         double stack_current);

}  // namespace microstack::stack
