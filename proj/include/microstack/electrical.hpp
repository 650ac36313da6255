#pragma once

#include <string>
#include <vector>

#include "microstack/domain.hpp"
#include "microstack/electrochem.hpp"

namespace microstack::electrical {

enum class NodeKind { Series, Parallel, Cell, Resistor };

struct TreeNode {
  NodeKind kind = NodeKind::Cell;
  std::vector<int> children;   // indices into ElectricalTree::nodes
  std::string cell_label;      // Cell leaves
  int cell_index = -1;         // dense cell ordinal, assigned by validate_tree
  double resistance = 0.0;     // Resistor leaves [Ohm]
};

struct ElectricalTree {
  std::vector<TreeNode> nodes;
  int root = -1;

  int num_cells() const;
  std::vector<std::string> cell_labels() const;  // in cell_index order
  /// Checks reachability, arity (composite nodes need >= 2 children) and
  /// cell label uniqueness; assigns cell ordinals.
  void validate();
};

/// One fuel cell as seen by the electrical network: electrode kinetics inputs
/// frozen during a Newton solve.
struct CellInputs {
  Conc conc_anode{};    // electrode-surface concentrations [mol/m^3]
  Conc conc_cathode{};
  double area = 0.0;    // geometric electrode area [m^2]
};

struct CellSolution {
  double current = 0.0;   // [A]
  double j_geo = 0.0;     // current / area [A/m^2]
  double j_rxn = 0.0;     // j_geo / A^e, the Butler-Volmer scale [A/m^2]
  double eta_anode = 0.0;    // loss convention [V]
  double eta_cathode = 0.0;  // loss convention [V]
  double e0_anode = 0.0;
  double e0_cathode = 0.0;
  double voltage = 0.0;  // Eq. 3 composition [V]
};

struct SolveOptions {
  double tol_scale = 1.0e-10;  // eps_el = tol_scale * max(1, |I_stack|)
  int max_iterations = 100;
  int max_halvings = 30;
  bool sparse = false;  // sparse LU instead of dense
};

struct SolveResult {
  std::vector<CellSolution> cells;  // by cell_index
  double stack_voltage = 0.0;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> unknowns;  // final unknown vector (warm-start handle)
};

/// Assembled nonlinear system f(u) = 0 over branch currents and electrode
/// overpotentials. Unknown layout: currents of parallel children first, then
/// (eta_A, eta_C) per cell.
class ResidualSystem {
 public:
  ResidualSystem(const ElectricalTree& tree, const ParameterSet& params,
                 const std::vector<CellInputs>& cells, double stack_current,
                 double temperature);

  int size() const { return n_; }
  int num_current_unknowns() const { return n_currents_; }

  /// Equal-division initial guess: parallel children split evenly, cell
  /// overpotentials from the Butler-Volmer inverse at that split.
  std::vector<double> initial_guess() const;

  void residual(const std::vector<double>& u, std::vector<double>& f) const;
  void jacobian(const std::vector<double>& u, Eigen::MatrixXd& jac) const;

  double node_voltage(int node, const std::vector<double>& u) const;
  double node_current(int node, const std::vector<double>& u) const;
  CellSolution cell_solution(int tree_node, const std::vector<double>& u) const;
  const ElectricalTree& tree() const { return tree_; }

 private:
  void voltage_gradient(int node, const std::vector<double>& u, double* grad) const;

  const ElectricalTree& tree_;
  const ParameterSet& params_;
  const std::vector<CellInputs>& cells_;
  double stack_current_;
  double temperature_;
  int n_ = 0;
  int n_currents_ = 0;
  std::vector<int> current_unknown_;  // per tree node; -1 = inherits/root
  std::vector<int> eta_offset_;       // per tree node; cell leaves only
  std::vector<double> e0_anode_, e0_cathode_;  // per cell_index
};

/// Newton-Raphson with step halving. Throws SingularJacobian on pivot
/// failure; returns converged = false with the residual attached after the
/// iteration limit.
SolveResult newton_solve(const ResidualSystem& sys, const SolveOptions& opts,
                         const std::vector<double>* warm_start = nullptr);

/// Terminal voltage of the tree root for a solved unknown vector.
double stack_potential(const ResidualSystem& sys, const std::vector<double>& u);

ElectricalTree single_cell_tree(const std::string& label);

}  // namespace microstack::electrical
