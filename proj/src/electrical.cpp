#include "microstack/electrical.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace microstack::electrical {

namespace {
const HalfReaction kHor = anode_hor();
const HalfReaction kOrr = cathode_orr();

Conc floored(const Conc& c) {
  Conc out = c;
  for (double& v : out) v = std::max(v, electrochem::kConcFloor);
  return out;
}
}  // namespace

int ElectricalTree::num_cells() const {
  int n = 0;
  for (const auto& t : nodes) {
    if (t.kind == NodeKind::Cell) ++n;
  }
  return n;
}

std::vector<std::string> ElectricalTree::cell_labels() const {
  std::vector<std::string> labels(num_cells());
  for (const auto& t : nodes) {
    if (t.kind == NodeKind::Cell) labels[t.cell_index] = t.cell_label;
  }
  return labels;
}

void ElectricalTree::validate() {
  if (root < 0 || root >= static_cast<int>(nodes.size())) {
    throw ConfigError("electrical tree has no root");
  }
  std::vector<char> seen(nodes.size(), 0);
  std::set<std::string> labels;
  std::deque<int> q{root};
  int cell_ordinal = 0;
  while (!q.empty()) {
    const int i = q.front();
    q.pop_front();
    if (seen[i]) throw ConfigError("electrical tree shares a subtree");
    seen[i] = 1;
    auto& t = nodes[i];
    switch (t.kind) {
      case NodeKind::Series:
      case NodeKind::Parallel:
        if (t.children.size() < 2) {
          throw ConfigError("series/parallel nodes need at least two children");
        }
        for (int c : t.children) q.push_back(c);
        break;
      case NodeKind::Cell:
        if (!labels.insert(t.cell_label).second) {
          throw ConfigError("duplicate cell label " + t.cell_label);
        }
        t.cell_index = cell_ordinal++;
        break;
      case NodeKind::Resistor:
        if (!(t.resistance > 0.0)) throw ConfigError("resistor must be positive");
        break;
    }
  }
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (!seen[i]) throw ConfigError("electrical tree node unreachable from root");
  }
}

ElectricalTree single_cell_tree(const std::string& label) {
  ElectricalTree t;
  TreeNode n;
  n.kind = NodeKind::Cell;
  n.cell_label = label;
  t.nodes.push_back(n);
  t.root = 0;
  t.validate();
  return t;
}

ResidualSystem::ResidualSystem(const ElectricalTree& tree, const ParameterSet& params,
                               const std::vector<CellInputs>& cells,
                               double stack_current, double temperature)
    : tree_(tree),
      params_(params),
      cells_(cells),
      stack_current_(stack_current),
      temperature_(temperature) {
  const int nn = static_cast<int>(tree_.nodes.size());
  current_unknown_.assign(nn, -1);
  eta_offset_.assign(nn, -1);

  // Currents of parallel children are unknowns; series children inherit.
  n_currents_ = 0;
  std::deque<int> q{tree_.root};
  while (!q.empty()) {
    const int i = q.front();
    q.pop_front();
    const auto& t = tree_.nodes[i];
    for (int c : t.children) {
      if (t.kind == NodeKind::Parallel) {
        current_unknown_[c] = n_currents_++;
      } else {
        current_unknown_[c] = current_unknown_[i];
      }
      q.push_back(c);
    }
  }

  n_ = n_currents_;
  const int ncells = tree_.num_cells();
  e0_anode_.resize(ncells);
  e0_cathode_.resize(ncells);
  for (int i = 0; i < nn; ++i) {
    const auto& t = tree_.nodes[i];
    if (t.kind != NodeKind::Cell) continue;
    eta_offset_[i] = n_;
    n_ += 2;
    const auto& in = cells_[t.cell_index];
    e0_anode_[t.cell_index] = electrochem::nernst_potential(
        params_.anode, kHor, floored(in.conc_anode), temperature_);
    e0_cathode_[t.cell_index] = electrochem::nernst_potential(
        params_.cathode, kOrr, floored(in.conc_cathode), temperature_);
  }
}

double ResidualSystem::node_current(int node, const std::vector<double>& u) const {
  const int idx = current_unknown_[node];
  return idx < 0 ? stack_current_ : u[idx];
}

double ResidualSystem::node_voltage(int node, const std::vector<double>& u) const {
  const auto& t = tree_.nodes[node];
  switch (t.kind) {
    case NodeKind::Series: {
      double v = 0.0;
      for (int c : t.children) v += node_voltage(c, u);
      return v;
    }
    case NodeKind::Parallel:
      return node_voltage(t.children[0], u);
    case NodeKind::Cell: {
      const int off = eta_offset_[node];
      return electrochem::cell_potential(e0_anode_[t.cell_index],
                                         e0_cathode_[t.cell_index], u[off],
                                         u[off + 1]);
    }
    case NodeKind::Resistor:
      return -node_current(node, u) * t.resistance;
  }
  return 0.0;
}

void ResidualSystem::voltage_gradient(int node, const std::vector<double>& u,
                                      double* grad) const {
  const auto& t = tree_.nodes[node];
  switch (t.kind) {
    case NodeKind::Series:
      for (int c : t.children) voltage_gradient(c, u, grad);
      break;
    case NodeKind::Parallel:
      voltage_gradient(t.children[0], u, grad);
      break;
    case NodeKind::Cell:
      grad[eta_offset_[node]] -= 1.0;
      grad[eta_offset_[node] + 1] -= 1.0;
      break;
    case NodeKind::Resistor:
      if (current_unknown_[node] >= 0) {
        grad[current_unknown_[node]] -= t.resistance;
      }
      break;
  }
}

namespace {

// Emits rows in deterministic preorder: per parallel node a KCL row plus
// voltage-equality rows, per cell the two Butler-Volmer rows.
template <typename RowFn>
void walk_rows(const ElectricalTree& tree, RowFn&& fn) {
  int row = 0;
  std::deque<int> stack{tree.root};
  std::vector<int> order;
  while (!stack.empty()) {
    const int i = stack.front();
    stack.pop_front();
    order.push_back(i);
    const auto& t = tree.nodes[i];
    for (auto it = t.children.rbegin(); it != t.children.rend(); ++it) {
      stack.push_front(*it);
    }
  }
  for (int i : order) {
    const auto& t = tree.nodes[i];
    if (t.kind == NodeKind::Parallel) {
      fn(row++, i, -1);  // KCL
      for (size_t c = 1; c < t.children.size(); ++c) {
        fn(row++, i, static_cast<int>(c));  // KVL child c vs child 0
      }
    } else if (t.kind == NodeKind::Cell) {
      fn(row++, i, -2);  // anode BV
      fn(row++, i, -3);  // cathode BV
    }
  }
}

}  // namespace

void ResidualSystem::residual(const std::vector<double>& u, std::vector<double>& f) const {
  f.assign(n_, 0.0);
  walk_rows(tree_, [&](int row, int node, int what) {
    const auto& t = tree_.nodes[node];
    if (what == -1) {
      double sum = -node_current(node, u);
      for (int c : t.children) sum += node_current(c, u);
      f[row] = sum;
    } else if (what >= 1) {
      f[row] = node_voltage(t.children[what], u) - node_voltage(t.children[0], u);
    } else {
      const auto& in = cells_[t.cell_index];
      const double i_leaf = node_current(node, u);
      const double scale_a = in.area * params_.anode.active_area_ratio;
      const double scale_c = in.area * params_.cathode.active_area_ratio;
      const int off = eta_offset_[node];
      if (what == -2) {
        f[row] = scale_a * electrochem::butler_volmer_j(params_.anode, kHor,
                                                        floored(in.conc_anode),
                                                        u[off], temperature_) -
                 i_leaf;
      } else {
        f[row] = scale_c * electrochem::butler_volmer_j(params_.cathode, kOrr,
                                                        floored(in.conc_cathode),
                                                        -u[off + 1], temperature_) +
                 i_leaf;
      }
    }
  });
}

void ResidualSystem::jacobian(const std::vector<double>& u, Eigen::MatrixXd& jac) const {
  jac.setZero(n_, n_);
  std::vector<double> scratch(n_);
  walk_rows(tree_, [&](int row, int node, int what) {
    const auto& t = tree_.nodes[node];
    if (what == -1) {
      for (int c : t.children) jac(row, current_unknown_[c]) += 1.0;
      if (current_unknown_[node] >= 0) jac(row, current_unknown_[node]) -= 1.0;
    } else if (what >= 1) {
      std::fill(scratch.begin(), scratch.end(), 0.0);
      voltage_gradient(t.children[what], u, scratch.data());
      for (int j = 0; j < n_; ++j) jac(row, j) += scratch[j];
      std::fill(scratch.begin(), scratch.end(), 0.0);
      voltage_gradient(t.children[0], u, scratch.data());
      for (int j = 0; j < n_; ++j) jac(row, j) -= scratch[j];
    } else {
      const auto& in = cells_[t.cell_index];
      const int off = eta_offset_[node];
      if (what == -2) {
        const double d = in.area * params_.anode.active_area_ratio *
                         electrochem::butler_volmer_djdeta(
                             params_.anode, kHor, floored(in.conc_anode), u[off],
                             temperature_);
        jac(row, off) += d;
        if (current_unknown_[node] >= 0) jac(row, current_unknown_[node]) -= 1.0;
      } else {
        const double d = in.area * params_.cathode.active_area_ratio *
                         electrochem::butler_volmer_djdeta(
                             params_.cathode, kOrr, floored(in.conc_cathode),
                             -u[off + 1], temperature_);
        jac(row, off + 1) -= d;
        if (current_unknown_[node] >= 0) jac(row, current_unknown_[node]) += 1.0;
      }
    }
  });
}

std::vector<double> ResidualSystem::initial_guess() const {
  std::vector<double> u(n_, 0.0);
  // Equal division of the stack current among parallel branches.
  struct Item {
    int node;
    double current;
  };
  std::deque<Item> q{{tree_.root, stack_current_}};
  while (!q.empty()) {
    const auto [i, cur] = q.front();
    q.pop_front();
    const auto& t = tree_.nodes[i];
    if (current_unknown_[i] >= 0) u[current_unknown_[i]] = cur;
    if (t.kind == NodeKind::Parallel) {
      const double share = cur / static_cast<double>(t.children.size());
      for (int c : t.children) q.push_back({c, share});
    } else if (t.kind == NodeKind::Series) {
      for (int c : t.children) q.push_back({c, cur});
    } else if (t.kind == NodeKind::Cell) {
      const auto& in = cells_[t.cell_index];
      const int off = eta_offset_[i];
      const double j_rxn_a = cur / (in.area * params_.anode.active_area_ratio);
      const double j_rxn_c = cur / (in.area * params_.cathode.active_area_ratio);
      try {
        u[off] = electrochem::solve_overpotential(
            params_.anode, kHor, floored(in.conc_anode), j_rxn_a, temperature_);
      } catch (const Error&) {
        u[off] = cur >= 0.0 ? 0.5 : -0.5;
      }
      try {
        u[off + 1] = -electrochem::solve_overpotential(
            params_.cathode, kOrr, floored(in.conc_cathode), -j_rxn_c, temperature_);
      } catch (const Error&) {
        u[off + 1] = cur >= 0.0 ? 0.5 : -0.5;
      }
    }
  }
  return u;
}

CellSolution ResidualSystem::cell_solution(int tree_node,
                                           const std::vector<double>& u) const {
  const auto& t = tree_.nodes[tree_node];
  const auto& in = cells_[t.cell_index];
  CellSolution s;
  s.current = node_current(tree_node, u);
  s.j_geo = s.current / in.area;
  s.j_rxn = s.j_geo / params_.anode.active_area_ratio;
  s.eta_anode = u[eta_offset_[tree_node]];
  s.eta_cathode = u[eta_offset_[tree_node] + 1];
  s.e0_anode = e0_anode_[t.cell_index];
  s.e0_cathode = e0_cathode_[t.cell_index];
  s.voltage = electrochem::cell_potential(s.e0_anode, s.e0_cathode, s.eta_anode,
                                          s.eta_cathode);
  return s;
}

SolveResult newton_solve(const ResidualSystem& sys, const SolveOptions& opts,
                         const std::vector<double>* warm_start) {
  const int n = sys.size();
  std::vector<double> u =
      (warm_start && static_cast<int>(warm_start->size()) == n) ? *warm_start
                                                                : sys.initial_guess();
  std::vector<double> f(n), f_try(n);
  auto norm_inf = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };

  sys.residual(u, f);
  double fn = norm_inf(f);
  const double eps = opts.tol_scale * std::max(1.0, std::abs(sys.node_current(
                                                        sys.tree().root, u)));

  Eigen::MatrixXd jac;
  SolveResult out;
  int it = 0;
  for (; it < opts.max_iterations && fn > eps; ++it) {
    sys.jacobian(u, jac);
    Eigen::Map<const Eigen::VectorXd> fv(f.data(), n);
    Eigen::VectorXd du;
    if (opts.sparse) {
      Eigen::SparseMatrix<double> sj = jac.sparseView();
      Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(sj);
      if (lu.info() != Eigen::Success) throw SingularJacobian("sparse LU failed");
      du = lu.solve(-fv);
    } else {
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
      du = lu.solve(-fv);
    }
    if (!du.allFinite()) throw SingularJacobian("Jacobian pivot failure");

    double alpha = 1.0;
    std::vector<double> u_try(n);
    double fn_try = fn;
    for (int h = 0; h <= opts.max_halvings; ++h) {
      for (int i = 0; i < n; ++i) u_try[i] = u[i] + alpha * du[i];
      sys.residual(u_try, f_try);
      fn_try = norm_inf(f_try);
      if (std::isfinite(fn_try) && fn_try < fn) break;
      alpha *= 0.5;
    }
    u = u_try;
    f = f_try;
    fn = fn_try;
  }

  if (!(fn <= eps)) {
    throw NoConvergence("electrical Newton did not converge", fn);
  }

  out.iterations = it;
  out.converged = true;
  out.residual_norm = fn;
  out.unknowns = u;
  out.stack_voltage = sys.node_voltage(sys.tree().root, u);
  out.cells.resize(sys.tree().num_cells());
  for (size_t i = 0; i < sys.tree().nodes.size(); ++i) {
    if (sys.tree().nodes[i].kind == NodeKind::Cell) {
      out.cells[sys.tree().nodes[i].cell_index] =
          sys.cell_solution(static_cast<int>(i), u);
    }
  }
  return out;
}

double stack_potential(const ResidualSystem& sys, const std::vector<double>& u) {
  return sys.node_voltage(sys.tree().root, u);
}

}  // namespace microstack::electrical
