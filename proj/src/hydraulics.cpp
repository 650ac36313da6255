#include "microstack/hydraulics.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <deque>
#include <utility>

namespace microstack::hydraulics {

const Channel* FlowNetwork::find_label(const std::string& label) const {
  for (const auto& c : channels) {
    if (c.label == label) return &c;
  }
  return nullptr;
}

std::vector<std::vector<int>> FlowNetwork::incoming() const {
  std::vector<std::vector<int>> in(num_nodes);
  for (const auto& c : channels) in[c.to].push_back(c.id);
  for (auto& v : in) std::sort(v.begin(), v.end());
  return in;
}

std::vector<std::vector<int>> FlowNetwork::outgoing() const {
  std::vector<std::vector<int>> out(num_nodes);
  for (const auto& c : channels) out[c.from].push_back(c.id);
  for (auto& v : out) std::sort(v.begin(), v.end());
  return out;
}

void FlowNetwork::validate() const {
  if (num_nodes < 2) throw ConfigError("network needs at least two nodes");
  if (inlet < 0 || inlet >= num_nodes || outlet < 0 || outlet >= num_nodes ||
      inlet == outlet) {
    throw ConfigError("invalid inlet/outlet nodes");
  }
  if (channels.empty()) throw ConfigError("network has no channels");
  for (const auto& c : channels) {
    if (c.from < 0 || c.from >= num_nodes || c.to < 0 || c.to >= num_nodes ||
        c.from == c.to) {
      throw ConfigError("channel " + c.label + " has invalid endpoints");
    }
    c.geometry.validate();
  }
  if (!inflow.flow_rate && !inflow.velocity) {
    throw ConfigError("inflow boundary not set");
  }
}

double hydraulic_resistance(const ChannelGeometry& g, double viscosity) {
  double w = g.width, h = g.height;
  if (h > w) std::swap(w, h);  // formula wants aspect ratio h/w <= 1
  return 12.0 * viscosity * g.length / ((1.0 - 0.63 * h / w) * w * h * h * h);
}

namespace {

double inflow_rate(const FlowNetwork& net) {
  if (net.inflow.flow_rate) return *net.inflow.flow_rate;
  // Velocity refers to the cross-section of the first channel at the inlet.
  for (const auto& c : net.channels) {
    if (c.from == net.inlet || c.to == net.inlet) {
      return *net.inflow.velocity * c.geometry.width * c.geometry.height;
    }
  }
  throw ConfigError("no channel attached to the inlet node");
}

void check_connected(const FlowNetwork& net) {
  std::vector<char> seen(net.num_nodes, 0);
  std::deque<int> q{net.inlet};
  seen[net.inlet] = 1;
  std::vector<std::vector<int>> adj(net.num_nodes);
  for (const auto& c : net.channels) {
    adj[c.from].push_back(c.to);
    adj[c.to].push_back(c.from);
  }
  while (!q.empty()) {
    int n = q.front();
    q.pop_front();
    for (int m : adj[n]) {
      if (!seen[m]) {
        seen[m] = 1;
        q.push_back(m);
      }
    }
  }
  for (int n = 0; n < net.num_nodes; ++n) {
    if (!seen[n]) throw SingularNetwork("network node disconnected from inlet");
  }
}

}  // namespace

FlowSolution solve_flow(FlowNetwork& net, double viscosity) {
  net.validate();
  check_connected(net);

  const int n = net.num_nodes;
  const double q_in = inflow_rate(net);

  // Unknowns: pressures at all nodes except the grounded outlet.
  std::vector<int> idx(n, -1);
  int m = 0;
  for (int i = 0; i < n; ++i) {
    if (i != net.outlet) idx[i] = m++;
  }

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(net.channels.size() * 4);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  for (const auto& c : net.channels) {
    const double g = 1.0 / hydraulic_resistance(c.geometry, viscosity);
    const int a = idx[c.from], b = idx[c.to];
    if (a >= 0) trips.emplace_back(a, a, g);
    if (b >= 0) trips.emplace_back(b, b, g);
    if (a >= 0 && b >= 0) {
      trips.emplace_back(a, b, -g);
      trips.emplace_back(b, a, -g);
    }
  }
  rhs[idx[net.inlet]] = q_in;

  Eigen::SparseMatrix<double> lap(m, m);
  lap.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> solver(lap);
  if (solver.info() != Eigen::Success) {
    throw SingularNetwork("conductance system is rank-deficient");
  }
  Eigen::VectorXd p = solver.solve(rhs);
  if (!p.allFinite()) throw SingularNetwork("flow solve produced non-finite pressures");

  FlowSolution sol;
  sol.pressure.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (idx[i] >= 0) sol.pressure[i] = p[idx[i]];
  }
  sol.inflow_rate = q_in;
  sol.flow_rate.resize(net.channels.size());
  sol.velocity.resize(net.channels.size());
  for (auto& c : net.channels) {
    const double g = 1.0 / hydraulic_resistance(c.geometry, viscosity);
    double q = (sol.pressure[c.from] - sol.pressure[c.to]) * g;
    if (q < 0.0) {  // orient along positive flow
      std::swap(c.from, c.to);
      q = -q;
    }
    sol.flow_rate[c.id] = q;
    sol.velocity[c.id] = q / (c.geometry.width * c.geometry.height);
  }
  return sol;
}

RankOrder rank_dag(const FlowNetwork& net) {
  const int ne = static_cast<int>(net.channels.size());
  auto in = net.incoming();

  RankOrder ro;
  ro.rank.assign(ne, -1);

  // Kahn ordering over channels: a channel is ready when all channels into
  // its tail node are ranked.
  std::vector<int> pending(ne, 0);
  std::deque<int> ready;
  for (const auto& c : net.channels) {
    pending[c.id] = static_cast<int>(in[c.from].size());
    if (pending[c.id] == 0) ready.push_back(c.id);
  }
  auto out = net.outgoing();

  int done = 0;
  while (!ready.empty()) {
    const int e = ready.front();
    ready.pop_front();
    int r = 0;
    for (int up : in[net.channels[e].from]) r = std::max(r, ro.rank[up] + 1);
    ro.rank[e] = r;
    ++done;
    for (int down : out[net.channels[e].to]) {
      if (--pending[down] == 0) ready.push_back(down);
    }
  }
  if (done != ne) {
    throw CycleDetected("flow orientation produced a cyclic dependency");
  }

  ro.order.resize(ne);
  for (int i = 0; i < ne; ++i) ro.order[i] = i;
  std::sort(ro.order.begin(), ro.order.end(), [&](int a, int b) {
    return std::make_pair(ro.rank[a], a) < std::make_pair(ro.rank[b], b);
  });
  ro.max_rank = 0;
  for (int r : ro.rank) ro.max_rank = std::max(ro.max_rank, r);
  return ro;
}

}  // namespace microstack::hydraulics
