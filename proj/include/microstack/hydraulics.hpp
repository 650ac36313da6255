#pragma once

#include <optional>
#include <string>
#include <vector>

#include "microstack/domain.hpp"

namespace microstack::hydraulics {

struct Channel {
  int id = -1;                // dense index, doubles as deterministic ordering key
  std::string label;          // e.g. "c19"
  int from = -1;              // tail node (flow direction after solve)
  int to = -1;                // head node
  ChannelGeometry geometry;
  bool is_cell = false;
};

struct Inflow {
  std::optional<double> flow_rate;  // Q [m^3/s]
  std::optional<double> velocity;   // [m/s], through the inlet channel cross-section
};

struct FlowNetwork {
  int num_nodes = 0;
  int inlet = -1;
  int outlet = -1;
  std::vector<Channel> channels;
  Inflow inflow;

  const Channel* find_label(const std::string& label) const;
  /// In/out channel ids per node, sorted by channel id.
  std::vector<std::vector<int>> incoming() const;
  std::vector<std::vector<int>> outgoing() const;
  void validate() const;
};

struct FlowSolution {
  std::vector<double> pressure;    // per node [Pa], outlet grounded at 0
  std::vector<double> flow_rate;   // per channel [m^3/s], along channel orientation
  std::vector<double> velocity;    // per channel [m/s], Q/(w h)
  double inflow_rate = 0.0;
};

/// Rectangular-duct resistance R_h = 12 mu L / ((1 - 0.63 h/w) w h^3) with
/// h <= w (sides swapped so the aspect ratio is at most 1).
double hydraulic_resistance(const ChannelGeometry& g, double viscosity);

/// Solves nodal pressures and channel flows; channels are reoriented so all
/// solved flow rates are non-negative. Throws SingularNetwork when the
/// conductance system is rank-deficient (e.g. disconnected parts).
FlowSolution solve_flow(FlowNetwork& net, double viscosity);

struct RankOrder {
  std::vector<int> rank;   // per channel
  std::vector<int> order;  // channel ids sorted by (rank, id)
  int max_rank = 0;
};

/// rank(e) = 1 + max rank of channels into tail(e); source channels rank 0.
/// Throws CycleDetected if the oriented network is not a DAG.
RankOrder rank_dag(const FlowNetwork& net);

}  // namespace microstack::hydraulics
