#pragma once

#include <vector>

#include "macsim/wire.hpp"

namespace macsim {

// Symmetric radio connectivity. `links` are decodable neighbors;
// `interference` are nodes whose transmissions occupy the channel at a
// receiver. Links are always a subset of interference; by default the two
// coincide (no capture effect).
class Topology {
 public:
  Topology() = default;
  explicit Topology(int node_count);

  static Topology linear_chain(int hops);      // hops+1 nodes, i <-> i+1
  static Topology star(int leaves);            // center 0, leaves 1..n
  static Topology ring(int nodes);
  static Topology from_edges(int node_count, const std::vector<std::pair<NodeId, NodeId>>& edges);

  void add_link(NodeId a, NodeId b);
  void add_interference(NodeId a, NodeId b);

  int node_count() const { return static_cast<int>(links_.size()); }
  const std::vector<NodeId>& link_neighbors(NodeId n) const { return links_[n]; }
  const std::vector<NodeId>& interference_neighbors(NodeId n) const { return interference_[n]; }
  bool linked(NodeId a, NodeId b) const;

  // Next hop from `from` toward `to` along a shortest path; kNoNode when
  // unreachable. Table is rebuilt lazily per destination.
  NodeId next_hop(NodeId from, NodeId to) const;
  bool path_exists(NodeId from, NodeId to) const;

  bool is_linear_chain() const;

  void validate() const;

 private:
  std::vector<std::vector<NodeId>> links_;
  std::vector<std::vector<NodeId>> interference_;
};

}  // namespace macsim
