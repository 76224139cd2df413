#include "macsim/topology.hpp"

#include <algorithm>
#include <queue>

#include "macsim/errors.hpp"

namespace macsim {

namespace {

void insert_sorted(std::vector<NodeId>& v, NodeId n) {
  auto it = std::lower_bound(v.begin(), v.end(), n);
  if (it == v.end() || *it != n) v.insert(it, n);
}

}  // namespace

Topology::Topology(int node_count) : links_(node_count), interference_(node_count) {
  if (node_count < 1) throw ValidationError("topology needs at least one node");
}

Topology Topology::linear_chain(int hops) {
  if (hops < 1) throw ValidationError("linear topology needs at least one hop");
  Topology t(hops + 1);
  for (int i = 0; i < hops; ++i) t.add_link(i, i + 1);
  return t;
}

Topology Topology::star(int leaves) {
  if (leaves < 1) throw ValidationError("star topology needs at least one leaf");
  Topology t(leaves + 1);
  for (int i = 1; i <= leaves; ++i) t.add_link(0, i);
  return t;
}

Topology Topology::ring(int nodes) {
  if (nodes < 3) throw ValidationError("ring topology needs at least three nodes");
  Topology t(nodes);
  for (int i = 0; i < nodes; ++i) t.add_link(i, (i + 1) % nodes);
  return t;
}

Topology Topology::from_edges(int node_count,
                              const std::vector<std::pair<NodeId, NodeId>>& edges) {
  Topology t(node_count);
  for (const auto& [a, b] : edges) t.add_link(a, b);
  return t;
}

void Topology::add_link(NodeId a, NodeId b) {
  if (a < 0 || b < 0 || a >= node_count() || b >= node_count() || a == b) {
    throw ValidationError("bad link endpoints " + std::to_string(a) + "," + std::to_string(b));
  }
  insert_sorted(links_[a], b);
  insert_sorted(links_[b], a);
  add_interference(a, b);
}

void Topology::add_interference(NodeId a, NodeId b) {
  if (a < 0 || b < 0 || a >= node_count() || b >= node_count() || a == b) {
    throw ValidationError("bad interference endpoints");
  }
  insert_sorted(interference_[a], b);
  insert_sorted(interference_[b], a);
}

bool Topology::linked(NodeId a, NodeId b) const {
  const auto& v = links_[a];
  return std::binary_search(v.begin(), v.end(), b);
}

NodeId Topology::next_hop(NodeId from, NodeId to) const {
  if (from == to) return to;
  // BFS from the destination; first hop toward `to` is the parent of `from`.
  std::vector<NodeId> parent(node_count(), kNoNode);
  std::queue<NodeId> frontier;
  frontier.push(to);
  parent[to] = to;
  while (!frontier.empty()) {
    const NodeId cur = frontier.front();
    frontier.pop();
    for (NodeId nb : links_[cur]) {
      if (parent[nb] == kNoNode) {
        parent[nb] = cur;
        if (nb == from) return cur;
        frontier.push(nb);
      }
    }
  }
  return kNoNode;
}

bool Topology::path_exists(NodeId from, NodeId to) const {
  return from == to || next_hop(from, to) != kNoNode;
}

bool Topology::is_linear_chain() const {
  int degree_one = 0;
  for (int i = 0; i < node_count(); ++i) {
    const auto deg = links_[i].size();
    if (deg == 1) {
      ++degree_one;
    } else if (deg != 2) {
      return false;
    }
  }
  if (degree_one != 2) return false;
  // Connectivity: walk from one endpoint.
  return path_exists(0, node_count() - 1);
}

void Topology::validate() const {
  for (int i = 0; i < node_count(); ++i) {
    for (NodeId nb : links_[i]) {
      if (!std::binary_search(interference_[i].begin(), interference_[i].end(), nb)) {
        throw ValidationError("links must be a subset of interference");
      }
    }
  }
}

}  // namespace macsim
