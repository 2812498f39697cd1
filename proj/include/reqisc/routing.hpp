#pragma once

#include <string>

#include "reqisc/circuit.hpp"

namespace reqisc {

struct CouplingGraph {
  int n_phys = 0;
  std::vector<std::pair<int, int>> edges;
  Eigen::MatrixXi dist;  // all-pairs shortest path (BFS)

  bool adjacent(int a, int b) const;
};

// "chain:n" | "grid:RxC" | "file:<path>" (whitespace edge list "a b" lines).
CouplingGraph build_graph(const std::string& spec);
CouplingGraph chain_graph(int n);
CouplingGraph grid_graph(int rows, int cols);
CouplingGraph graph_from_edges(int n, std::vector<std::pair<int, int>> edges);

struct RoutingOptions {
  double extended_weight = 0.5;  // W
  int extended_size = 20;
  std::uint64_t seed = 0;
  bool reverse_traversal = false;  // one forward+backward initial-mapping pass
};

struct RoutedCircuit {
  Circuit circuit;               // on physical qubits
  std::vector<int> initial_mapping;  // logical -> physical at circuit start
  int inserted_swaps = 0;
  int mirrored_absorptions = 0;
};

// Baseline SABRE; inserted swaps are emitted as Can(pi/4,pi/4,pi/4).
RoutedCircuit sabre_route(const Circuit& c, const CouplingGraph& g,
                          const RoutingOptions& opts = {});

// SABRE with mirror absorption: a candidate swap acting on the physical pair
// of a last-mapped-layer gate, with heuristic cost below the no-swap cost,
// fuses into that gate instead of being inserted.
RoutedCircuit mirroring_sabre(const Circuit& c, const CouplingGraph& g,
                              const RoutingOptions& opts = {});

struct RoutingReport {
  double overhead_ratio = 1.0;  // routed #2Q / original #2Q
  int swaps = 0;
  int absorptions = 0;
};
RoutingReport routing_report(const Circuit& original,
                             const RoutedCircuit& routed);

}  // namespace reqisc
