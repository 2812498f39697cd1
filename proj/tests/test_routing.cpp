#include "reqisc/routing.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "reqisc/passes.hpp"
#include "reqisc/scheme.hpp"

namespace reqisc {
namespace {

constexpr double kPi = std::numbers::pi;

Circuit random_2q_circuit(int n, int gates, std::mt19937_64& rng) {
  Circuit c(n);
  std::uniform_int_distribution<int> qd(0, n - 1);
  std::uniform_real_distribution<double> ang(0.1, kPi / 4);
  for (int i = 0; i < gates; ++i) {
    int a = qd(rng), b = qd(rng);
    while (b == a) b = qd(rng);
    if (i % 3 == 0) {
      c.push(Gate::simple(GateKind::cx, {a, b}));
    } else if (i % 3 == 1) {
      double x = ang(rng);
      c.push(Gate::can(a, b, {x, x / 2, 0}));
    } else {
      c.push(Gate::u3(a, ang(rng), ang(rng), ang(rng)));
    }
  }
  return c;
}

// Pad an n-qubit circuit to n_phys wires for comparison with routed output.
Circuit padded(const Circuit& c, int n_phys) {
  Circuit out(n_phys);
  out.gates = c.gates;
  return out;
}

void expect_routed_equivalent(const Circuit& orig, const RoutedCircuit& r,
                              const CouplingGraph& g, double tol = 1e-8) {
  // identity initial mapping: unitary_of honors the final permutation
  for (const auto& gate : r.circuit.gates) {
    if (gate.two_qubit()) {
      ASSERT_TRUE(g.adjacent(gate.qubits[0], gate.qubits[1]));
    }
  }
  if (g.n_phys <= 10) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> gauss;
    Eigen::VectorXcd psi(1 << g.n_phys);
    for (int i = 0; i < psi.size(); ++i) psi(i) = cplx(gauss(rng), gauss(rng));
    psi.normalize();
    Eigen::VectorXcd a = statevector_run(padded(orig, g.n_phys), psi);
    Eigen::VectorXcd b = statevector_run(r.circuit, psi);
    cplx phase = 0;
    int imax = 0;
    for (int i = 1; i < a.size(); ++i) {
      if (std::abs(a(i)) > std::abs(a(imax))) imax = i;
    }
    phase = b(imax) / a(imax);
    ASSERT_NEAR(std::abs(phase), 1.0, 1e-6);
    ASSERT_LT((b - phase * a).cwiseAbs().maxCoeff(), tol);
  }
}

TEST(BuildGraph, ChainGridAndErrors) {
  CouplingGraph chain = build_graph("chain:3");
  EXPECT_EQ(chain.edges.size(), 2u);
  EXPECT_EQ(chain.dist(0, 2), 2);
  CouplingGraph grid = build_graph("grid:2x2");
  EXPECT_EQ(grid.edges.size(), 4u);
  EXPECT_EQ(grid.dist(0, 3), 2);
  EXPECT_THROW(graph_from_edges(4, {{0, 1}, {2, 3}}), NumericsError);
}

TEST(SabreRoute, ConformantCircuitUntouched) {
  Circuit c(3);
  c.push(Gate::simple(GateKind::cx, {0, 1}));
  c.push(Gate::simple(GateKind::cx, {1, 2}));
  auto r = sabre_route(c, chain_graph(3));
  EXPECT_EQ(r.inserted_swaps, 0);
  EXPECT_EQ(r.circuit.count_2q(), 2);
  EXPECT_TRUE(r.circuit.identity_permutation());
}

TEST(SabreRoute, DistantPairNeedsSwap) {
  Circuit c(3);
  c.push(Gate::simple(GateKind::cx, {0, 2}));
  auto r = sabre_route(c, chain_graph(3));
  EXPECT_GE(r.inserted_swaps, 1);
  expect_routed_equivalent(c, r, chain_graph(3));
}

TEST(SabreRoute, RandomCircuitsStayEquivalent) {
  std::mt19937_64 rng(77);
  CouplingGraph g = chain_graph(6);
  for (int rep = 0; rep < 30; ++rep) {
    Circuit c = random_2q_circuit(6, 18, rng);
    auto r = sabre_route(c, g);
    expect_routed_equivalent(c, r, g);
  }
}

TEST(MirroringSabre, FigSevenScenarioZeroOverhead) {
  // chain 0-1-2: a gate on (0,1) then one on (0,2); the needed swap is
  // absorbed by the preceding gate instead of being inserted
  Circuit c(3);
  c.push(Gate::can(0, 1, {0.4, 0.2, 0.1}));
  c.push(Gate::can(0, 2, {0.3, 0.1, 0.0}));
  CouplingGraph g = chain_graph(3);
  auto r = mirroring_sabre(c, g);
  EXPECT_EQ(r.inserted_swaps, 0);
  EXPECT_EQ(r.mirrored_absorptions, 1);
  EXPECT_EQ(r.circuit.count_2q(), 2);
  expect_routed_equivalent(c, r, g);
  auto plain = sabre_route(c, g);
  EXPECT_GE(plain.inserted_swaps, 1);
}

TEST(MirroringSabre, AbsorptionMirrorsCoordinate) {
  Circuit c(3);
  WeylCoordinate orig{0.4, 0.2, 0.1};
  c.push(Gate::can(0, 1, orig));
  c.push(Gate::can(0, 2, {0.3, 0.1, 0.0}));
  auto r = mirroring_sabre(c, chain_graph(3));
  ASSERT_EQ(r.mirrored_absorptions, 1);
  // first emitted 2Q gate carries the mirrored class
  WeylCoordinate expect = mirror(orig);
  bool found = false;
  for (const auto& g : r.circuit.gates) {
    if (g.kind == GateKind::can) {
      EXPECT_TRUE(gate_coordinate(g).approx_equal(expect, 1e-9));
      found = true;
      break;
    }
  }
  EXPECT_TRUE(found);
}

TEST(MirroringSabre, ConformantIdenticalToInput) {
  Circuit c(4);
  c.push(Gate::simple(GateKind::cx, {0, 1}));
  c.push(Gate::simple(GateKind::cx, {2, 3}));
  auto r = mirroring_sabre(c, chain_graph(4));
  EXPECT_EQ(r.inserted_swaps, 0);
  EXPECT_EQ(r.mirrored_absorptions, 0);
  EXPECT_EQ(r.circuit.count_2q(), 2);
}

TEST(MirroringSabre, PairedRunsNeverWorse) {
  std::mt19937_64 rng(123);
  for (const auto& g : {chain_graph(6), grid_graph(2, 3)}) {
    for (int rep = 0; rep < 40; ++rep) {
      Circuit c = random_2q_circuit(6, 20, rng);
      auto plain = sabre_route(c, g);
      auto mirrored = mirroring_sabre(c, g);
      ASSERT_LE(mirrored.inserted_swaps, plain.inserted_swaps)
          << "rep " << rep;
      expect_routed_equivalent(c, plain, g);
      expect_routed_equivalent(c, mirrored, g);
    }
  }
}

TEST(RoutingReportOp, Ratios) {
  Circuit c(3);
  for (int i = 0; i < 10; ++i) {
    c.push(Gate::simple(GateKind::cx, {i % 2, 2}));
  }
  CouplingGraph g = chain_graph(3);
  auto r = sabre_route(c, g);
  auto rep = routing_report(c, r);
  EXPECT_EQ(rep.swaps, r.inserted_swaps);
  EXPECT_NEAR(rep.overhead_ratio,
              double(r.circuit.count_2q()) / c.count_2q(), 1e-12);
  Circuit conform(2);
  conform.push(Gate::simple(GateKind::cx, {0, 1}));
  auto r2 = sabre_route(conform, chain_graph(2));
  EXPECT_NEAR(routing_report(conform, r2).overhead_ratio, 1.0, 1e-12);
}

TEST(ReverseTraversal, StillEquivalent) {
  std::mt19937_64 rng(5);
  CouplingGraph g = chain_graph(5);
  Circuit c = random_2q_circuit(5, 15, rng);
  RoutingOptions opts;
  opts.reverse_traversal = true;
  auto r = sabre_route(c, g, opts);
  // non-identity initial mapping: compare with the input relabeled
  for (const auto& gate : r.circuit.gates) {
    if (gate.two_qubit()) {
      ASSERT_TRUE(g.adjacent(gate.qubits[0], gate.qubits[1]));
    }
  }
  Circuit relabeled = rewire(padded(c, 5), r.initial_mapping);
  relabeled.output_permutation = {0, 1, 2, 3, 4};
  // routed circuit: wires start at initial_mapping and end at the final
  // permutation; undo both to compare operators
  std::mt19937_64 srng(9);
  std::normal_distribution<double> gauss;
  Eigen::VectorXcd psi(32);
  for (int i = 0; i < 32; ++i) psi(i) = cplx(gauss(srng), gauss(srng));
  psi.normalize();
  Circuit raw = r.circuit;
  raw.output_permutation = {0, 1, 2, 3, 4};  // want the raw wire operator
  Eigen::VectorXcd routed_out =
      statevector_run(raw, apply_wire_permutation(psi, r.initial_mapping));
  Eigen::VectorXcd want = apply_wire_permutation(
      statevector_run(padded(c, 5), psi),
      std::vector<int>(r.circuit.output_permutation));
  cplx phase = routed_out(0) / want(0);
  int imax = 0;
  for (int i = 1; i < 32; ++i) {
    if (std::abs(want(i)) > std::abs(want(imax))) imax = i;
  }
  phase = routed_out(imax) / want(imax);
  EXPECT_LT((routed_out - phase * want).cwiseAbs().maxCoeff(), 1e-8);
}

}  // namespace
}  // namespace reqisc
