#pragma once

#include <optional>
#include <utility>

#include "reqisc/circuit.hpp"

namespace reqisc {

// Theoretical 2Q-gate count floors for exact n-qubit synthesis.
enum class Isa { su4, cnot };
long lower_bound(int n_qubits, Isa isa);

// U3 angles of an arbitrary 2x2 unitary, up to global phase.
std::array<double, 3> u3_params_of(const Mat2& m);

// Gate sequence realizing a 4x4 unitary exactly: up to one Can plus locals.
// `u` is indexed in simulator convention: q_low is its least significant bit.
std::vector<Gate> kak_gates(int q_low, int q_high, const Mat4& u,
                            double identity_tol = 1e-12);

struct SynthesisResult {
  Circuit circuit;
  double infidelity = 1.0;
  int gate_count = 0;      // number of Can gates
  int restarts_used = 0;
  bool success = false;
};

struct SynthOptions {
  double eps = 1e-10;
  int budget = 7;            // max Can count tried for w = 3
  int restarts = 12;
  int max_iters = 600;
  std::uint64_t seed = 0x5ee5;
};

// Count-minimal {Can, U3} synthesis of a 2- or 3-qubit target. Counts are
// tried in increasing order; the first count meeting eps wins. On failure the
// best attempt is returned with success = false.
SynthesisResult approx_synthesize(const MatX& target, int width,
                                  const SynthOptions& opts = {});

// Fixed-placement variant (placements given in local qubit labels).
SynthesisResult synthesize_with_placements(
    const MatX& target, int width,
    const std::vector<std::pair<int, int>>& placements,
    const SynthOptions& opts = {});

// Placement sequences over the 3 pairs of a triple, no immediate repeats,
// deduplicated up to qubit relabeling.
std::vector<std::vector<std::pair<int, int>>> placement_sequences(int blocks);

// Try to reorder two Can gates sharing exactly one qubit. On success returns
// an equivalent 3-qubit circuit (local labels 0 = g1's outer qubit,
// 1 = shared, 2 = g2's outer qubit) applying the (1,2) interaction first,
// plus the local-to-original qubit map.
struct ExchangeResult {
  Circuit circuit;                // on local labels {0,1,2}
  std::array<int, 3> qubit_map;   // local label -> original qubit
};
std::optional<ExchangeResult> exchange_pair(const Gate& g1, const Gate& g2,
                                            double eps = 1e-8);

}  // namespace reqisc
