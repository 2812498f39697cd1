#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "reqisc/hamiltonian.hpp"
#include "reqisc/weyl.hpp"

namespace reqisc {

enum class GateKind {
  u3, can, cx, cz, ccx, swap_gate, h, x, y, z, s, t, rz, rx, ry, unitary_block,
};

const char* gate_name(GateKind k);
int gate_arity(GateKind k);

struct Gate {
  GateKind kind;
  std::vector<int> qubits;      // ordered, first qubit = high local bit
  std::vector<double> params;   // u3: (theta,phi,lambda); can: (x,y,z); r*: angle
  std::shared_ptr<const MatX> block;  // unitary_block payload, <= 3 qubits

  int arity() const { return static_cast<int>(qubits.size()); }
  bool two_qubit() const { return arity() == 2; }
  MatX matrix() const;          // 2^arity x 2^arity

  static Gate u3(int q, double theta, double phi, double lambda);
  static Gate can(int a, int b, const WeylCoordinate& c);
  static Gate simple(GateKind k, std::vector<int> qs,
                     std::vector<double> ps = {});
};

// Weyl coordinate of a 2Q gate (throws for other arities).
WeylCoordinate gate_coordinate(const Gate& g);

struct Circuit {
  int n_qubits = 0;
  std::vector<Gate> gates;
  // wire holding each logical qubit at circuit end; identity unless rewiring
  // or mirroring occurred.
  std::vector<int> output_permutation;

  Circuit() = default;
  explicit Circuit(int n);

  bool identity_permutation() const;
  void push(Gate g);
  int count_2q() const;
  void validate() const;  // qubit ranges, arity, permutation bijection
};

// Qubit-wise dependency DAG. Node order is the gate order, which is always a
// valid topological order.
struct CircuitDAG {
  struct Node {
    std::vector<int> preds, succs;
  };
  std::vector<Node> nodes;

  explicit CircuitDAG(const Circuit& c);
};

struct Metrics {
  int count2q = 0;
  int depth2q = 0;
  double duration = 0;   // units 1/g
  int distinct_su4 = 0;
};

// Conventional CNOT-scheme baseline: every 2Q gate lasts pi/sqrt(2).
struct ConventionalDuration {};
using DurationModel = std::variant<ConventionalDuration, NormalForm>;

double gate_duration(const Gate& g, const DurationModel& model);
Metrics metrics(const Circuit& c, const DurationModel& model);

// Clusters of 2Q-gate Weyl coordinates under max-norm tolerance.
int distinct_su4_count(const Circuit& c, double tol = 1e-6);

// Exact operator of the circuit (n <= 7), honoring output_permutation.
MatX unitary_of(const Circuit& c);
// Statevector evolution (n <= 16), honoring output_permutation.
Eigen::VectorXcd statevector_run(const Circuit& c,
                                 const Eigen::VectorXcd& state);

// Permutation operator helpers: perm[l] = wire holding logical qubit l.
Eigen::VectorXcd apply_wire_permutation(const Eigen::VectorXcd& state,
                                        const std::vector<int>& perm);
std::vector<int> invert_permutation(const std::vector<int>& perm);
std::vector<int> compose_permutation(const std::vector<int>& outer,
                                     const std::vector<int>& inner);

// Global-phase-insensitive distance 1 - |Tr(U^dag V)| / N.
double infidelity(const MatX& u, const MatX& v);

// k-control X as a CCX/CX circuit; k >= 3 uses one dirty ancilla (the last
// qubit of the returned circuit).
Circuit decompose_mcx(int controls);

// Expand every CCX into the standard six-CX pattern (T-depth form); used to
// express programs in the conventional CNOT basis for baseline metrics.
Circuit ccx_to_cx(const Circuit& c);

Circuit rewire(const Circuit& c, const std::vector<int>& permutation);

// OpenQASM 2.0 subset.
struct ParseWarning {
  int line = 0, column = 0;
  std::string message;
};
struct ParseResult {
  Circuit circuit;
  std::vector<ParseWarning> warnings;
};
class QasmError : public std::runtime_error {
 public:
  QasmError(int line, int column, const std::string& what);
  int line, column;
};
ParseResult parse_qasm(const std::string& text);
std::string emit_qasm(const Circuit& c);

}  // namespace reqisc
