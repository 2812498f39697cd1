#include "reqisc/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "reqisc/scheme.hpp"

namespace reqisc {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};
}  // namespace

const char* gate_name(GateKind k) {
  switch (k) {
    case GateKind::u3: return "u3";
    case GateKind::can: return "can";
    case GateKind::cx: return "cx";
    case GateKind::cz: return "cz";
    case GateKind::ccx: return "ccx";
    case GateKind::swap_gate: return "swap";
    case GateKind::h: return "h";
    case GateKind::x: return "x";
    case GateKind::y: return "y";
    case GateKind::z: return "z";
    case GateKind::s: return "s";
    case GateKind::t: return "t";
    case GateKind::rz: return "rz";
    case GateKind::rx: return "rx";
    case GateKind::ry: return "ry";
    case GateKind::unitary_block: return "unitary_block";
  }
  return "?";
}

int gate_arity(GateKind k) {
  switch (k) {
    case GateKind::cx:
    case GateKind::cz:
    case GateKind::can:
    case GateKind::swap_gate:
      return 2;
    case GateKind::ccx:
      return 3;
    case GateKind::unitary_block:
      return -1;  // from payload
    default:
      return 1;
  }
}

Gate Gate::u3(int q, double theta, double phi, double lambda) {
  return {GateKind::u3, {q}, {theta, phi, lambda}, nullptr};
}

Gate Gate::can(int a, int b, const WeylCoordinate& c) {
  WeylCoordinate cc = canonicalize_coordinate(c.x, c.y, c.z);
  return {GateKind::can, {a, b}, {cc.x, cc.y, cc.z}, nullptr};
}

Gate Gate::simple(GateKind k, std::vector<int> qs, std::vector<double> ps) {
  return {k, std::move(qs), std::move(ps), nullptr};
}

namespace {

Mat2 u3_matrix(double theta, double phi, double lambda) {
  double c = std::cos(theta / 2), s = std::sin(theta / 2);
  Mat2 m;
  m << c, -std::exp(kI * lambda) * s,
       std::exp(kI * phi) * s, std::exp(kI * (phi + lambda)) * c;
  return m;
}

}  // namespace

MatX Gate::matrix() const {
  switch (kind) {
    case GateKind::u3:
      return u3_matrix(params[0], params[1], params[2]);
    case GateKind::can:
      return canonical_gate({params[0], params[1], params[2]});
    case GateKind::cx:
      return gate_cnot();
    case GateKind::cz:
      return gate_cz();
    case GateKind::swap_gate:
      return gate_swap();
    case GateKind::ccx: {
      MatX m = MatX::Identity(8, 8);
      m(6, 6) = m(7, 7) = 0;
      m(6, 7) = m(7, 6) = 1;
      return m;
    }
    case GateKind::h: {
      Mat2 m;
      m << 1, 1, 1, -1;
      return m / std::sqrt(2.0);
    }
    case GateKind::x: return pauli_x();
    case GateKind::y: return pauli_y();
    case GateKind::z: return pauli_z();
    case GateKind::s: return Eigen::Vector2cd(1, kI).asDiagonal();
    case GateKind::t:
      return Eigen::Vector2cd(1, std::exp(kI * (kPi / 4))).asDiagonal();
    case GateKind::rz:
      return Eigen::Vector2cd(std::exp(-kI * (params[0] / 2)),
                              std::exp(kI * (params[0] / 2)))
          .asDiagonal();
    case GateKind::rx: {
      double c = std::cos(params[0] / 2), s = std::sin(params[0] / 2);
      Mat2 m;
      m << c, -kI * s, -kI * s, c;
      return m;
    }
    case GateKind::ry: {
      double c = std::cos(params[0] / 2), s = std::sin(params[0] / 2);
      Mat2 m;
      m << c, -s, s, c;
      return m;
    }
    case GateKind::unitary_block:
      return *block;
  }
  throw NumericsError("unreachable gate kind");
}

WeylCoordinate gate_coordinate(const Gate& g) {
  if (!g.two_qubit()) {
    throw NumericsError("gate_coordinate: not a two-qubit gate");
  }
  switch (g.kind) {
    case GateKind::can:
      return {g.params[0], g.params[1], g.params[2]};
    case GateKind::cx:
    case GateKind::cz:
      return {kPi / 4, 0, 0};
    case GateKind::swap_gate:
      return {kPi / 4, kPi / 4, kPi / 4};
    default:
      return weyl_coordinate_of(Mat4(g.matrix()));
  }
}

Circuit::Circuit(int n) : n_qubits(n) {
  output_permutation.resize(n);
  for (int i = 0; i < n; ++i) output_permutation[i] = i;
}

bool Circuit::identity_permutation() const {
  for (size_t i = 0; i < output_permutation.size(); ++i) {
    if (output_permutation[i] != static_cast<int>(i)) return false;
  }
  return true;
}

void Circuit::push(Gate g) { gates.push_back(std::move(g)); }

int Circuit::count_2q() const {
  int n = 0;
  for (const auto& g : gates) n += g.two_qubit() ? 1 : 0;
  return n;
}

void Circuit::validate() const {
  std::vector<bool> seen(n_qubits, false);
  if (static_cast<int>(output_permutation.size()) != n_qubits) {
    throw NumericsError("circuit: permutation size mismatch");
  }
  for (int p : output_permutation) {
    if (p < 0 || p >= n_qubits || seen[p]) {
      throw NumericsError("circuit: output permutation is not a bijection");
    }
    seen[p] = true;
  }
  for (const auto& g : gates) {
    int want = gate_arity(g.kind);
    if (want >= 0 && g.arity() != want) {
      throw NumericsError("circuit: gate arity mismatch");
    }
    std::vector<int> qs = g.qubits;
    std::sort(qs.begin(), qs.end());
    if (std::adjacent_find(qs.begin(), qs.end()) != qs.end()) {
      throw NumericsError("circuit: repeated qubit in gate");
    }
    for (int q : g.qubits) {
      if (q < 0 || q >= n_qubits) {
        throw NumericsError("circuit: qubit index out of range");
      }
    }
    if (g.kind == GateKind::unitary_block) {
      if (!g.block || g.arity() > 3 ||
          g.block->rows() != (1 << g.arity())) {
        throw NumericsError("circuit: bad unitary block");
      }
    }
  }
}

CircuitDAG::CircuitDAG(const Circuit& c) {
  nodes.resize(c.gates.size());
  std::vector<int> last(c.n_qubits, -1);
  for (size_t i = 0; i < c.gates.size(); ++i) {
    for (int q : c.gates[i].qubits) {
      if (last[q] >= 0) {
        int p = last[q];
        if (nodes[i].preds.empty() || nodes[i].preds.back() != p) {
          nodes[i].preds.push_back(p);
          nodes[p].succs.push_back(static_cast<int>(i));
        }
      }
      last[q] = static_cast<int>(i);
    }
  }
}

double gate_duration(const Gate& g, const DurationModel& model) {
  if (!g.two_qubit()) return 0.0;
  if (std::holds_alternative<ConventionalDuration>(model)) {
    return kPi / std::sqrt(2.0);
  }
  const NormalForm& nf = std::get<NormalForm>(model);
  return optimal_time(gate_coordinate(g), nf).tau;
}

Metrics metrics(const Circuit& c, const DurationModel& model) {
  Metrics m;
  std::vector<int> depth(c.n_qubits, 0);
  std::vector<double> ready(c.n_qubits, 0.0);
  for (const auto& g : c.gates) {
    if (!g.two_qubit()) continue;
    ++m.count2q;
    int layer = 0;
    double start = 0;
    for (int q : g.qubits) {
      layer = std::max(layer, depth[q]);
      start = std::max(start, ready[q]);
    }
    double end = start + gate_duration(g, model);
    for (int q : g.qubits) {
      depth[q] = layer + 1;
      ready[q] = end;
    }
    m.depth2q = std::max(m.depth2q, layer + 1);
    m.duration = std::max(m.duration, end);
  }
  m.distinct_su4 = distinct_su4_count(c);
  return m;
}

int distinct_su4_count(const Circuit& c, double tol) {
  std::vector<std::array<double, 3>> coords;
  for (const auto& g : c.gates) {
    if (!g.two_qubit()) continue;
    WeylCoordinate w = gate_coordinate(g);
    coords.push_back({w.x, w.y, w.z});
  }
  std::sort(coords.begin(), coords.end());
  std::vector<std::array<double, 3>> reps;
  for (const auto& v : coords) {
    bool found = false;
    for (const auto& r : reps) {
      if (std::abs(v[0] - r[0]) < tol && std::abs(v[1] - r[1]) < tol &&
          std::abs(v[2] - r[2]) < tol) {
        found = true;
        break;
      }
    }
    if (!found) reps.push_back(v);
  }
  return static_cast<int>(reps.size());
}

namespace {

void apply_gate(const Gate& g, Eigen::VectorXcd& state, int n) {
  const MatX m = g.matrix();
  const int k = g.arity();
  const int dim = 1 << k;
  // first listed qubit is the highest local bit
  std::vector<int> shifts(k);
  for (int i = 0; i < k; ++i) shifts[i] = g.qubits[k - 1 - i];  // local bit i
  const std::int64_t size = state.size();
  std::vector<cplx> scratch(dim);
  std::int64_t mask = 0;
  for (int q : g.qubits) mask |= std::int64_t(1) << q;
  for (std::int64_t base = 0; base < size; ++base) {
    if (base & mask) continue;
    for (int r = 0; r < dim; ++r) {
      std::int64_t idx = base;
      for (int b = 0; b < k; ++b) {
        if (r & (1 << b)) idx |= std::int64_t(1) << shifts[b];
      }
      scratch[r] = state(idx);
    }
    for (int r = 0; r < dim; ++r) {
      cplx acc = 0;
      for (int cidx = 0; cidx < dim; ++cidx) acc += m(r, cidx) * scratch[cidx];
      std::int64_t idx = base;
      for (int b = 0; b < k; ++b) {
        if (r & (1 << b)) idx |= std::int64_t(1) << shifts[b];
      }
      state(idx) = acc;
    }
  }
  (void)n;
}

}  // namespace

Eigen::VectorXcd apply_wire_permutation(const Eigen::VectorXcd& state,
                                        const std::vector<int>& perm) {
  const int n = static_cast<int>(perm.size());
  Eigen::VectorXcd out(state.size());
  for (std::int64_t i = 0; i < state.size(); ++i) {
    std::int64_t j = 0;
    for (int l = 0; l < n; ++l) {
      if (i & (std::int64_t(1) << l)) j |= std::int64_t(1) << perm[l];
    }
    out(j) = state(i);
  }
  return out;
}

std::vector<int> invert_permutation(const std::vector<int>& perm) {
  std::vector<int> inv(perm.size());
  for (size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = static_cast<int>(i);
  return inv;
}

std::vector<int> compose_permutation(const std::vector<int>& outer,
                                     const std::vector<int>& inner) {
  std::vector<int> out(inner.size());
  for (size_t i = 0; i < inner.size(); ++i) out[i] = outer[inner[i]];
  return out;
}

Eigen::VectorXcd statevector_run(const Circuit& c,
                                 const Eigen::VectorXcd& state) {
  if (c.n_qubits > 16) {
    throw NumericsError("statevector_run: more than 16 qubits");
  }
  if (state.size() != (std::int64_t(1) << c.n_qubits)) {
    throw NumericsError("statevector_run: state dimension mismatch");
  }
  Eigen::VectorXcd psi = state;
  for (const auto& g : c.gates) apply_gate(g, psi, c.n_qubits);
  if (!c.identity_permutation()) {
    psi = apply_wire_permutation(psi, invert_permutation(c.output_permutation));
  }
  return psi;
}

MatX unitary_of(const Circuit& c) {
  if (c.n_qubits > 7) {
    throw NumericsError("unitary_of: more than 7 qubits");
  }
  const std::int64_t dim = std::int64_t(1) << c.n_qubits;
  MatX u(dim, dim);
  for (std::int64_t col = 0; col < dim; ++col) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(dim);
    e(col) = 1.0;
    u.col(col) = statevector_run(c, e);
  }
  return u;
}

double infidelity(const MatX& u, const MatX& v) {
  return 1.0 - std::abs((u.adjoint() * v).trace()) / double(u.rows());
}

namespace {

void emit_mcx(Circuit& c, std::vector<int> controls, int target, int dirty) {
  const int k = static_cast<int>(controls.size());
  if (k == 0) {
    c.push(Gate::simple(GateKind::x, {target}));
  } else if (k == 1) {
    c.push(Gate::simple(GateKind::cx, {controls[0], target}));
  } else if (k == 2) {
    c.push(Gate::simple(GateKind::ccx, {controls[0], controls[1], target}));
  } else {
    // t ^= c_last & a; a ^= AND(rest); t ^= c_last & a; a ^= AND(rest)
    // works for an arbitrary initial ancilla state.
    int c_last = controls.back();
    std::vector<int> rest(controls.begin(), controls.end() - 1);
    c.push(Gate::simple(GateKind::ccx, {c_last, dirty, target}));
    emit_mcx(c, rest, dirty, target);
    c.push(Gate::simple(GateKind::ccx, {c_last, dirty, target}));
    emit_mcx(c, rest, dirty, target);
  }
}

}  // namespace

Circuit decompose_mcx(int controls) {
  if (controls < 0) throw NumericsError("decompose_mcx: negative controls");
  int n = controls + 1 + (controls >= 3 ? 1 : 0);
  Circuit c(n);
  std::vector<int> ctrl(controls);
  for (int i = 0; i < controls; ++i) ctrl[i] = i;
  int target = controls;
  int dirty = controls >= 3 ? controls + 1 : -1;
  emit_mcx(c, ctrl, target, dirty);
  return c;
}

Circuit ccx_to_cx(const Circuit& c) {
  Circuit out(c.n_qubits);
  out.output_permutation = c.output_permutation;
  for (const auto& g : c.gates) {
    if (g.kind != GateKind::ccx) {
      out.push(g);
      continue;
    }
    int a = g.qubits[0], b = g.qubits[1], t = g.qubits[2];
    auto cx = [&](int u, int v) {
      out.push(Gate::simple(GateKind::cx, {u, v}));
    };
    auto tg = [&](int q) { out.push(Gate::simple(GateKind::t, {q})); };
    auto tdg = [&](int q) {
      out.push(Gate::simple(GateKind::rz, {q}, {-kPi / 4}));
    };
    auto hh = [&](int q) { out.push(Gate::simple(GateKind::h, {q})); };
    hh(t);
    cx(b, t);
    tdg(t);
    cx(a, t);
    tg(t);
    cx(b, t);
    tdg(t);
    cx(a, t);
    tg(b);
    tg(t);
    hh(t);
    cx(a, b);
    tg(a);
    tdg(b);
    cx(a, b);
  }
  return out;
}

Circuit rewire(const Circuit& c, const std::vector<int>& permutation) {
  if (static_cast<int>(permutation.size()) != c.n_qubits) {
    throw NumericsError("rewire: permutation size mismatch");
  }
  Circuit out(c.n_qubits);
  out.gates = c.gates;
  for (auto& g : out.gates) {
    for (int& q : g.qubits) q = permutation[q];
  }
  out.output_permutation =
      compose_permutation(permutation, compose_permutation(
          c.output_permutation, invert_permutation(permutation)));
  return out;
}

}  // namespace reqisc
