#include "reqisc/passes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "reqisc/scheme.hpp"

namespace reqisc {

namespace {
constexpr double kPi = std::numbers::pi;
}

Circuit fuse_2q_blocks(const Circuit& c) {
  c.validate();
  Circuit out(c.n_qubits);
  out.output_permutation = c.output_permutation;

  struct OpenBlock {
    int lo, hi;
    Mat4 u = Mat4::Identity();
  };
  std::vector<OpenBlock> open;                  // at most one per pair
  std::vector<int> block_of(c.n_qubits, -1);    // open block id per qubit
  std::vector<Mat2> pending(c.n_qubits, Mat2::Identity());
  std::vector<bool> has_pending(c.n_qubits, false);

  auto embed_local = [](const Mat2& m, bool high) {
    return high ? kron2(m, Mat2::Identity()) : kron2(Mat2::Identity(), m);
  };
  auto flush_pending = [&](int q) {
    if (!has_pending[q]) return;
    if (max_abs(MatX(pending[q] - pending[q](0, 0) * Mat2::Identity())) >
        1e-14) {
      auto p = u3_params_of(pending[q]);
      out.push(Gate::u3(q, p[0], p[1], p[2]));
    }
    pending[q] = Mat2::Identity();
    has_pending[q] = false;
  };
  auto close_block = [&](int id) {
    OpenBlock& b = open[id];
    if (b.lo < 0) return;
    for (auto& g : kak_gates(b.lo, b.hi, b.u)) out.push(std::move(g));
    block_of[b.lo] = block_of[b.hi] = -1;
    b.lo = b.hi = -1;
  };

  for (const auto& g : c.gates) {
    if (g.arity() == 1) {
      int q = g.qubits[0];
      Mat2 m = g.matrix();
      if (block_of[q] >= 0) {
        OpenBlock& b = open[block_of[q]];
        b.u = embed_local(m, q == b.hi) * b.u;
      } else {
        pending[q] = m * pending[q];
        has_pending[q] = true;
      }
      continue;
    }
    if (g.arity() == 2) {
      int lo = std::min(g.qubits[0], g.qubits[1]);
      int hi = std::max(g.qubits[0], g.qubits[1]);
      // gate matrix in (first listed = high bit) convention; re-express with
      // `hi` as the matrix high bit
      Mat4 m = g.matrix();
      if (g.qubits[0] != hi) m = gate_swap() * m * gate_swap();
      int id = block_of[lo];
      if (id >= 0 && id == block_of[hi]) {
        open[id].u = m * open[id].u;
        continue;
      }
      if (block_of[lo] >= 0) close_block(block_of[lo]);
      if (block_of[hi] >= 0) close_block(block_of[hi]);
      OpenBlock b;
      b.lo = lo;
      b.hi = hi;
      b.u = m;
      if (has_pending[lo]) {
        b.u = b.u * embed_local(pending[lo], false);
        pending[lo] = Mat2::Identity();
        has_pending[lo] = false;
      }
      if (has_pending[hi]) {
        b.u = b.u * embed_local(pending[hi], true);
        pending[hi] = Mat2::Identity();
        has_pending[hi] = false;
      }
      int slot = -1;
      for (size_t i = 0; i < open.size(); ++i) {
        if (open[i].lo < 0) slot = static_cast<int>(i);
      }
      if (slot < 0) {
        open.push_back(b);
        slot = static_cast<int>(open.size()) - 1;
      } else {
        open[slot] = b;
      }
      block_of[lo] = block_of[hi] = slot;
      continue;
    }
    // wider gates pass through; close anything they touch
    for (int q : g.qubits) {
      if (block_of[q] >= 0) close_block(block_of[q]);
      flush_pending(q);
    }
    out.push(g);
  }
  for (size_t i = 0; i < open.size(); ++i) close_block(static_cast<int>(i));
  for (int q = 0; q < c.n_qubits; ++q) flush_pending(q);
  return out;
}

Partition partition_blocks(const Circuit& c, int w) {
  Partition p;
  p.w = w;
  std::optional<Partition::Block> open;
  auto close = [&] {
    if (open) {
      p.blocks.push_back(std::move(*open));
      open.reset();
    }
  };
  for (size_t i = 0; i < c.gates.size(); ++i) {
    const Gate& g = c.gates[i];
    std::vector<int> support = open ? open->qubits : std::vector<int>{};
    for (int q : g.qubits) {
      if (std::find(support.begin(), support.end(), q) == support.end()) {
        support.push_back(q);
      }
    }
    if (open && static_cast<int>(support.size()) > w) {
      close();
      support.assign(g.qubits.begin(), g.qubits.end());
    }
    if (!open) open = Partition::Block{};
    std::sort(support.begin(), support.end());
    open->qubits = std::move(support);
    open->gate_indices.push_back(static_cast<int>(i));
    if (g.two_qubit()) ++open->count2q;
  }
  close();
  return p;
}

double compactness(const Circuit& c, const Partition& p, int m_th) {
  int total = c.count_2q();
  if (total == 0) return 0.0;
  int concentrated = 0;
  for (const auto& b : p.blocks) {
    if (b.count2q > m_th) concentrated += b.count2q;
  }
  return static_cast<double>(concentrated) / total;
}

Circuit block_subcircuit(const Circuit& c, const Partition::Block& b) {
  Circuit sub(static_cast<int>(b.qubits.size()));
  std::map<int, int> local;
  for (size_t i = 0; i < b.qubits.size(); ++i) {
    local[b.qubits[i]] = static_cast<int>(i);
  }
  for (int gi : b.gate_indices) {
    Gate g = c.gates[gi];
    for (int& q : g.qubits) q = local.at(q);
    sub.push(std::move(g));
  }
  return sub;
}

namespace {

// Candidate Can pairs for exchange: adjacent in the DAG, sharing exactly one
// qubit, with no gate in between touching either support.
struct ExchangeCandidate {
  int i, j;
};

std::vector<ExchangeCandidate> exchange_candidates(const Circuit& c) {
  std::vector<ExchangeCandidate> out;
  for (size_t i = 0; i < c.gates.size(); ++i) {
    if (c.gates[i].kind != GateKind::can) continue;
    const auto& qi = c.gates[i].qubits;
    for (size_t j = i + 1; j < c.gates.size(); ++j) {
      const auto& qj = c.gates[j].qubits;
      bool touches = false;
      for (int q : qj) {
        touches = touches || q == qi[0] || q == qi[1];
      }
      if (!touches) continue;
      if (c.gates[j].kind != GateKind::can) break;
      int shared = 0;
      for (int q : qj) shared += (q == qi[0] || q == qi[1]) ? 1 : 0;
      if (shared == 1) {
        // gates strictly between must not touch either support, or the
        // spliced pair would jump a dependency
        bool clean = true;
        for (size_t k = i + 1; k < j && clean; ++k) {
          for (int q : c.gates[k].qubits) {
            clean = clean && q != qi[0] && q != qi[1] && q != qj[0] &&
                    q != qj[1];
          }
        }
        if (clean) {
          out.push_back({static_cast<int>(i), static_cast<int>(j)});
        }
      }
      break;  // only the immediate DAG successor on these qubits
    }
  }
  return out;
}

Circuit splice_exchange(const Circuit& c, int i, int j,
                        const ExchangeResult& ex) {
  Circuit out(c.n_qubits);
  out.output_permutation = c.output_permutation;
  for (int k = 0; k < static_cast<int>(c.gates.size()); ++k) {
    if (k == j) continue;
    if (k == i) {
      for (Gate g : ex.circuit.gates) {
        for (int& q : g.qubits) q = ex.qubit_map[q];
        out.push(std::move(g));
      }
      continue;
    }
    out.push(c.gates[k]);
  }
  return out;
}

}  // namespace

Circuit dag_compact(const Circuit& c, int w, int m_th, double eps,
                    const SynthOptions& synth, int sweeps) {
  Circuit cur = c;
  double score = compactness(cur, partition_blocks(cur, w), m_th);
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    bool improved = false;
    for (const auto& cand : exchange_candidates(cur)) {
      // structural pre-check: swapping in place, does compactness rise?
      Circuit structural = cur;
      std::swap(structural.gates[cand.i], structural.gates[cand.j]);
      double hint =
          compactness(structural, partition_blocks(structural, w), m_th);
      if (hint <= score + 1e-12) continue;
      SynthOptions opts = synth;
      opts.eps = eps;
      opts.restarts = std::max(4, synth.restarts / 2);
      auto ex = exchange_pair(cur.gates[cand.i], cur.gates[cand.j], eps);
      if (!ex) continue;
      Circuit swapped = splice_exchange(cur, cand.i, cand.j, *ex);
      double after = compactness(swapped, partition_blocks(swapped, w), m_th);
      if (after > score + 1e-12) {
        cur = std::move(swapped);
        score = after;
        improved = true;
        break;  // candidate indices are stale after a splice
      }
    }
    if (!improved) break;
  }
  return cur;
}

Circuit hierarchical_synthesis(const Circuit& c, const PipelineConfig& cfg) {
  Circuit fused = fuse_2q_blocks(c);
  Partition part = partition_blocks(fused, cfg.w);
  Circuit out(fused.n_qubits);
  out.output_permutation = fused.output_permutation;
  for (const auto& b : part.blocks) {
    bool resynth = b.count2q > cfg.m_th &&
                   static_cast<int>(b.qubits.size()) <= 3;
    if (resynth) {
      Circuit sub = block_subcircuit(fused, b);
      MatX target = unitary_of(sub);
      SynthOptions opts = cfg.synth;
      opts.eps = cfg.eps;
      opts.budget = std::min(opts.budget, b.count2q - 1);
      SynthesisResult r =
          approx_synthesize(target, static_cast<int>(b.qubits.size()), opts);
      if (r.success && r.circuit.count_2q() < b.count2q) {
        for (Gate g : r.circuit.gates) {
          for (int& q : g.qubits) q = b.qubits[q];
          out.push(std::move(g));
        }
        continue;
      }
    }
    for (int gi : b.gate_indices) out.push(fused.gates[gi]);
  }
  return out;
}

namespace {

struct CanonicalBlock {
  std::string signature;
  std::vector<int> perm;  // local label -> canonical label
};

CanonicalBlock canonical_block(const Circuit& block) {
  static const std::array<std::array<int, 3>, 6> perms = {
      std::array<int, 3>{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
      {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  if (block.n_qubits > 3) {
    throw NumericsError("block_signature: wider than 3 qubits");
  }
  CanonicalBlock out;
  for (const auto& perm : perms) {
    std::ostringstream key;
    for (const auto& g : block.gates) {
      key << gate_name(g.kind);
      for (double p : g.params) {
        key << ',' << std::llround(p * 1e9);
      }
      for (int q : g.qubits) key << ':' << perm[q];
      key << ';';
    }
    std::string s = key.str();
    if (out.signature.empty() || s < out.signature) {
      out.signature = std::move(s);
      out.perm.assign(perm.begin(), perm.end());
    }
  }
  return out;
}

// Relabel a 3q block into its canonical form.
Circuit canonicalize_block_labels(const Circuit& block,
                                  const std::vector<int>& perm) {
  Circuit padded = block;
  padded.n_qubits = 3;
  padded.output_permutation = {0, 1, 2};
  Circuit canon = rewire(padded, perm);
  canon.output_permutation = {0, 1, 2};
  return canon;
}

}  // namespace

std::string block_signature(const Circuit& block) {
  return canonical_block(block).signature;
}

namespace {

Gate inverted(const Gate& g) {
  switch (g.kind) {
    case GateKind::u3:
      return Gate::u3(g.qubits[0], -g.params[0], -g.params[2], -g.params[1]);
    case GateKind::rz:
    case GateKind::rx:
    case GateKind::ry:
      return Gate::simple(g.kind, g.qubits, {-g.params[0]});
    case GateKind::s:
      return Gate::simple(GateKind::rz, g.qubits, {-kPi / 2});
    case GateKind::t:
      return Gate::simple(GateKind::rz, g.qubits, {-kPi / 4});
    case GateKind::can:  // handled by the caller via KAK
    default:
      return g;  // self-inverse kinds: cx, cz, ccx, swap, h, x, y, z
  }
}

// Reverse a Can+U3 circuit gate by gate (the adjoint circuit).
Circuit adjoint_circuit(const Circuit& c) {
  Circuit out(c.n_qubits);
  for (auto it = c.gates.rbegin(); it != c.gates.rend(); ++it) {
    if (it->kind == GateKind::can) {
      Mat4 adj = Mat4(it->matrix()).adjoint();
      int lo = std::min(it->qubits[0], it->qubits[1]);
      int hi = std::max(it->qubits[0], it->qubits[1]);
      if (it->qubits[0] != hi) adj = gate_swap() * adj * gate_swap();
      for (auto& g : kak_gates(lo, hi, adj)) out.push(std::move(g));
    } else {
      out.push(inverted(*it));
    }
  }
  return out;
}

std::vector<TemplateVariant> make_variants(const Circuit& ir,
                                           const SynthesisResult& base,
                                           double eps) {
  std::vector<TemplateVariant> variants;
  MatX target = unitary_of(ir);
  auto consider = [&](Circuit cand, const std::string& name) {
    double inf = infidelity(target, unitary_of(cand));
    if (inf <= eps) variants.push_back({std::move(cand), inf, name});
  };
  variants.push_back({base.circuit, base.infidelity, "base"});
  // self-invertibility: the reversed template also implements the IR
  {
    MatX sq = unitary_of(ir);
    if (infidelity(MatX(sq * sq), MatX(MatX::Identity(sq.rows(), sq.cols()))) <
        1e-9) {
      consider(adjoint_circuit(base.circuit), "reversed");
    }
  }
  // control-bit permutability: relabel when the IR is symmetric under a
  // qubit transposition
  static const std::array<std::array<int, 3>, 3> swaps = {
      std::array<int, 3>{1, 0, 2}, {0, 2, 1}, {2, 1, 0}};
  static const char* names[] = {"swap01", "swap12", "swap02"};
  for (int s = 0; s < 3; ++s) {
    Circuit relabeled = rewire(base.circuit, {swaps[s][0], swaps[s][1],
                                              swaps[s][2]});
    relabeled.output_permutation = {0, 1, 2};  // pure relabeling of a template
    consider(std::move(relabeled), names[s]);
  }
  return variants;
}

SynthesisResult synthesize_template(const MatX& target, double eps,
                                    const SynthOptions& synth) {
  SynthOptions opts = synth;
  opts.eps = eps;
  SynthesisResult r = approx_synthesize(target, 3, opts);
  if (!r.success) {
    opts.seed ^= 0xabcdef123456ULL;  // second round, fresh starts
    opts.restarts *= 2;
    r = approx_synthesize(target, 3, opts);
  }
  return r;
}

}  // namespace

TemplateLibrary build_template_library(const std::vector<Circuit>& corpus,
                                       double eps, const SynthOptions& synth) {
  TemplateLibrary lib;
  for (const Circuit& ir : corpus) {
    CanonicalBlock cb = canonical_block(ir);
    if (lib.entries.count(cb.signature)) continue;
    Circuit canon = canonicalize_block_labels(ir, cb.perm);
    MatX target = unitary_of(canon);
    SynthesisResult r = synthesize_template(target, eps, synth);
    if (!r.success) {
      throw NumericsError("build_template_library: synthesis failed");
    }
    r.circuit.n_qubits = 3;
    r.circuit.output_permutation = {0, 1, 2};
    lib.entries[cb.signature] = make_variants(canon, r, eps);
  }
  return lib;
}

namespace {

std::pair<int, int> first_can_pair(const Circuit& c,
                                   const std::vector<int>& qmap) {
  for (const auto& g : c.gates) {
    if (g.two_qubit()) {
      int a = qmap[g.qubits[0]], b = qmap[g.qubits[1]];
      return {std::min(a, b), std::max(a, b)};
    }
  }
  return {-1, -1};
}

std::pair<int, int> last_can_pair(const Circuit& c,
                                  const std::vector<int>& qmap) {
  for (auto it = c.gates.rbegin(); it != c.gates.rend(); ++it) {
    if (it->two_qubit()) {
      int a = qmap[it->qubits[0]], b = qmap[it->qubits[1]];
      return {std::min(a, b), std::max(a, b)};
    }
  }
  return {-1, -1};
}

}  // namespace

Circuit assemble(const Circuit& c, TemplateLibrary& library, double eps,
                 const SynthOptions& synth) {
  Partition part = partition_blocks(c, 3);
  Circuit out(c.n_qubits);
  out.output_permutation = c.output_permutation;
  std::pair<int, int> tail{-1, -1};
  auto entangling = [&](const Partition::Block& b) {
    for (int gi : b.gate_indices) {
      if (c.gates[gi].arity() >= 2) return true;
    }
    return false;
  };
  for (size_t bi = 0; bi < part.blocks.size(); ++bi) {
    const auto& b = part.blocks[bi];
    if (b.qubits.size() < 3 || !entangling(b)) {
      for (int gi : b.gate_indices) out.push(c.gates[gi]);
      if (b.count2q > 0) {
        tail = last_can_pair(block_subcircuit(c, b),
                             std::vector<int>(b.qubits));
      }
      continue;
    }
    Circuit sub = block_subcircuit(c, b);
    CanonicalBlock cb = canonical_block(sub);
    auto it = library.entries.find(cb.signature);
    if (it == library.entries.end()) {
      // on-demand synthesis, inserted for later reuse
      Circuit canon = canonicalize_block_labels(sub, cb.perm);
      SynthesisResult r = synthesize_template(unitary_of(canon), eps, synth);
      if (!r.success) {
        // keep the block as written
        for (int gi : b.gate_indices) out.push(c.gates[gi]);
        tail = last_can_pair(sub, std::vector<int>(b.qubits));
        continue;
      }
      r.circuit.n_qubits = 3;
      r.circuit.output_permutation = {0, 1, 2};
      library.entries[cb.signature] = make_variants(canon, r, eps);
      it = library.entries.find(cb.signature);
    }
    // realize the canonical-label template on this block's local labels
    std::vector<int> inv_perm = invert_permutation(cb.perm);
    std::vector<TemplateVariant> variants;
    for (const auto& v : it->second) {
      TemplateVariant local = v;
      local.circuit = rewire(v.circuit, inv_perm);
      local.circuit.output_permutation = {0, 1, 2};
      variants.push_back(std::move(local));
    }
    std::vector<int> qmap(b.qubits);
    // next block's variants, for the one-template lookahead
    std::vector<TemplateVariant> next_variants;
    std::vector<int> next_qmap;
    if (bi + 1 < part.blocks.size()) {
      const auto& nb = part.blocks[bi + 1];
      if (nb.qubits.size() == 3 && entangling(nb)) {
        CanonicalBlock ncb = canonical_block(block_subcircuit(c, nb));
        auto nit = library.entries.find(ncb.signature);
        if (nit != library.entries.end()) {
          std::vector<int> ninv = invert_permutation(ncb.perm);
          for (const auto& nv : nit->second) {
            TemplateVariant local = nv;
            local.circuit = rewire(nv.circuit, ninv);
            next_variants.push_back(std::move(local));
          }
          next_qmap.assign(nb.qubits.begin(), nb.qubits.end());
        }
      }
    }
    int best = 0;
    double best_score = -1;
    for (size_t v = 0; v < variants.size(); ++v) {
      double score = 0;
      if (tail.first >= 0 &&
          first_can_pair(variants[v].circuit, qmap) == tail) {
        score += 1.0;
      }
      if (!next_variants.empty()) {
        auto lp = last_can_pair(variants[v].circuit, qmap);
        for (const auto& nv : next_variants) {
          if (first_can_pair(nv.circuit, next_qmap) == lp) {
            score += 0.5;
            break;
          }
        }
      }
      if (score > best_score) {
        best_score = score;
        best = static_cast<int>(v);
      }
    }
    for (Gate g : variants[best].circuit.gates) {
      for (int& q : g.qubits) q = qmap[q];
      out.push(std::move(g));
    }
    tail = last_can_pair(variants[best].circuit, qmap);
  }
  return fuse_2q_blocks(out);
}

Circuit mirror_near_identity(const Circuit& c, double r,
                             const NormalForm& nf) {
  (void)nf;
  Circuit out(c.n_qubits);
  std::vector<int> wire(c.n_qubits);  // logical -> wire
  for (int i = 0; i < c.n_qubits; ++i) wire[i] = i;
  for (const auto& g : c.gates) {
    bool mirror_it = g.kind == GateKind::can &&
                     is_near_identity(gate_coordinate(g), r);
    if (!mirror_it) {
      Gate remapped = g;
      for (int& q : remapped.qubits) q = wire[q];
      out.push(std::move(remapped));
      continue;
    }
    int wa = wire[g.qubits[0]], wb = wire[g.qubits[1]];
    // emit SWAP * Can(c) on the wires; the matrix high bit is the first
    // listed qubit, so express with max(wa, wb) as the high bit
    Mat4 m = gate_swap() * Mat4(g.matrix());
    int lo = std::min(wa, wb), hi = std::max(wa, wb);
    if (wa != hi) m = gate_swap() * m * gate_swap();
    for (auto& kg : kak_gates(lo, hi, m)) out.push(std::move(kg));
    std::swap(wire[g.qubits[0]], wire[g.qubits[1]]);
  }
  std::vector<int> perm(c.n_qubits);
  for (int l = 0; l < c.n_qubits; ++l) perm[l] = wire[c.output_permutation[l]];
  out.output_permutation = std::move(perm);
  return out;
}

int count_distinct_su4(const Circuit& c, double tol) {
  return distinct_su4_count(c, tol);
}

PipelineResult pipeline(const Circuit& c, const PipelineConfig& cfg,
                        const NormalForm& nf, TemplateLibrary& library) {
  PipelineResult res;
  // baseline numbers refer to the conventional CNOT-based representation
  res.input_metrics = metrics(ccx_to_cx(c), ConventionalDuration{});
  Circuit cur = assemble(c, library, cfg.eps, cfg.synth);
  cur = fuse_2q_blocks(cur);
  if (cfg.mode == PipelineConfig::Mode::full) {
    cur = dag_compact(cur, cfg.w, cfg.m_th, cfg.eps, cfg.synth);
    cur = hierarchical_synthesis(cur, cfg);
  }
  cur = mirror_near_identity(cur, cfg.r, nf);
  if (cfg.verify && c.n_qubits <= 7) {
    double err = infidelity(unitary_of(c), unitary_of(cur));
    if (err > 1e-6) {
      throw NumericsError("pipeline: equivalence check failed");
    }
  }
  res.output_metrics = metrics(cur, nf);
  res.permutation = cur.output_permutation;
  res.circuit = std::move(cur);
  return res;
}

std::string TemplateLibrary::to_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& [sig, variants] : entries) {
    nlohmann::json entry;
    entry["signature"] = sig;
    entry["variants"] = nlohmann::json::array();
    for (const auto& v : variants) {
      nlohmann::json vj;
      vj["circuit"] = emit_qasm(v.circuit);
      vj["infidelity"] = v.infidelity;
      vj["variant"] = v.variant;
      auto coords = nlohmann::json::array();
      for (const auto& g : v.circuit.gates) {
        if (g.kind == GateKind::can) {
          coords.push_back({g.params[0], g.params[1], g.params[2]});
        }
      }
      vj["coords"] = coords;
      entry["variants"].push_back(vj);
    }
    j.push_back(entry);
  }
  nlohmann::json root;
  root["schema_version"] = 1;
  root["templates"] = j;
  return root.dump(2);
}

TemplateLibrary TemplateLibrary::from_json(const std::string& text) {
  TemplateLibrary lib;
  nlohmann::json root = nlohmann::json::parse(text);
  for (const auto& entry : root.at("templates")) {
    std::vector<TemplateVariant> variants;
    for (const auto& vj : entry.at("variants")) {
      TemplateVariant v;
      v.circuit = parse_qasm(vj.at("circuit").get<std::string>()).circuit;
      v.infidelity = vj.at("infidelity").get<double>();
      v.variant = vj.value("variant", "base");
      variants.push_back(std::move(v));
    }
    lib.entries[entry.at("signature").get<std::string>()] =
        std::move(variants);
  }
  return lib;
}

}  // namespace reqisc
