#pragma once

#include <map>
#include <optional>

#include "reqisc/circuit.hpp"
#include "reqisc/synth.hpp"

namespace reqisc {

// Blocks disjointly cover all gates; concatenating blocks in order is a
// valid topological linearization of the circuit.
struct Partition {
  struct Block {
    std::vector<int> qubits;        // sorted support
    std::vector<int> gate_indices;  // ascending
    int count2q = 0;
  };
  std::vector<Block> blocks;
  int w = 3;
};

struct PipelineConfig {
  enum class Mode { red, full };
  Mode mode = Mode::full;
  int w = 3;
  int m_th = 4;
  double r = 0.15;          // near-identity L1 threshold, radians
  double eps = 1e-10;
  std::optional<double> amp_max;
  SynthOptions synth;
  bool verify = true;       // check equivalence after each run when n <= 7
};

struct TemplateVariant {
  Circuit circuit;        // on local qubits {0,1,2}, Can + U3 only
  double infidelity = 0;
  std::string variant;    // "base", "reversed", "swap01", ...
};

struct TemplateLibrary {
  std::map<std::string, std::vector<TemplateVariant>> entries;

  std::string to_json() const;
  static TemplateLibrary from_json(const std::string& text);
};

// Consolidate runs of same-pair 2Q gates (with interleaved locals) into
// single Can gates; identity-class results are dropped. Gates on three or
// more qubits pass through unchanged.
Circuit fuse_2q_blocks(const Circuit& c);

Partition partition_blocks(const Circuit& c, int w);

// Fraction of 2Q gates lying in blocks with more than m_th of them.
double compactness(const Circuit& c, const Partition& p, int m_th);

// Exchange approximately-commuting Can pairs when doing so strictly
// increases compactness. At most `sweeps` passes over the DAG.
Circuit dag_compact(const Circuit& c, int w, int m_th, double eps,
                    const SynthOptions& synth = {}, int sweeps = 4);

// Conditional approximate re-synthesis of partition blocks whose 2Q count
// exceeds m_th; a replacement is kept only if it strictly reduces the count.
Circuit hierarchical_synthesis(const Circuit& c, const PipelineConfig& cfg);

// Structural signature of a <=3q subcircuit, canonical under relabeling.
std::string block_signature(const Circuit& block);

TemplateLibrary build_template_library(const std::vector<Circuit>& corpus,
                                       double eps,
                                       const SynthOptions& synth = {});

// Replace each 3Q IR instance by a library template, choosing ECC variants
// greedily (one-template lookahead) to maximize same-pair fusions. Missing
// signatures are synthesized on demand and added to the library.
Circuit assemble(const Circuit& c, TemplateLibrary& library, double eps,
                 const SynthOptions& synth = {});

// Replace every near-identity Can (L1 norm < r) by its mirror plus a tracked
// logical swap; the returned circuit's output_permutation accounts for all
// accumulated swaps. 2Q count is unchanged.
Circuit mirror_near_identity(const Circuit& c, double r, const NormalForm& nf);

int count_distinct_su4(const Circuit& c, double tol = 1e-6);

struct PipelineResult {
  Circuit circuit;
  Metrics input_metrics;   // conventional duration model
  Metrics output_metrics;  // coupling-aware duration model
  std::vector<int> permutation;
};

PipelineResult pipeline(const Circuit& c, const PipelineConfig& cfg,
                        const NormalForm& nf, TemplateLibrary& library);

// Sub-circuit of a partition block on local labels 0..k-1 (sorted support).
Circuit block_subcircuit(const Circuit& c, const Partition::Block& b);

}  // namespace reqisc
