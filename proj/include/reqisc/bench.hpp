#pragma once

#include <string>

#include "reqisc/circuit.hpp"
#include "reqisc/scheme.hpp"

namespace reqisc {

struct DurationStats {
  std::string coupling;
  long samples = 0;
  double mean_tau = 0, std_tau = 0, p95_tau = 0;  // units 1/g
  double share_nd = 0, share_ea_plus = 0, share_ea_minus = 0;
};

// Mean time-optimal duration over Haar-random SU(4) targets. Sampling is
// chunked with per-chunk derived seeds and combined in fixed chunk order, so
// the result is bit-identical for any thread count. The parallel kernel and
// the serial reference must agree exactly; the benchmark target compares
// their throughput.
DurationStats haar_duration_stats(const NormalForm& nf, long n_samples,
                                  std::uint64_t seed);
DurationStats haar_duration_stats_serial(const NormalForm& nf, long n_samples,
                                         std::uint64_t seed);

struct BasisGateRow {
  std::string name;
  double single = 0;        // tau of the fixed gate
  double average = 0;       // single x Haar-average gate count
  double count_factor = 0;  // 3, 3, 2.21, 2
};
std::vector<BasisGateRow> basis_gate_table(const NormalForm& nf);

struct ErrorProxyConfig {
  double p0 = 0.001;
  double tau0 = 2.221441469079183;  // pi/sqrt(2), conventional CNOT duration
};

struct ErrorProxyResult {
  double est_fidelity = 1.0;
  double est_error = 0.0;
  double duration = 0.0;
};

// Depolarizing proxy: each 2Q gate contributes p = p0 tau / tau0;
// fidelity is the product of (1 - p).
ErrorProxyResult error_proxy(const Circuit& c, const DurationModel& model,
                             const ErrorProxyConfig& cfg = {});

// Grid verification kernel used by the acceptance suite: solve and verify
// every chamber grid point, returning the worst infidelity. OpenMP-parallel
// with a serial reference.
double chamber_grid_worst_residual(const CouplingHamiltonian& h, int divisions);
double chamber_grid_worst_residual_serial(const CouplingHamiltonian& h,
                                          int divisions);

}  // namespace reqisc
