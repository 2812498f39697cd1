#include "reqisc/bench.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#ifdef REQISC_OPENMP
#include <omp.h>
#endif

namespace reqisc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr long kChunk = 1024;

struct ChunkResult {
  int nd = 0, ea_plus = 0, ea_minus = 0;
};

// Fill taus[first..first+count) from the chunk's own generator.
ChunkResult run_chunk(const NormalForm& nf, std::uint64_t seed,
                      long chunk_index, long first, long count,
                      std::vector<double>& taus) {
  std::uint64_t state = seed + 0x9e3779b97f4a7c15ULL *
                                   static_cast<std::uint64_t>(chunk_index + 1);
  std::mt19937_64 rng(splitmix64(state));
  ChunkResult res;
  for (long i = 0; i < count; ++i) {
    Mat4 u = random_su4(rng);
    WeylCoordinate c = weyl_coordinate_of(u);
    OptimalTime ot = optimal_time(c, nf);
    taus[first + i] = ot.tau;
    switch (ot.subscheme) {
      case Subscheme::nd: ++res.nd; break;
      case Subscheme::ea_plus: ++res.ea_plus; break;
      default: ++res.ea_minus;
    }
  }
  return res;
}

DurationStats finalize(const NormalForm& nf, long n,
                       const std::vector<ChunkResult>& chunks,
                       std::vector<double>& taus) {
  (void)nf;
  DurationStats out;
  out.samples = n;
  ChunkResult total;
  for (const auto& c : chunks) {
    total.nd += c.nd;
    total.ea_plus += c.ea_plus;
    total.ea_minus += c.ea_minus;
  }
  // pairwise summation over the deterministic sample order
  struct Sum {
    static double run(const double* v, long lo, long hi) {
      if (hi - lo <= 64) {
        double s = 0;
        for (long i = lo; i < hi; ++i) s += v[i];
        return s;
      }
      long mid = lo + (hi - lo) / 2;
      return run(v, lo, mid) + run(v, mid, hi);
    }
  };
  double mean = Sum::run(taus.data(), 0, n) / n;
  std::vector<double> sq(n);
  for (long i = 0; i < n; ++i) sq[i] = (taus[i] - mean) * (taus[i] - mean);
  double var = Sum::run(sq.data(), 0, n) / n;
  out.mean_tau = mean;
  out.std_tau = std::sqrt(var);
  long k = std::min<long>(n - 1, static_cast<long>(0.95 * n));
  std::nth_element(taus.begin(), taus.begin() + k, taus.end());
  out.p95_tau = taus[k];
  out.share_nd = static_cast<double>(total.nd) / n;
  out.share_ea_plus = static_cast<double>(total.ea_plus) / n;
  out.share_ea_minus = static_cast<double>(total.ea_minus) / n;
  return out;
}

}  // namespace

DurationStats haar_duration_stats(const NormalForm& nf, long n,
                                  std::uint64_t seed) {
  const long n_chunks = (n + kChunk - 1) / kChunk;
  std::vector<double> taus(n);
  std::vector<ChunkResult> chunks(n_chunks);
#ifdef REQISC_OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
  for (long ci = 0; ci < n_chunks; ++ci) {
    long first = ci * kChunk;
    long count = std::min(kChunk, n - first);
    chunks[ci] = run_chunk(nf, seed, ci, first, count, taus);
  }
  return finalize(nf, n, chunks, taus);
}

DurationStats haar_duration_stats_serial(const NormalForm& nf, long n,
                                         std::uint64_t seed) {
  const long n_chunks = (n + kChunk - 1) / kChunk;
  std::vector<double> taus(n);
  std::vector<ChunkResult> chunks(n_chunks);
  for (long ci = 0; ci < n_chunks; ++ci) {
    long first = ci * kChunk;
    long count = std::min(kChunk, n - first);
    chunks[ci] = run_chunk(nf, seed, ci, first, count, taus);
  }
  return finalize(nf, n, chunks, taus);
}

std::vector<BasisGateRow> basis_gate_table(const NormalForm& nf) {
  struct Named {
    const char* name;
    WeylCoordinate coord;
    double factor;
  };
  const std::array<Named, 4> rows = {
      Named{"CNOT", {kPi / 4, 0, 0}, 3.0},
      Named{"iSWAP", {kPi / 4, kPi / 4, 0}, 3.0},
      Named{"SQiSW", {kPi / 8, kPi / 8, 0}, 2.21},
      Named{"B", {kPi / 4, kPi / 8, 0}, 2.0},
  };
  std::vector<BasisGateRow> out;
  for (const auto& r : rows) {
    double single = optimal_time(r.coord, nf).tau;
    out.push_back({r.name, single, single * r.factor, r.factor});
  }
  return out;
}

ErrorProxyResult error_proxy(const Circuit& c, const DurationModel& model,
                             const ErrorProxyConfig& cfg) {
  ErrorProxyResult out;
  double fid = 1.0;
  for (const auto& g : c.gates) {
    if (!g.two_qubit()) continue;
    double p = cfg.p0 * gate_duration(g, model) / cfg.tau0;
    fid *= 1.0 - p;
  }
  out.est_fidelity = fid;
  out.est_error = 1.0 - fid;
  out.duration = metrics(c, model).duration;
  return out;
}

namespace {

std::vector<WeylCoordinate> chamber_grid(int n) {
  std::vector<WeylCoordinate> pts;
  for (int i = 1; i <= n; ++i) {
    for (int j = 0; j <= i; ++j) {
      for (int k = -j; k <= j; ++k) {
        WeylCoordinate c{i * kPi / (4 * n), j * kPi / (4 * n),
                         k * kPi / (4 * n)};
        if (!c.in_chamber(1e-12)) continue;
        if (c.x > kPi / 4 - 1e-12 && c.z < -1e-12) continue;
        pts.push_back(c);
      }
    }
  }
  return pts;
}

double grid_point_residual(const CouplingHamiltonian& h,
                           const WeylCoordinate& c) {
  Mat4 u = canonical_gate(c);
  PulseSolution sol = synthesize_pulse(u, h);
  return verify_solution(sol, u, h);
}

}  // namespace

double chamber_grid_worst_residual(const CouplingHamiltonian& h,
                                   int divisions) {
  auto pts = chamber_grid(divisions);
  std::vector<double> res(pts.size());
#ifdef REQISC_OPENMP
#pragma omp parallel for schedule(dynamic, 8)
#endif
  for (long i = 0; i < static_cast<long>(pts.size()); ++i) {
    res[i] = grid_point_residual(h, pts[i]);
  }
  return *std::max_element(res.begin(), res.end());
}

double chamber_grid_worst_residual_serial(const CouplingHamiltonian& h,
                                          int divisions) {
  auto pts = chamber_grid(divisions);
  double worst = 0;
  for (const auto& c : pts) {
    worst = std::max(worst, grid_point_residual(h, c));
  }
  return worst;
}

}  // namespace reqisc
