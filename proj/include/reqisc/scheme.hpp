#pragma once

#include <optional>
#include <vector>

#include "reqisc/hamiltonian.hpp"
#include "reqisc/weyl.hpp"

namespace reqisc {

enum class Subscheme { nd, ea_plus, ea_minus };

const char* subscheme_name(Subscheme s);

struct NDRecord {
  double s1 = 0, s2 = 0;  // S1 >= b-c, S2 >= b+c
};

struct EARecord {
  double alpha = 0, beta = 0;
  double eta = 0, t_scaled = 0;
  WeylCoordinate shifted_coord;
};

struct BranchTimes {
  double tau0 = 0, tau_plus = 0, tau_minus = 0;
};

// Full output of the pulse solver for one target gate.
struct PulseSolution {
  Subscheme subscheme = Subscheme::nd;
  double tau = 0;                         // units 1/g
  double omega1 = 0, omega2 = 0, delta = 0;
  double a1_amp = 0, a2_amp = 0;          // A1 = -2(O1+O2), A2 = -2(O1-O2)
  Mat2 corr_a1, corr_a2, corr_b1, corr_b2;
  Mat2 h1 = Mat2::Zero(), h2 = Mat2::Zero();  // compensated local Hamiltonians
  bool reflected = false;
  bool amplitude_exceeded = false;
  std::optional<NDRecord> nd;
  std::optional<EARecord> ea;
};

struct OptimalTime {
  double tau = 0;
  bool reflected = false;
  BranchTimes branches;   // the (possibly reflected) triple used downstream
  Subscheme subscheme = Subscheme::nd;
};

// tau = min(tau1, tau2) with tau1 = max{x/a, (x+y-z)/(a+b-c),
// (x+y+z)/(a+b+c)} and tau2 the reflected analogue at (pi/2-x, y, -z).
// Ties prefer ND, then EA+, then EA-.
OptimalTime optimal_time(const WeylCoordinate& c, const NormalForm& nf);

struct NDDrives {
  double omega1 = 0, omega2 = 0;
  NDRecord record;
};
// ND subscheme (delta = 0); `c` is the possibly-reflected target.
NDDrives solve_nd(const WeylCoordinate& c, const NormalForm& nf, double tau);

struct EADrives {
  double omega1 = 0, omega2 = 0, delta = 0;
  EARecord record;
};
EADrives solve_ea(const WeylCoordinate& c, const NormalForm& nf, double tau,
                  Subscheme sign);

struct PulseOptions {
  std::optional<double> amp_max;
};

// Algorithm end to end: duration, subscheme, drives, 1Q corrections.
PulseSolution synthesize_pulse(const Mat4& u, const CouplingHamiltonian& h,
                               const PulseOptions& opts = {});

// Infidelity between u and the gate reconstructed from the solution.
double verify_solution(const PulseSolution& sol, const Mat4& u,
                       const CouplingHamiltonian& h);

enum class GateFamily { cnot, b, swap, iswap };

WeylCoordinate family_coordinate(GateFamily f, double s);

struct SweepRow {
  double s = 0;
  double a1 = 0, a2 = 0, delta = 0;  // normalized by g
  double tau = 0;                    // in units of 1/g
};
std::vector<SweepRow> family_sweep(GateFamily f, const std::vector<double>& s_grid,
                                   const NormalForm& nf);

// Frontier membership (at the solution's tau) of the possibly-reflected
// coordinate; used by property tests.
bool frontier_contains(Subscheme s, const WeylCoordinate& c,
                       const NormalForm& nf, double tau, double tol = 1e-9);

// Named fixed gates used across benchmarks.
Mat4 gate_cnot();
Mat4 gate_cz();
Mat4 gate_iswap();
Mat4 gate_sqisw();
Mat4 gate_b();
Mat4 gate_swap();

}  // namespace reqisc
