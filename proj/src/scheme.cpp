#include "reqisc/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace reqisc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

double sinc(double u) { return std::abs(u) < 1e-12 ? 1.0 : std::sin(u) / u; }

double polish_sinc_root(double u, double v) {
  // Newton on g(u) = sin(u) - v u.
  for (int it = 0; it < 60; ++it) {
    double g = std::sin(u) - v * u;
    double dg = std::cos(u) - v;
    if (std::abs(dg) < 1e-14) break;
    double step = g / dg;
    u -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return u;
}

// Extremum of sinc in (k pi, (k+1) pi): root of u cos u - sin u.
double sinc_extremum(int k) {
  double lo = k * kPi + 1e-9, hi = (k + 1) * kPi - 1e-9;
  auto f = [](double u) { return u * std::cos(u) - std::sin(u); };
  for (int it = 0; it < 200; ++it) {
    double mid = (lo + hi) / 2;
    (f(lo) * f(mid) <= 0 ? hi : lo) = mid;
  }
  return (lo + hi) / 2;
}

std::optional<double> bisect_monotone(double lo, double hi, double v) {
  auto g = [&](double u) { return sinc(u) - v; };
  double glo = g(lo), ghi = g(hi);
  if (glo == 0) return lo;
  if (glo * ghi > 0) return std::nullopt;
  for (int it = 0; it < 100; ++it) {
    double mid = (lo + hi) / 2;
    (g(lo) * g(mid) <= 0 ? hi : lo) = mid;
  }
  return polish_sinc_root((lo + hi) / 2, v);
}

// Smallest u >= umin with sin(u)/u = v, scanning sinc branch by branch.
// Valid targets stay within the range of sinc; the scan is capped at 64
// half-turns as a hard stop.
std::optional<double> sinc_inverse_smallest(double v, double umin) {
  if (umin < 0) umin = 0;
  if (std::abs(sinc(umin) - v) < 1e-13) return umin;
  for (int k = 0; k <= 64; ++k) {
    double lo = std::max(umin, k * kPi);
    double hi = (k + 1) * kPi;
    if (lo >= hi) continue;
    if (k == 0) {
      // sinc decreases 1 -> 0 on (0, pi)
      if (auto r = bisect_monotone(lo, hi, v); r && *r >= umin - 1e-12) {
        return r;
      }
      continue;
    }
    double ext = sinc_extremum(k);
    if (ext > lo) {
      if (auto r = bisect_monotone(lo, ext, v); r && *r >= umin - 1e-12) {
        return r;
      }
    }
    double lo2 = std::max(lo, ext);
    if (auto r = bisect_monotone(lo2, hi, v); r && *r >= umin - 1e-12) {
      return r;
    }
  }
  return std::nullopt;
}

// Left-hand side of the EA transcendental system, evaluated in the
// (alpha, beta) eigenvalue parameterization. Removable singularities are
// nudged; the function is continuous on the closure of the domain.
cplx ea_lhs(double alpha, double beta, double eta, double t) {
  if (std::abs(2 * alpha + beta - eta) < 1e-11) alpha += 2e-11;
  if (std::abs(1 - alpha + beta) < 1e-11) alpha -= 2e-11;
  if (std::abs(1 - eta + alpha + 2 * beta) < 1e-11) beta += 2e-11;
  auto ep = [](double w) { return std::exp(cplx(0.0, w)); };
  cplx t1 = ((1 - alpha) * (1 + alpha + beta) - (1 - alpha + beta) * eta) /
            ((1 - alpha + beta) * (1 - eta + alpha + 2 * beta)) *
            ep(-(2 + 2 * beta - eta) * t);
  cplx t2 = (beta * (1 + alpha + beta) - (1 - alpha + beta) * eta) /
            ((1 - alpha + beta) * (2 * alpha + beta - eta)) *
            ep((eta - 2 * alpha) * t);
  cplx t3 = ((1 + alpha - eta) * eta - beta * (1 - alpha - eta)) /
            ((2 * alpha + beta - eta) * (1 + alpha + 2 * beta - eta)) *
            ep((2 * alpha + 2 * beta - eta) * t);
  return t1 + t2 + t3;
}

cplx ea_rhs(double x, double y, double z) {
  auto ep = [](double w) { return std::exp(cplx(0.0, w)); };
  return ep(x - y - z) - ep(y - x - z) + ep(z - x - y);
}

double clamped_sqrt(double v) { return std::sqrt(std::max(v, 0.0)); }

}  // namespace

const char* subscheme_name(Subscheme s) {
  switch (s) {
    case Subscheme::nd: return "ND";
    case Subscheme::ea_plus: return "EA+";
    default: return "EA-";
  }
}

OptimalTime optimal_time(const WeylCoordinate& c, const NormalForm& nf) {
  const double a = nf.a, b = nf.b, cc = nf.c;
  const double x = c.x, y = c.y, z = c.z;
  BranchTimes fw{x / a, (x + y - z) / (a + b - cc), (x + y + z) / (a + b + cc)};
  BranchTimes rv{(kPi / 2 - x) / a, (kPi / 2 - x + y + z) / (a + b - cc),
                 (kPi / 2 - x + y - z) / (a + b + cc)};
  double tau1 = std::max({fw.tau0, fw.tau_plus, fw.tau_minus});
  double tau2 = std::max({rv.tau0, rv.tau_plus, rv.tau_minus});
  OptimalTime out;
  out.reflected = tau2 < tau1 - 1e-15;
  out.tau = out.reflected ? tau2 : tau1;
  out.branches = out.reflected ? rv : fw;
  const double tol = 1e-12 * std::max(1.0, out.tau);
  if (std::abs(out.tau - out.branches.tau0) <= tol) {
    out.subscheme = Subscheme::nd;
  } else if (std::abs(out.tau - out.branches.tau_plus) <= tol) {
    out.subscheme = Subscheme::ea_plus;
  } else {
    out.subscheme = Subscheme::ea_minus;
  }
  return out;
}

NDDrives solve_nd(const WeylCoordinate& c, const NormalForm& nf, double tau) {
  const double b = nf.b, cc = nf.c;
  NDDrives out;
  auto one_side = [&](double target_angle, double coeff) -> double {
    // returns S with sin(S tau) coeff / S = sin(target_angle), S >= coeff
    if (std::abs(coeff) * tau < 1e-12) {
      if (std::abs(std::sin(target_angle)) > 1e-9) {
        throw NumericsError("solve_nd: degenerate coupling cannot reach target");
      }
      return coeff;
    }
    double v = std::sin(target_angle) / (coeff * tau);
    auto u = sinc_inverse_smallest(v, coeff * tau);
    if (!u) {
      throw NumericsError("solve_nd: sinc target outside admissible branches");
    }
    return *u / tau;
  };
  out.record.s1 = one_side(c.y - c.z, b - cc);
  out.record.s2 = one_side(c.y + c.z, b + cc);
  out.omega1 = 0.5 * clamped_sqrt(out.record.s1 * out.record.s1 -
                                  (b - cc) * (b - cc));
  out.omega2 = 0.5 * clamped_sqrt(out.record.s2 * out.record.s2 -
                                  (b + cc) * (b + cc));
  return out;
}

EADrives solve_ea(const WeylCoordinate& c, const NormalForm& nf, double tau,
                  Subscheme sign) {
  if (sign == Subscheme::nd) {
    throw NumericsError("solve_ea: ND branch is not an EA subscheme");
  }
  const double a = nf.a, b = nf.b, cc = nf.c;
  double scale, eta, t;
  WeylCoordinate sc;
  if (sign == Subscheme::ea_plus) {
    scale = a + cc;
    eta = (a - b) / scale;
    t = scale * tau;
    sc = {c.x + cc * tau, c.y + cc * tau, cc * tau - c.z};
  } else {
    scale = a - cc;
    eta = (a - b) / scale;
    t = scale * tau;
    sc = {c.x - cc * tau, c.y - cc * tau, c.z - cc * tau};
  }
  const cplx target = ea_rhs(sc.x, sc.y, sc.z);
  // Solve in (alpha, gamma) with gamma = 1/(1+beta); the domain becomes a
  // unit square cut by alpha + beta >= eta.
  auto beta_of = [](double gamma) { return 1.0 / gamma - 1.0; };
  auto fun = [&](const Vec2& p) -> Vec2 {
    cplx f = ea_lhs(p(0), beta_of(p(1)), eta, t) - target;
    return Vec2(f.real(), f.imag());
  };
  RootOptions opts;
  opts.lo = Vec2(0.0, 1e-6);
  opts.hi = Vec2(1.0, 1.0);
  opts.tol = 1e-11;
  opts.feasible = [&](const Vec2& p) {
    return p(0) + beta_of(p(1)) >= eta - 1e-9;
  };
  opts.preference = [&](const Vec2& p) {
    double al = p(0), be = beta_of(p(1));
    double om2 = (1 - al) * be * (1 - eta + al + be);
    double de2 = al * (1 + be) * (al + be - eta);
    return om2 + de2;
  };
  auto root = solve_root_2d(fun, opts);
  if (!root) {
    opts.grid = 24;  // denser fallback before declaring failure
    root = solve_root_2d(fun, opts);
  }
  if (!root) {
    throw NumericsError("solve_ea: root search exhausted");
  }
  double alpha = root->point(0), beta = beta_of(root->point(1));
  double omega = scale * clamped_sqrt((1 - alpha) * beta * (1 - eta + alpha + beta));
  double det = scale * clamped_sqrt(alpha * (1 + beta) * (alpha + beta - eta));
  EADrives out;
  out.record = {alpha, beta, eta, t, sc};
  if (sign == Subscheme::ea_plus) {
    out.omega1 = 0.0;
    out.omega2 = omega;
    out.delta = -det;
  } else {
    out.omega1 = omega;
    out.omega2 = 0.0;
    out.delta = det;
  }
  return out;
}

namespace {

// Drive Hamiltonians in the normal frame.
struct FramedDrives {
  Mat2 h1pp, h2pp;  // H''_1, H''_2
};

FramedDrives framed_drives(double omega1, double omega2, double delta) {
  FramedDrives d;
  d.h1pp = (omega1 + omega2) * pauli_x() + delta * pauli_z();
  d.h2pp = (omega1 - omega2) * pauli_x() + delta * pauli_z();
  return d;
}

}  // namespace

PulseSolution synthesize_pulse(const Mat4& u, const CouplingHamiltonian& h,
                               const PulseOptions& opts) {
  NormalForm nf = normal_form(h);
  LocalDecomposition target = canonical_decompose(u);
  OptimalTime ot = optimal_time(target.coordinate, nf);

  PulseSolution sol;
  sol.subscheme = ot.subscheme;
  sol.tau = ot.tau;
  sol.reflected = ot.reflected;

  WeylCoordinate drive_target = target.coordinate;
  if (ot.reflected) {
    drive_target = {kPi / 2 - drive_target.x, drive_target.y, -drive_target.z};
  }

  if (ot.tau > 1e-14) {
    if (ot.subscheme == Subscheme::nd) {
      NDDrives d = solve_nd(drive_target, nf, ot.tau);
      sol.omega1 = d.omega1;
      sol.omega2 = d.omega2;
      sol.delta = 0.0;
      sol.nd = d.record;
    } else {
      EADrives d = solve_ea(drive_target, nf, ot.tau, ot.subscheme);
      sol.omega1 = d.omega1;
      sol.omega2 = d.omega2;
      sol.delta = d.delta;
      sol.ea = d.record;
    }
  }
  sol.a1_amp = -2 * (sol.omega1 + sol.omega2);
  sol.a2_amp = -2 * (sol.omega1 - sol.omega2);

  // Local corrections: decompose the realized normal-frame evolution and
  // cancel both factorizations against each other.
  FramedDrives fd = framed_drives(sol.omega1, sol.omega2, sol.delta);
  Mat4 gen = nf.canonical_part() + kron2(fd.h1pp, pauli_i()) +
             kron2(pauli_i(), fd.h2pp);
  Mat4 evolved = expm_hermitian(gen, sol.tau);
  LocalDecomposition real = canonical_decompose(evolved);
  if (!real.coordinate.approx_equal(target.coordinate, 1e-6)) {
    throw NumericsError("synthesize_pulse: realized coordinate mismatch");
  }
  sol.h1 = nf.u1 * fd.h1pp * nf.u1.adjoint() - nf.h1_res;
  sol.h2 = nf.u2 * fd.h2pp * nf.u2.adjoint() - nf.h2_res;
  sol.corr_a1 = target.v1 * real.v1.adjoint() * nf.u1.adjoint();
  sol.corr_a2 = target.v2 * real.v2.adjoint() * nf.u2.adjoint();
  sol.corr_b1 = nf.u1 * real.v3.adjoint() * target.v3;
  sol.corr_b2 = nf.u2 * real.v4.adjoint() * target.v4;

  if (opts.amp_max) {
    double peak = std::max({std::abs(sol.a1_amp), std::abs(sol.a2_amp),
                            std::abs(sol.delta)});
    sol.amplitude_exceeded = peak > *opts.amp_max;
  }
  return sol;
}

double verify_solution(const PulseSolution& sol, const Mat4& u,
                       const CouplingHamiltonian& h) {
  Mat4 gen = h.matrix + kron2(sol.h1, pauli_i()) + kron2(pauli_i(), sol.h2);
  Mat4 w = kron2(sol.corr_a1, sol.corr_a2) * expm_hermitian(gen, sol.tau) *
           kron2(sol.corr_b1, sol.corr_b2);
  return 1.0 - std::abs((u.adjoint() * w).trace()) / 4.0;
}

WeylCoordinate family_coordinate(GateFamily f, double s) {
  switch (f) {
    case GateFamily::cnot: return {s * kPi / 4, 0, 0};
    case GateFamily::b: return {s * kPi / 4, s * kPi / 8, 0};
    case GateFamily::swap: return {s * kPi / 4, s * kPi / 4, s * kPi / 4};
    default: return {s * kPi / 4, s * kPi / 4, 0};
  }
}

std::vector<SweepRow> family_sweep(GateFamily f,
                                   const std::vector<double>& s_grid,
                                   const NormalForm& nf) {
  std::vector<SweepRow> rows;
  rows.reserve(s_grid.size());
  const double g = nf.coupling_strength();
  for (double s : s_grid) {
    WeylCoordinate c = family_coordinate(f, s);
    OptimalTime ot = optimal_time(c, nf);
    WeylCoordinate dt = c;
    if (ot.reflected) dt = {kPi / 2 - c.x, c.y, -c.z};
    double o1 = 0, o2 = 0, dl = 0;
    if (ot.tau > 1e-14) {
      if (ot.subscheme == Subscheme::nd) {
        NDDrives d = solve_nd(dt, nf, ot.tau);
        o1 = d.omega1;
        o2 = d.omega2;
      } else {
        EADrives d = solve_ea(dt, nf, ot.tau, ot.subscheme);
        o1 = d.omega1;
        o2 = d.omega2;
        dl = d.delta;
      }
    }
    rows.push_back({s, -2 * (o1 + o2) / g, -2 * (o1 - o2) / g, dl / g,
                    ot.tau * g});
  }
  return rows;
}

bool frontier_contains(Subscheme s, const WeylCoordinate& c,
                       const NormalForm& nf, double tau, double tol) {
  const double a = nf.a, b = nf.b, cc = nf.c;
  const double x = c.x, y = c.y, z = c.z;
  switch (s) {
    case Subscheme::nd:
      return std::abs(x - a * tau) < tol && y - z > -tol &&
             y - z < (b - cc) * tau + tol && y + z > -tol &&
             y + z < (b + cc) * tau + tol;
    case Subscheme::ea_plus:
      return std::abs(x + y - z - (a + b - cc) * tau) < tol &&
             x < a * tau + tol && z < cc * tau + tol;
    default:
      return std::abs(x + y + z - (a + b + cc) * tau) < tol &&
             x < a * tau + tol && z > cc * tau - tol;
  }
}

Mat4 gate_cnot() {
  Mat4 m = Mat4::Zero();
  m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
  return m;
}

Mat4 gate_cz() {
  Mat4 m = Mat4::Identity();
  m(3, 3) = -1;
  return m;
}

Mat4 gate_iswap() {
  Mat4 m = Mat4::Zero();
  m(0, 0) = m(3, 3) = 1;
  m(1, 2) = m(2, 1) = kI;
  return m;
}

Mat4 gate_sqisw() {
  Mat4 m = Mat4::Zero();
  const double r = 1.0 / std::sqrt(2.0);
  m(0, 0) = m(3, 3) = 1;
  m(1, 1) = m(2, 2) = r;
  m(1, 2) = m(2, 1) = kI * r;
  return m;
}

Mat4 gate_b() { return canonical_gate({kPi / 4, kPi / 8, 0}); }

Mat4 gate_swap() {
  Mat4 m = Mat4::Zero();
  m(0, 0) = m(3, 3) = 1;
  m(1, 2) = m(2, 1) = 1;
  return m;
}

}  // namespace reqisc
