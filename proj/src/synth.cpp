#include "reqisc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>

#ifdef REQISC_OPENMP
#include <omp.h>
#endif

namespace reqisc {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};
}  // namespace

long lower_bound(int n, Isa isa) {
  long numerator = (1L << (2 * n)) - 3L * n - 1;
  long denom = isa == Isa::su4 ? 9 : 4;
  return (numerator + denom - 1) / denom;
}

std::array<double, 3> u3_params_of(const Mat2& m_in) {
  Mat2 m = m_in / std::sqrt(m_in.determinant());
  cplx a = m(0, 0), b = m(1, 0);
  double theta = 2.0 * std::atan2(std::abs(b), std::abs(a));
  double arg_a = std::abs(a) > 1e-14 ? std::arg(a) : 0.0;
  double arg_b = std::abs(b) > 1e-14 ? std::arg(b) : 0.0;
  double phi, lambda;
  if (std::abs(b) < 1e-14) {
    phi = -2 * arg_a;
    lambda = 0;
  } else if (std::abs(a) < 1e-14) {
    phi = 2 * arg_b;
    lambda = 0;
  } else {
    phi = arg_b - arg_a;
    lambda = -arg_b - arg_a;
  }
  return {theta, phi, lambda};
}

std::vector<Gate> kak_gates(int q_low, int q_high, const Mat4& u,
                            double identity_tol) {
  LocalDecomposition d = canonical_decompose(u);
  std::vector<Gate> out;
  auto push_u3 = [&](int q, const Mat2& m) {
    if (max_abs(MatX(m - m(0, 0) * Mat2::Identity())) < 1e-14) return;
    auto p = u3_params_of(m);
    out.push_back(Gate::u3(q, p[0], p[1], p[2]));
  };
  // kron factors: v1/v3 act on the matrix high bit = q_high
  if (d.coordinate.l1_norm() < identity_tol) {
    push_u3(q_high, Mat2(d.v1 * d.v3));
    push_u3(q_low, Mat2(d.v2 * d.v4));
    return out;
  }
  push_u3(q_high, d.v3);
  push_u3(q_low, d.v4);
  out.push_back(Gate::can(q_low, q_high, d.coordinate));
  push_u3(q_high, d.v1);
  push_u3(q_low, d.v2);
  return out;
}

namespace {

// Dense embedding of a k-qubit operator into `width` qubits; first listed
// qubit is the highest local bit.
MatX embed(const MatX& m, const std::vector<int>& qubits, int width) {
  const int k = static_cast<int>(qubits.size());
  const int dim = 1 << width;
  MatX out = MatX::Zero(dim, dim);
  std::vector<int> shifts(k);
  for (int i = 0; i < k; ++i) shifts[i] = qubits[k - 1 - i];
  int mask = 0;
  for (int q : qubits) mask |= 1 << q;
  for (int base = 0; base < dim; ++base) {
    if (base & mask) continue;
    for (int r = 0; r < (1 << k); ++r) {
      int row = base;
      for (int bb = 0; bb < k; ++bb)
        if (r & (1 << bb)) row |= 1 << shifts[bb];
      for (int cc = 0; cc < (1 << k); ++cc) {
        int col = base;
        for (int bb = 0; bb < k; ++bb)
          if (cc & (1 << bb)) col |= 1 << shifts[bb];
        out(row, col) = m(r, cc);
      }
    }
  }
  return out;
}

Mat2 u3_matrix(double theta, double phi, double lambda) {
  double c = std::cos(theta / 2), s = std::sin(theta / 2);
  Mat2 m;
  m << c, -std::exp(kI * lambda) * s,
       std::exp(kI * phi) * s, std::exp(kI * (phi + lambda)) * c;
  return m;
}

Mat2 du3_matrix(double theta, double phi, double lambda, int k) {
  double c = std::cos(theta / 2), s = std::sin(theta / 2);
  Mat2 m = Mat2::Zero();
  if (k == 0) {
    m << -s / 2, -std::exp(kI * lambda) * (c / 2),
         std::exp(kI * phi) * (c / 2), -std::exp(kI * (phi + lambda)) * (s / 2);
  } else if (k == 1) {
    m(1, 0) = kI * std::exp(kI * phi) * s;
    m(1, 1) = kI * std::exp(kI * (phi + lambda)) * c;
  } else {
    m(0, 1) = -kI * std::exp(kI * lambda) * s;
    m(1, 1) = kI * std::exp(kI * (phi + lambda)) * c;
  }
  return m;
}

// Parameterized {U3, Can} ladder: one U3 per qubit up front, then per block a
// Can on its pair followed by a U3 on each pair qubit.
struct Ansatz {
  int width;
  std::vector<std::pair<int, int>> placements;

  int param_count() const {
    return 3 * width + 9 * static_cast<int>(placements.size());
  }

  struct Op {
    bool is_can;
    std::vector<int> qubits;
    int param_offset;
  };

  std::vector<Op> ops() const {
    std::vector<Op> out;
    int off = 0;
    for (int q = 0; q < width; ++q) {
      out.push_back({false, {q}, off});
      off += 3;
    }
    for (const auto& [a, b] : placements) {
      out.push_back({true, {a, b}, off});
      off += 3;
      out.push_back({false, {a}, off});
      off += 3;
      out.push_back({false, {b}, off});
      off += 3;
    }
    return out;
  }

  // f = 1 - |Tr(target^dag V)| / N and its analytic gradient.
  double value_and_grad(const MatX& target, const std::vector<double>& p,
                        std::vector<double>* grad) const {
    const int dim = 1 << width;
    auto all = ops();
    const int nops = static_cast<int>(all.size());
    std::vector<MatX> mats(nops);
    for (int i = 0; i < nops; ++i) {
      const Op& op = all[i];
      MatX local = op.is_can
          ? MatX(canonical_gate({p[op.param_offset], p[op.param_offset + 1],
                                 p[op.param_offset + 2]}))
          : MatX(u3_matrix(p[op.param_offset], p[op.param_offset + 1],
                           p[op.param_offset + 2]));
      mats[i] = embed(local, op.qubits, width);
    }
    std::vector<MatX> pre(nops + 1), suf(nops + 1);
    pre[0] = MatX::Identity(dim, dim);
    for (int i = 0; i < nops; ++i) pre[i + 1] = mats[i] * pre[i];
    suf[nops] = MatX::Identity(dim, dim);
    for (int i = nops - 1; i >= 0; --i) suf[i] = suf[i + 1] * mats[i];
    cplx tr = (target.adjoint() * pre[nops]).trace();
    double f = 1.0 - std::abs(tr) / dim;
    if (grad) {
      grad->assign(p.size(), 0.0);
      double denom = dim * std::max(std::abs(tr), 1e-300);
      for (int i = 0; i < nops; ++i) {
        const Op& op = all[i];
        for (int k = 0; k < 3; ++k) {
          MatX dlocal;
          if (op.is_can) {
            WeylCoordinate c{p[op.param_offset], p[op.param_offset + 1],
                             p[op.param_offset + 2]};
            const Mat4& gen = k == 0 ? sigma_xx()
                                     : (k == 1 ? sigma_yy() : sigma_zz());
            dlocal = MatX(-kI * gen * canonical_gate(c));
          } else {
            dlocal = MatX(du3_matrix(p[op.param_offset], p[op.param_offset + 1],
                                     p[op.param_offset + 2], k));
          }
          MatX dm = embed(dlocal, op.qubits, width);
          cplx dtr = (target.adjoint() * (suf[i + 1] * dm * pre[i])).trace();
          (*grad)[op.param_offset + k] =
              -std::real(std::conj(tr) * dtr) / denom;
        }
      }
    }
    return f;
  }

  // Phase-aligned residual r = vec(V - e^{i theta} target)/sqrt(2N) with
  // theta = arg Tr(target^dag V); then |r|^2 equals the infidelity.
  double residual_and_jacobian(const MatX& target, const std::vector<double>& p,
                               Eigen::VectorXd* r, Eigen::MatrixXd* jac) const {
    const int dim = 1 << width;
    auto all = ops();
    const int nops = static_cast<int>(all.size());
    std::vector<MatX> mats(nops);
    for (int i = 0; i < nops; ++i) {
      const Op& op = all[i];
      MatX local = op.is_can
          ? MatX(canonical_gate({p[op.param_offset], p[op.param_offset + 1],
                                 p[op.param_offset + 2]}))
          : MatX(u3_matrix(p[op.param_offset], p[op.param_offset + 1],
                           p[op.param_offset + 2]));
      mats[i] = embed(local, op.qubits, width);
    }
    std::vector<MatX> pre(nops + 1), suf(nops + 1);
    pre[0] = MatX::Identity(dim, dim);
    for (int i = 0; i < nops; ++i) pre[i + 1] = mats[i] * pre[i];
    suf[nops] = MatX::Identity(dim, dim);
    for (int i = nops - 1; i >= 0; --i) suf[i] = suf[i + 1] * mats[i];
    const MatX& v = pre[nops];
    cplx tr = (target.adjoint() * v).trace();
    cplx phase = std::abs(tr) > 1e-300 ? tr / std::abs(tr) : cplx(1, 0);
    const double scale = 1.0 / std::sqrt(2.0 * dim);
    MatX diff = v - phase * target;
    const int nres = 2 * dim * dim;
    if (r) {
      r->resize(nres);
      for (int i = 0, k = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j, k += 2) {
          (*r)(k) = diff(i, j).real() * scale;
          (*r)(k + 1) = diff(i, j).imag() * scale;
        }
      }
    }
    if (jac) {
      jac->resize(nres, p.size());
      jac->setZero();
      for (int o = 0; o < nops; ++o) {
        const Op& op = all[o];
        for (int k3 = 0; k3 < 3; ++k3) {
          MatX dlocal;
          if (op.is_can) {
            WeylCoordinate c{p[op.param_offset], p[op.param_offset + 1],
                             p[op.param_offset + 2]};
            const Mat4& gen = k3 == 0 ? sigma_xx()
                                      : (k3 == 1 ? sigma_yy() : sigma_zz());
            dlocal = MatX(-kI * gen * canonical_gate(c));
          } else {
            dlocal = MatX(du3_matrix(p[op.param_offset],
                                     p[op.param_offset + 1],
                                     p[op.param_offset + 2], k3));
          }
          MatX dv = suf[o + 1] * embed(dlocal, op.qubits, width) * pre[o];
          int col = op.param_offset + k3;
          for (int i = 0, k = 0; i < dim; ++i) {
            for (int j = 0; j < dim; ++j, k += 2) {
              (*jac)(k, col) = dv(i, j).real() * scale;
              (*jac)(k + 1, col) = dv(i, j).imag() * scale;
            }
          }
        }
      }
    }
    return 1.0 - std::abs(tr) / dim;
  }

  Circuit to_circuit(const std::vector<double>& p) const {
    Circuit c(width);
    for (const auto& op : ops()) {
      if (op.is_can) {
        // raw exponents may lie outside the chamber; emit the exact gate as
        // a canonical Can plus compensating locals
        Mat4 raw = canonical_gate({p[op.param_offset], p[op.param_offset + 1],
                                   p[op.param_offset + 2]});
        for (auto& g : kak_gates(op.qubits[1], op.qubits[0], raw)) {
          c.push(std::move(g));
        }
      } else {
        c.push(Gate::u3(op.qubits[0], p[op.param_offset],
                        p[op.param_offset + 1], p[op.param_offset + 2]));
      }
    }
    return c;
  }
};

// Compact L-BFGS (two-loop recursion) with Armijo backtracking.
double lbfgs_minimize(const Ansatz& an, const MatX& target,
                      std::vector<double>& p, int max_iters, double ftarget) {
  const int n = static_cast<int>(p.size());
  const int mem = 8;
  std::vector<std::vector<double>> s_hist, y_hist;
  std::vector<double> rho_hist;
  std::vector<double> g(n), g_new(n);
  double f = an.value_and_grad(target, p, &g);
  double stall_best = f;
  int stall = 0;
  for (int it = 0; it < max_iters; ++it) {
    if (f < ftarget) break;
    // two-loop recursion
    std::vector<double> q = g;
    const int h = static_cast<int>(s_hist.size());
    std::vector<double> alpha(h);
    for (int i = h - 1; i >= 0; --i) {
      double a = 0;
      for (int j = 0; j < n; ++j) a += s_hist[i][j] * q[j];
      a *= rho_hist[i];
      alpha[i] = a;
      for (int j = 0; j < n; ++j) q[j] -= a * y_hist[i][j];
    }
    double gamma = 1.0;
    if (h > 0) {
      double sy = 0, yy = 0;
      for (int j = 0; j < n; ++j) {
        sy += s_hist[h - 1][j] * y_hist[h - 1][j];
        yy += y_hist[h - 1][j] * y_hist[h - 1][j];
      }
      if (yy > 0) gamma = sy / yy;
    }
    for (int j = 0; j < n; ++j) q[j] *= gamma;
    for (int i = 0; i < h; ++i) {
      double b = 0;
      for (int j = 0; j < n; ++j) b += y_hist[i][j] * q[j];
      b *= rho_hist[i];
      for (int j = 0; j < n; ++j) q[j] += s_hist[i][j] * (alpha[i] - b);
    }
    // descent direction is -q
    double gq = 0;
    for (int j = 0; j < n; ++j) gq += g[j] * q[j];
    if (gq <= 0) {  // fall back to steepest descent
      q = g;
      gq = 0;
      for (int j = 0; j < n; ++j) gq += g[j] * g[j];
    }
    double step = 1.0;
    std::vector<double> p_new(n);
    double f_new = f;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      for (int j = 0; j < n; ++j) p_new[j] = p[j] - step * q[j];
      f_new = an.value_and_grad(target, p_new, &g_new);
      if (f_new <= f - 1e-4 * step * gq) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    std::vector<double> s(n), y(n);
    double sy = 0;
    for (int j = 0; j < n; ++j) {
      s[j] = p_new[j] - p[j];
      y[j] = g_new[j] - g[j];
      sy += s[j] * y[j];
    }
    if (sy > 1e-16) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > mem) {
        s_hist.erase(s_hist.begin());
        y_hist.erase(y_hist.begin());
        rho_hist.erase(rho_hist.begin());
      }
    }
    p = p_new;
    g = g_new;
    f = f_new;
    if (f < stall_best - 1e-14) {
      stall_best = f;
      stall = 0;
    } else if (++stall >= 20) {
      break;
    }
  }
  return f;
}

// Levenberg-Marquardt polish; quadratic convergence once the L-BFGS phase
// has located the basin of a zero-residual solution.
double lm_polish(const Ansatz& an, const MatX& target, std::vector<double>& p,
                 int max_iters) {
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  double f = an.residual_and_jacobian(target, p, &r, &jac);
  double lambda = 1e-6;
  for (int it = 0; it < max_iters && f > 1e-15; ++it) {
    Eigen::MatrixXd jtj = jac.transpose() * jac;
    Eigen::VectorXd jtr = jac.transpose() * r;
    bool stepped = false;
    for (int tries = 0; tries < 12; ++tries) {
      Eigen::MatrixXd damped = jtj;
      damped.diagonal().array() += lambda;
      Eigen::VectorXd delta = damped.ldlt().solve(-jtr);
      std::vector<double> p_new(p.size());
      for (size_t j = 0; j < p.size(); ++j) p_new[j] = p[j] + delta(j);
      Eigen::VectorXd r_new;
      Eigen::MatrixXd jac_new;
      double f_new =
          an.residual_and_jacobian(target, p_new, &r_new, &jac_new);
      if (f_new < f) {
        p = std::move(p_new);
        r = std::move(r_new);
        jac = std::move(jac_new);
        f = f_new;
        lambda = std::max(lambda * 0.3, 1e-12);
        stepped = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!stepped) break;
  }
  return f;
}

}  // namespace

std::vector<std::vector<std::pair<int, int>>> placement_sequences(int blocks) {
  static const std::array<std::pair<int, int>, 3> pairs = {
      std::pair<int, int>{0, 1}, {1, 2}, {0, 2}};
  static const std::array<std::array<int, 3>, 6> perms = {
      std::array<int, 3>{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
      {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  std::vector<std::vector<int>> seqs;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int depth) -> void {
    if (depth == blocks) {
      seqs.push_back(cur);
      return;
    }
    for (int p = 0; p < 3; ++p) {
      if (!cur.empty() && cur.back() == p) continue;
      cur.push_back(p);
      self(self, depth + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  std::set<std::string> seen;
  std::vector<std::vector<std::pair<int, int>>> out;
  for (const auto& seq : seqs) {
    std::string best;
    for (const auto& perm : perms) {
      std::string key;
      for (int p : seq) {
        int a = perm[pairs[p].first], b = perm[pairs[p].second];
        if (a > b) std::swap(a, b);
        key += static_cast<char>('0' + a);
        key += static_cast<char>('0' + b);
      }
      if (best.empty() || key < best) best = key;
    }
    if (seen.insert(best).second) {
      std::vector<std::pair<int, int>> pl;
      for (int p : seq) pl.push_back(pairs[p]);
      out.push_back(std::move(pl));
    }
  }
  return out;
}

SynthesisResult synthesize_with_placements(
    const MatX& target, int width,
    const std::vector<std::pair<int, int>>& placements,
    const SynthOptions& opts) {
  Ansatz an{width, placements};
  const int np = an.param_count();
  struct Attempt {
    double f = 1.0;
    std::vector<double> p;
  };
  std::vector<Attempt> attempts(opts.restarts);
  const double ftarget = opts.eps * 0.01;
#ifdef REQISC_OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
  for (int r = 0; r < opts.restarts; ++r) {
    std::uint64_t st = opts.seed + 0x9e3779b97f4a7c15ULL * (r + 1);
    std::mt19937_64 rng(splitmix64(st));
    std::uniform_real_distribution<double> uni(-kPi, kPi);
    std::vector<double> p(np);
    for (double& v : p) v = uni(rng);
    double f = lbfgs_minimize(an, target, p, opts.max_iters, ftarget);
    if (f < 1e-3 && f > ftarget) f = lm_polish(an, target, p, 60);
    attempts[r] = {f, std::move(p)};
  }
  int best = 0;
  for (int r = 1; r < opts.restarts; ++r) {
    if (attempts[r].f < attempts[best].f) best = r;
  }
  SynthesisResult res;
  res.infidelity = attempts[best].f;
  res.restarts_used = best + 1;
  res.gate_count = static_cast<int>(placements.size());
  res.circuit = an.to_circuit(attempts[best].p);
  res.success = res.infidelity <= opts.eps;
  return res;
}

SynthesisResult approx_synthesize(const MatX& target, int width,
                                  const SynthOptions& opts) {
  if (width != 2 && width != 3) {
    throw NumericsError("approx_synthesize: width must be 2 or 3");
  }
  if (target.rows() != (1 << width) || !is_unitary(target)) {
    throw NumericsError("approx_synthesize: bad target");
  }
  if (width == 2) {
    // analytic KAK: zero or one Can
    Mat4 u = target;
    SynthesisResult res;
    res.circuit = Circuit(2);
    for (auto& g : kak_gates(0, 1, u)) res.circuit.push(std::move(g));
    res.gate_count = res.circuit.count_2q();
    res.infidelity = infidelity(target, unitary_of(res.circuit));
    res.success = res.infidelity <= opts.eps;
    return res;
  }
  SynthesisResult best;
  for (int count = 0; count <= opts.budget; ++count) {
    auto placements = placement_sequences(count);
    for (const auto& pl : placements) {
      SynthesisResult r = synthesize_with_placements(target, 3, pl, opts);
      if (r.infidelity < best.infidelity || best.circuit.n_qubits == 0) {
        best = r;
      }
      if (r.success) {
        // re-verify from the emitted circuit before trusting the attempt
        double check = infidelity(target, unitary_of(r.circuit));
        if (check <= opts.eps) {
          r.infidelity = check;
          return r;
        }
      }
    }
  }
  best.success = false;
  return best;
}

std::optional<ExchangeResult> exchange_pair(const Gate& g1, const Gate& g2,
                                            double eps) {
  if (g1.kind != GateKind::can || g2.kind != GateKind::can) {
    throw NumericsError("exchange_pair: expects canonical gates");
  }
  int shared = -1, outer1 = -1, outer2 = -1;
  for (int a : g1.qubits) {
    bool in2 = a == g2.qubits[0] || a == g2.qubits[1];
    (in2 ? shared : outer1) = a;
  }
  for (int b : g2.qubits) {
    if (b != shared) outer2 = b;
  }
  if (shared < 0 || outer1 < 0 || outer2 < 0 || outer1 == outer2) {
    throw NumericsError("exchange_pair: gates must share exactly one qubit");
  }
  ExchangeResult result;
  result.qubit_map = {outer1, shared, outer2};
  Circuit joint(3);
  joint.push(Gate::can(0, 1, gate_coordinate(g1)));
  joint.push(Gate::can(1, 2, gate_coordinate(g2)));
  MatX target = unitary_of(joint);
  MatX m1 = unitary_of([&] {
    Circuit c(3);
    c.push(joint.gates[0]);
    return c;
  }());
  MatX m2 = unitary_of([&] {
    Circuit c(3);
    c.push(joint.gates[1]);
    return c;
  }());
  if (max_abs(MatX(m1 * m2 - m2 * m1)) < 1e-12) {
    Circuit swapped(3);
    swapped.push(joint.gates[1]);
    swapped.push(joint.gates[0]);
    result.circuit = std::move(swapped);
    return result;
  }
  SynthOptions opts;
  opts.eps = eps;
  opts.restarts = 8;
  SynthesisResult r = synthesize_with_placements(
      target, 3, {{1, 2}, {0, 1}}, opts);
  if (!r.success) return std::nullopt;
  if (infidelity(target, unitary_of(r.circuit)) > eps) return std::nullopt;
  result.circuit = std::move(r.circuit);
  return result;
}

}  // namespace reqisc
