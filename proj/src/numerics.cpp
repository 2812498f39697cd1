#include "reqisc/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace reqisc {

double max_abs(const MatX& m) { return m.cwiseAbs().maxCoeff(); }

bool is_unitary(const MatX& u, double tol) {
  if (u.rows() != u.cols()) return false;
  MatX d = u.adjoint() * u - MatX::Identity(u.rows(), u.cols());
  return max_abs(d) < tol;
}

bool is_hermitian(const MatX& h, double tol) {
  if (h.rows() != h.cols()) return false;
  return max_abs(MatX(h - h.adjoint())) < tol;
}

MatX expm_hermitian(const MatX& h, double t) {
  if (!is_hermitian(h)) {
    throw NumericsError("expm_hermitian: input is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<MatX> es(h);
  const auto& w = es.eigenvalues();
  const MatX& v = es.eigenvectors();
  Eigen::VectorXcd phases(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    phases(i) = std::exp(cplx(0.0, -w(i) * t));
  }
  return v * phases.asDiagonal() * v.adjoint();
}

namespace {

// One Jacobi sweep target: rotate rows/columns (p,q) of both A and B so the
// (p,q) off-diagonal entries of both shrink (Cardoso-Souloumiac rotation for
// a set of commuting symmetric matrices).
void joint_jacobi_rotate(Eigen::MatrixXd& a, Eigen::MatrixXd& b,
                         Eigen::MatrixXd& o, int p, int q) {
  double g11 = 0, g12 = 0, g22 = 0;
  for (const Eigen::MatrixXd* m : {&a, &b}) {
    double hx = (*m)(p, p) - (*m)(q, q);
    double hy = 2.0 * (*m)(p, q);
    g11 += hx * hx;
    g12 += hx * hy;
    g22 += hy * hy;
  }
  // principal eigenvector of [[g11,g12],[g12,g22]]
  double theta = 0.5 * std::atan2(2.0 * g12, g11 - g22);
  double x = std::cos(theta), y = std::sin(theta);
  if (x < 0) {
    x = -x;
    y = -y;
  }
  double r = std::sqrt(x * x + y * y);
  double c = std::sqrt((x + r) / (2.0 * r));
  double s = y / std::sqrt(2.0 * r * (x + r));
  if (std::abs(s) < 1e-16) return;
  auto rotate = [&](Eigen::MatrixXd& m) {
    Eigen::Index n = m.rows();
    for (Eigen::Index k = 0; k < n; ++k) {
      double mkp = m(k, p), mkq = m(k, q);
      m(k, p) = c * mkp + s * mkq;
      m(k, q) = -s * mkp + c * mkq;
    }
    for (Eigen::Index k = 0; k < n; ++k) {
      double mpk = m(p, k), mqk = m(q, k);
      m(p, k) = c * mpk + s * mqk;
      m(q, k) = -s * mpk + c * mqk;
    }
  };
  rotate(a);
  rotate(b);
  Eigen::Index n = o.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    double okp = o(k, p), okq = o(k, q);
    o(k, p) = c * okp + s * okq;
    o(k, q) = -s * okp + c * okq;
  }
}

double off_diagonal_norm(const Eigen::MatrixXd& m) {
  double sum = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (i != j) sum += m(i, j) * m(i, j);
    }
  }
  return std::sqrt(sum);
}

}  // namespace

SymUnitaryEig sym_unitary_eig(const MatX& s, double tol) {
  const Eigen::Index n = s.rows();
  if (s.cols() != n) throw NumericsError("sym_unitary_eig: not square");
  if (max_abs(MatX(s - s.transpose())) > 1e-10) {
    throw NumericsError("sym_unitary_eig: input is not symmetric");
  }
  if (!is_unitary(s)) {
    throw NumericsError("sym_unitary_eig: input is not unitary");
  }
  Eigen::MatrixXd a = s.real(), b = s.imag();
  a = ((a + a.transpose()) / 2).eval();
  b = ((b + b.transpose()) / 2).eval();
  Eigen::MatrixXd o = Eigen::MatrixXd::Identity(n, n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    if (off_diagonal_norm(a) + off_diagonal_norm(b) < tol) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        joint_jacobi_rotate(a, b, o, p, q);
      }
    }
  }
  if (o.determinant() < 0) o.col(0) *= -1.0;  // det(O) = +1
  SymUnitaryEig out;
  out.orthogonal = o;
  out.diagonal.resize(n);
  MatX d = o.transpose() * s * o;
  for (Eigen::Index i = 0; i < n; ++i) out.diagonal(i) = d(i, i);
  return out;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

struct NewtonOutcome {
  Vec2 point;
  double residual;
  bool converged;
};

NewtonOutcome damped_newton(const std::function<Vec2(const Vec2&)>& f,
                            Vec2 x, const RootOptions& opts) {
  auto clamp = [&](Vec2 v) {
    v(0) = std::clamp(v(0), opts.lo(0), opts.hi(0));
    v(1) = std::clamp(v(1), opts.lo(1), opts.hi(1));
    return v;
  };
  x = clamp(x);
  Vec2 fx = f(x);
  double r = fx.norm();
  for (int it = 0; it < opts.max_iters && r >= opts.tol * 0.01; ++it) {
    const double h0 = 1e-7 * std::max(1.0, std::abs(x(0)));
    const double h1 = 1e-7 * std::max(1.0, std::abs(x(1)));
    Vec2 f0 = f(clamp(Vec2(x(0) + h0, x(1))));
    Vec2 f1 = f(clamp(Vec2(x(0), x(1) + h1)));
    Eigen::Matrix2d jac;
    jac.col(0) = (f0 - fx) / h0;
    jac.col(1) = (f1 - fx) / h1;
    Eigen::Matrix2d jtj = jac.transpose() * jac;
    jtj.diagonal().array() += 1e-14;
    Vec2 step = jtj.ldlt().solve(-jac.transpose() * fx);
    if (!step.allFinite()) break;
    double damp = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 30; ++ls) {
      Vec2 xn = clamp(x + damp * step);
      Vec2 fn = f(xn);
      double rn = fn.norm();
      if (rn < r) {
        x = xn;
        fx = fn;
        r = rn;
        improved = true;
        break;
      }
      damp *= 0.5;
    }
    if (!improved) break;
  }
  return {x, r, r < opts.tol};
}

}  // namespace

std::optional<RootResult> solve_root_2d(
    const std::function<Vec2(const Vec2&)>& f, const RootOptions& opts) {
  std::optional<RootResult> best;
  double best_pref = 0;
  auto consider = [&](const NewtonOutcome& n) {
    if (!n.converged) return;
    if (opts.feasible && !opts.feasible(n.point)) return;
    double pref = opts.preference ? opts.preference(n.point) : n.residual;
    if (!best || pref < best_pref) {
      best = RootResult{n.point, n.residual};
      best_pref = pref;
    }
  };
  const Vec2 span = opts.hi - opts.lo;
  for (int i = 0; i < opts.grid; ++i) {
    for (int j = 0; j < opts.grid; ++j) {
      Vec2 x0 = opts.lo + Vec2(span(0) * (i + 0.5) / opts.grid,
                               span(1) * (j + 0.5) / opts.grid);
      if (opts.feasible && !opts.feasible(x0)) continue;
      consider(damped_newton(f, x0, opts));
    }
  }
  if (!best) {
    std::uint64_t rng = 0x5eedull;
    for (int k = 0; k < opts.extra_restarts && !best; ++k) {
      double u = (splitmix64(rng) >> 11) * 0x1p-53;
      double v = (splitmix64(rng) >> 11) * 0x1p-53;
      Vec2 x0 = opts.lo + Vec2(span(0) * u, span(1) * v);
      consider(damped_newton(f, x0, opts));
    }
  }
  return best;
}

}  // namespace reqisc
