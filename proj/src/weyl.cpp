#include "reqisc/weyl.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace reqisc {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};
}  // namespace

const Mat2& pauli_i() {
  static const Mat2 m = Mat2::Identity();
  return m;
}
const Mat2& pauli_x() {
  static const Mat2 m = (Mat2() << 0, 1, 1, 0).finished();
  return m;
}
const Mat2& pauli_y() {
  static const Mat2 m = (Mat2() << 0, -kI, kI, 0).finished();
  return m;
}
const Mat2& pauli_z() {
  static const Mat2 m = (Mat2() << 1, 0, 0, -1).finished();
  return m;
}

Mat4 kron2(const Mat2& a, const Mat2& b) {
  Mat4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

const Mat4& sigma_xx() {
  static const Mat4 m = kron2(pauli_x(), pauli_x());
  return m;
}
const Mat4& sigma_yy() {
  static const Mat4 m = kron2(pauli_y(), pauli_y());
  return m;
}
const Mat4& sigma_zz() {
  static const Mat4 m = kron2(pauli_z(), pauli_z());
  return m;
}

const Mat4& magic_basis() {
  static const Mat4 m = [] {
    Mat4 mm;
    mm << 1, 0, 0, kI,
          0, kI, 1, 0,
          0, kI, -1, 0,
          1, 0, 0, -kI;
    return Mat4(mm / std::sqrt(2.0));
  }();
  return m;
}

const Mat4& magic_conj_flip() {
  static const Mat4 m = Eigen::Vector4cd(1, -1, 1, -1).asDiagonal();
  return m;
}

bool WeylCoordinate::in_chamber(double tol) const {
  if (!(kPi / 4 + tol >= x && x + tol >= y && y + tol >= std::abs(z))) {
    return false;
  }
  if (x > kPi / 4 - tol && z < -tol) return false;
  return true;
}

bool WeylCoordinate::approx_equal(const WeylCoordinate& o, double tol) const {
  return std::abs(x - o.x) < tol && std::abs(y - o.y) < tol &&
         std::abs(z - o.z) < tol;
}

Mat4 canonical_gate(const WeylCoordinate& c) {
  Mat4 h = c.x * sigma_xx() + c.y * sigma_yy() + c.z * sigma_zz();
  return expm_hermitian(h, 1.0);
}

Mat4 LocalDecomposition::reconstruct() const {
  return phase * kron2(v1, v2) * canonical_gate(coordinate) * kron2(v3, v4);
}

KronFactors factor_kron(const Mat4& k) {
  // Locate the dominant 2x2 block; it is proportional to b.
  int br = 0, bc = 0;
  double best = -1;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      double n = k.block<2, 2>(2 * i, 2 * j).norm();
      if (n > best) {
        best = n;
        br = i;
        bc = j;
      }
    }
  }
  Mat2 b = k.block<2, 2>(2 * br, 2 * bc);
  b *= std::sqrt(2.0) / b.norm();
  Mat2 a;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      a(i, j) = (b.adjoint() * k.block<2, 2>(2 * i, 2 * j)).trace() / 2.0;
    }
  }
  // Normalize both to SU(2); the leftover scalar is the phase.
  cplx da = std::sqrt(a.determinant());
  cplx db = std::sqrt(b.determinant());
  a /= da;
  b /= db;
  Mat4 prod = kron2(a, b);
  // phase from the largest entry
  Eigen::Index mi, mj;
  prod.cwiseAbs().maxCoeff(&mi, &mj);
  cplx phase = k(mi, mj) / prod(mi, mj);
  return {a, b, phase};
}

namespace {

// Accumulates Can(raw) = phase * (l1 (x) l2) * Can(v) * (r1 (x) r2) while
// moves rewrite v toward the chamber.
struct Reducer {
  std::array<double, 3> v;
  Mat2 l1 = Mat2::Identity(), l2 = Mat2::Identity();
  Mat2 r1 = Mat2::Identity(), r2 = Mat2::Identity();
  cplx phase = 1.0;

  const Mat2& sigma(int axis) const {
    return axis == 0 ? pauli_x() : (axis == 1 ? pauli_y() : pauli_z());
  }

  // v[axis] -= n*pi/2; Can picks up (-i)^n (sigma (x) sigma)^n on the left.
  void shift(int axis, long n) {
    if (n == 0) return;
    v[axis] -= static_cast<double>(n) * kPi / 2;
    long m = ((n % 4) + 4) % 4;
    for (long k = 0; k < m; ++k) phase *= -kI;
    if (m % 2 == 1) {
      l1 = l1 * sigma(axis);
      l2 = l2 * sigma(axis);
    }
  }

  // Conjugation move: Can(v) = (q1 (x) q2)^dag Can(v') (q1 (x) q2).
  void conjugate(const Mat2& q1, const Mat2& q2) {
    l1 = l1 * q1.adjoint();
    l2 = l2 * q2.adjoint();
    r1 = q1 * r1;
    r2 = q2 * r2;
  }

  void swap_axes(int a1, int a2) {
    std::swap(v[a1], v[a2]);
    int lo = std::min(a1, a2), hi = std::max(a1, a2);
    if (lo == 0 && hi == 1) {
      // S (x) S maps XX<->YY
      Mat2 s = (Mat2() << 1, 0, 0, kI).finished();
      conjugate(s, s);
    } else if (lo == 1 && hi == 2) {
      // Rx(pi/2) (x) Rx(pi/2) maps YY<->ZZ
      double c = std::cos(kPi / 4), s = std::sin(kPi / 4);
      Mat2 rx = (Mat2() << c, -kI * s, -kI * s, c).finished();
      conjugate(rx, rx);
    } else {
      // Ry(pi/2) (x) Ry(pi/2) maps XX<->ZZ
      double c = std::cos(kPi / 4), s = std::sin(kPi / 4);
      Mat2 ry = (Mat2() << c, -s, s, c).finished();
      conjugate(ry, ry);
    }
  }

  // Flip signs of the two axes other than `fixed`.
  void flip_pair(int fixed) {
    for (int a = 0; a < 3; ++a) {
      if (a != fixed) v[a] = -v[a];
    }
    conjugate(sigma(fixed), Mat2::Identity());
  }
};

}  // namespace

LocalDecomposition canonicalize_with_locals(double x, double y, double z) {
  Reducer red{{x, y, z}};
  // 1. wrap each exponent into (-pi/4, pi/4]
  for (int a = 0; a < 3; ++a) {
    long n = std::lround(std::floor(red.v[a] / (kPi / 2) + 0.5));
    red.shift(a, n);
    if (red.v[a] <= -kPi / 4 + 1e-14) red.shift(a, -1);
  }
  // 2. sort by |value| descending
  auto abs_v = [&](int a) { return std::abs(red.v[a]); };
  if (abs_v(0) < abs_v(1)) red.swap_axes(0, 1);
  if (abs_v(1) < abs_v(2)) red.swap_axes(1, 2);
  if (abs_v(0) < abs_v(1)) red.swap_axes(0, 1);
  // 3. make x, y >= 0
  if (red.v[0] < 0 && red.v[1] < 0) {
    red.flip_pair(2);
  } else if (red.v[0] < 0) {
    red.flip_pair(1);
  }
  if (red.v[1] < 0) red.flip_pair(0);
  // 4. x = pi/4 edge: require z >= 0 via the (pi/2 - x, y, -z) reflection
  if (red.v[0] > kPi / 4 - 1e-12 && red.v[2] < -1e-14) {
    red.flip_pair(1);   // (x,z) -> (-x,-z)
    red.shift(0, -1);   // x -> x + pi/2
  }
  LocalDecomposition out;
  out.coordinate = {red.v[0], red.v[1], red.v[2]};
  out.v1 = red.l1;
  out.v2 = red.l2;
  out.v3 = red.r1;
  out.v4 = red.r2;
  out.phase = red.phase;
  return out;
}

WeylCoordinate canonicalize_coordinate(double x, double y, double z) {
  return canonicalize_with_locals(x, y, z).coordinate;
}

namespace {

// Um = O1 * diag(e^{i phi}) * O2 with O1, O2 in SO(4), for Um = M^dag su M.
struct MagicSplit {
  Eigen::MatrixXd o1, o2;
  std::array<double, 4> phi;
};

MagicSplit magic_split(const Mat4& um) {
  Mat4 p = um * um.transpose();
  p = ((p + p.transpose()) / 2).eval();
  SymUnitaryEig eig = sym_unitary_eig(p);
  std::array<double, 4> phi;
  for (int i = 0; i < 4; ++i) phi[i] = std::arg(eig.diagonal(i)) / 2;
  auto build_o2 = [&](const std::array<double, 4>& ph) {
    Mat4 dinv = Mat4::Zero();
    for (int i = 0; i < 4; ++i) dinv(i, i) = std::exp(-kI * ph[i]);
    return Mat4(dinv * eig.orthogonal.transpose().cast<cplx>() * um);
  };
  Mat4 o2c = build_o2(phi);
  if (o2c.real().determinant() < 0) {
    phi[0] += kPi;  // flip one branch; keeps e^{2 i phi} and flips det(O2)
    o2c = build_o2(phi);
  }
  // Sum of phases is a multiple of 2*pi since det O1 = det O2 = det Um = 1;
  // push it into phi[0] so the linear solve below is exact.
  double s = phi[0] + phi[1] + phi[2] + phi[3];
  phi[0] -= 2 * kPi * std::round(s / (2 * kPi));
  MagicSplit out;
  out.o1 = eig.orthogonal;
  out.o2 = o2c.real();
  out.phi = phi;
  return out;
}

}  // namespace

LocalDecomposition canonical_decompose(const Mat4& u) {
  if (!is_unitary(u)) {
    throw NumericsError("canonical_decompose: input is not unitary");
  }
  cplx det = u.determinant();
  cplx root = std::pow(det, 0.25);
  Mat4 su = u / root;
  const Mat4& m = magic_basis();
  Mat4 um = m.adjoint() * su * m;
  MagicSplit ms = magic_split(um);
  // Magic-basis diagonal of Can(x,y,z) is e^{-i theta} with
  // theta = (x-y+z, x+y-z, -x-y-z, -x+y+z); invert from theta = -phi.
  double t0 = -ms.phi[0], t1 = -ms.phi[1], t3 = -ms.phi[3];
  double x = (t0 + t1) / 2, y = (t1 + t3) / 2, z = (t0 + t3) / 2;
  Mat4 left = m * ms.o1.cast<cplx>() * m.adjoint();
  Mat4 right = m * ms.o2.cast<cplx>() * m.adjoint();
  LocalDecomposition inner = canonicalize_with_locals(x, y, z);
  KronFactors lf = factor_kron(left * kron2(inner.v1, inner.v2));
  KronFactors rf = factor_kron(kron2(inner.v3, inner.v4) * right);
  LocalDecomposition out;
  out.coordinate = inner.coordinate;
  out.v1 = lf.a;
  out.v2 = lf.b;
  out.v3 = rf.a;
  out.v4 = rf.b;
  out.phase = root * inner.phase * lf.phase * rf.phase;
  return out;
}

WeylCoordinate weyl_coordinate_of(const Mat4& u) {
  if (!is_unitary(u)) {
    throw NumericsError("weyl_coordinate_of: input is not unitary");
  }
  cplx det = u.determinant();
  Mat4 su = u / std::pow(det, 0.25);
  const Mat4& m = magic_basis();
  Mat4 um = m.adjoint() * su * m;
  MagicSplit ms = magic_split(um);
  double t0 = -ms.phi[0], t1 = -ms.phi[1], t3 = -ms.phi[3];
  return canonicalize_coordinate((t0 + t1) / 2, (t1 + t3) / 2, (t0 + t3) / 2);
}

WeylCoordinate mirror(const WeylCoordinate& c) {
  if (c.z >= 0) {
    return canonicalize_coordinate(kPi / 4 - c.z, kPi / 4 - c.y, c.x - kPi / 4);
  }
  return canonicalize_coordinate(kPi / 4 + c.z, kPi / 4 - c.y, kPi / 4 - c.x);
}

bool local_equivalent(const Mat4& u, const Mat4& v, double tol) {
  return weyl_coordinate_of(u).approx_equal(weyl_coordinate_of(v), tol);
}

bool is_near_identity(const WeylCoordinate& c, double r) {
  return c.l1_norm() < r;
}

Mat4 random_su4(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat4 g;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g(i, j) = cplx(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<Mat4> qr(g);
  Mat4 q = qr.householderQ();
  Mat4 r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < 4; ++i) {
    cplx d = r(i, i);
    q.col(i) *= d / std::abs(d);
  }
  q /= std::pow(q.determinant(), 0.25);
  return q;
}

}  // namespace reqisc
