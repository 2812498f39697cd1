#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>

namespace reqisc {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using MatX = Eigen::MatrixXcd;
using Vec2 = Eigen::Vector2d;

// Default tolerances for structural checks and root residuals. Overridable
// per call where a function takes an explicit tol argument.
constexpr double kStructuralTol = 1e-10;
constexpr double kRootTol = 1e-10;

class NumericsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double max_abs(const MatX& m);

bool is_unitary(const MatX& u, double tol = kStructuralTol);
bool is_hermitian(const MatX& h, double tol = 1e-12);

// e^{-i H t} for Hermitian H, via eigendecomposition.
MatX expm_hermitian(const MatX& h, double t);

// Diagonalize a symmetric unitary S as O * diag(d) * O^T with O real special
// orthogonal. Re(S) and Im(S) are commuting real symmetric matrices; they are
// brought to a common eigenbasis by Jacobi rotations.
struct SymUnitaryEig {
  Eigen::MatrixXd orthogonal;   // O, det +1
  Eigen::VectorXcd diagonal;    // d, unit modulus entries
};
SymUnitaryEig sym_unitary_eig(const MatX& s, double tol = 1e-12);

// 2-d root finding on a box with optional feasibility predicate. Deterministic
// 8x8 grid of Newton starts, then up to 64 seeded quasi-random restarts. Among
// converged candidates returns the one minimizing `preference`.
struct RootOptions {
  Vec2 lo{0.0, 0.0};
  Vec2 hi{1.0, 1.0};
  double tol = kRootTol;
  int grid = 8;
  int extra_restarts = 64;
  int max_iters = 120;
  std::function<bool(const Vec2&)> feasible;          // optional domain cut
  std::function<double(const Vec2&)> preference;      // optional tie-break
};
struct RootResult {
  Vec2 point;
  double residual;
};
std::optional<RootResult> solve_root_2d(
    const std::function<Vec2(const Vec2&)>& f, const RootOptions& opts);

// splitmix64: cheap deterministic seed derivation for partitioned sampling.
std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace reqisc
