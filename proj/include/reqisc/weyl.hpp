#pragma once

#include <random>

#include "reqisc/numerics.hpp"

namespace reqisc {

// Pauli and related constants.
const Mat2& pauli_i();
const Mat2& pauli_x();
const Mat2& pauli_y();
const Mat2& pauli_z();
const Mat4& sigma_xx();
const Mat4& sigma_yy();
const Mat4& sigma_zz();
const Mat4& magic_basis();        // M
const Mat4& magic_conj_flip();    // D' = diag(1,-1,1,-1), with M D' = conj(M)

Mat4 kron2(const Mat2& a, const Mat2& b);

// The (x, y, z) nonlocal class of a 2Q gate. Canonical instances satisfy
// pi/4 >= x >= y >= |z| and z >= 0 when x = pi/4.
struct WeylCoordinate {
  double x = 0, y = 0, z = 0;

  double l1_norm() const { return std::abs(x) + std::abs(y) + std::abs(z); }
  bool in_chamber(double tol = 1e-9) const;
  bool approx_equal(const WeylCoordinate& o, double tol = 1e-8) const;
};

// Can(x,y,z) = exp(-i (x XX + y YY + z ZZ)).
Mat4 canonical_gate(const WeylCoordinate& c);

// U = phase * (v1 (x) v2) * Can(coordinate) * (v3 (x) v4).
struct LocalDecomposition {
  WeylCoordinate coordinate;
  Mat2 v1, v2, v3, v4;
  cplx phase;

  Mat4 reconstruct() const;
};

LocalDecomposition canonical_decompose(const Mat4& u);

// Chamber representative of an arbitrary exponent triple. Can(raw) and
// Can(result) are locally equivalent.
WeylCoordinate canonicalize_coordinate(double x, double y, double z);

// Same reduction, but also reporting the local factors:
//   Can(raw) = phase * (v1 (x) v2) * Can(coordinate) * (v3 (x) v4).
LocalDecomposition canonicalize_with_locals(double x, double y, double z);

// Coordinate of SWAP * Can(c).
WeylCoordinate mirror(const WeylCoordinate& c);

bool local_equivalent(const Mat4& u, const Mat4& v, double tol = 1e-8);

bool is_near_identity(const WeylCoordinate& c, double r);

// Haar-distributed element of SU(4). Deterministic for a given engine state.
Mat4 random_su4(std::mt19937_64& rng);

// Coordinate-only fast path (no local factor extraction).
WeylCoordinate weyl_coordinate_of(const Mat4& u);

// Split a 4x4 Kronecker product into phase * (a (x) b) with a, b in SU(2).
struct KronFactors {
  Mat2 a, b;
  cplx phase;
};
KronFactors factor_kron(const Mat4& k);

}  // namespace reqisc
