#pragma once

#include <string>

#include "reqisc/weyl.hpp"

namespace reqisc {

// A two-qubit coupling Hamiltonian, stored as a 4x4 Hermitian matrix in
// energy units of g. The identity component is dropped (global phase).
struct CouplingHamiltonian {
  Mat4 matrix = Mat4::Zero();

  static CouplingHamiltonian from_matrix(const Mat4& m);
  static CouplingHamiltonian from_pauli(const Eigen::Matrix4d& coeffs);
};

// Pauli coefficient table c_ij over {I,X,Y,Z} (x) {I,X,Y,Z}:
// H = sum_ij c_ij sigma_i (x) sigma_j.
Eigen::Matrix4d pauli_decompose(const CouplingHamiltonian& h);

// H = (u1 (x) u2) (a XX + b YY + c ZZ) (u1 (x) u2)^dag + h1_res (x) I
//     + I (x) h2_res, with a >= b >= |c|, a > 0.
struct NormalForm {
  double a = 0, b = 0, c = 0;
  Mat2 u1 = Mat2::Identity(), u2 = Mat2::Identity();
  Mat2 h1_res = Mat2::Zero(), h2_res = Mat2::Zero();

  double coupling_strength() const { return a + b + std::abs(c); }
  Mat4 canonical_part() const;  // a XX + b YY + c ZZ
  Mat4 reconstruct() const;
};

NormalForm normal_form(const CouplingHamiltonian& h);

enum class CouplingPreset { xy, xx };

// xy -> (g/2)(XX + YY); xx -> g XX.
CouplingHamiltonian preset(CouplingPreset kind, double g);

// JSON coupling file: {"pauli": {"XX": 0.5, ...}, "g": 1.0} or
// {"matrix": [[[re,im], ...] ...], "g": 1.0}. Entries are scaled by g.
CouplingHamiltonian parse_coupling_json(const std::string& text);

// "xy" | "xx" | "file:<path>" with strength g (presets) or file scaling.
CouplingHamiltonian coupling_from_spec(const std::string& spec, double g);

}  // namespace reqisc
