#include "reqisc/hamiltonian.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace reqisc {

namespace {

const Mat2& pauli(int i) {
  switch (i) {
    case 0: return pauli_i();
    case 1: return pauli_x();
    case 2: return pauli_y();
    default: return pauli_z();
  }
}

}  // namespace

CouplingHamiltonian CouplingHamiltonian::from_matrix(const Mat4& m) {
  if (!is_hermitian(m)) {
    throw NumericsError("coupling Hamiltonian must be Hermitian");
  }
  CouplingHamiltonian h;
  h.matrix = m - (m.trace() / 4.0) * Mat4::Identity();
  return h;
}

CouplingHamiltonian CouplingHamiltonian::from_pauli(
    const Eigen::Matrix4d& coeffs) {
  Mat4 m = Mat4::Zero();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i == 0 && j == 0) continue;
      m += coeffs(i, j) * kron2(pauli(i), pauli(j));
    }
  }
  CouplingHamiltonian h;
  h.matrix = m;
  return h;
}

Eigen::Matrix4d pauli_decompose(const CouplingHamiltonian& h) {
  Eigen::Matrix4d c;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      cplx t = (h.matrix * kron2(pauli(i), pauli(j))).trace() / 4.0;
      if (std::abs(t.imag()) > 1e-12) {
        throw NumericsError("pauli_decompose: non-real coefficient");
      }
      c(i, j) = t.real();
    }
  }
  return c;
}

Mat4 NormalForm::canonical_part() const {
  return a * sigma_xx() + b * sigma_yy() + c * sigma_zz();
}

Mat4 NormalForm::reconstruct() const {
  Mat4 frame = kron2(u1, u2);
  return frame * canonical_part() * frame.adjoint() +
         kron2(h1_res, pauli_i()) + kron2(pauli_i(), h2_res);
}

namespace {

// Lift R in SO(3) to u in SU(2) with u sigma_k u^dag = sum_j R_jk sigma_j.
// Quaternion extraction; the lift with nonnegative trace is returned.
Mat2 su2_from_so3(const Eigen::Matrix3d& r) {
  double w, qx, qy, qz;
  double tr = r.trace();
  if (tr > 0) {
    double s = std::sqrt(tr + 1.0) * 2;
    w = 0.25 * s;
    qx = (r(2, 1) - r(1, 2)) / s;
    qy = (r(0, 2) - r(2, 0)) / s;
    qz = (r(1, 0) - r(0, 1)) / s;
  } else if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
    double s = std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2)) * 2;
    w = (r(2, 1) - r(1, 2)) / s;
    qx = 0.25 * s;
    qy = (r(0, 1) + r(1, 0)) / s;
    qz = (r(0, 2) + r(2, 0)) / s;
  } else if (r(1, 1) > r(2, 2)) {
    double s = std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2)) * 2;
    w = (r(0, 2) - r(2, 0)) / s;
    qx = (r(0, 1) + r(1, 0)) / s;
    qy = 0.25 * s;
    qz = (r(1, 2) + r(2, 1)) / s;
  } else {
    double s = std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1)) * 2;
    w = (r(1, 0) - r(0, 1)) / s;
    qx = (r(0, 2) + r(2, 0)) / s;
    qy = (r(1, 2) + r(2, 1)) / s;
    qz = 0.25 * s;
  }
  if (w < 0) {
    w = -w;
    qx = -qx;
    qy = -qy;
    qz = -qz;
  }
  constexpr cplx kI{0.0, 1.0};
  return w * Mat2::Identity() -
         kI * (qx * pauli_x() + qy * pauli_y() + qz * pauli_z());
}

}  // namespace

NormalForm normal_form(const CouplingHamiltonian& h) {
  Eigen::Matrix4d c = pauli_decompose(h);
  Eigen::Matrix3d two_body = c.block<3, 3>(1, 1);
  if (two_body.norm() < 1e-12) {
    throw NumericsError("normal_form: no entangling coupling");
  }
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      two_body, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d r1 = svd.matrixU();
  Eigen::Matrix3d r2 = svd.matrixV();
  Eigen::Vector3d sv = svd.singularValues();
  double e1 = r1.determinant() < 0 ? -1.0 : 1.0;
  double e2 = r2.determinant() < 0 ? -1.0 : 1.0;
  r1.col(2) *= e1;
  r2.col(2) *= e2;
  NormalForm nf;
  nf.a = sv(0);
  nf.b = sv(1);
  nf.c = sv(2) * e1 * e2;
  nf.u1 = su2_from_so3(r1);
  nf.u2 = su2_from_so3(r2);
  for (int i = 1; i < 4; ++i) {
    nf.h1_res += c(i, 0) * pauli(i);
    nf.h2_res += c(0, i) * pauli(i);
  }
  return nf;
}

CouplingHamiltonian preset(CouplingPreset kind, double g) {
  Mat4 m;
  if (kind == CouplingPreset::xy) {
    m = (g / 2) * (sigma_xx() + sigma_yy());
  } else {
    m = g * sigma_xx();
  }
  CouplingHamiltonian h;
  h.matrix = m;
  return h;
}

CouplingHamiltonian parse_coupling_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  double g = j.value("g", 1.0);
  if (j.contains("pauli")) {
    static const std::string axes = "IXYZ";
    Eigen::Matrix4d coeffs = Eigen::Matrix4d::Zero();
    for (auto it = j["pauli"].begin(); it != j["pauli"].end(); ++it) {
      const std::string& key = it.key();
      if (key.size() != 2) {
        throw NumericsError("coupling file: bad Pauli label '" + key + "'");
      }
      auto idx = [&](char ch) {
        auto p = axes.find(ch);
        if (p == std::string::npos) {
          throw NumericsError("coupling file: bad Pauli label '" + key + "'");
        }
        return static_cast<int>(p);
      };
      coeffs(idx(key[0]), idx(key[1])) = it->get<double>();
    }
    coeffs *= g;
    return CouplingHamiltonian::from_pauli(coeffs);
  }
  if (j.contains("matrix")) {
    Mat4 m;
    const auto& rows = j["matrix"];
    if (rows.size() != 4) throw NumericsError("coupling file: need 4x4 matrix");
    for (int i = 0; i < 4; ++i) {
      for (int k = 0; k < 4; ++k) {
        const auto& e = rows[i][k];
        m(i, k) = cplx(e[0].get<double>(), e[1].get<double>());
      }
    }
    return CouplingHamiltonian::from_matrix(g * m);
  }
  throw NumericsError("coupling file: expected 'pauli' or 'matrix' key");
}

CouplingHamiltonian coupling_from_spec(const std::string& spec, double g) {
  if (spec == "xy") return preset(CouplingPreset::xy, g);
  if (spec == "xx") return preset(CouplingPreset::xx, g);
  if (spec.rfind("file:", 0) == 0) {
    std::ifstream in(spec.substr(5));
    if (!in) throw NumericsError("cannot open coupling file " + spec.substr(5));
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_coupling_json(ss.str());
  }
  throw NumericsError("unknown coupling spec '" + spec + "'");
}

}  // namespace reqisc
