#include "reqisc/hamiltonian.hpp"

#include <gtest/gtest.h>

#include <random>

namespace reqisc {
namespace {

Mat4 random_hermitian4(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Mat4 m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = cplx(gauss(rng), gauss(rng));
  return (m + m.adjoint()) / 2;
}

TEST(PauliDecompose, BasisCases) {
  CouplingHamiltonian h;
  h.matrix = sigma_xx();
  auto c = pauli_decompose(h);
  EXPECT_NEAR(c(1, 1), 1.0, 1e-14);
  EXPECT_NEAR(c.cwiseAbs().sum(), 1.0, 1e-12);

  h.matrix = kron2(pauli_z(), pauli_i());
  c = pauli_decompose(h);
  EXPECT_NEAR(c(3, 0), 1.0, 1e-14);
  EXPECT_NEAR(c.cwiseAbs().sum(), 1.0, 1e-12);
}

TEST(PauliDecompose, RoundTripsRandomHermitian) {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    auto h = CouplingHamiltonian::from_matrix(random_hermitian4(rng));
    auto c = pauli_decompose(h);
    auto h2 = CouplingHamiltonian::from_pauli(c);
    EXPECT_LT(max_abs(MatX(h.matrix - h2.matrix)), 1e-12);
  }
}

TEST(NormalFormOp, XyPreset) {
  auto nf = normal_form(preset(CouplingPreset::xy, 1.0));
  EXPECT_NEAR(nf.a, 0.5, 1e-12);
  EXPECT_NEAR(nf.b, 0.5, 1e-12);
  EXPECT_NEAR(nf.c, 0.0, 1e-12);
  EXPECT_LT(max_abs(MatX(nf.reconstruct() -
                         preset(CouplingPreset::xy, 1.0).matrix)),
            1e-9);
}

TEST(NormalFormOp, XxPresetAndScaling) {
  auto nf = normal_form(preset(CouplingPreset::xx, 1.0));
  EXPECT_NEAR(nf.a, 1.0, 1e-12);
  EXPECT_NEAR(nf.b, 0.0, 1e-12);
  EXPECT_NEAR(nf.c, 0.0, 1e-12);
  auto nf2 = normal_form(preset(CouplingPreset::xy, 2.0));
  EXPECT_NEAR(nf2.a, 1.0, 1e-12);
  EXPECT_NEAR(nf2.b, 1.0, 1e-12);
}

TEST(NormalFormOp, YyWithLocalZTerms) {
  // g YY + local Z terms: normal form (g, 0, 0) with nontrivial frames.
  CouplingHamiltonian h;
  h.matrix = 1.3 * sigma_yy() + 0.2 * kron2(pauli_z(), pauli_i()) +
             0.7 * kron2(pauli_i(), pauli_z());
  auto nf = normal_form(h);
  EXPECT_NEAR(nf.a, 1.3, 1e-12);
  EXPECT_NEAR(nf.b, 0.0, 1e-12);
  EXPECT_NEAR(nf.c, 0.0, 1e-12);
  EXPECT_LT(max_abs(MatX(nf.reconstruct() - h.matrix)), 1e-9);
  EXPECT_GT(max_abs(MatX(nf.u1 - Mat2::Identity())), 0.1);
}

TEST(NormalFormOp, RejectsPurelyLocal) {
  CouplingHamiltonian h;
  h.matrix = kron2(pauli_z(), pauli_i()) + 0.5 * kron2(pauli_i(), pauli_x());
  EXPECT_THROW(normal_form(h), NumericsError);
}

TEST(NormalFormOp, RandomHermitianInvariants) {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 1000; ++rep) {
    auto h = CouplingHamiltonian::from_matrix(random_hermitian4(rng));
    auto nf = normal_form(h);
    ASSERT_GE(nf.a, nf.b - 1e-12);
    ASSERT_GE(nf.b, std::abs(nf.c) - 1e-12);
    ASSERT_GT(nf.a, 0.0);
    ASSERT_LT(max_abs(MatX(nf.reconstruct() - h.matrix)), 1e-9) << rep;
  }
}

TEST(NormalFormOp, LocalConjugationInvariance) {
  std::mt19937_64 rng(33);
  std::normal_distribution<double> gauss;
  auto random_su2 = [&] {
    Mat2 m;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m(i, j) = cplx(gauss(rng), gauss(rng));
    Eigen::HouseholderQR<Mat2> qr(m);
    Mat2 q = qr.householderQ();
    return Mat2(q / std::sqrt(q.determinant()));
  };
  for (int rep = 0; rep < 200; ++rep) {
    auto h = CouplingHamiltonian::from_matrix(random_hermitian4(rng));
    auto nf = normal_form(h);
    Mat4 frame = kron2(random_su2(), random_su2());
    auto h2 = CouplingHamiltonian::from_matrix(
        Mat4(frame * h.matrix * frame.adjoint()));
    auto nf2 = normal_form(h2);
    ASSERT_NEAR(nf.a, nf2.a, 1e-9);
    ASSERT_NEAR(nf.b, nf2.b, 1e-9);
    ASSERT_NEAR(nf.c, nf2.c, 1e-9);
  }
}

TEST(NormalFormOp, ScalingLaw) {
  std::mt19937_64 rng(55);
  auto h = CouplingHamiltonian::from_matrix(random_hermitian4(rng));
  auto nf = normal_form(h);
  CouplingHamiltonian hk;
  hk.matrix = 2.5 * h.matrix;
  auto nfk = normal_form(hk);
  EXPECT_NEAR(nfk.a, 2.5 * nf.a, 1e-12);
  EXPECT_NEAR(nfk.b, 2.5 * nf.b, 1e-12);
  EXPECT_NEAR(nfk.c, 2.5 * nf.c, 1e-12);
}

TEST(CouplingJson, PauliAndMatrixForms) {
  auto h1 = parse_coupling_json(R"({"pauli": {"XX": 0.5, "YY": 0.5}, "g": 2.0})");
  EXPECT_LT(max_abs(MatX(h1.matrix - preset(CouplingPreset::xy, 2.0).matrix)),
            1e-12);
  auto h2 = parse_coupling_json(
      R"({"matrix": [[[0,0],[0,0],[0,0],[1,0]],
                     [[0,0],[0,0],[1,0],[0,0]],
                     [[0,0],[1,0],[0,0],[0,0]],
                     [[1,0],[0,0],[0,0],[0,0]]], "g": 1.5})");
  EXPECT_LT(max_abs(MatX(h2.matrix - preset(CouplingPreset::xx, 1.5).matrix)),
            1e-12);
  EXPECT_THROW(parse_coupling_json("{}"), NumericsError);
  EXPECT_THROW(parse_coupling_json(R"({"pauli": {"QQ": 1}})"), NumericsError);
}

}  // namespace
}  // namespace reqisc
