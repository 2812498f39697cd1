#include "reqisc/weyl.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "reqisc/scheme.hpp"

namespace reqisc {
namespace {

constexpr double kPi = std::numbers::pi;

WeylCoordinate random_chamber_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  while (true) {
    double x = uni(rng) * kPi / 4;
    double y = uni(rng) * x;
    double z = (2 * uni(rng) - 1) * y;
    WeylCoordinate c{x, y, z};
    if (c.in_chamber(0) && (z >= 0 || x < kPi / 4 - 1e-9)) return c;
  }
}

TEST(CanonicalDecompose, CnotCoordinate) {
  auto d = canonical_decompose(gate_cnot());
  EXPECT_NEAR(d.coordinate.x, kPi / 4, 1e-10);
  EXPECT_NEAR(d.coordinate.y, 0, 1e-10);
  EXPECT_NEAR(d.coordinate.z, 0, 1e-10);
  EXPECT_LT(max_abs(MatX(d.reconstruct() - gate_cnot())), 1e-9);
}

TEST(CanonicalDecompose, IdentityIsOrigin) {
  auto d = canonical_decompose(Mat4::Identity());
  EXPECT_LT(d.coordinate.l1_norm(), 1e-10);
  EXPECT_LT(max_abs(MatX(d.reconstruct() - Mat4::Identity())), 1e-9);
}

TEST(CanonicalDecompose, AcceptsGlobalPhase) {
  Mat4 u = std::exp(cplx(0, 1.234)) * gate_iswap();
  auto d = canonical_decompose(u);
  EXPECT_NEAR(d.coordinate.x, kPi / 4, 1e-9);
  EXPECT_NEAR(d.coordinate.y, kPi / 4, 1e-9);
  EXPECT_LT(max_abs(MatX(d.reconstruct() - u)), 1e-9);
}

TEST(CanonicalDecompose, RejectsNonUnitary) {
  Mat4 m = 2.0 * Mat4::Identity();
  EXPECT_THROW(canonical_decompose(m), NumericsError);
}

TEST(CanonicalDecompose, HaarRoundTrip) {
  std::mt19937_64 rng(42);
  for (int rep = 0; rep < 1000; ++rep) {
    Mat4 u = random_su4(rng);
    auto d = canonical_decompose(u);
    ASSERT_TRUE(d.coordinate.in_chamber()) << "rep " << rep;
    ASSERT_LT(max_abs(MatX(d.reconstruct() - u)), 1e-9) << "rep " << rep;
  }
}

TEST(CanonicalDecompose, CliffordTargets) {
  // Degenerate spectra: CZ, SWAP, iSWAP, CNOT and tensor products.
  std::vector<Mat4> gates = {gate_cz(), gate_swap(), gate_iswap(), gate_cnot(),
                             kron2(pauli_x(), pauli_z()),
                             Mat4(gate_cnot() * gate_swap())};
  for (const auto& g : gates) {
    auto d = canonical_decompose(g);
    EXPECT_LT(max_abs(MatX(d.reconstruct() - g)), 1e-9);
  }
}

TEST(CanonicalizeCoordinate, FixedPoints) {
  WeylCoordinate c0 = canonicalize_coordinate(0, 0, 0);
  EXPECT_LT(c0.l1_norm(), 1e-12);
  WeylCoordinate c1 = canonicalize_coordinate(kPi / 4, kPi / 4, -kPi / 4);
  EXPECT_NEAR(c1.x, kPi / 4, 1e-12);
  EXPECT_NEAR(c1.y, kPi / 4, 1e-12);
  EXPECT_NEAR(c1.z, kPi / 4, 1e-12);
}

TEST(CanonicalizeCoordinate, LocallyEquivalentToRaw) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(-3.0, 3.0);
  for (int rep = 0; rep < 200; ++rep) {
    double x = uni(rng), y = uni(rng), z = uni(rng);
    auto d = canonicalize_with_locals(x, y, z);
    ASSERT_TRUE(d.coordinate.in_chamber());
    Mat4 raw = canonical_gate({x, y, z});
    ASSERT_LT(max_abs(MatX(d.reconstruct() - raw)), 1e-9)
        << x << " " << y << " " << z;
    // idempotent
    auto c2 = canonicalize_coordinate(d.coordinate.x, d.coordinate.y,
                                      d.coordinate.z);
    ASSERT_TRUE(c2.approx_equal(d.coordinate, 1e-12));
  }
}

TEST(CanonicalizeCoordinate, OutOfChamberExample) {
  auto c = canonicalize_coordinate(0.9, 0.2, 0.1);
  EXPECT_TRUE(c.in_chamber());
  Mat4 raw = canonical_gate({0.9, 0.2, 0.1});
  EXPECT_TRUE(local_equivalent(raw, canonical_gate(c), 1e-8));
}

TEST(Mirror, SwapLaw) {
  WeylCoordinate id{0, 0, 0};
  auto m = mirror(id);
  EXPECT_NEAR(m.x, kPi / 4, 1e-12);
  EXPECT_NEAR(m.y, kPi / 4, 1e-12);
  EXPECT_NEAR(m.z, kPi / 4, 1e-12);
  auto back = mirror(m);
  EXPECT_LT(back.l1_norm(), 1e-12);
  // CNOT mirrors onto the iSWAP class
  auto mc = mirror({kPi / 4, 0, 0});
  auto direct = weyl_coordinate_of(Mat4(gate_swap() * gate_cnot()));
  EXPECT_TRUE(mc.approx_equal(direct, 1e-9));
}

TEST(Mirror, MatchesSwapComposition) {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 1000; ++rep) {
    WeylCoordinate c = random_chamber_point(rng);
    Mat4 g = canonical_gate(c);
    auto by_formula = mirror(c);
    auto by_decompose = weyl_coordinate_of(Mat4(gate_swap() * g));
    ASSERT_TRUE(by_formula.approx_equal(by_decompose, 1e-9))
        << c.x << " " << c.y << " " << c.z;
    auto twice = mirror(by_formula);
    ASSERT_TRUE(twice.approx_equal(c, 1e-9));
  }
}

TEST(LocalEquivalent, KnownPairs) {
  EXPECT_TRUE(local_equivalent(gate_cnot(), gate_cz()));
  EXPECT_TRUE(local_equivalent(gate_b(), gate_b()));
  EXPECT_FALSE(local_equivalent(gate_cnot(), gate_iswap()));
}

TEST(LocalEquivalent, EquivalenceRelationOnSamples) {
  std::mt19937_64 rng(23);
  std::vector<Mat4> reps;
  for (int i = 0; i < 6; ++i) reps.push_back(random_su4(rng));
  // dress each representative with random locals; classes must be preserved
  auto dress = [&](const Mat4& u) {
    Mat4 l = kron2(canonical_decompose(random_su4(rng)).v1,
                   canonical_decompose(random_su4(rng)).v2);
    Mat4 r = kron2(canonical_decompose(random_su4(rng)).v3,
                   canonical_decompose(random_su4(rng)).v4);
    return Mat4(l * u * r);
  };
  for (const auto& u : reps) {
    Mat4 a = dress(u), b = dress(u);
    EXPECT_TRUE(local_equivalent(u, u));       // reflexive
    EXPECT_TRUE(local_equivalent(a, b));
    EXPECT_EQ(local_equivalent(a, b), local_equivalent(b, a));  // symmetric
  }
  for (size_t i = 0; i < reps.size(); ++i) {
    for (size_t j = i + 1; j < reps.size(); ++j) {
      // Haar pairs are never locally equivalent
      EXPECT_FALSE(local_equivalent(reps[i], reps[j]));
    }
  }
}

TEST(NearIdentity, L1Threshold) {
  EXPECT_TRUE(is_near_identity({0, 0, 0}, 0.1));
  EXPECT_FALSE(is_near_identity({kPi / 4, 0, 0}, 0.1));
  EXPECT_TRUE(is_near_identity({0.02, 0.01, 0.01}, 0.05));
}

TEST(RandomSu4, DeterministicAndUnitary) {
  std::mt19937_64 a(123), b(123);
  Mat4 u1 = random_su4(a), u2 = random_su4(b);
  EXPECT_EQ(max_abs(MatX(u1 - u2)), 0.0);
  EXPECT_TRUE(is_unitary(u1, 1e-12));
  EXPECT_LT(std::abs(u1.determinant() - cplx(1, 0)), 1e-10);
}

TEST(RandomSu4, HaarTraceMoment) {
  // \int |Tr U|^2 dU = 1 over the unitary group.
  std::mt19937_64 rng(2024);
  double acc = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    acc += std::norm(random_su4(rng).trace());
  }
  EXPECT_NEAR(acc / n, 1.0, 0.05);
}

TEST(FactorKron, RecoversFactors) {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 100; ++rep) {
    auto d = canonical_decompose(random_su4(rng));
    Mat4 k = std::exp(cplx(0, 0.3)) * kron2(d.v1, d.v2);
    auto f = factor_kron(k);
    EXPECT_LT(max_abs(MatX(f.phase * kron2(f.a, f.b) - k)), 1e-10);
    EXPECT_LT(std::abs(f.a.determinant() - cplx(1, 0)), 1e-10);
    EXPECT_LT(std::abs(f.b.determinant() - cplx(1, 0)), 1e-10);
  }
}

}  // namespace
}  // namespace reqisc
