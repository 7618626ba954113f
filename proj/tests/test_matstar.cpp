#include "doctest.h"

#include <cmath>

#include "conesheaf/almost.hpp"
#include "conesheaf/matstar.hpp"
#include "conesheaf/rng.hpp"
#include "test_support.hpp"

using namespace conesheaf;
using namespace conesheaf::testing;

namespace {

CMatrix diag2(Complex a, Complex b) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

// Seeded normal with a known decomposition, built as U diag U*.
NormalMatrix seeded_normal(std::size_t n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  CMatrix u = random_unitary(n, rng);
  Eigen::VectorXcd d = random_complex_vector(n, rng);
  return NormalMatrix(u * d.asDiagonal() * u.adjoint(), 1e-9);
}

PartitionOfUnity seeded_apex_partition(const FinSpace& space, std::uint64_t seed) {
  SplitMix64 rng(seed);
  const std::size_t n = space.size();
  CMatrix u = random_unitary(n, rng);
  std::vector<CMatrix> projections;
  for (std::size_t p = 0; p < n; ++p) {
    projections.push_back(u.col(static_cast<Eigen::Index>(p)) *
                          u.col(static_cast<Eigen::Index>(p)).adjoint());
  }
  return PartitionOfUnity(space, std::move(projections));
}

const CMatrix kP = diag2(1, 0);
const CMatrix kQ = (CMatrix(2, 2) << 0.5, 0.5, 0.5, 0.5).finished();

}  // namespace

TEST_CASE("strong matrix types validate their invariants") {
  CHECK_THROWS_AS(NormalMatrix((CMatrix(2, 2) << 1, 1, 0, 1).finished()), Error);
  CHECK_THROWS_AS(Unitary(2.0 * CMatrix::Identity(2, 2)), Error);
  CHECK_NOTHROW(Unitary{pauli_x()});
  CHECK_NOTHROW(Projection{kQ});
  CHECK_THROWS_AS(Projection((CMatrix(2, 2) << 0.5, 0.4, 0.4, 0.5).finished()), Error);
}

TEST_CASE("spectral decomposition: frozen cases") {
  SUBCASE("diag(1,2,2)") {
    CMatrix m = CMatrix::Zero(3, 3);
    m(0, 0) = 1;
    m(1, 1) = 2;
    m(2, 2) = 2;
    SpectralDecomposition dec = spectral_decompose(NormalMatrix(m));
    REQUIRE(dec.eigenvalues.size() == 2);
    CHECK(std::abs(dec.eigenvalues[0] - Complex(1, 0)) < 1e-12);
    CHECK(std::abs(dec.eigenvalues[1] - Complex(2, 0)) < 1e-12);
    CMatrix p1 = CMatrix::Zero(3, 3);
    p1(0, 0) = 1;
    CHECK((dec.projections[0] - p1).norm() < 1e-12);
    CHECK((dec.projections[1] - (CMatrix::Identity(3, 3) - p1)).norm() < 1e-12);
  }
  SUBCASE("sigma_x has eigenvalues ±1 with projections (I ± sigma_x)/2") {
    SpectralDecomposition dec = spectral_decompose(NormalMatrix(pauli_x()));
    REQUIRE(dec.eigenvalues.size() == 2);
    CHECK(std::abs(dec.eigenvalues[0] - Complex(-1, 0)) < 1e-12);
    CHECK(std::abs(dec.eigenvalues[1] - Complex(+1, 0)) < 1e-12);
    CHECK((dec.projections[1] - (CMatrix::Identity(2, 2) + pauli_x()) / 2.0).norm() <
          1e-12);
    CHECK((dec.projections[0] - (CMatrix::Identity(2, 2) - pauli_x()) / 2.0).norm() <
          1e-12);
  }
  SUBCASE("non-normal input is rejected") {
    CMatrix bad(2, 2);
    bad << 1, 1, 0, 1;
    CHECK_THROWS_AS(NormalMatrix{bad}, Error);
  }
}

TEST_CASE("spectral reconstruction on seeded normals up to dim 8") {
  for (std::size_t n = 2; n <= 8; ++n) {
    for (std::uint64_t s = 0; s < 50; ++s) {
      NormalMatrix a = seeded_normal(n, derive_seed(1000 * n, s));
      SpectralDecomposition dec = spectral_decompose(a);
      CHECK((dec.reconstruct() - a.get()).norm() <= 1e-9);
      // Projections form a partition of unity.
      CMatrix sum = CMatrix::Zero(n, n);
      for (const CMatrix& p : dec.projections) {
        CHECK(projection_residual(p) <= 1e-9);
        sum += p;
      }
      CHECK((sum - CMatrix::Identity(n, n)).norm() <= 1e-9);
    }
  }
}

TEST_CASE("functional calculus") {
  SUBCASE("identity function echoes the input") {
    NormalMatrix a = seeded_normal(4, 7);
    NormalMatrix b = apply_function(a, [](Complex z) { return z; });
    CHECK((a.get() - b.get()).norm() <= 1e-9);
  }
  SUBCASE("squaring an involution gives the identity") {
    NormalMatrix z(pauli_z());
    NormalMatrix sq = apply_function(z, [](Complex t) { return t * t; });
    CHECK((sq.get() - CMatrix::Identity(2, 2)).norm() <= 1e-12);
  }
  SUBCASE("composition law on seeded normals") {
    for (std::uint64_t s = 0; s < 20; ++s) {
      NormalMatrix a = seeded_normal(5, derive_seed(42, s));
      auto g = [](Complex t) { return t * t; };
      auto f = [](Complex t) { return t + Complex(1, 0.5); };
      NormalMatrix lhs = apply_function(apply_function(a, g), f);
      NormalMatrix rhs = apply_function(a, [&](Complex t) { return f(g(t)); });
      CHECK((lhs.get() - rhs.get()).norm() <= 1e-9);
    }
  }
  SUBCASE("tables match within cluster_gap and reject gaps") {
    NormalMatrix a(diag2(1, 2));
    SpectrumTable identity_table{{Complex(1, 0), Complex(1, 0)},
                                 {Complex(2, 0), Complex(2, 0)}};
    CHECK((apply_function(a, identity_table).get() - a.get()).norm() <= 1e-12);
    SpectrumTable gappy{{Complex(1, 0), Complex(0, 0)}};
    CHECK_THROWS_AS(apply_function(a, gappy), Error);
  }
}

TEST_CASE("joint diagonalization") {
  SUBCASE("already-diagonal families keep the identity transform") {
    JointDiagResult r = joint_diagonalize({diag2(3, 1), diag2(0, 5)});
    REQUIRE(r.ok);
    CHECK((r.transform - CMatrix::Identity(2, 2)).norm() == 0.0);
  }
  SUBCASE("sigma_z and sigma_x fail with the hand-computed residual") {
    JointDiagResult r = joint_diagonalize({pauli_z(), pauli_x()});
    REQUIRE(!r.ok);
    CHECK(r.bad_i == 0);
    CHECK(r.bad_j == 1);
    CHECK(r.residual == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
  }
  SUBCASE("shared-basis families diagonalize") {
    SplitMix64 rng(11);
    CMatrix u = random_unitary(4, rng);
    std::vector<CMatrix> family;
    for (int k = 0; k < 3; ++k) {
      Eigen::VectorXcd d = random_complex_vector(4, rng);
      family.push_back(u * d.asDiagonal() * u.adjoint());
    }
    JointDiagResult r = joint_diagonalize(family);
    REQUIRE(r.ok);
    for (std::size_t k = 0; k < family.size(); ++k) {
      CMatrix d = r.transform.adjoint() * family[k] * r.transform;
      CMatrix off = d;
      off.diagonal().setZero();
      CHECK(off.norm() <= 1e-8);
    }
  }
  SUBCASE("degenerate spectra still split correctly") {
    // First matrix has a repeated eigenvalue; the second separates it.
    CMatrix a = CMatrix::Zero(3, 3);
    a(0, 0) = 1;
    a(1, 1) = 1;
    a(2, 2) = 2;
    CMatrix b = CMatrix::Zero(3, 3);
    b(0, 1) = 1;
    b(1, 0) = 1;  // acts inside the repeated eigenspace
    JointDiagResult r = joint_diagonalize({a, b});
    REQUIRE(r.ok);
    CMatrix d = r.transform.adjoint() * b * r.transform;
    CMatrix off = d;
    off.diagonal().setZero();
    CHECK(off.norm() <= 1e-8);
  }
}

TEST_CASE("coarse graining") {
  Ex4to3 ex;
  PartitionOfUnity p = seeded_apex_partition(ex.x, 3);
  SUBCASE("to the one-point space: the single projection is the identity") {
    FinSpace one = space("1", {"*"});
    PartitionOfUnity q = coarse_grain(p, FinMap::constant(ex.x, one, 0));
    CHECK((q.projection(0) - CMatrix::Identity(4, 4)).norm() <= 1e-12);
  }
  SUBCASE("along the identity: unchanged") {
    PartitionOfUnity q = coarse_grain(p, FinMap::identity(ex.x));
    for (std::size_t pt = 0; pt < ex.x.size(); ++pt) {
      CHECK((q.projection(pt) - p.projection(pt)).norm() == 0.0);
    }
  }
  SUBCASE("three points onto two: projections add over fibers") {
    FinSpace x3 = space("X3", {"0", "1", "2"});
    FinSpace y2 = space("Y2", {"a", "b"});
    PartitionOfUnity p3 = seeded_apex_partition(x3, 5);
    FinMap f = map_by_labels(x3, y2, {{"0", "a"}, {"1", "a"}, {"2", "b"}});
    PartitionOfUnity q = coarse_grain(p3, f);
    CHECK((q.projection(*y2.index_of("a")) - (p3.projection(0) + p3.projection(1)))
              .norm() == 0.0);
    CHECK((q.projection(*y2.index_of("b")) - p3.projection(2)).norm() == 0.0);
  }
  SUBCASE("functoriality under composition") {
    // Sums are associative; the two groupings only differ by the final
    // rounding of each addition, so the residual sits at machine epsilon.
    FinSpace y2 = space("Y2", {"a", "b"});
    FinSpace one = space("1", {"*"});
    FinMap f = map_by_labels(ex.x, y2,
                             {{"0", "a"}, {"1", "a"}, {"2", "b"}, {"3", "b"}});
    FinMap g = FinMap::constant(y2, one, 0);
    PartitionOfUnity lhs = coarse_grain(p, compose(f, g));
    PartitionOfUnity rhs = coarse_grain(coarse_grain(p, f), g);
    CHECK((lhs.projection(0) - rhs.projection(0)).norm() <= 1e-12);
  }
  SUBCASE("space mismatch throws") {
    FinSpace other = space("O", {"x", "y", "z"});
    CHECK_THROWS_AS(coarse_grain(p, FinMap::identity(other)), Error);
  }
}

TEST_CASE("compatibility of matrix families") {
  Ex4to3 ex;
  SUBCASE("coarse-grainings of one apex partition are compatible") {
    PartitionOfUnity p = seeded_apex_partition(ex.x, 9);
    MatrixFamily fam{ex.cone, {coarse_grain(p, ex.f), coarse_grain(p, ex.g)}};
    CHECK(check_compatibility(fam).compatible);
  }
  SUBCASE("product cone: compatibility is vacuous") {
    Cone pc = product_cone22();
    std::vector<CMatrix> m1{kP, CMatrix::Identity(2, 2) - kP};
    std::vector<CMatrix> m2{kQ, CMatrix::Identity(2, 2) - kQ};
    MatrixFamily fam{pc,
                     {PartitionOfUnity(pc.leg(0).codomain(), m1),
                      PartitionOfUnity(pc.leg(1).codomain(), m2)}};
    CHECK(check_compatibility(fam).compatible);
  }
  SUBCASE("breaking the pushout identity is caught") {
    // beta_f(chi_01) must equal beta_g(chi_0) + beta_g(chi_1); break it.
    auto d4 = [](double a, double b, double c, double d) {
      CMatrix m = CMatrix::Zero(4, 4);
      m(0, 0) = a;
      m(1, 1) = b;
      m(2, 2) = c;
      m(3, 3) = d;
      return m;
    };
    std::vector<CMatrix> bf(3);
    bf[*ex.yf.index_of("01")] = d4(1, 1, 0, 0);
    bf[*ex.yf.index_of("2")] = d4(0, 0, 1, 0);
    bf[*ex.yf.index_of("3")] = d4(0, 0, 0, 1);
    std::vector<CMatrix> bg(3);
    bg[*ex.yg.index_of("0")] = d4(0, 1, 0, 0);
    bg[*ex.yg.index_of("1")] = d4(0, 0, 1, 0);
    bg[*ex.yg.index_of("23")] = d4(1, 0, 0, 1);
    MatrixFamily fam{ex.cone,
                     {PartitionOfUnity(ex.yf, bf), PartitionOfUnity(ex.yg, bg)}};
    CompatibilityResult r = check_compatibility(fam);
    CHECK(!r.compatible);
  }
  SUBCASE("support off the leg image is rejected via the diagonal case") {
    FinSpace x1 = space("X1", {"0"});
    FinSpace y2 = space("Y2", {"p", "q"});
    Cone cone(x1, {map_by_labels(x1, y2, {{"0", "p"}})});
    std::vector<CMatrix> mats(2);
    mats[*y2.index_of("p")] = kP;
    mats[*y2.index_of("q")] = CMatrix::Identity(2, 2) - kP;  // unhit point
    MatrixFamily fam{cone, {PartitionOfUnity(y2, mats)}};
    CHECK(!check_compatibility(fam).compatible);
  }
}

TEST_CASE("lifting matrix families") {
  Ex4to3 ex;
  SUBCASE("round trip: lift of the coarse-grainings recovers the partition") {
    for (std::uint64_t s = 0; s < 10; ++s) {
      PartitionOfUnity p = seeded_apex_partition(ex.x, derive_seed(77, s));
      MatrixFamily fam{ex.cone, {coarse_grain(p, ex.f), coarse_grain(p, ex.g)}};
      LiftResult lift = lift_family(fam);
      REQUIRE(lift.status == LiftResult::Status::Ok);
      for (std::size_t x = 0; x < ex.x.size(); ++x) {
        CHECK((lift.partition->projection(x) - p.projection(x)).norm() <= 1e-9);
      }
    }
  }
  SUBCASE("the structured projection pair fails with NONCOMMUTING") {
    Cone pc = product_cone22();
    std::vector<CMatrix> m1{kP, CMatrix::Identity(2, 2) - kP};
    std::vector<CMatrix> m2{kQ, CMatrix::Identity(2, 2) - kQ};
    MatrixFamily fam{pc,
                     {PartitionOfUnity(pc.leg(0).codomain(), m1),
                      PartitionOfUnity(pc.leg(1).codomain(), m2)}};
    LiftResult lift = lift_family(fam);
    REQUIRE(lift.status == LiftResult::Status::Noncommuting);
    CHECK(lift.residual == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
  }
  SUBCASE("scalars always lift") {
    Cone pc = product_cone22();
    std::vector<CMatrix> m1{CMatrix::Identity(1, 1), CMatrix::Zero(1, 1)};
    std::vector<CMatrix> m2{CMatrix::Zero(1, 1), CMatrix::Identity(1, 1)};
    MatrixFamily fam{pc,
                     {PartitionOfUnity(pc.leg(0).codomain(), m1),
                      PartitionOfUnity(pc.leg(1).codomain(), m2)}};
    CHECK(lift_family(fam).status == LiftResult::Status::Ok);
  }
  SUBCASE("commuting members that do not reassemble are NOT_A_LIFT") {
    // Three pairwise-merging surjections; pushouts are trivial so any
    // member triple is compatible, and diagonal members commute, but the
    // fiber products sum to 0 instead of 1.
    Surj3to2 s;
    std::vector<PartitionOfUnity> members;
    for (int i = 0; i < 3; ++i) {
      members.emplace_back(s.y, std::vector<CMatrix>{diag2(1, 0), diag2(0, 1)});
    }
    MatrixFamily fam{s.cone, members};
    REQUIRE(check_compatibility(fam).compatible);
    LiftResult lift = lift_family(fam);
    CHECK(lift.status == LiftResult::Status::NotALift);
  }
  SUBCASE("non-separating cones are rejected as NOT_SEPARATING") {
    FinSpace x = space("X", {"0", "1"});
    FinSpace one = space("1", {"*"});
    Cone cone(x, {FinMap::constant(x, one, 0)});
    MatrixFamily fam{cone,
                     {PartitionOfUnity(one, {CMatrix::Identity(2, 2)})}};
    CHECK(lift_family(fam).status == LiftResult::Status::NotSeparating);
  }
  SUBCASE("incompatible families are rejected as NOT_COMPATIBLE") {
    FinSpace x1 = space("X1", {"0"});
    FinSpace y2 = space("Y2", {"p", "q"});
    Cone cone(x1, {map_by_labels(x1, y2, {{"0", "p"}})});
    std::vector<CMatrix> mats(2);
    mats[*y2.index_of("p")] = kP;
    mats[*y2.index_of("q")] = CMatrix::Identity(2, 2) - kP;
    MatrixFamily fam{cone, {PartitionOfUnity(y2, mats)}};
    CHECK(lift_family(fam).status == LiftResult::Status::NotCompatible);
  }
  SUBCASE("successful lifts only happen with commuting cross members") {
    for (std::uint64_t s = 0; s < 10; ++s) {
      PartitionOfUnity p = seeded_apex_partition(ex.x, derive_seed(99, s));
      MatrixFamily fam{ex.cone, {coarse_grain(p, ex.f), coarse_grain(p, ex.g)}};
      LiftResult lift = lift_family(fam);
      REQUIRE(lift.status == LiftResult::Status::Ok);
      for (std::size_t y = 0; y < ex.yf.size(); ++y) {
        for (std::size_t z = 0; z < ex.yg.size(); ++z) {
          CHECK(commutator_norm(fam.members[0].projection(y),
                                fam.members[1].projection(z)) <= 1e-9);
        }
      }
    }
  }
}

TEST_CASE("bivariate operations") {
  SUBCASE("diag(1,2) + diag(3,4) = diag(4,6)") {
    NormalMatrix sum =
        bivariate_op(NormalMatrix(diag2(1, 2)), NormalMatrix(diag2(3, 4)),
                     BivariateOp::Add);
    CHECK((sum.get() - diag2(4, 6)).norm() <= 1e-9);
  }
  SUBCASE("multiplying by the identity is the identity") {
    NormalMatrix a = seeded_normal(3, 21);
    NormalMatrix prod = bivariate_op(
        a, NormalMatrix(CMatrix::Identity(3, 3)), BivariateOp::Mul);
    CHECK((prod.get() - a.get()).norm() <= 1e-9);
  }
  SUBCASE("recovers matrix sum and product on seeded commuting pairs") {
    for (std::uint64_t s = 0; s < 20; ++s) {
      SplitMix64 rng(derive_seed(5000, s));
      CMatrix u = random_unitary(4, rng);
      Eigen::VectorXcd d1 = random_complex_vector(4, rng);
      Eigen::VectorXcd d2 = random_complex_vector(4, rng);
      NormalMatrix a(u * d1.asDiagonal() * u.adjoint(), 1e-9);
      NormalMatrix b(u * d2.asDiagonal() * u.adjoint(), 1e-9);
      CHECK((bivariate_op(a, b, BivariateOp::Add).get() - (a.get() + b.get())).norm() <=
            1e-9);
      CHECK((bivariate_op(a, b, BivariateOp::Mul).get() - (a.get() * b.get())).norm() <=
            1e-9);
    }
  }
  SUBCASE("noncommuting operands are rejected") {
    CHECK_THROWS_AS(bivariate_op(NormalMatrix(pauli_z()), NormalMatrix(pauli_x()),
                                 BivariateOp::Add),
                    Error);
  }
}

TEST_CASE("noncommuting-family search") {
  SUBCASE("product cone: the structured candidate wins at trial 0") {
    NoncommutingSearchParams params;
    params.dim = 2;
    params.trials = 100;
    auto w = search_noncommuting_family(product_cone22(), params);
    REQUIRE(w.has_value());
    CHECK(w->trial == 0);
    CHECK(w->residual > 0.5);
    CHECK((w->family.members[0].projection(0) - kP).norm() <= 1e-12);
    CHECK((w->family.members[1].projection(0) - kQ).norm() <= 1e-12);
  }
  SUBCASE("directed facecone: no witness over seeded trials") {
    NoncommutingSearchParams params;
    params.dim = 2;
    params.trials = 1000;
    CHECK(!search_noncommuting_family(facecone(), params).has_value());
  }
  SUBCASE("dimension 1 never yields a witness") {
    NoncommutingSearchParams params;
    params.dim = 1;
    params.trials = 200;
    CHECK(!search_noncommuting_family(product_cone22(), params).has_value());
  }
  SUBCASE("non-effective-monic cones are rejected") {
    Surj3to2 s;
    CHECK_THROWS_AS(search_noncommuting_family(s.cone, {}), Error);
  }
  SUBCASE("jobs do not change the witness") {
    NoncommutingSearchParams p1;
    p1.dim = 2;
    p1.trials = 64;
    NoncommutingSearchParams p4 = p1;
    p4.jobs = 4;
    auto w1 = search_noncommuting_family(product_cone22(), p1);
    auto w4 = search_noncommuting_family(product_cone22(), p4);
    REQUIRE(w1.has_value());
    REQUIRE(w4.has_value());
    CHECK(w1->trial == w4->trial);
    CHECK(w1->residual == w4->residual);
  }
}
