#include "doctest.h"

#include <set>

#include "conesheaf/cone_analysis.hpp"
#include "test_support.hpp"

using namespace conesheaf;
using namespace conesheaf::testing;

TEST_CASE("effective-monic verdicts on the worked examples") {
  Ex4to3 ex;
  SUBCASE("{f,g} is effective-monic") {
    ConeVerdict v = is_effective_monic(ex.cone);
    CHECK(v.status == EmStatus::Yes);
    CHECK(v.family_count == 4);
  }
  SUBCASE("pushed-forward {f',g'} is not; witness family (3, 0)") {
    ConeVerdict v = is_effective_monic(ex.pushed);
    REQUIRE(v.status == EmStatus::No);
    REQUIRE(v.witness_kind == ConeVerdict::WitnessKind::MissingFamily);
    REQUIRE(v.witness.has_value());
    CHECK(ex.yfp.label(v.witness->picks[0]) == "3");
    CHECK(ex.ygp.label(v.witness->picks[1]) == "0");
  }
  SUBCASE("three surjections: 8 families vs 3 points") {
    Surj3to2 s;
    ConeVerdict v = is_effective_monic(s.cone);
    REQUIRE(v.status == EmStatus::No);
    CHECK(v.family_count == 8);
  }
  SUBCASE("non-separating cones fail with a duplicated family") {
    FinSpace two = space("2", {"0", "1"});
    FinSpace one = space("1", {"*"});
    ConeVerdict v = is_effective_monic(Cone(two, {FinMap::constant(two, one, 0)}));
    REQUIRE(v.status == EmStatus::No);
    CHECK(v.witness_kind == ConeVerdict::WitnessKind::DuplicatedFamily);
    CHECK(v.duplicate_points == std::vector<std::size_t>{0, 1});
  }
  SUBCASE("the empty cone is effective-monic exactly on a point") {
    CHECK(is_effective_monic(Cone::empty_cone(space("1", {"*"}))).status ==
          EmStatus::Yes);
    CHECK(is_effective_monic(Cone::empty_cone(space("2", {"0", "1"}))).status ==
          EmStatus::No);
  }
  SUBCASE("budget exhaustion surfaces as BUDGET") {
    SearchLimits limits;
    limits.node_budget = 1;
    CHECK(is_effective_monic(ex.cone, limits).status == EmStatus::Budget);
  }
}

TEST_CASE("Mal'cev criterion") {
  Ex4to3 ex;
  SUBCASE("product projections carry the full relation") {
    CHECK(malcev_check(product_cone22()));
  }
  SUBCASE("worked example passes, its pushforward fails") {
    CHECK(malcev_check(ex.cone));
    CHECK(!malcev_check(ex.pushed));
  }
  SUBCASE("wrong arity throws") {
    CHECK_THROWS_AS(malcev_check(Cone(ex.x, {ex.f})), Error);
  }
}

TEST_CASE("Mal'cev iff effective-monic, exhaustively on small 2-leg cones") {
  // Sizes up to 3 on all three spaces, empty included.
  for (std::size_t nx = 0; nx <= 3; ++nx) {
    for (std::size_t ny = 0; ny <= 3; ++ny) {
      for (std::size_t nz = 0; nz <= 3; ++nz) {
        FinSpace x = numbered_space("X", nx);
        FinSpace y = numbered_space("Y", ny);
        FinSpace z = numbered_space("Z", nz);
        for (const FinMap& f : all_maps(x, y)) {
          for (const FinMap& g : all_maps(x, z)) {
            Cone cone(x, {f, g});
            bool em = is_effective_monic(cone).status == EmStatus::Yes;
            CHECK(malcev_check(cone) == em);
          }
        }
      }
    }
  }
}

TEST_CASE("local injectivity") {
  Ex4to3 ex;
  SUBCASE("three surjections are locally injective") {
    Surj3to2 s;
    CHECK(is_locally_injective(s.cone));
  }
  SUBCASE("an injective leg makes any cone locally injective") {
    CHECK(is_locally_injective(Cone(ex.x, {FinMap::identity(ex.x), ex.f})));
  }
  SUBCASE("pushed-forward example is not: the merged point is never isolated") {
    CHECK(!is_locally_injective(ex.pushed));
  }
}

TEST_CASE("joint injectivity is necessary for effective-monic") {
  for (std::size_t nx = 1; nx <= 3; ++nx) {
    FinSpace x = numbered_space("X", nx);
    FinSpace y = numbered_space("Y", 2);
    FinSpace z = numbered_space("Z", 2);
    for (const FinMap& f : all_maps(x, y)) {
      for (const FinMap& g : all_maps(x, z)) {
        Cone cone(x, {f, g});
        if (is_effective_monic(cone).status == EmStatus::Yes) {
          CHECK(is_jointly_injective(cone));
        }
      }
    }
  }
}

TEST_CASE("tupling closure") {
  Ex4to3 ex;
  SUBCASE("arity 1 returns the original legs, deduplicated") {
    Cone closed = tupling_closure(ex.cone, 1);
    CHECK(closed.size() == 2);
    Cone doubled(ex.x, {ex.f, ex.f, ex.g});
    CHECK(tupling_closure(doubled, 1).size() == 2);
  }
  SUBCASE("arity 2 contains the pairing (f,g) into a 9-point product") {
    Cone closed = tupling_closure(ex.cone, 2);
    CHECK(closed.size() == 6);  // f, g, (f,f), (f,g), (g,f), (g,g)
    bool found = false;
    for (const FinMap& leg : closed.legs()) {
      if (leg.codomain().size() == 9 &&
          leg.codomain().label(leg.apply(*ex.x.index_of("0"))) == "(01,0)") {
        found = true;
      }
    }
    CHECK(found);
  }
  SUBCASE("closure of an effective-monic cone is effective-monic and directed") {
    Cone closed = tupling_closure(ex.cone, 2);
    CHECK(is_effective_monic(closed).status == EmStatus::Yes);
    DirectednessVerdict d = is_directed(closed);
    CHECK(d.status == DirectednessVerdict::Status::Directed);
    // Trivial witness cones: identity quotients on every leg.
    REQUIRE(d.witness.size() == closed.size());
    for (std::size_t i = 0; i < closed.size(); ++i) {
      REQUIRE(d.witness[i].size() == 1);
      CHECK(d.witness[i][0].is_injective());
    }
    CHECK(verify_directedness_witness(closed, d.witness));
  }
  SUBCASE("closure preserves effective-monicity, exhaustively at small size") {
    for (std::size_t nx = 1; nx <= 3; ++nx) {
      FinSpace x = numbered_space("X", nx);
      FinSpace y = numbered_space("Y", 2);
      FinSpace z = numbered_space("Z", 3);
      for (const FinMap& f : all_maps(x, y)) {
        for (const FinMap& g : all_maps(x, z)) {
          Cone cone(x, {f, g});
          if (is_effective_monic(cone).status != EmStatus::Yes) continue;
          CHECK(is_effective_monic(tupling_closure(cone, 2)).status == EmStatus::Yes);
        }
      }
    }
  }
}

TEST_CASE("directedness") {
  Ex4to3 ex;
  SUBCASE("facecone is directed, with an independently verified witness") {
    Cone fc = facecone();
    DirectednessVerdict d = is_directed(fc);
    REQUIRE(d.status == DirectednessVerdict::Status::Directed);
    CHECK(verify_directedness_witness(fc, d.witness));
  }
  SUBCASE("the worked example is not directed") {
    DirectednessVerdict d = is_directed(ex.cone);
    CHECK(d.status == DirectednessVerdict::Status::NotDirected);
  }
  SUBCASE("single-leg cones are directed via the identity certificate") {
    DirectednessVerdict d = is_directed(Cone(ex.x, {FinMap::identity(ex.x)}));
    CHECK(d.status == DirectednessVerdict::Status::Directed);
    CHECK(verify_directedness_witness(Cone(ex.x, {FinMap::identity(ex.x)}), d.witness));
  }
  SUBCASE("witness verifier rejects broken witnesses") {
    Cone fc = facecone();
    DirectednessVerdict d = is_directed(fc);
    REQUIRE(d.status == DirectednessVerdict::Status::Directed);
    // Dropping one leg's witness cone breaks separation.
    auto broken = d.witness;
    broken[0].clear();
    CHECK(!verify_directedness_witness(fc, broken));
    // The non-directed example rejects the facecone-style witness shape.
    CHECK(!verify_directedness_witness(ex.cone, {{FinMap::identity(ex.yf)},
                                                 {FinMap::identity(ex.yg)}}));
  }
  SUBCASE("budget exhaustion yields UNKNOWN, never NOT_DIRECTED") {
    DirectedSearchLimits limits;
    limits.node_budget = 1;
    DirectednessVerdict d = is_directed(ex.cone, limits);
    CHECK(d.status == DirectednessVerdict::Status::Unknown);
  }
  SUBCASE("oversized instances fall back to UNKNOWN when no certificate fires") {
    // One 26-point codomain, two legs whose kernels have no common
    // refinement among the legs: too large for the witness search.
    FinSpace x = numbered_space("X", 26);
    FinSpace y = numbered_space("Y", 26);
    FinSpace z = numbered_space("Z", 13);
    std::vector<std::size_t> a(26), b(26);
    for (std::size_t i = 0; i < 26; ++i) {
      a[i] = i / 2;         // merges neighbours
      b[i] = (i + 1) / 2 % 13;  // merges shifted neighbours
    }
    Cone big(x, {FinMap(x, y, a), FinMap(x, z, b)});
    DirectednessVerdict d = is_directed(big);
    CHECK(d.status == DirectednessVerdict::Status::Unknown);
  }
}

TEST_CASE("guarantee classification") {
  SUBCASE("directed cones are guaranteed via the certificate") {
    GuaranteeVerdict v = classify_guarantee(facecone());
    CHECK(v.status == GuaranteeVerdict::Status::Guaranteed);
    CHECK(verify_directedness_witness(facecone(), v.certificate));
  }
  SUBCASE("the product cone is refuted with a matrix witness") {
    GuaranteeSearchParams params;
    params.trials = 100;
    GuaranteeVerdict v = classify_guarantee(product_cone22(), params);
    REQUIRE(v.status == GuaranteeVerdict::Status::Refuted);
    CHECK(v.refutation->residual > 0.5);
  }
  SUBCASE("the worked example stays UNKNOWN, never REFUTED") {
    Ex4to3 ex;
    GuaranteeSearchParams params;
    params.trials = 2000;
    GuaranteeVerdict v = classify_guarantee(ex.cone, params);
    CHECK(v.status == GuaranteeVerdict::Status::Unknown);
  }
  SUBCASE("non-effective-monic input is a precondition failure") {
    Surj3to2 s;
    CHECK_THROWS_AS(classify_guarantee(s.cone), Error);
  }
}

TEST_CASE("sixteen- and sixty-four-leg gluing instances") {
  // All maps from a discrete X into the 4-point space; the family count
  // must equal |X|.
  for (std::size_t nx : {2u, 3u}) {
    FinSpace x = numbered_space("X", nx);
    FinSpace four = numbered_space("four", 4);
    Cone cone(x, all_maps(x, four));
    EnumerationResult r = enumerate_compatible_families(cone);
    REQUIRE(r.complete);
    CHECK(r.families.size() == nx);
    CHECK(is_effective_monic(cone).status == EmStatus::Yes);
  }
}

TEST_CASE("tupling closure rejects arity zero") {
  Ex4to3 ex;
  CHECK_THROWS_AS(tupling_closure(ex.cone, 0), Error);
}

TEST_CASE("refinement search") {
  Ex4to3 ex;
  SUBCASE("no effective-monic refinement of the worked example exists") {
    RefinementLimits limits;
    limits.max_codomain = 4;
    limits.max_legs = 6;
    RefinementResult r = search_refinement(ex.cone, ex.h, limits);
    CHECK(r.status == RefinementResult::Status::None);
    CHECK(r.candidate_partitions == 3);  // {0,12|3}, {0|12,3}, trivial
    CHECK(r.sets_examined > 0);
  }
  SUBCASE("facecone + digit sum: every factoring leg is constant") {
    Cone fc = facecone();
    FinSpace four = space("four", {"0", "1", "2", "3"});
    std::vector<std::size_t> digitsum(fc.apex().size());
    for (std::size_t p = 0; p < fc.apex().size(); ++p) {
      const std::string& l = fc.apex().label(p);
      digitsum[p] = static_cast<std::size_t>((l[0] - '0') + (l[1] - '0') + (l[2] - '0'));
    }
    FinMap h(fc.apex(), four, std::move(digitsum));
    RefinementResult r = search_refinement(fc, h);
    CHECK(r.status == RefinementResult::Status::None);
    CHECK(r.candidate_partitions == 1);  // only the trivial partition factors
  }
  SUBCASE("identity quotient: a cone refines itself") {
    RefinementResult r = search_refinement(ex.cone, FinMap::identity(ex.x));
    CHECK(r.status == RefinementResult::Status::Self);
    REQUIRE(r.witness.has_value());
    CHECK(is_effective_monic(*r.witness).status == EmStatus::Yes);
  }
  SUBCASE("a refinement is found when one exists") {
    // Quotient along f itself: {f'', g''} on Yf... use h = f; the identity
    // partition of Yf factors through f, and a separating effective-monic
    // cone on Yf exists.
    RefinementResult r = search_refinement(ex.cone, ex.f);
    CHECK(r.status == RefinementResult::Status::Found);
    REQUIRE(r.witness.has_value());
    CHECK(is_effective_monic(*r.witness).status == EmStatus::Yes);
    for (const FinMap& leg : r.witness->legs()) {
      FinMap kh = compose(ex.f, leg);
      bool through_f = true;
      for (const auto& fiber : ex.f.fibers()) {
        for (std::size_t m = 1; m < fiber.size(); ++m) {
          if (kh.apply(fiber[m]) != kh.apply(fiber[0])) through_f = false;
        }
      }
      CHECK(through_f);
    }
  }
  SUBCASE("the directed class is stricter than plain effective-monic") {
    // The product cone is its own effective-monic refinement along the
    // identity, but no directed refinement exists: every candidate leg
    // factors through one of the projections, whose kernels admit no
    // common refinement among the legs.
    Cone pc = product_cone22();
    FinMap id = FinMap::identity(pc.apex());
    RefinementResult em = search_refinement(pc, id);
    CHECK(em.status == RefinementResult::Status::Self);
    RefinementLimits directed;
    directed.require_directed = true;
    RefinementResult dr = search_refinement(pc, id, directed);
    CHECK(dr.status == RefinementResult::Status::None);
  }
  SUBCASE("jobs do not change the outcome") {
    RefinementLimits limits;
    limits.jobs = 4;
    RefinementResult r4 = search_refinement(ex.cone, ex.h, limits);
    RefinementResult r1 = search_refinement(ex.cone, ex.h);
    CHECK(r4.status == r1.status);
    CHECK(r4.sets_examined == r1.sets_examined);
  }
}
