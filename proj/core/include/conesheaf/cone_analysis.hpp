#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "conesheaf/finspace.hpp"
#include "conesheaf/matstar.hpp"

namespace conesheaf {

enum class EmStatus { Yes, No, Budget };

struct ConeVerdict {
  enum class WitnessKind { None, MissingFamily, DuplicatedFamily };

  EmStatus status = EmStatus::Budget;
  WitnessKind witness_kind = WitnessKind::None;
  std::optional<CompatibleFamily> witness;
  std::vector<std::size_t> duplicate_points;  // apex indices sharing the witness
  std::size_t family_count = 0;
  std::uint64_t nodes = 0;
};

/// YES iff apex points biject with the compatible families. NO carries the
/// first missing family in lex order, or a duplicated one plus the apex
/// points realizing it. BUDGET when enumeration ran out of nodes.
ConeVerdict is_effective_monic(const Cone& cone, const SearchLimits& limits = {});

/// For a 2-leg cone {f, g}: joint injectivity plus closure of the joint
/// image under (y,z),(y',z),(y,z') => (y',z'). Throws Arity otherwise.
bool malcev_check(const Cone& cone);

/// Every point is isolated by some fiber: ∀x ∃i with f_i^{-1}(f_i(x)) = {x}.
bool is_locally_injective(const Cone& cone);

/// Cone of all tuplings (f_i1,...,f_in), n <= max_arity, into product
/// spaces, deduplicated; arity-1 tuples are the original legs.
Cone tupling_closure(const Cone& cone, std::size_t max_arity);

struct DirectedSearchLimits {
  // Exhaustive (NOT_DIRECTED-capable) decision only within these bounds.
  std::size_t exact_max_legs = 4;
  std::size_t exact_max_codomain = 5;
  std::uint64_t node_budget = 10'000'000;
};

struct DirectednessVerdict {
  enum class Status { Directed, NotDirected, Unknown };
  Status status = Status::Unknown;
  /// Per leg, a separating family of quotient maps of Y_i (Directed only).
  std::vector<std::vector<FinMap>> witness;
  std::string note;
};

/// Witness search over binary quotient partitions of the leg codomains.
/// Any witness family reduces to one of this form (replace each quotient by
/// the blockwise two-block coarsenings; separation and the lifting squares
/// survive), so an exhausted search within the exact bounds proves
/// NOT_DIRECTED. Outside the bounds: Directed when a witness or the
/// identity-quotient certificate is found, Unknown otherwise.
DirectednessVerdict is_directed(const Cone& cone,
                                const DirectedSearchLimits& limits = {});

/// Independent re-verification: each witness cone separates the points of
/// its codomain, and every cross pair admits the lifting square through
/// some leg, checked by direct construction.
bool verify_directedness_witness(const Cone& cone,
                                 const std::vector<std::vector<FinMap>>& witness);

struct RefinementLimits {
  std::size_t max_codomain = 4;
  std::size_t max_legs = 6;
  bool require_directed = false;
  std::uint64_t node_budget = 10'000'000;
  unsigned jobs = 1;
};

struct RefinementResult {
  enum class Status { Found, Self, None, Budget };
  Status status = Status::None;
  std::optional<Cone> witness;
  // Exhaustion certificate: what was searched, up to iso.
  std::uint64_t candidate_partitions = 0;
  std::uint64_t sets_examined = 0;
};

/// Searches, up to iso, for a cone {k_i} on codomain(h) of the requested
/// class such that every k_i∘h factors through some leg of the input cone.
/// Legs are searched as set partitions of codomain(h) with at most
/// max_codomain blocks; candidates are prefiltered by the factoring
/// condition, then sets of at most max_legs candidates are tested.
RefinementResult search_refinement(const Cone& cone, const FinMap& h,
                                   const RefinementLimits& limits = {});

struct GuaranteeSearchParams {
  std::vector<std::size_t> dims = {2, 3};
  std::uint64_t trials = 10'000;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

struct GuaranteeVerdict {
  enum class Status { Guaranteed, Refuted, Unknown };
  Status status = Status::Unknown;
  std::vector<std::vector<FinMap>> certificate;  // directedness witness
  std::optional<NoncommutingWitness> refutation;
};

/// GUARANTEED on a directedness certificate; otherwise a randomized matrix
/// refutation search over the given dimensions; UNKNOWN when neither lands.
/// Throws NotEffectiveMonic when the precondition fails.
GuaranteeVerdict classify_guarantee(const Cone& cone,
                                    const GuaranteeSearchParams& params = {},
                                    const Tolerances& tols = {});

}  // namespace conesheaf
