#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "conesheaf/error.hpp"

namespace conesheaf {

/// A finite group given by its Cayley table; associativity, identity and
/// inverses are validated at construction.
class FiniteGroup {
 public:
  FiniteGroup(std::vector<std::string> labels,
              std::vector<std::vector<std::size_t>> table);

  std::size_t order() const { return table_.size(); }
  std::size_t mul(std::size_t x, std::size_t y) const { return table_[x][y]; }
  std::size_t inv(std::size_t x) const { return inverse_[x]; }
  std::size_t identity() const { return identity_; }
  bool commutes(std::size_t x, std::size_t y) const {
    return mul(x, y) == mul(y, x);
  }
  std::size_t conj(std::size_t g, std::size_t h) const {  // g^{-1} h g
    return mul(mul(inv(g), h), g);
  }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::vector<std::size_t>>& table() const { return table_; }

 private:
  std::vector<std::string> labels_;
  std::vector<std::vector<std::size_t>> table_;
  std::vector<std::size_t> inverse_;
  std::size_t identity_ = 0;
};

/// maps[g][h] = the endomap assigned to g, evaluated at h.
struct GroupSelfAction {
  std::vector<std::vector<std::size_t>> maps;
};

GroupSelfAction conjugation_self_action(const FiniteGroup& g);

/// Bijective and product-preserving on commuting pairs.
bool is_piecewise_automorphism(const FiniteGroup& g,
                               const std::vector<std::size_t>& endomap);

/// Both self-action axioms, checked exhaustively: fixed-point iff
/// commutation, and multiplicativity on commuting pairs.
bool satisfies_self_action_axioms(const FiniteGroup& g, const GroupSelfAction& a);

struct GroupHomViolation {
  enum class Kind { CommutePreservation, PartialProduct, SelfAction };
  Kind kind;
  std::size_t g = 0, h = 0;
};

const char* to_string(GroupHomViolation::Kind kind);

/// Piecewise clauses on all commuting pairs plus the action-intertwining
/// equation on all pairs, exhaustively.
std::optional<GroupHomViolation> verify_almost_group_hom(
    const FiniteGroup& g, const FiniteGroup& h, const std::vector<std::size_t>& zeta,
    const GroupSelfAction& action_g, const GroupSelfAction& action_h);

bool is_group_hom(const FiniteGroup& g, const FiniteGroup& h,
                  const std::vector<std::size_t>& zeta);

struct AlmostEndoEntry {
  std::vector<std::size_t> table;
  bool group_hom = false;
};

struct AlmostEndoResult {
  std::vector<AlmostEndoEntry> entries;  // lexicographic by value table
  bool complete = true;
  std::uint64_t nodes = 0;
};

/// All total maps G -> G passing verify_almost_group_hom under the
/// conjugation actions, by pruned backtracking: the unit is pinned, powers
/// are propagated along cyclic subgroups, conjugates are forced.
AlmostEndoResult enumerate_almost_endos(const FiniteGroup& g,
                                        std::uint64_t node_budget = 10'000'000);

}  // namespace conesheaf
