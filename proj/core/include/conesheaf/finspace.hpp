#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "conesheaf/error.hpp"

namespace conesheaf {

/// A finite discrete space: a named set of distinct point labels.
/// Labels are sorted on construction, so point indices are canonical.
class FinSpace {
 public:
  FinSpace() = default;
  FinSpace(std::string name, std::vector<std::string> points);

  const std::string& name() const { return name_; }
  std::size_t size() const { return points_.size(); }
  const std::vector<std::string>& points() const { return points_; }
  const std::string& label(std::size_t i) const { return points_[i]; }
  std::optional<std::size_t> index_of(std::string_view label) const;

  bool same_points(const FinSpace& other) const {
    return points_ == other.points_;
  }
  friend bool operator==(const FinSpace&, const FinSpace&) = default;

 private:
  std::string name_;
  std::vector<std::string> points_;
};

/// A total function between finite spaces, stored as codomain point indices.
class FinMap {
 public:
  FinMap() = default;
  FinMap(FinSpace domain, FinSpace codomain, std::vector<std::size_t> assignment);

  static FinMap identity(const FinSpace& space);
  static FinMap constant(const FinSpace& domain, const FinSpace& codomain,
                         std::size_t point);

  const FinSpace& domain() const { return domain_; }
  const FinSpace& codomain() const { return codomain_; }
  std::size_t apply(std::size_t x) const { return assignment_[x]; }
  const std::vector<std::size_t>& assignment() const { return assignment_; }

  bool is_injective() const;
  bool is_surjective() const;

  /// Partition of the domain into fibers, in codomain point order
  /// (empty fibers included).
  std::vector<std::vector<std::size_t>> fibers() const;

  friend bool operator==(const FinMap&, const FinMap&) = default;

 private:
  FinSpace domain_;
  FinSpace codomain_;
  std::vector<std::size_t> assignment_;
};

/// Pointwise composition g∘f. Throws CompositionMismatch unless
/// codomain(f) and domain(g) have the same points.
FinMap compose(const FinMap& f, const FinMap& g);

/// A family of maps with a common apex. Zero legs only via empty_cone.
class Cone {
 public:
  Cone(FinSpace apex, std::vector<FinMap> legs);
  static Cone empty_cone(FinSpace apex);

  const FinSpace& apex() const { return apex_; }
  const std::vector<FinMap>& legs() const { return legs_; }
  const FinMap& leg(std::size_t i) const { return legs_[i]; }
  std::size_t size() const { return legs_.size(); }

 private:
  Cone() = default;
  FinSpace apex_;
  std::vector<FinMap> legs_;
};

/// A partition of a space's points; class representatives are the least
/// point index (equivalently least label, since points are sorted).
struct Quotient {
  FinSpace carrier;
  std::vector<std::vector<std::size_t>> classes;
  std::vector<std::size_t> representatives;
};

/// Builds the quotient given a class id per carrier point; classes are
/// renumbered canonically by least member.
Quotient make_quotient(const FinSpace& carrier, const std::vector<std::size_t>& class_of);

/// Canonical surjection carrier -> classes, labelled by representatives.
FinMap quotient_map(const Quotient& q);

struct PushoutResult {
  FinSpace space;
  FinMap inj_left;   // codomain(f) -> space
  FinMap inj_right;  // codomain(g) -> space
};

/// Quotient of Y ⊔ Z by the equivalence generated by f(x) ~ g(x).
/// Class labels are least member labels, disambiguated with trailing '.
PushoutResult pushout(const FinMap& f, const FinMap& g);

/// One codomain point index per leg; the pairwise pushout constraints hold.
struct CompatibleFamily {
  std::vector<std::size_t> picks;
  friend auto operator<=>(const CompatibleFamily&, const CompatibleFamily&) = default;
};

struct SearchLimits {
  std::uint64_t node_budget = 10'000'000;
};

struct EnumerationResult {
  std::vector<CompatibleFamily> families;  // lexicographic order
  bool complete = true;
  std::uint64_t nodes = 0;
};

/// All point families satisfying the pairwise pushout constraints.
/// Arc-consistency preprocessing plus forward-checking backtracking in leg
/// order, so naive product-space blowup is avoided and output is lex-sorted.
/// complete=false when node_budget is exhausted (families found so far kept).
EnumerationResult enumerate_compatible_families(const Cone& cone,
                                                const SearchLimits& limits = {});

/// x ↦ (i ↦ f_i(x)); each image is a valid compatible family.
std::vector<CompatibleFamily> canonical_map_to_families(const Cone& cone);

/// true iff x ≠ x' implies f_i(x) ≠ f_i(x') for some leg i.
bool is_jointly_injective(const Cone& cone);

}  // namespace conesheaf
