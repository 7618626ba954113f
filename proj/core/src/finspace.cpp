#include "conesheaf/finspace.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "conesheaf/union_find.hpp"

namespace conesheaf {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::CompositionMismatch: return "COMPOSITION_MISMATCH";
    case Errc::SearchBudgetExceeded: return "SEARCH_BUDGET_EXCEEDED";
    case Errc::Arity: return "ARITY";
    case Errc::NotEffectiveMonic: return "NOT_EFFECTIVE_MONIC";
    case Errc::NotNormal: return "NOT_NORMAL";
    case Errc::DomainGap: return "DOMAIN_GAP";
    case Errc::Noncommuting: return "NONCOMMUTING";
    case Errc::SpaceMismatch: return "SPACE_MISMATCH";
    case Errc::NotCompatible: return "NOT_COMPATIBLE";
    case Errc::NotSeparating: return "NOT_SEPARATING";
    case Errc::NotALift: return "NOT_A_LIFT";
    case Errc::NotUnitary: return "NOT_UNITARY";
    case Errc::PreconditionFailed: return "PRECONDITION_FAILED";
    case Errc::GeneratorRelationsFail: return "GENERATOR_RELATIONS_FAIL";
    case Errc::NotCommuting: return "NOT_COMMUTING";
    case Errc::InvalidInput: return "INVALID_INPUT";
  }
  return "UNKNOWN";
}

FinSpace::FinSpace(std::string name, std::vector<std::string> points)
    : name_(std::move(name)), points_(std::move(points)) {
  std::sort(points_.begin(), points_.end());
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (points_[i - 1] == points_[i]) {
      throw Error(Errc::InvalidInput,
                  "duplicate point label '" + points_[i] + "' in space " + name_);
    }
  }
}

std::optional<std::size_t> FinSpace::index_of(std::string_view label) const {
  auto it = std::lower_bound(points_.begin(), points_.end(), label);
  if (it == points_.end() || *it != label) return std::nullopt;
  return static_cast<std::size_t>(it - points_.begin());
}

FinMap::FinMap(FinSpace domain, FinSpace codomain, std::vector<std::size_t> assignment)
    : domain_(std::move(domain)),
      codomain_(std::move(codomain)),
      assignment_(std::move(assignment)) {
  if (assignment_.size() != domain_.size()) {
    throw Error(Errc::InvalidInput, "map assignment size does not match domain");
  }
  for (std::size_t v : assignment_) {
    if (v >= codomain_.size()) {
      throw Error(Errc::InvalidInput, "map image point outside codomain");
    }
  }
}

FinMap FinMap::identity(const FinSpace& space) {
  std::vector<std::size_t> id(space.size());
  for (std::size_t i = 0; i < id.size(); ++i) id[i] = i;
  return FinMap(space, space, std::move(id));
}

FinMap FinMap::constant(const FinSpace& domain, const FinSpace& codomain,
                        std::size_t point) {
  return FinMap(domain, codomain, std::vector<std::size_t>(domain.size(), point));
}

bool FinMap::is_injective() const {
  std::vector<char> seen(codomain_.size(), 0);
  for (std::size_t v : assignment_) {
    if (seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

bool FinMap::is_surjective() const {
  std::vector<char> seen(codomain_.size(), 0);
  for (std::size_t v : assignment_) seen[v] = 1;
  return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

std::vector<std::vector<std::size_t>> FinMap::fibers() const {
  std::vector<std::vector<std::size_t>> out(codomain_.size());
  for (std::size_t x = 0; x < assignment_.size(); ++x) {
    out[assignment_[x]].push_back(x);
  }
  return out;
}

FinMap compose(const FinMap& f, const FinMap& g) {
  if (!f.codomain().same_points(g.domain())) {
    throw Error(Errc::CompositionMismatch,
                "codomain of first map does not match domain of second");
  }
  std::vector<std::size_t> assignment(f.domain().size());
  for (std::size_t x = 0; x < assignment.size(); ++x) {
    assignment[x] = g.apply(f.apply(x));
  }
  return FinMap(f.domain(), g.codomain(), std::move(assignment));
}

Cone::Cone(FinSpace apex, std::vector<FinMap> legs)
    : apex_(std::move(apex)), legs_(std::move(legs)) {
  if (legs_.empty()) {
    throw Error(Errc::InvalidInput,
                "cone with no legs; use Cone::empty_cone to make that explicit");
  }
  for (const FinMap& leg : legs_) {
    if (!leg.domain().same_points(apex_)) {
      throw Error(Errc::InvalidInput, "cone leg domain differs from apex");
    }
  }
}

Cone Cone::empty_cone(FinSpace apex) {
  Cone c;
  c.apex_ = std::move(apex);
  return c;
}

Quotient make_quotient(const FinSpace& carrier, const std::vector<std::size_t>& class_of) {
  if (class_of.size() != carrier.size()) {
    throw Error(Errc::InvalidInput, "class assignment size does not match carrier");
  }
  // Renumber classes by least member so the result is canonical.
  std::map<std::size_t, std::vector<std::size_t>> by_id;
  for (std::size_t x = 0; x < class_of.size(); ++x) by_id[class_of[x]].push_back(x);
  std::vector<std::vector<std::size_t>> classes;
  classes.reserve(by_id.size());
  for (auto& [id, members] : by_id) classes.push_back(std::move(members));
  std::sort(classes.begin(), classes.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  Quotient q;
  q.carrier = carrier;
  q.representatives.reserve(classes.size());
  for (const auto& cls : classes) q.representatives.push_back(cls.front());
  q.classes = std::move(classes);
  return q;
}

FinMap quotient_map(const Quotient& q) {
  std::vector<std::string> labels;
  labels.reserve(q.classes.size());
  for (std::size_t rep : q.representatives) labels.push_back(q.carrier.label(rep));
  FinSpace target(q.carrier.name() + "/~", labels);
  std::vector<std::size_t> assignment(q.carrier.size());
  for (std::size_t c = 0; c < q.classes.size(); ++c) {
    std::size_t image = *target.index_of(q.carrier.label(q.representatives[c]));
    for (std::size_t x : q.classes[c]) assignment[x] = image;
  }
  return FinMap(q.carrier, target, std::move(assignment));
}

PushoutResult pushout(const FinMap& f, const FinMap& g) {
  if (!f.domain().same_points(g.domain())) {
    throw Error(Errc::SpaceMismatch, "pushout legs must share their domain");
  }
  const FinSpace& Y = f.codomain();
  const FinSpace& Z = g.codomain();
  const std::size_t ny = Y.size();

  UnionFind uf(ny + Z.size());
  for (std::size_t x = 0; x < f.domain().size(); ++x) {
    uf.unite(f.apply(x), ny + g.apply(x));
  }

  // Tagged element ordering: by label, left before right on ties.
  auto tag_label = [&](std::size_t t) -> const std::string& {
    return t < ny ? Y.label(t) : Z.label(t - ny);
  };
  auto tag_less = [&](std::size_t s, std::size_t t) {
    const std::string& ls = tag_label(s);
    const std::string& lt = tag_label(t);
    if (ls != lt) return ls < lt;
    return s < t;  // same label: Y side has the smaller raw index
  };

  std::map<std::size_t, std::size_t> min_of_root;  // root -> least tagged element
  for (std::size_t t = 0; t < ny + Z.size(); ++t) {
    std::size_t r = uf.find(t);
    auto [it, fresh] = min_of_root.emplace(r, t);
    if (!fresh && tag_less(t, it->second)) it->second = t;
  }

  // Classes in canonical order of their least element.
  std::vector<std::pair<std::size_t, std::size_t>> roots(min_of_root.begin(),
                                                         min_of_root.end());
  std::sort(roots.begin(), roots.end(), [&](const auto& a, const auto& b) {
    return tag_less(a.second, b.second);
  });

  std::set<std::string> used;
  std::vector<std::string> labels;
  std::map<std::size_t, std::string> label_of_root;
  for (const auto& [root, least] : roots) {
    std::string label = tag_label(least);
    while (used.count(label)) label += "'";
    used.insert(label);
    labels.push_back(label);
    label_of_root[root] = label;
  }

  FinSpace space("po(" + Y.name() + "," + Z.name() + ")", labels);
  std::vector<std::size_t> left(ny), right(Z.size());
  for (std::size_t y = 0; y < ny; ++y) {
    left[y] = *space.index_of(label_of_root[uf.find(y)]);
  }
  for (std::size_t z = 0; z < Z.size(); ++z) {
    right[z] = *space.index_of(label_of_root[uf.find(ny + z)]);
  }
  return PushoutResult{space, FinMap(Y, space, std::move(left)),
                       FinMap(Z, space, std::move(right))};
}

namespace {

// Pairwise allowed tables from the pushouts; allowed[i][j] is row-major
// |Y_i| x |Y_j|. The diagonal case degenerates to the image constraint.
struct PairTables {
  std::vector<std::vector<char>> unary;                // [i][y]
  std::vector<std::vector<std::vector<char>>> allowed; // [i][j][y*nj+z], i<j
};

PairTables build_tables(const Cone& cone) {
  const auto& legs = cone.legs();
  const std::size_t L = legs.size();
  PairTables t;
  t.unary.resize(L);
  for (std::size_t i = 0; i < L; ++i) {
    t.unary[i].assign(legs[i].codomain().size(), 0);
    for (std::size_t x = 0; x < cone.apex().size(); ++x) {
      t.unary[i][legs[i].apply(x)] = 1;
    }
  }
  t.allowed.resize(L, std::vector<std::vector<char>>(L));
  for (std::size_t i = 0; i < L; ++i) {
    const std::size_t ni = legs[i].codomain().size();
    for (std::size_t j = i + 1; j < L; ++j) {
      const std::size_t nj = legs[j].codomain().size();
      UnionFind uf(ni + nj);
      for (std::size_t x = 0; x < cone.apex().size(); ++x) {
        uf.unite(legs[i].apply(x), ni + legs[j].apply(x));
      }
      std::vector<char> table(ni * nj, 0);
      for (std::size_t y = 0; y < ni; ++y) {
        for (std::size_t z = 0; z < nj; ++z) {
          table[y * nj + z] = uf.same(y, ni + z) ? 1 : 0;
        }
      }
      t.allowed[i][j] = std::move(table);
    }
  }
  return t;
}

}  // namespace

EnumerationResult enumerate_compatible_families(const Cone& cone,
                                                const SearchLimits& limits) {
  EnumerationResult out;
  const std::size_t L = cone.size();
  if (L == 0) {
    out.families.push_back(CompatibleFamily{});
    return out;
  }
  const auto& legs = cone.legs();
  PairTables tables = build_tables(cone);

  // Active domains, seeded with the image constraint.
  std::vector<std::vector<char>> domain(L);
  for (std::size_t i = 0; i < L; ++i) domain[i] = tables.unary[i];

  auto pair_ok = [&](std::size_t i, std::size_t y, std::size_t j, std::size_t z) {
    if (i < j) return tables.allowed[i][j][y * legs[j].codomain().size() + z] != 0;
    return tables.allowed[j][i][z * legs[i].codomain().size() + y] != 0;
  };

  // AC-3 over all directed arcs.
  {
    std::vector<std::pair<std::size_t, std::size_t>> queue;
    for (std::size_t i = 0; i < L; ++i)
      for (std::size_t j = 0; j < L; ++j)
        if (i != j) queue.emplace_back(i, j);
    while (!queue.empty()) {
      auto [i, j] = queue.back();
      queue.pop_back();
      bool revised = false;
      for (std::size_t y = 0; y < domain[i].size(); ++y) {
        if (!domain[i][y]) continue;
        bool supported = false;
        for (std::size_t z = 0; z < domain[j].size() && !supported; ++z) {
          if (domain[j][z] && pair_ok(i, y, j, z)) supported = true;
        }
        if (!supported) {
          domain[i][y] = 0;
          revised = true;
        }
      }
      if (revised) {
        for (std::size_t k = 0; k < L; ++k) {
          if (k != i && k != j) queue.emplace_back(k, i);
        }
      }
    }
  }

  // Forward-checking DFS in leg order; lexicographic value order makes the
  // output canonical.
  std::vector<std::size_t> picks(L);
  std::vector<std::vector<std::vector<char>>> saved(L);
  bool budget_hit = false;

  auto dfs = [&](auto&& self, std::size_t depth) -> void {
    if (budget_hit) return;
    if (depth == L) {
      out.families.push_back(CompatibleFamily{picks});
      return;
    }
    for (std::size_t y = 0; y < domain[depth].size(); ++y) {
      if (!domain[depth][y]) continue;
      if (++out.nodes > limits.node_budget) {
        budget_hit = true;
        return;
      }
      saved[depth].assign(domain.begin() + depth + 1, domain.end());
      picks[depth] = y;
      bool feasible = true;
      for (std::size_t j = depth + 1; j < L && feasible; ++j) {
        bool nonempty = false;
        for (std::size_t z = 0; z < domain[j].size(); ++z) {
          if (domain[j][z] && !pair_ok(depth, y, j, z)) domain[j][z] = 0;
          nonempty = nonempty || domain[j][z];
        }
        feasible = nonempty;
      }
      if (feasible) self(self, depth + 1);
      std::copy(saved[depth].begin(), saved[depth].end(), domain.begin() + depth + 1);
      if (budget_hit) return;
    }
  };
  dfs(dfs, 0);
  out.complete = !budget_hit;
  return out;
}

std::vector<CompatibleFamily> canonical_map_to_families(const Cone& cone) {
  std::vector<CompatibleFamily> out;
  out.reserve(cone.apex().size());
  for (std::size_t x = 0; x < cone.apex().size(); ++x) {
    CompatibleFamily fam;
    fam.picks.reserve(cone.size());
    for (const FinMap& leg : cone.legs()) fam.picks.push_back(leg.apply(x));
    out.push_back(std::move(fam));
  }
  return out;
}

bool is_jointly_injective(const Cone& cone) {
  const std::size_t n = cone.apex().size();
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) {
      bool separated = false;
      for (const FinMap& leg : cone.legs()) {
        if (leg.apply(x) != leg.apply(y)) {
          separated = true;
          break;
        }
      }
      if (!separated) return false;
    }
  }
  return true;
}

}  // namespace conesheaf
