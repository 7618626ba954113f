#include "conesheaf/groups.hpp"

#include <algorithm>

namespace conesheaf {

FiniteGroup::FiniteGroup(std::vector<std::string> labels,
                         std::vector<std::vector<std::size_t>> table)
    : labels_(std::move(labels)), table_(std::move(table)) {
  const std::size_t n = table_.size();
  if (n == 0) throw Error(Errc::InvalidInput, "empty group");
  if (labels_.size() != n) {
    throw Error(Errc::InvalidInput, "label count does not match group order");
  }
  for (const auto& row : table_) {
    if (row.size() != n) throw Error(Errc::InvalidInput, "Cayley table not square");
    for (std::size_t v : row) {
      if (v >= n) throw Error(Errc::InvalidInput, "Cayley table entry out of range");
    }
  }
  // Identity.
  bool found = false;
  for (std::size_t e = 0; e < n && !found; ++e) {
    bool ok = true;
    for (std::size_t x = 0; x < n && ok; ++x) {
      ok = table_[e][x] == x && table_[x][e] == x;
    }
    if (ok) {
      identity_ = e;
      found = true;
    }
  }
  if (!found) throw Error(Errc::InvalidInput, "Cayley table has no identity");
  // Inverses.
  inverse_.assign(n, n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (table_[x][y] == identity_ && table_[y][x] == identity_) {
        inverse_[x] = y;
        break;
      }
    }
    if (inverse_[x] == n) {
      throw Error(Errc::InvalidInput, "Cayley table element has no inverse");
    }
  }
  // Associativity.
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      for (std::size_t z = 0; z < n; ++z) {
        if (table_[table_[x][y]][z] != table_[x][table_[y][z]]) {
          throw Error(Errc::InvalidInput, "Cayley table is not associative");
        }
      }
    }
  }
}

GroupSelfAction conjugation_self_action(const FiniteGroup& g) {
  const std::size_t n = g.order();
  GroupSelfAction action;
  action.maps.assign(n, std::vector<std::size_t>(n));
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t h = 0; h < n; ++h) {
      action.maps[x][h] = g.conj(x, h);
    }
  }
  return action;
}

bool is_piecewise_automorphism(const FiniteGroup& g,
                               const std::vector<std::size_t>& endomap) {
  const std::size_t n = g.order();
  std::vector<char> seen(n, 0);
  for (std::size_t v : endomap) {
    if (v >= n || seen[v]) return false;
    seen[v] = 1;
  }
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (!g.commutes(x, y)) continue;
      if (!g.commutes(endomap[x], endomap[y])) return false;
      if (endomap[g.mul(x, y)] != g.mul(endomap[x], endomap[y])) return false;
    }
  }
  return true;
}

bool satisfies_self_action_axioms(const FiniteGroup& g, const GroupSelfAction& a) {
  const std::size_t n = g.order();
  if (a.maps.size() != n) return false;
  for (const auto& endomap : a.maps) {
    if (!is_piecewise_automorphism(g, endomap)) return false;
  }
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      bool fixed = a.maps[x][y] == y;
      if (fixed != g.commutes(x, y)) return false;
      if (g.commutes(x, y)) {
        for (std::size_t h = 0; h < n; ++h) {
          if (a.maps[g.mul(x, y)][h] != a.maps[x][a.maps[y][h]]) return false;
        }
      }
    }
  }
  return true;
}

const char* to_string(GroupHomViolation::Kind kind) {
  switch (kind) {
    case GroupHomViolation::Kind::CommutePreservation: return "COMMUTE_PRESERVATION";
    case GroupHomViolation::Kind::PartialProduct: return "PARTIAL_PRODUCT";
    case GroupHomViolation::Kind::SelfAction: return "SELF_ACTION";
  }
  return "UNKNOWN";
}

std::optional<GroupHomViolation> verify_almost_group_hom(
    const FiniteGroup& g, const FiniteGroup& h, const std::vector<std::size_t>& zeta,
    const GroupSelfAction& action_g, const GroupSelfAction& action_h) {
  if (zeta.size() != g.order()) {
    throw Error(Errc::InvalidInput, "zeta must be total on the source group");
  }
  for (std::size_t v : zeta) {
    if (v >= h.order()) {
      throw Error(Errc::InvalidInput, "zeta value outside the target group");
    }
  }
  for (std::size_t x = 0; x < g.order(); ++x) {
    for (std::size_t y = 0; y < g.order(); ++y) {
      if (g.commutes(x, y)) {
        if (!h.commutes(zeta[x], zeta[y])) {
          return GroupHomViolation{GroupHomViolation::Kind::CommutePreservation, x, y};
        }
        if (zeta[g.mul(x, y)] != h.mul(zeta[x], zeta[y])) {
          return GroupHomViolation{GroupHomViolation::Kind::PartialProduct, x, y};
        }
      }
      if (action_h.maps[zeta[x]][zeta[y]] != zeta[action_g.maps[x][y]]) {
        return GroupHomViolation{GroupHomViolation::Kind::SelfAction, x, y};
      }
    }
  }
  return std::nullopt;
}

bool is_group_hom(const FiniteGroup& g, const FiniteGroup& h,
                  const std::vector<std::size_t>& zeta) {
  for (std::size_t x = 0; x < g.order(); ++x) {
    for (std::size_t y = 0; y < g.order(); ++y) {
      if (zeta[g.mul(x, y)] != h.mul(zeta[x], zeta[y])) return false;
    }
  }
  return true;
}

AlmostEndoResult enumerate_almost_endos(const FiniteGroup& g,
                                        std::uint64_t node_budget) {
  AlmostEndoResult result;
  const std::size_t n = g.order();
  GroupSelfAction action = conjugation_self_action(g);

  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> zeta(n, kUnset);
  zeta[g.identity()] = g.identity();  // forced for piecewise homomorphisms

  // Partial consistency: every fully-assigned instance of a clause must hold.
  auto consistent_at = [&](std::size_t x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (zeta[y] == kUnset) continue;
      for (auto [p, q] : {std::pair{x, y}, std::pair{y, x}}) {
        if (g.commutes(p, q)) {
          if (!g.commutes(zeta[p], zeta[q])) return false;
          std::size_t prod = g.mul(p, q);
          if (zeta[prod] != kUnset && zeta[prod] != g.mul(zeta[p], zeta[q])) {
            return false;
          }
        }
        std::size_t conj = action.maps[p][q];
        if (zeta[conj] != kUnset &&
            action.maps[zeta[p]][zeta[q]] != zeta[conj]) {
          return false;
        }
      }
    }
    return true;
  };

  bool budget_hit = false;
  auto dfs = [&](auto&& self, std::size_t next) -> void {
    if (budget_hit) return;
    while (next < n && zeta[next] != kUnset) ++next;
    if (next == n) {
      if (!verify_almost_group_hom(g, g, zeta, action, action)) {
        result.entries.push_back({zeta, is_group_hom(g, g, zeta)});
      }
      return;
    }
    for (std::size_t v = 0; v < n; ++v) {
      if (++result.nodes > node_budget) {
        budget_hit = true;
        return;
      }
      // Propagate along the cyclic subgroup of `next`: powers are forced.
      std::vector<std::pair<std::size_t, std::size_t>> assigned;
      bool ok = true;
      std::size_t p = next, q = v;
      while (true) {
        if (zeta[p] == kUnset) {
          zeta[p] = q;
          assigned.emplace_back(p, q);
          if (!consistent_at(p)) {
            ok = false;
            break;
          }
        } else if (zeta[p] != q) {
          ok = false;
          break;
        }
        p = g.mul(p, next);
        q = g.mul(q, v);
        if (p == next) break;  // cycled through <next>
      }
      if (ok) self(self, next + 1);
      for (auto it = assigned.rbegin(); it != assigned.rend(); ++it) {
        zeta[it->first] = kUnset;
      }
      if (budget_hit) return;
    }
  };
  dfs(dfs, 0);
  result.complete = !budget_hit;
  std::sort(result.entries.begin(), result.entries.end(),
            [](const AlmostEndoEntry& a, const AlmostEndoEntry& b) {
              return a.table < b.table;
            });
  return result;
}

}  // namespace conesheaf
