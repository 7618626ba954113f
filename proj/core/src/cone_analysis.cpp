#include "conesheaf/cone_analysis.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <map>
#include <set>
#include <thread>

namespace conesheaf {

ConeVerdict is_effective_monic(const Cone& cone, const SearchLimits& limits) {
  ConeVerdict verdict;
  EnumerationResult enumeration = enumerate_compatible_families(cone, limits);
  verdict.nodes = enumeration.nodes;
  if (!enumeration.complete) {
    verdict.status = EmStatus::Budget;
    return verdict;
  }
  verdict.family_count = enumeration.families.size();

  std::vector<CompatibleFamily> canonical = canonical_map_to_families(cone);

  // Injectivity: two apex points with the same family.
  std::map<CompatibleFamily, std::size_t> first_seen;
  for (std::size_t x = 0; x < canonical.size(); ++x) {
    auto [it, fresh] = first_seen.emplace(canonical[x], x);
    if (!fresh) {
      verdict.status = EmStatus::No;
      verdict.witness_kind = ConeVerdict::WitnessKind::DuplicatedFamily;
      verdict.witness = canonical[x];
      verdict.duplicate_points = {it->second, x};
      return verdict;
    }
  }

  // Surjectivity: first enumerated family missed by the canonical map.
  for (const CompatibleFamily& fam : enumeration.families) {
    if (!first_seen.count(fam)) {
      verdict.status = EmStatus::No;
      verdict.witness_kind = ConeVerdict::WitnessKind::MissingFamily;
      verdict.witness = fam;
      return verdict;
    }
  }

  verdict.status = EmStatus::Yes;
  return verdict;
}

bool malcev_check(const Cone& cone) {
  if (cone.size() != 2) {
    throw Error(Errc::Arity, "Mal'cev criterion needs exactly two legs");
  }
  if (!is_jointly_injective(cone)) return false;

  const FinMap& f = cone.leg(0);
  const FinMap& g = cone.leg(1);
  const std::size_t ny = f.codomain().size();
  const std::size_t nz = g.codomain().size();
  std::vector<char> rel(ny * nz, 0);
  for (std::size_t x = 0; x < cone.apex().size(); ++x) {
    rel[f.apply(x) * nz + g.apply(x)] = 1;
  }
  for (std::size_t y = 0; y < ny; ++y) {
    for (std::size_t yp = 0; yp < ny; ++yp) {
      for (std::size_t z = 0; z < nz; ++z) {
        if (!rel[y * nz + z] || !rel[yp * nz + z]) continue;
        for (std::size_t zp = 0; zp < nz; ++zp) {
          if (rel[y * nz + zp] && !rel[yp * nz + zp]) return false;
        }
      }
    }
  }
  return true;
}

bool is_locally_injective(const Cone& cone) {
  const std::size_t n = cone.apex().size();
  for (std::size_t x = 0; x < n; ++x) {
    bool isolated = false;
    for (const FinMap& leg : cone.legs()) {
      bool alone = true;
      for (std::size_t xp = 0; xp < n && alone; ++xp) {
        if (xp != x && leg.apply(xp) == leg.apply(x)) alone = false;
      }
      if (alone) {
        isolated = true;
        break;
      }
    }
    if (!isolated) return false;
  }
  return true;
}

namespace {

std::string map_key(const FinMap& m) {
  std::string key;
  for (const std::string& p : m.codomain().points()) {
    key += p;
    key += '\x1f';
  }
  key += '|';
  for (std::size_t v : m.assignment()) {
    key += m.codomain().label(v);
    key += '\x1f';
  }
  return key;
}

FinMap tuple_leg(const Cone& cone, const std::vector<std::size_t>& idx) {
  std::vector<const FinSpace*> factors;
  factors.reserve(idx.size());
  for (std::size_t i : idx) factors.push_back(&cone.leg(i).codomain());

  // Full product space, lex over factor points.
  std::vector<std::string> labels;
  std::vector<std::vector<std::size_t>> coords;  // per product point
  std::vector<std::size_t> counter(idx.size(), 0);
  std::size_t total = 1;
  for (const FinSpace* s : factors) total *= s->size();
  labels.reserve(total);
  if (total > 0) {
    while (true) {
      std::string label = "(";
      for (std::size_t k = 0; k < counter.size(); ++k) {
        if (k) label += ",";
        label += factors[k]->label(counter[k]);
      }
      label += ")";
      labels.push_back(std::move(label));
      coords.push_back(counter);
      std::size_t k = counter.size();
      while (k > 0) {
        --k;
        if (++counter[k] < factors[k]->size()) break;
        counter[k] = 0;
        if (k == 0) goto done;
      }
    }
  }
done:
  std::string name = "(";
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (k) name += "x";
    name += factors[k]->name();
  }
  name += ")";
  FinSpace product(name, labels);

  std::vector<std::size_t> assignment(cone.apex().size());
  for (std::size_t x = 0; x < assignment.size(); ++x) {
    std::string label = "(";
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (k) label += ",";
      label += factors[k]->label(cone.leg(idx[k]).apply(x));
    }
    label += ")";
    assignment[x] = *product.index_of(label);
  }
  return FinMap(cone.apex(), product, std::move(assignment));
}

}  // namespace

Cone tupling_closure(const Cone& cone, std::size_t max_arity) {
  if (max_arity < 1) {
    throw Error(Errc::InvalidInput, "tupling closure needs max_arity >= 1");
  }
  std::vector<FinMap> legs;
  std::set<std::string> seen;
  for (std::size_t arity = 1; arity <= max_arity; ++arity) {
    std::vector<std::size_t> idx(arity, 0);
    while (true) {
      FinMap leg = arity == 1 ? cone.leg(idx[0]) : tuple_leg(cone, idx);
      if (seen.insert(map_key(leg)).second) legs.push_back(std::move(leg));
      std::size_t k = arity;
      bool carry = true;
      while (k > 0 && carry) {
        --k;
        carry = (++idx[k] == cone.size());
        if (carry) idx[k] = 0;
      }
      if (carry) break;
    }
  }
  return Cone(cone.apex(), std::move(legs));
}

namespace {

// A binary quotient of leg i's codomain, pulled back to a 2-coloring of the
// apex. ksupport marks the legs whose fibers are monochromatic under that
// coloring, i.e. the legs the composite factors through.
struct DirCandidate {
  std::size_t leg = 0;
  std::uint64_t mask = 0;  // block containing codomain point 0
  std::uint64_t ksupport = 0;
};

struct DirProblem {
  std::vector<DirCandidate> candidates;
  // Separation obligations: (leg, point p, point q).
  std::vector<std::array<std::size_t, 3>> constraints;
};

bool build_dir_problem(const Cone& cone, DirProblem& out) {
  const std::size_t L = cone.size();
  if (L > 64) return false;
  // Candidate count is sum over legs of 2^(|Y_i|-1) - 1; refuse blowups.
  double projected = 0;
  for (const FinMap& leg : cone.legs()) {
    const std::size_t n = leg.codomain().size();
    if (n > 24) return false;
    if (n >= 2) projected += static_cast<double>((1ULL << (n - 1)) - 1);
  }
  if (projected > 200000.0) return false;
  std::vector<std::vector<std::vector<std::size_t>>> fibers(L);
  for (std::size_t k = 0; k < L; ++k) fibers[k] = cone.leg(k).fibers();

  for (std::size_t i = 0; i < L; ++i) {
    const std::size_t n = cone.leg(i).codomain().size();
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        out.constraints.push_back({i, p, q});
      }
    }
    if (n < 2) continue;
    const std::uint64_t full = (n == 64) ? ~0ULL : ((1ULL << n) - 1);
    for (std::uint64_t mask = 1; mask != full; mask += 2) {
      if (!(mask & 1)) continue;  // canonical side contains point 0
      if ((mask | full) != full) continue;
      DirCandidate cand{i, mask, 0};
      // Apex coloring induced by the quotient.
      std::vector<char> color(cone.apex().size());
      for (std::size_t x = 0; x < color.size(); ++x) {
        color[x] = static_cast<char>((mask >> cone.leg(i).apply(x)) & 1);
      }
      for (std::size_t k = 0; k < L; ++k) {
        bool mono = true;
        for (const auto& fiber : fibers[k]) {
          for (std::size_t m = 1; m < fiber.size() && mono; ++m) {
            if (color[fiber[m]] != color[fiber[0]]) mono = false;
          }
          if (!mono) break;
        }
        if (mono) cand.ksupport |= (1ULL << k);
      }
      out.candidates.push_back(cand);
    }
  }
  return true;
}

FinMap mask_quotient(const FinSpace& space, std::uint64_t mask) {
  std::vector<std::size_t> cls(space.size());
  for (std::size_t p = 0; p < space.size(); ++p) {
    // Class reps: least point in block, matching make_quotient's convention.
    cls[p] = ((mask >> p) & 1) ? 0 : 1;
  }
  return quotient_map(make_quotient(space, cls));
}

}  // namespace

DirectednessVerdict is_directed(const Cone& cone, const DirectedSearchLimits& limits) {
  DirectednessVerdict verdict;
  const std::size_t L = cone.size();

  // Identity-quotient certificate: every leg pair's kernels have a common
  // refinement among the legs. Works at any size.
  {
    std::vector<std::vector<std::vector<std::size_t>>> fibers(L);
    for (std::size_t k = 0; k < L; ++k) fibers[k] = cone.leg(k).fibers();
    auto refines = [&](std::size_t k, std::size_t i, std::size_t j) {
      for (const auto& fiber : fibers[k]) {
        for (std::size_t m = 1; m < fiber.size(); ++m) {
          if (cone.leg(i).apply(fiber[m]) != cone.leg(i).apply(fiber[0])) return false;
          if (cone.leg(j).apply(fiber[m]) != cone.leg(j).apply(fiber[0])) return false;
        }
      }
      return true;
    };
    bool certified = true;
    for (std::size_t i = 0; i < L && certified; ++i) {
      for (std::size_t j = i; j < L && certified; ++j) {
        bool found = false;
        for (std::size_t k = 0; k < L && !found; ++k) found = refines(k, i, j);
        certified = found;
      }
    }
    if (certified) {
      verdict.status = DirectednessVerdict::Status::Directed;
      verdict.witness.resize(L);
      for (std::size_t i = 0; i < L; ++i) {
        verdict.witness[i] = {FinMap::identity(cone.leg(i).codomain())};
      }
      verdict.note = "identity-quotient certificate";
      return verdict;
    }
  }

  bool within_bounds = L <= limits.exact_max_legs;
  for (const FinMap& leg : cone.legs()) {
    within_bounds = within_bounds && leg.codomain().size() <= limits.exact_max_codomain;
  }

  DirProblem problem;
  if (!build_dir_problem(cone, problem)) {
    verdict.status = DirectednessVerdict::Status::Unknown;
    verdict.note = "instance too large for the witness search";
    return verdict;
  }

  // Set-cover DFS with pairwise clique compatibility on ksupport.
  std::vector<std::size_t> chosen;
  std::uint64_t nodes = 0;
  bool budget_hit = false;

  auto covers = [&](const DirCandidate& c, const std::array<std::size_t, 3>& con) {
    return c.leg == con[0] &&
           (((c.mask >> con[1]) & 1) != ((c.mask >> con[2]) & 1));
  };

  auto dfs = [&](auto&& self) -> bool {
    const std::array<std::size_t, 3>* open = nullptr;
    for (const auto& con : problem.constraints) {
      bool covered = false;
      for (std::size_t ci : chosen) {
        if (covers(problem.candidates[ci], con)) {
          covered = true;
          break;
        }
      }
      if (!covered) {
        open = &con;
        break;
      }
    }
    if (!open) return true;
    for (std::size_t ci = 0; ci < problem.candidates.size(); ++ci) {
      const DirCandidate& cand = problem.candidates[ci];
      if (!covers(cand, *open)) continue;
      if (++nodes > limits.node_budget) {
        budget_hit = true;
        return false;
      }
      bool clique = true;
      for (std::size_t cj : chosen) {
        if (!(cand.ksupport & problem.candidates[cj].ksupport)) {
          clique = false;
          break;
        }
      }
      if (!clique) continue;
      chosen.push_back(ci);
      if (self(self)) return true;
      chosen.pop_back();
      if (budget_hit) return false;
    }
    return false;
  };

  if (dfs(dfs)) {
    verdict.status = DirectednessVerdict::Status::Directed;
    verdict.witness.resize(L);
    for (std::size_t ci : chosen) {
      const DirCandidate& cand = problem.candidates[ci];
      verdict.witness[cand.leg].push_back(
          mask_quotient(cone.leg(cand.leg).codomain(), cand.mask));
    }
    verdict.note = "binary-quotient witness";
    return verdict;
  }
  if (budget_hit) {
    verdict.status = DirectednessVerdict::Status::Unknown;
    verdict.note = "witness search hit the node budget";
    return verdict;
  }
  if (within_bounds) {
    verdict.status = DirectednessVerdict::Status::NotDirected;
    verdict.note = "exhaustive over binary quotient witnesses";
    return verdict;
  }
  verdict.status = DirectednessVerdict::Status::Unknown;
  verdict.note = "no witness found; instance exceeds the exact-decision bounds";
  return verdict;
}

bool verify_directedness_witness(const Cone& cone,
                                 const std::vector<std::vector<FinMap>>& witness) {
  const std::size_t L = cone.size();
  if (witness.size() != L) return false;

  for (std::size_t i = 0; i < L; ++i) {
    const FinSpace& y = cone.leg(i).codomain();
    for (const FinMap& g : witness[i]) {
      if (!g.domain().same_points(y)) return false;
    }
    // The witness cone must separate the points of Y_i.
    for (std::size_t p = 0; p < y.size(); ++p) {
      for (std::size_t q = p + 1; q < y.size(); ++q) {
        bool separated = false;
        for (const FinMap& g : witness[i]) {
          if (g.apply(p) != g.apply(q)) {
            separated = true;
            break;
          }
        }
        if (!separated) return false;
      }
    }
  }

  // Every cross pair lifts through some leg: both composites must be
  // constant on that leg's fibers.
  auto factors_through = [&](std::size_t k, const FinMap& composite) {
    for (const auto& fiber : cone.leg(k).fibers()) {
      for (std::size_t m = 1; m < fiber.size(); ++m) {
        if (composite.apply(fiber[m]) != composite.apply(fiber[0])) return false;
      }
    }
    return true;
  };
  for (std::size_t i = 0; i < L; ++i) {
    for (const FinMap& g : witness[i]) {
      FinMap gi = compose(cone.leg(i), g);
      for (std::size_t j = 0; j < L; ++j) {
        for (const FinMap& h : witness[j]) {
          FinMap hj = compose(cone.leg(j), h);
          bool found = false;
          for (std::size_t k = 0; k < L && !found; ++k) {
            found = factors_through(k, gi) && factors_through(k, hj);
          }
          if (!found) return false;
        }
      }
    }
  }
  return true;
}

namespace {

// All partitions of {0..n-1} with at most max_blocks blocks, as restricted
// growth strings, in lex order.
std::vector<std::vector<std::size_t>> partitions_up_to(std::size_t n,
                                                       std::size_t max_blocks) {
  std::vector<std::vector<std::size_t>> out;
  if (n == 0) {
    out.push_back({});
    return out;
  }
  std::vector<std::size_t> rgs(n, 0);
  auto rec = [&](auto&& self, std::size_t i, std::size_t used) -> void {
    if (i == n) {
      out.push_back(rgs);
      return;
    }
    for (std::size_t b = 0; b <= used && b < max_blocks; ++b) {
      rgs[i] = b;
      self(self, i + 1, std::max(used, b + 1));
    }
  };
  rec(rec, 1, 1);  // rgs[0] = 0 always
  return out;
}

}  // namespace

RefinementResult search_refinement(const Cone& cone, const FinMap& h,
                                   const RefinementLimits& limits) {
  if (!h.domain().same_points(cone.apex())) {
    throw Error(Errc::SpaceMismatch, "quotient map must start at the cone apex");
  }
  RefinementResult result;
  const FinSpace& xp = h.codomain();

  auto accept = [&](const Cone& candidate) {
    if (is_effective_monic(candidate).status != EmStatus::Yes) return false;
    if (!limits.require_directed) return true;
    return is_directed(candidate).status == DirectednessVerdict::Status::Directed;
  };

  // Trivial case: h iso and the cone qualifies as its own refinement.
  if (h.is_injective() && h.is_surjective()) {
    std::vector<FinMap> transported;
    std::vector<std::size_t> hinv(xp.size());
    for (std::size_t x = 0; x < h.domain().size(); ++x) hinv[h.apply(x)] = x;
    for (const FinMap& leg : cone.legs()) {
      std::vector<std::size_t> assignment(xp.size());
      for (std::size_t y = 0; y < xp.size(); ++y) assignment[y] = leg.apply(hinv[y]);
      transported.emplace_back(xp, leg.codomain(), std::move(assignment));
    }
    Cone self_cone(xp, std::move(transported));
    if (accept(self_cone)) {
      result.status = RefinementResult::Status::Self;
      result.witness = std::move(self_cone);
      return result;
    }
  }

  // Candidate legs up to iso: partitions of X' with <= max_codomain blocks
  // whose pullback along h is refined by some leg kernel.
  std::vector<FinMap> candidates;
  for (const auto& rgs : partitions_up_to(xp.size(), limits.max_codomain)) {
    FinMap q = quotient_map(make_quotient(xp, rgs));
    FinMap qh = compose(h, q);
    bool factoring = false;
    for (const FinMap& leg : cone.legs()) {
      bool constant_on_fibers = true;
      for (const auto& fiber : leg.fibers()) {
        for (std::size_t m = 1; m < fiber.size() && constant_on_fibers; ++m) {
          if (qh.apply(fiber[m]) != qh.apply(fiber[0])) constant_on_fibers = false;
        }
        if (!constant_on_fibers) break;
      }
      if (constant_on_fibers) {
        factoring = true;
        break;
      }
    }
    if (factoring) candidates.push_back(std::move(q));
  }
  result.candidate_partitions = candidates.size();

  // All candidate sets of size 1..max_legs, canonical order (size, then lex).
  std::vector<std::vector<std::size_t>> sets;
  std::vector<std::size_t> current;
  auto gen = [&](auto&& self, std::size_t start, std::size_t want) -> void {
    if (current.size() == want) {
      sets.push_back(current);
      return;
    }
    for (std::size_t i = start; i < candidates.size(); ++i) {
      current.push_back(i);
      self(self, i + 1, want);
      current.pop_back();
    }
  };
  for (std::size_t size = 1; size <= limits.max_legs && size <= candidates.size();
       ++size) {
    gen(gen, 0, size);
  }

  bool truncated = sets.size() > limits.node_budget;
  if (truncated) sets.resize(static_cast<std::size_t>(limits.node_budget));
  result.sets_examined = sets.size();

  // Deterministic parallel scan: the lowest-index hit wins at any jobs count.
  const unsigned jobs = std::max(1u, limits.jobs);
  std::atomic<std::size_t> best{sets.size()};
  auto worker = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t s = lo; s < hi; ++s) {
      if (best.load(std::memory_order_relaxed) < lo) return;
      std::vector<FinMap> legs;
      legs.reserve(sets[s].size());
      for (std::size_t ci : sets[s]) legs.push_back(candidates[ci]);
      Cone candidate_cone(xp, std::move(legs));
      if (!is_jointly_injective(candidate_cone)) continue;
      if (accept(candidate_cone)) {
        std::size_t expected = best.load();
        while (s < expected && !best.compare_exchange_weak(expected, s)) {
        }
        return;
      }
    }
  };
  if (jobs == 1 || sets.size() < 2 * jobs) {
    worker(0, sets.size());
  } else {
    std::vector<std::thread> threads;
    const std::size_t chunk = (sets.size() + jobs - 1) / jobs;
    for (unsigned t = 0; t < jobs; ++t) {
      std::size_t lo = t * chunk;
      std::size_t hi = std::min(sets.size(), lo + chunk);
      if (lo < hi) threads.emplace_back(worker, lo, hi);
    }
    for (auto& th : threads) th.join();
  }

  if (best.load() < sets.size()) {
    std::vector<FinMap> legs;
    for (std::size_t ci : sets[best.load()]) legs.push_back(candidates[ci]);
    result.status = RefinementResult::Status::Found;
    result.witness = Cone(xp, std::move(legs));
    return result;
  }
  result.status =
      truncated ? RefinementResult::Status::Budget : RefinementResult::Status::None;
  return result;
}

GuaranteeVerdict classify_guarantee(const Cone& cone,
                                    const GuaranteeSearchParams& params,
                                    const Tolerances& tols) {
  if (is_effective_monic(cone).status != EmStatus::Yes) {
    throw Error(Errc::NotEffectiveMonic,
                "guarantee classification needs an effective-monic cone");
  }
  GuaranteeVerdict verdict;
  DirectednessVerdict directed = is_directed(cone);
  if (directed.status == DirectednessVerdict::Status::Directed) {
    verdict.status = GuaranteeVerdict::Status::Guaranteed;
    verdict.certificate = directed.witness;
    return verdict;
  }
  for (std::size_t dim : params.dims) {
    NoncommutingSearchParams search;
    search.dim = dim;
    search.trials = params.trials;
    search.seed = params.seed;
    search.jobs = params.jobs;
    if (auto witness = search_noncommuting_family(cone, search, tols)) {
      verdict.status = GuaranteeVerdict::Status::Refuted;
      verdict.refutation = std::move(witness);
      return verdict;
    }
  }
  verdict.status = GuaranteeVerdict::Status::Unknown;
  return verdict;
}

}  // namespace conesheaf
