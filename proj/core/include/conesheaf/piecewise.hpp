#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "conesheaf/matstar.hpp"
#include "conesheaf/rng.hpp"

namespace conesheaf {

/// A total function on the normal part of M_n. Builtins carry their
/// closed-form evaluators; spectral tables relabel eigenvalues through
/// functional calculus.
struct PieceMap {
  enum class Builtin { Identity, Transpose, Conjugation, Embedding, SpectralTable, User };

  std::size_t source_dim = 0;
  std::size_t target_dim = 0;
  Builtin tag = Builtin::User;
  std::function<CMatrix(const CMatrix&)> eval;

  static PieceMap identity(std::size_t n);
  static PieceMap transpose(std::size_t n);
  static PieceMap conjugation(const Unitary& u);
  /// Unital block embedding M_n -> M_{n*copies}, copies >= 1.
  static PieceMap embedding(std::size_t n, std::size_t copies);
  static PieceMap spectral_table(std::size_t n, SpectrumTable table,
                                 Tolerances tols = {});
  static PieceMap user(std::size_t n, std::size_t m,
                       std::function<CMatrix(const CMatrix&)> f);
};

struct ViolationWitness {
  enum class Kind {
    Multiplicativity,
    Additivity,
    CommutePreservation,
    Scalar,
    Involution,
    Unit,
  };
  Kind kind;
  std::vector<CMatrix> operands;
  double residual = 0;
};

const char* to_string(ViolationWitness::Kind kind);

/// Commuting normal pairs via the shared-unitary construction: one random
/// unitary conjugating two random diagonals.
class CommutingPairSampler {
 public:
  CommutingPairSampler(std::size_t dim, std::uint64_t seed)
      : dim_(dim), seed_(seed) {}
  /// The k-th pair of the stream; derived seeds make this order-free.
  std::pair<CMatrix, CMatrix> pair(std::uint64_t k) const;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

/// Unitary pairs with a guaranteed fraction of clearly noncommuting ones
/// (commutator norm >= 0.1), obtained by rejection. In dimension 1 all
/// pairs commute and the quota is dropped.
class UnitaryPairSampler {
 public:
  UnitaryPairSampler(std::size_t dim, std::uint64_t seed,
                     double noncommuting_fraction = 0.5)
      : dim_(dim), seed_(seed), fraction_(noncommuting_fraction) {}
  std::pair<CMatrix, CMatrix> pair(std::uint64_t k) const;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
  double fraction_;
};

/// Checks all piecewise *-homomorphism clauses on sampled commuting pairs:
/// commute preservation, multiplicativity and additivity on the pair,
/// scalar homogeneity, involution, unit. Returns the first violation.
std::optional<ViolationWitness> verify_piecewise_hom(const PieceMap& zeta,
                                                     std::uint64_t samples,
                                                     std::uint64_t seed,
                                                     const Tolerances& tols = {});

/// ||zeta(nu tau) - zeta(nu) zeta(tau)|| over sampled unitary pairs, not
/// necessarily commuting.
std::optional<ViolationWitness> check_unitary_multiplicativity(
    const PieceMap& zeta, std::uint64_t samples, std::uint64_t seed,
    const Tolerances& tols = {});

struct ClauseReport {
  bool pass = true;
  double max_residual = 0;
  std::uint64_t samples = 0;
};

struct ExtensionReport {
  ClauseReport linearity;
  ClauseReport multiplicativity;
  ClauseReport involution;
  ClauseReport unit;
  // A pass is sampled evidence, not a proof; reports must say so.
  static constexpr const char* kEvidenceNote =
      "sample-based evidence on seeded inputs, not a proof";

  bool clean() const {
    return linearity.pass && multiplicativity.pass && involution.pass && unit.pass;
  }
};

struct ExtensionResult {
  /// zeta_hat(a + ib) = zeta(a) + i zeta(b), totalized over all of M_n.
  std::function<CMatrix(const CMatrix&)> extension;
  ExtensionReport report;
};

/// Self-adjoint-decomposition extension, verified as a *-homomorphism on
/// seeded samples (including noncommuting pairs); failures land in the
/// report, never as errors.
ExtensionResult extend(const PieceMap& zeta, std::uint64_t samples,
                       std::uint64_t seed, const Tolerances& tols = {});

/// Rays shared across orthonormal bases by index identity.
struct RaySystem {
  std::size_t dim = 0;
  std::vector<Eigen::VectorXcd> rays;
  std::vector<std::vector<std::size_t>> bases;
};

/// Throws InvalidInput when a basis is not orthonormal to tol_normal or
/// indices are out of range.
void validate_ray_system(const RaySystem& rays, const Tolerances& tols = {});

struct KsLimits {
  std::uint64_t node_budget = 10'000'000;
  bool count_all = false;
};

struct KsResult {
  enum class Status { Sat, Unsat, Budget };
  Status status = Status::Unsat;
  std::vector<int> assignment;  // lexicographically least model when Sat
  std::uint64_t nodes = 0;
  std::uint64_t solutions = 0;  // populated when count_all
};

/// Exact backtracking over 0/1 ray assignments with "exactly one 1 per
/// basis"; Unsat carries the exhausted search statistics.
KsResult ks_assignment_search(const RaySystem& rays, const KsLimits& limits = {});

}  // namespace conesheaf
