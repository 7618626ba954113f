#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "conesheaf/piecewise.hpp"

namespace conesheaf {

CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();

/// Assignment of a piecewise endomap of normals to every unitary.
struct SelfAction {
  enum class Builtin { Conjugation, Trivial, User };

  std::size_t dim = 0;
  Builtin tag = Builtin::User;
  std::function<PieceMap(const Unitary&)> act;

  static SelfAction conjugation(std::size_t n);
  static SelfAction trivial(std::size_t n);
  static SelfAction user(std::size_t n, std::function<PieceMap(const Unitary&)> f);
};

struct SelfActionViolation {
  enum class Kind {
    FixedWithoutCommuting,  // a(nu)(tau) = tau although [nu, tau] is large
    MovedWhileCommuting,    // [nu, tau] = 0 but a(nu)(tau) != tau
    Multiplicativity,       // a(nu tau) != a(nu) a(tau) on commuting nu, tau
  };
  Kind kind;
  CMatrix nu, tau;
  double residual = 0;
};

const char* to_string(SelfActionViolation::Kind kind);

/// Checks fixed-point <=> commutation (both directions, on a mix of
/// commuting and clearly noncommuting unitary pairs) and multiplicativity
/// on commuting pairs evaluated on sampled normals.
std::optional<SelfActionViolation> verify_self_action(const SelfAction& action,
                                                      std::uint64_t samples,
                                                      std::uint64_t seed,
                                                      const Tolerances& tols = {});

struct AlmostHomViolation {
  CMatrix nu, alpha;
  double residual = 0;
};

/// Conjugation intertwining: zeta(nu)* zeta(alpha) zeta(nu) = zeta(nu* alpha nu)
/// on sampled (unitary, normal) pairs, not necessarily commuting.
std::optional<AlmostHomViolation> verify_almost_hom(const PieceMap& zeta,
                                                    std::uint64_t samples,
                                                    std::uint64_t seed,
                                                    const Tolerances& tols = {});

struct CocycleSample {
  CMatrix nu, tau;
  CMatrix value;  // zeta(nu tau)* zeta(nu) zeta(tau)
  double centrality_residual = 0;
  double unitarity_residual = 0;
};

/// Throws NotUnitary when zeta(nu), zeta(tau) or zeta(nu tau) fails
/// unitarity. Centrality is measured against sampled image elements only.
CocycleSample compute_cocycle(const PieceMap& zeta, const Unitary& nu,
                              const Unitary& tau, std::uint64_t image_samples = 32,
                              std::uint64_t seed = 0, const Tolerances& tols = {});

struct CocycleIdentityViolation {
  CMatrix nu, tau, chi;
  double residual = 0;
};

/// The 4-term identity c(tau,chi) c(nu tau,chi)* c(nu,tau chi) c(nu,tau)* = 1
/// over sampled unitary triples. Throws PreconditionFailed unless zeta
/// passes verify_almost_hom at the same seed.
std::optional<CocycleIdentityViolation> verify_cocycle_identity(
    const PieceMap& zeta, std::uint64_t triples, std::uint64_t seed,
    const Tolerances& tols = {});

struct M2ExtendResult {
  enum class Status { Ok, GeneratorRelationsFail };
  Status status = Status::Ok;
  double sx_square_residual = 0;
  double sy_square_residual = 0;
  double anticommute_residual = 0;
  /// Linear multiplicative extension off the images of the two Clifford
  /// generators (valid when Ok).
  std::function<CMatrix(const CMatrix&)> extension;
  double max_deviation = 0;           // ||ext(alpha) - zeta(alpha)|| over samples
  double basis_closure_residual = 0;  // products on {1, sx, sy, sx sy}
};

/// The M_2 reconstruction: checks zeta(sx)^2 = zeta(sy)^2 = 1 and the
/// anticommutation of the images, then extends linearly from the generator
/// word basis and reports the deviation from zeta on sampled normals.
/// Throws PreconditionFailed unless source dim is 2 and zeta passes
/// verify_almost_hom.
M2ExtendResult m2_extend(const PieceMap& zeta, std::uint64_t samples = 100,
                         std::uint64_t seed = 0, const Tolerances& tols = {});

}  // namespace conesheaf
