#include "conesheaf/almost.hpp"

#include <algorithm>
#include <cmath>

namespace conesheaf {

CMatrix pauli_x() {
  CMatrix m(2, 2);
  m << Complex(0, 0), Complex(1, 0), Complex(1, 0), Complex(0, 0);
  return m;
}

CMatrix pauli_y() {
  CMatrix m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

CMatrix pauli_z() {
  CMatrix m(2, 2);
  m << Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(-1, 0);
  return m;
}

const char* to_string(SelfActionViolation::Kind kind) {
  switch (kind) {
    case SelfActionViolation::Kind::FixedWithoutCommuting:
      return "FIXED_WITHOUT_COMMUTING";
    case SelfActionViolation::Kind::MovedWhileCommuting:
      return "MOVED_WHILE_COMMUTING";
    case SelfActionViolation::Kind::Multiplicativity:
      return "MULTIPLICATIVITY";
  }
  return "UNKNOWN";
}

SelfAction SelfAction::conjugation(std::size_t n) {
  return {n, Builtin::Conjugation,
          [](const Unitary& u) { return PieceMap::conjugation(u); }};
}

SelfAction SelfAction::trivial(std::size_t n) {
  return {n, Builtin::Trivial,
          [n](const Unitary&) { return PieceMap::identity(n); }};
}

SelfAction SelfAction::user(std::size_t n, std::function<PieceMap(const Unitary&)> f) {
  return {n, Builtin::User, std::move(f)};
}

namespace {

// Structured first pair in dimension >= 2: a diagonal sign flip and a cyclic
// shift, which do not commute.
std::pair<CMatrix, CMatrix> structured_unitary_pair(std::size_t n) {
  CMatrix a = CMatrix::Identity(n, n);
  a(1, 1) = Complex(-1, 0);
  CMatrix b = CMatrix::Zero(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    b((j + 1) % n, j) = Complex(1, 0);
  }
  return {a, b};
}

}  // namespace

std::optional<SelfActionViolation> verify_self_action(const SelfAction& action,
                                                      std::uint64_t samples,
                                                      std::uint64_t seed,
                                                      const Tolerances& tols) {
  const double tol = tols.tol_hom;
  UnitaryPairSampler pairs(action.dim, seed);
  CommutingPairSampler normals(action.dim, derive_seed(seed, 0xabcdefULL));

  for (std::uint64_t k = 0; k < samples; ++k) {
    CMatrix nu, tau;
    if (k == 0 && action.dim >= 2) {
      std::tie(nu, tau) = structured_unitary_pair(action.dim);
    } else {
      std::tie(nu, tau) = pairs.pair(k);
    }
    double comm = commutator_norm(nu, tau);
    PieceMap anu = action.act(Unitary(nu));
    double fix = (anu.eval(tau) - tau).norm();

    if (comm <= tols.tol_commute && fix > tol) {
      return SelfActionViolation{SelfActionViolation::Kind::MovedWhileCommuting, nu,
                                 tau, fix};
    }
    // Sampler guarantees noncommuting pairs have commutator >= 0.1, so the
    // converse direction has a clean margin.
    if (comm >= 0.1 && fix <= tol) {
      return SelfActionViolation{SelfActionViolation::Kind::FixedWithoutCommuting,
                                 nu, tau, comm};
    }

    if (comm <= tols.tol_commute) {
      PieceMap atau = action.act(Unitary(tau));
      PieceMap aprod = action.act(Unitary(nu * tau));
      auto [gamma, gamma2] = normals.pair(k);
      (void)gamma2;
      double mult = (aprod.eval(gamma) - anu.eval(atau.eval(gamma))).norm();
      if (mult > tol) {
        return SelfActionViolation{SelfActionViolation::Kind::Multiplicativity, nu,
                                   tau, mult};
      }
    }
  }
  return std::nullopt;
}

std::optional<AlmostHomViolation> verify_almost_hom(const PieceMap& zeta,
                                                    std::uint64_t samples,
                                                    std::uint64_t seed,
                                                    const Tolerances& tols) {
  const std::size_t n = zeta.source_dim;
  SplitMix64 rng(derive_seed(seed, 0xa1105ULL));
  for (std::uint64_t k = 0; k < samples; ++k) {
    CMatrix nu = random_unitary(n, rng);
    CMatrix u = random_unitary(n, rng);
    Eigen::VectorXcd d = random_complex_vector(n, rng);
    CMatrix alpha = u * d.asDiagonal() * u.adjoint();

    CMatrix znu = zeta.eval(nu);
    CMatrix lhs = znu.adjoint() * zeta.eval(alpha) * znu;
    CMatrix rhs = zeta.eval((nu.adjoint() * alpha * nu).eval());
    double r = (lhs - rhs).norm();
    if (r > tols.tol_hom) {
      return AlmostHomViolation{nu, alpha, r};
    }
  }
  return std::nullopt;
}

CocycleSample compute_cocycle(const PieceMap& zeta, const Unitary& nu,
                              const Unitary& tau, std::uint64_t image_samples,
                              std::uint64_t seed, const Tolerances& tols) {
  CMatrix znu = zeta.eval(nu.get());
  CMatrix ztau = zeta.eval(tau.get());
  CMatrix zprod = zeta.eval((nu.get() * tau.get()).eval());
  for (const CMatrix* m : {&znu, &ztau, &zprod}) {
    if (unitarity_residual(*m) > tols.tol_hom) {
      throw Error(Errc::NotUnitary, "zeta image of a unitary is not unitary");
    }
  }
  CocycleSample sample;
  sample.nu = nu.get();
  sample.tau = tau.get();
  sample.value = zprod.adjoint() * znu * ztau;
  sample.unitarity_residual = unitarity_residual(sample.value);

  CommutingPairSampler normals(zeta.source_dim, derive_seed(seed, 0xcc1eULL));
  double central = 0;
  for (std::uint64_t k = 0; k < image_samples; ++k) {
    auto [a, b] = normals.pair(k);
    (void)b;
    central = std::max(central, commutator_norm(sample.value, zeta.eval(a)));
  }
  sample.centrality_residual = central;
  return sample;
}

std::optional<CocycleIdentityViolation> verify_cocycle_identity(
    const PieceMap& zeta, std::uint64_t triples, std::uint64_t seed,
    const Tolerances& tols) {
  if (verify_almost_hom(zeta, std::max<std::uint64_t>(triples, 64), seed, tols)) {
    throw Error(Errc::PreconditionFailed,
                "zeta fails the conjugation-intertwining check at this seed");
  }
  const std::size_t n = zeta.source_dim;
  const Eigen::Index m = static_cast<Eigen::Index>(zeta.target_dim);
  SplitMix64 rng(derive_seed(seed, 0xc0c1cULL));
  auto c = [&](const CMatrix& a, const CMatrix& b) {
    return compute_cocycle(zeta, Unitary(a), Unitary(b), 4, seed, tols).value;
  };
  for (std::uint64_t k = 0; k < triples; ++k) {
    CMatrix nu = random_unitary(n, rng);
    CMatrix tau = random_unitary(n, rng);
    CMatrix chi = random_unitary(n, rng);
    CMatrix lhs = c(tau, chi) * c((nu * tau).eval(), chi).adjoint() *
                  c(nu, (tau * chi).eval()) * c(nu, tau).adjoint();
    double r = (lhs - CMatrix::Identity(m, m)).norm();
    if (r > tols.tol_hom) {
      return CocycleIdentityViolation{nu, tau, chi, r};
    }
  }
  return std::nullopt;
}

M2ExtendResult m2_extend(const PieceMap& zeta, std::uint64_t samples,
                         std::uint64_t seed, const Tolerances& tols) {
  if (zeta.source_dim != 2) {
    throw Error(Errc::PreconditionFailed, "m2_extend needs source dimension 2");
  }
  if (verify_almost_hom(zeta, std::max<std::uint64_t>(samples, 64), seed, tols)) {
    throw Error(Errc::PreconditionFailed,
                "zeta fails the conjugation-intertwining check at this seed");
  }

  M2ExtendResult result;
  const CMatrix sx = pauli_x();
  const CMatrix sy = pauli_y();
  const Eigen::Index m = static_cast<Eigen::Index>(zeta.target_dim);
  const CMatrix id_m = CMatrix::Identity(m, m);

  CMatrix zx = zeta.eval(sx);
  CMatrix zy = zeta.eval(sy);
  result.sx_square_residual = (zx * zx - id_m).norm();
  result.sy_square_residual = (zy * zy - id_m).norm();
  result.anticommute_residual = (zx * zy + zy * zx).norm();
  if (std::max({result.sx_square_residual, result.sy_square_residual,
                result.anticommute_residual}) > 1e-9) {
    result.status = M2ExtendResult::Status::GeneratorRelationsFail;
    return result;
  }

  // Hilbert-Schmidt coordinates in the word basis {1, sx, sy, sx sy}.
  const CMatrix sxy = sx * sy;
  const CMatrix zxy = zx * zy;
  auto extension = [sx, sy, sxy, zx, zy, zxy, id_m](const CMatrix& a) {
    Complex c0 = a.trace() / 2.0;
    Complex c1 = (a * sx.adjoint()).trace() / 2.0;
    Complex c2 = (a * sy.adjoint()).trace() / 2.0;
    Complex c3 = (a * sxy.adjoint()).trace() / 2.0;
    return (c0 * id_m + c1 * zx + c2 * zy + c3 * zxy).eval();
  };
  result.extension = extension;

  // Closure of the generator word basis under products.
  {
    const CMatrix basis2[4] = {CMatrix::Identity(2, 2), sx, sy, sxy};
    double worst = 0;
    for (const CMatrix& p : basis2) {
      for (const CMatrix& q : basis2) {
        worst = std::max(worst,
                         (extension((p * q).eval()) - extension(p) * extension(q)).norm());
      }
    }
    result.basis_closure_residual = worst;
  }

  CommutingPairSampler normals(2, derive_seed(seed, 0x2e72ULL));
  double deviation = 0;
  for (std::uint64_t k = 0; k < samples; ++k) {
    auto [alpha, beta] = normals.pair(k);
    (void)beta;
    deviation = std::max(deviation, (extension(alpha) - zeta.eval(alpha)).norm());
  }
  result.max_deviation = deviation;
  return result;
}

}  // namespace conesheaf
