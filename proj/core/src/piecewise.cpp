#include "conesheaf/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace conesheaf {

const char* to_string(ViolationWitness::Kind kind) {
  switch (kind) {
    case ViolationWitness::Kind::Multiplicativity: return "MULTIPLICATIVITY";
    case ViolationWitness::Kind::Additivity: return "ADDITIVITY";
    case ViolationWitness::Kind::CommutePreservation: return "COMMUTE_PRESERVATION";
    case ViolationWitness::Kind::Scalar: return "SCALAR";
    case ViolationWitness::Kind::Involution: return "INVOLUTION";
    case ViolationWitness::Kind::Unit: return "UNIT";
  }
  return "UNKNOWN";
}

PieceMap PieceMap::identity(std::size_t n) {
  return {n, n, Builtin::Identity, [](const CMatrix& a) { return a; }};
}

PieceMap PieceMap::transpose(std::size_t n) {
  return {n, n, Builtin::Transpose,
          [](const CMatrix& a) { return a.transpose().eval(); }};
}

PieceMap PieceMap::conjugation(const Unitary& u) {
  CMatrix m = u.get();
  std::size_t n = u.dim();
  return {n, n, Builtin::Conjugation,
          [m](const CMatrix& a) { return (m.adjoint() * a * m).eval(); }};
}

PieceMap PieceMap::embedding(std::size_t n, std::size_t copies) {
  if (copies < 1) throw Error(Errc::InvalidInput, "embedding needs copies >= 1");
  std::size_t m = n * copies;
  return {n, m, Builtin::Embedding, [n, m, copies](const CMatrix& a) {
            CMatrix out = CMatrix::Zero(m, m);
            for (std::size_t c = 0; c < copies; ++c) {
              out.block(c * n, c * n, n, n) = a;
            }
            return out;
          }};
}

PieceMap PieceMap::spectral_table(std::size_t n, SpectrumTable table, Tolerances tols) {
  return {n, n, Builtin::SpectralTable,
          [table = std::move(table), tols](const CMatrix& a) {
            return apply_function(NormalMatrix(a, 1e-7), table, tols).get();
          }};
}

PieceMap PieceMap::user(std::size_t n, std::size_t m,
                        std::function<CMatrix(const CMatrix&)> f) {
  return {n, m, Builtin::User, std::move(f)};
}

std::pair<CMatrix, CMatrix> CommutingPairSampler::pair(std::uint64_t k) const {
  SplitMix64 rng(derive_seed(seed_, k));
  CMatrix u = random_unitary(dim_, rng);
  Eigen::VectorXcd d1 = random_complex_vector(dim_, rng);
  Eigen::VectorXcd d2 = random_complex_vector(dim_, rng);
  CMatrix a = u * d1.asDiagonal() * u.adjoint();
  CMatrix b = u * d2.asDiagonal() * u.adjoint();
  return {std::move(a), std::move(b)};
}

std::pair<CMatrix, CMatrix> UnitaryPairSampler::pair(std::uint64_t k) const {
  SplitMix64 rng(derive_seed(seed_, k));
  bool want_noncommuting = dim_ > 1 && rng.uniform() < fraction_;
  if (!want_noncommuting) {
    // Commuting pair: common eigenbasis, unit-modulus spectra.
    CMatrix u = random_unitary(dim_, rng);
    Eigen::VectorXcd d1(dim_), d2(dim_);
    for (std::size_t j = 0; j < dim_; ++j) {
      double t1 = 2.0 * std::numbers::pi * rng.uniform();
      double t2 = 2.0 * std::numbers::pi * rng.uniform();
      d1(j) = Complex(std::cos(t1), std::sin(t1));
      d2(j) = Complex(std::cos(t2), std::sin(t2));
    }
    return {u * d1.asDiagonal() * u.adjoint(), u * d2.asDiagonal() * u.adjoint()};
  }
  for (int attempt = 0; attempt < 64; ++attempt) {
    CMatrix a = random_unitary(dim_, rng);
    CMatrix b = random_unitary(dim_, rng);
    if (commutator_norm(a, b) >= 0.1) return {std::move(a), std::move(b)};
  }
  throw Error(Errc::PreconditionFailed,
              "could not sample a noncommuting unitary pair");
}

namespace {

std::optional<ViolationWitness> violation(ViolationWitness::Kind kind,
                                          std::vector<CMatrix> ops, double residual,
                                          double tol) {
  if (residual <= tol) return std::nullopt;
  return ViolationWitness{kind, std::move(ops), residual};
}

}  // namespace

std::optional<ViolationWitness> verify_piecewise_hom(const PieceMap& zeta,
                                                     std::uint64_t samples,
                                                     std::uint64_t seed,
                                                     const Tolerances& tols) {
  const double tol = tols.tol_hom;
  const std::size_t n = zeta.source_dim;
  const Eigen::Index m = static_cast<Eigen::Index>(zeta.target_dim);

  {
    CMatrix unit_res = zeta.eval(CMatrix::Identity(n, n)) - CMatrix::Identity(m, m);
    if (auto w = violation(ViolationWitness::Kind::Unit,
                           {CMatrix::Identity(n, n)}, unit_res.norm(), tol)) {
      return w;
    }
  }

  CommutingPairSampler sampler(n, seed);
  for (std::uint64_t k = 0; k < samples; ++k) {
    auto [a, b] = sampler.pair(k);
    SplitMix64 scalar_rng(derive_seed(seed ^ 0x5ca1ab1eULL, k));
    Complex z = scalar_rng.complex_gaussian();

    CMatrix za = zeta.eval(a);
    CMatrix zb = zeta.eval(b);
    if (auto w = violation(ViolationWitness::Kind::CommutePreservation, {a, b},
                           commutator_norm(za, zb), tol)) {
      return w;
    }
    if (auto w = violation(ViolationWitness::Kind::Multiplicativity, {a, b},
                           (zeta.eval(a * b) - za * zb).norm(), tol)) {
      return w;
    }
    if (auto w = violation(ViolationWitness::Kind::Additivity, {a, b},
                           (zeta.eval(a + b) - za - zb).norm(), tol)) {
      return w;
    }
    if (auto w = violation(ViolationWitness::Kind::Scalar, {a},
                           (zeta.eval(z * a) - z * za).norm(), tol)) {
      return w;
    }
    if (auto w = violation(ViolationWitness::Kind::Involution, {a},
                           (zeta.eval(a.adjoint()) - za.adjoint()).norm(), tol)) {
      return w;
    }
  }
  return std::nullopt;
}

std::optional<ViolationWitness> check_unitary_multiplicativity(
    const PieceMap& zeta, std::uint64_t samples, std::uint64_t seed,
    const Tolerances& tols) {
  UnitaryPairSampler sampler(zeta.source_dim, seed);
  for (std::uint64_t k = 0; k < samples; ++k) {
    auto [u, v] = sampler.pair(k);
    double r = (zeta.eval(u * v) - zeta.eval(u) * zeta.eval(v)).norm();
    if (auto w = violation(ViolationWitness::Kind::Multiplicativity, {u, v}, r,
                           tols.tol_hom)) {
      return w;
    }
  }
  return std::nullopt;
}

ExtensionResult extend(const PieceMap& zeta, std::uint64_t samples,
                       std::uint64_t seed, const Tolerances& tols) {
  const Complex i_unit(0.0, 1.0);
  auto eval = zeta.eval;
  auto extension = [eval, i_unit](const CMatrix& g) {
    CMatrix re = (g + g.adjoint()) / 2.0;
    CMatrix im = (g - g.adjoint()) / (2.0 * i_unit);
    return (eval(re) + i_unit * eval(im)).eval();
  };

  ExtensionResult result;
  result.extension = extension;
  ExtensionReport& report = result.report;
  const double tol = tols.tol_hom;
  const std::size_t n = zeta.source_dim;
  const Eigen::Index m = static_cast<Eigen::Index>(zeta.target_dim);

  report.unit.samples = 1;
  report.unit.max_residual =
      (extension(CMatrix::Identity(n, n)) - CMatrix::Identity(m, m)).norm();
  report.unit.pass = report.unit.max_residual <= tol;

  SplitMix64 rng(derive_seed(seed, 0xe27e4dULL));
  for (std::uint64_t k = 0; k < samples; ++k) {
    // Arbitrary, generically noncommuting operands.
    CMatrix g = random_gaussian_matrix(n, rng);
    CMatrix h = random_gaussian_matrix(n, rng);
    Complex z = rng.complex_gaussian();

    double lin = (extension(g + h) - extension(g) - extension(h)).norm();
    lin = std::max(lin, (extension(z * g) - z * extension(g)).norm());
    report.linearity.max_residual = std::max(report.linearity.max_residual, lin);
    ++report.linearity.samples;

    double mul = (extension(g * h) - extension(g) * extension(h)).norm();
    report.multiplicativity.max_residual =
        std::max(report.multiplicativity.max_residual, mul);
    ++report.multiplicativity.samples;

    double inv = (extension(g.adjoint()) - extension(g).adjoint()).norm();
    report.involution.max_residual = std::max(report.involution.max_residual, inv);
    ++report.involution.samples;
  }
  report.linearity.pass = report.linearity.max_residual <= tol;
  report.multiplicativity.pass = report.multiplicativity.max_residual <= tol;
  report.involution.pass = report.involution.max_residual <= tol;
  return result;
}

void validate_ray_system(const RaySystem& rays, const Tolerances& tols) {
  for (const auto& ray : rays.rays) {
    if (static_cast<std::size_t>(ray.size()) != rays.dim) {
      throw Error(Errc::InvalidInput, "ray dimension mismatch");
    }
  }
  for (const auto& basis : rays.bases) {
    if (basis.size() != rays.dim) {
      throw Error(Errc::InvalidInput, "basis must contain dim rays");
    }
    for (std::size_t r : basis) {
      if (r >= rays.rays.size()) {
        throw Error(Errc::InvalidInput, "basis ray index out of range");
      }
    }
    for (std::size_t p = 0; p < basis.size(); ++p) {
      for (std::size_t q = 0; q < basis.size(); ++q) {
        Complex ip = rays.rays[basis[p]].adjoint() * rays.rays[basis[q]];
        double want = p == q ? 1.0 : 0.0;
        if (std::abs(ip - want) > tols.tol_normal) {
          throw Error(Errc::InvalidInput, "basis is not orthonormal");
        }
      }
    }
  }
}

KsResult ks_assignment_search(const RaySystem& rays, const KsLimits& limits) {
  validate_ray_system(rays);
  KsResult result;
  const std::size_t R = rays.rays.size();
  std::vector<std::vector<std::size_t>> bases_of_ray(R);
  for (std::size_t b = 0; b < rays.bases.size(); ++b) {
    for (std::size_t r : rays.bases[b]) bases_of_ray[r].push_back(b);
  }

  std::vector<int> value(R, -1);
  std::vector<std::size_t> ones(rays.bases.size(), 0);
  std::vector<std::size_t> unassigned(rays.bases.size());
  for (std::size_t b = 0; b < rays.bases.size(); ++b) {
    unassigned[b] = rays.bases[b].size();
  }
  bool budget_hit = false;

  auto feasible = [&](std::size_t b) {
    if (ones[b] > 1) return false;
    if (ones[b] == 0 && unassigned[b] == 0) return false;
    return true;
  };

  auto dfs = [&](auto&& self, std::size_t r) -> bool {
    if (budget_hit) return false;
    if (r == R) {
      for (std::size_t b = 0; b < rays.bases.size(); ++b) {
        if (ones[b] != 1) return false;
      }
      ++result.solutions;
      if (result.assignment.empty()) result.assignment = value;
      return !limits.count_all;  // keep going when counting
    }
    for (int v = 0; v <= 1; ++v) {
      if (++result.nodes > limits.node_budget) {
        budget_hit = true;
        return false;
      }
      value[r] = v;
      bool ok = true;
      for (std::size_t b : bases_of_ray[r]) {
        ones[b] += static_cast<std::size_t>(v);
        unassigned[b] -= 1;
        ok = ok && feasible(b);
      }
      if (ok && self(self, r + 1)) return true;
      for (std::size_t b : bases_of_ray[r]) {
        ones[b] -= static_cast<std::size_t>(v);
        unassigned[b] += 1;
      }
      value[r] = -1;
    }
    return false;
  };

  dfs(dfs, 0);
  if (budget_hit) {
    result.status = KsResult::Status::Budget;
  } else if (result.solutions > 0 || !result.assignment.empty()) {
    result.status = KsResult::Status::Sat;
  } else {
    result.status = KsResult::Status::Unsat;
  }
  return result;
}

}  // namespace conesheaf
