#include "conesheaf/matstar.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "conesheaf/cone_analysis.hpp"
#include "conesheaf/rng.hpp"
#include "conesheaf/union_find.hpp"

namespace conesheaf {

double frobenius_norm(const CMatrix& a) { return a.norm(); }

double normality_residual(const CMatrix& a) {
  return (a * a.adjoint() - a.adjoint() * a).norm();
}

double commutator_norm(const CMatrix& a, const CMatrix& b) {
  return (a * b - b * a).norm();
}

double unitarity_residual(const CMatrix& a) {
  return (a.adjoint() * a - CMatrix::Identity(a.rows(), a.cols())).norm();
}

double projection_residual(const CMatrix& a) {
  return std::max((a * a - a).norm(), (a.adjoint() - a).norm());
}

NormalMatrix::NormalMatrix(CMatrix m, double tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) {
    throw Error(Errc::InvalidInput, "normal matrix must be square");
  }
  residual_ = normality_residual(m_);
  if (residual_ > tol) {
    throw Error(Errc::NotNormal, "normality residual " + std::to_string(residual_) +
                                     " exceeds tolerance");
  }
}

Unitary::Unitary(CMatrix m, double tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) {
    throw Error(Errc::InvalidInput, "unitary must be square");
  }
  if (unitarity_residual(m_) > tol) {
    throw Error(Errc::NotUnitary, "unitarity residual exceeds tolerance");
  }
}

Projection::Projection(CMatrix m, double tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) {
    throw Error(Errc::InvalidInput, "projection must be square");
  }
  if (projection_residual(m_) > tol) {
    throw Error(Errc::InvalidInput, "projection residual exceeds tolerance");
  }
}

PartitionOfUnity::PartitionOfUnity(FinSpace space, std::vector<CMatrix> projections,
                                   const Tolerances& tols)
    : space_(std::move(space)), projections_(std::move(projections)) {
  if (projections_.size() != space_.size()) {
    throw Error(Errc::InvalidInput, "partition needs one projection per point");
  }
  if (projections_.empty()) {
    throw Error(Errc::InvalidInput, "partition of unity over the empty space");
  }
  dim_ = static_cast<std::size_t>(projections_.front().rows());
  const double tol = tols.tol_normal;
  CMatrix sum = CMatrix::Zero(dim_, dim_);
  for (const CMatrix& p : projections_) {
    if (p.rows() != static_cast<Eigen::Index>(dim_) ||
        p.cols() != static_cast<Eigen::Index>(dim_)) {
      throw Error(Errc::InvalidInput, "partition projections must share dimension");
    }
    if ((p.adjoint() - p).norm() > tol) {
      throw Error(Errc::InvalidInput, "partition member is not self-adjoint");
    }
    sum += p;
  }
  for (std::size_t i = 0; i < projections_.size(); ++i) {
    for (std::size_t j = i + 1; j < projections_.size(); ++j) {
      if ((projections_[i] * projections_[j]).norm() > tol) {
        throw Error(Errc::InvalidInput, "partition members are not orthogonal");
      }
    }
  }
  if ((sum - CMatrix::Identity(dim_, dim_)).norm() > tol) {
    throw Error(Errc::InvalidInput, "partition does not sum to the identity");
  }
}

CMatrix SpectralDecomposition::reconstruct() const {
  if (projections.empty()) return CMatrix();
  CMatrix out = CMatrix::Zero(projections.front().rows(), projections.front().cols());
  for (std::size_t k = 0; k < projections.size(); ++k) {
    out += eigenvalues[k] * projections[k];
  }
  return out;
}

namespace {

bool complex_less(Complex a, Complex b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

// Orthonormal eigenbasis of a normal matrix, columns grouped into
// eigenvalue clusters. Stage one diagonalizes the self-adjoint part; stage
// two diagonalizes the skew part inside each eigenvalue cluster of stage one.
struct EigBasis {
  CMatrix basis;                          // unitary
  std::vector<std::size_t> cluster_start; // boundaries into columns
  std::vector<Complex> values;            // one representative per cluster
};

EigBasis normal_eig_basis(const CMatrix& a, double cluster_gap) {
  const Eigen::Index n = a.rows();
  const Complex i_unit(0.0, 1.0);
  CMatrix h = (a + a.adjoint()) / 2.0;
  CMatrix s = (a - a.adjoint()) / (2.0 * i_unit);

  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  CMatrix basis = es.eigenvectors();
  Eigen::VectorXd hv = es.eigenvalues();

  // Chain clusters of the (sorted) self-adjoint spectrum.
  Eigen::Index lo = 0;
  while (lo < n) {
    Eigen::Index hi = lo + 1;
    while (hi < n && hv(hi) - hv(hi - 1) <= cluster_gap) ++hi;
    if (hi - lo > 1) {
      CMatrix block = basis.middleCols(lo, hi - lo);
      CMatrix m = block.adjoint() * s * block;
      m = (m + m.adjoint()) / 2.0;
      Eigen::SelfAdjointEigenSolver<CMatrix> es2(m);
      basis.middleCols(lo, hi - lo) = block * es2.eigenvectors();
    }
    lo = hi;
  }

  std::vector<Complex> col_values(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    col_values[static_cast<std::size_t>(j)] =
        (basis.col(j).adjoint() * a * basis.col(j))(0, 0);
  }

  // Group columns whose eigenvalues sit within cluster_gap of each other.
  UnionFind uf(static_cast<std::size_t>(n));
  for (std::size_t p = 0; p < col_values.size(); ++p) {
    for (std::size_t q = p + 1; q < col_values.size(); ++q) {
      if (std::abs(col_values[p] - col_values[q]) <= cluster_gap) uf.unite(p, q);
    }
  }
  std::vector<std::vector<std::size_t>> groups;
  {
    std::vector<std::size_t> root_to_group(static_cast<std::size_t>(n), SIZE_MAX);
    for (std::size_t j = 0; j < col_values.size(); ++j) {
      std::size_t r = uf.find(j);
      if (root_to_group[r] == SIZE_MAX) {
        root_to_group[r] = groups.size();
        groups.emplace_back();
      }
      groups[root_to_group[r]].push_back(j);
    }
  }
  std::vector<Complex> means(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    Complex sum = 0;
    for (std::size_t j : groups[g]) sum += col_values[j];
    means[g] = sum / static_cast<double>(groups[g].size());
  }
  std::vector<std::size_t> order(groups.size());
  for (std::size_t g = 0; g < order.size(); ++g) order[g] = g;
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return complex_less(means[x], means[y]); });

  EigBasis out;
  out.basis.resize(n, n);
  Eigen::Index col = 0;
  for (std::size_t g : order) {
    out.cluster_start.push_back(static_cast<std::size_t>(col));
    out.values.push_back(means[g]);
    for (std::size_t j : groups[g]) {
      out.basis.col(col++) = basis.col(static_cast<Eigen::Index>(j));
    }
  }
  out.cluster_start.push_back(static_cast<std::size_t>(n));
  return out;
}

}  // namespace

SpectralDecomposition spectral_decompose(const NormalMatrix& alpha,
                                         const Tolerances& tols) {
  EigBasis eb = normal_eig_basis(alpha.get(), tols.cluster_gap);
  SpectralDecomposition dec;
  dec.eigenvalues = eb.values;
  for (std::size_t k = 0; k + 1 < eb.cluster_start.size(); ++k) {
    const std::size_t lo = eb.cluster_start[k];
    const std::size_t len = eb.cluster_start[k + 1] - lo;
    CMatrix block = eb.basis.middleCols(static_cast<Eigen::Index>(lo),
                                        static_cast<Eigen::Index>(len));
    dec.projections.push_back(block * block.adjoint());
  }
  return dec;
}

NormalMatrix apply_function(const NormalMatrix& alpha,
                            const std::function<Complex(Complex)>& f,
                            const Tolerances& tols) {
  SpectralDecomposition dec = spectral_decompose(alpha, tols);
  CMatrix out = CMatrix::Zero(alpha.get().rows(), alpha.get().cols());
  for (std::size_t k = 0; k < dec.eigenvalues.size(); ++k) {
    out += f(dec.eigenvalues[k]) * dec.projections[k];
  }
  return NormalMatrix(std::move(out), tols.tol_normal);
}

NormalMatrix apply_function(const NormalMatrix& alpha, const SpectrumTable& table,
                            const Tolerances& tols) {
  auto lookup = [&](Complex lambda) -> Complex {
    double best = std::numeric_limits<double>::infinity();
    Complex value = 0;
    for (const auto& [point, v] : table) {
      double d = std::abs(lambda - point);
      if (d < best) {
        best = d;
        value = v;
      }
    }
    if (best > tols.cluster_gap) {
      throw Error(Errc::DomainGap, "eigenvalue has no table point within cluster_gap");
    }
    return value;
  };
  return apply_function(alpha, lookup, tols);
}

JointDiagResult joint_diagonalize(const std::vector<CMatrix>& family,
                                  const Tolerances& tols) {
  JointDiagResult result;
  if (family.empty()) {
    throw Error(Errc::InvalidInput, "joint diagonalization of an empty family");
  }
  const Eigen::Index n = family.front().rows();
  for (const CMatrix& a : family) {
    if (a.rows() != n || a.cols() != n) {
      throw Error(Errc::InvalidInput, "family members must share dimension");
    }
    if (normality_residual(a) > tols.tol_normal) {
      throw Error(Errc::NotNormal, "family member is not normal");
    }
  }
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = i + 1; j < family.size(); ++j) {
      double r = commutator_norm(family[i], family[j]);
      if (r > tols.tol_commute) {
        result.ok = false;
        result.bad_i = i;
        result.bad_j = j;
        result.residual = r;
        return result;
      }
    }
  }

  // Already-diagonal families need no change of basis.
  {
    double off = 0;
    for (const CMatrix& a : family) {
      CMatrix o = a;
      o.diagonal().setZero();
      off = std::max(off, o.norm());
    }
    if (off <= 1e-12) {
      result.ok = true;
      result.transform = CMatrix::Identity(n, n);
      for (const CMatrix& a : family) result.diagonals.push_back(a.diagonal());
      return result;
    }
  }

  CMatrix u = CMatrix::Identity(n, n);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> blocks{{0, n}};  // (start, len)
  for (const CMatrix& a : family) {
    std::vector<std::pair<Eigen::Index, Eigen::Index>> next;
    for (auto [start, len] : blocks) {
      if (len == 1) {
        next.emplace_back(start, len);
        continue;
      }
      CMatrix ub = u.middleCols(start, len);
      CMatrix m = ub.adjoint() * a * ub;
      EigBasis eb = normal_eig_basis(m, tols.cluster_gap);
      u.middleCols(start, len) = ub * eb.basis;
      for (std::size_t k = 0; k + 1 < eb.cluster_start.size(); ++k) {
        next.emplace_back(start + static_cast<Eigen::Index>(eb.cluster_start[k]),
                          static_cast<Eigen::Index>(eb.cluster_start[k + 1] -
                                                    eb.cluster_start[k]));
      }
    }
    blocks = std::move(next);
  }

  double worst = 0;
  for (const CMatrix& a : family) {
    CMatrix d = u.adjoint() * a * u;
    CMatrix off = d;
    off.diagonal().setZero();
    worst = std::max(worst, off.norm());
    result.diagonals.push_back(d.diagonal());
  }
  if (worst > 1e-8) {
    result.ok = false;
    result.residual = worst;
    result.diagonals.clear();
    return result;
  }
  result.ok = true;
  result.transform = std::move(u);
  return result;
}

PartitionOfUnity coarse_grain(const PartitionOfUnity& p, const FinMap& f) {
  if (!p.space().same_points(f.domain())) {
    throw Error(Errc::SpaceMismatch, "partition space does not match the map domain");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(p.dim());
  std::vector<CMatrix> out(f.codomain().size(), CMatrix::Zero(n, n));
  for (std::size_t x = 0; x < f.domain().size(); ++x) {
    out[f.apply(x)] += p.projection(x);
  }
  return PartitionOfUnity(f.codomain(), std::move(out));
}

CompatibilityResult check_compatibility(const MatrixFamily& fam,
                                        const Tolerances& tols) {
  CompatibilityResult result;
  const std::size_t L = fam.cone.size();
  if (fam.members.size() != L) {
    throw Error(Errc::InvalidInput, "family needs one member per leg");
  }
  for (std::size_t i = 0; i < L; ++i) {
    if (!fam.members[i].space().same_points(fam.cone.leg(i).codomain())) {
      throw Error(Errc::InvalidInput, "member space does not match leg codomain");
    }
  }
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t j = i; j < L; ++j) {
      PushoutResult po = pushout(fam.cone.leg(i), fam.cone.leg(j));
      PartitionOfUnity gi = coarse_grain(fam.members[i], po.inj_left);
      PartitionOfUnity gj = coarse_grain(fam.members[j], po.inj_right);
      double residual = 0;
      for (std::size_t pt = 0; pt < po.space.size(); ++pt) {
        residual = std::max(residual, (gi.projection(pt) - gj.projection(pt)).norm());
      }
      if (residual > tols.tol_commute) {
        result.compatible = false;
        result.leg_i = i;
        result.leg_j = j;
        result.residual = residual;
        return result;
      }
    }
  }
  return result;
}

LiftResult lift_family(const MatrixFamily& fam, const Tolerances& tols) {
  LiftResult result;
  CompatibilityResult compat = check_compatibility(fam, tols);
  if (!compat.compatible) {
    result.status = LiftResult::Status::NotCompatible;
    result.leg_i = compat.leg_i;
    result.leg_j = compat.leg_j;
    result.residual = compat.residual;
    return result;
  }
  if (!is_jointly_injective(fam.cone)) {
    result.status = LiftResult::Status::NotSeparating;
    return result;
  }

  const std::size_t L = fam.cone.size();
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t j = i + 1; j < L; ++j) {
      for (std::size_t y = 0; y < fam.members[i].space().size(); ++y) {
        for (std::size_t z = 0; z < fam.members[j].space().size(); ++z) {
          double r = commutator_norm(fam.members[i].projection(y),
                                     fam.members[j].projection(z));
          if (r > tols.tol_commute) {
            result.status = LiftResult::Status::Noncommuting;
            result.leg_i = i;
            result.leg_j = j;
            result.point_i = fam.members[i].space().label(y);
            result.point_j = fam.members[j].space().label(z);
            result.residual = r;
            return result;
          }
        }
      }
    }
  }

  const std::size_t dim = fam.members.empty() ? 0 : fam.members.front().dim();
  const Eigen::Index n = static_cast<Eigen::Index>(dim);
  std::vector<CMatrix> lifted(fam.cone.apex().size());
  for (std::size_t x = 0; x < lifted.size(); ++x) {
    CMatrix p = CMatrix::Identity(n, n);
    for (std::size_t i = 0; i < L; ++i) {
      p = p * fam.members[i].projection(fam.cone.leg(i).apply(x));
    }
    lifted[x] = std::move(p);
  }

  // Reassembly gate: partition axioms plus round trip onto every member.
  const double tol = tols.tol_hom;
  CMatrix sum = CMatrix::Zero(n, n);
  double worst = 0;
  for (const CMatrix& p : lifted) {
    worst = std::max(worst, projection_residual(p));
    sum += p;
  }
  worst = std::max(worst, (sum - CMatrix::Identity(n, n)).norm());
  for (std::size_t x = 0; x < lifted.size(); ++x) {
    for (std::size_t y = x + 1; y < lifted.size(); ++y) {
      worst = std::max(worst, (lifted[x] * lifted[y]).norm());
    }
  }
  for (std::size_t i = 0; i < L && worst <= tol; ++i) {
    std::vector<CMatrix> grain(fam.members[i].space().size(), CMatrix::Zero(n, n));
    for (std::size_t x = 0; x < lifted.size(); ++x) {
      grain[fam.cone.leg(i).apply(x)] += lifted[x];
    }
    for (std::size_t y = 0; y < grain.size(); ++y) {
      worst = std::max(worst, (grain[y] - fam.members[i].projection(y)).norm());
    }
  }
  if (worst > tol) {
    result.status = LiftResult::Status::NotALift;
    result.residual = worst;
    return result;
  }

  Tolerances relaxed = tols;
  relaxed.tol_normal = std::max(tols.tol_normal, tol);
  result.status = LiftResult::Status::Ok;
  result.partition = PartitionOfUnity(fam.cone.apex(), std::move(lifted), relaxed);
  result.residual = worst;
  return result;
}

NormalMatrix bivariate_op(const NormalMatrix& alpha, const NormalMatrix& beta,
                          const std::function<Complex(Complex, Complex)>& op,
                          const Tolerances& tols) {
  JointDiagResult jd = joint_diagonalize({alpha.get(), beta.get()}, tols);
  if (!jd.ok) {
    throw Error(Errc::Noncommuting, "operands do not commute, residual " +
                                        std::to_string(jd.residual));
  }
  const Eigen::Index n = alpha.get().rows();
  Eigen::VectorXcd diag(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    diag(j) = op(jd.diagonals[0](j), jd.diagonals[1](j));
  }
  CMatrix out = jd.transform * diag.asDiagonal() * jd.transform.adjoint();
  return NormalMatrix(std::move(out), std::max(tols.tol_normal, 1e-12));
}

NormalMatrix bivariate_op(const NormalMatrix& alpha, const NormalMatrix& beta,
                          BivariateOp op, const Tolerances& tols) {
  if (op == BivariateOp::Add) {
    return bivariate_op(alpha, beta, [](Complex x, Complex y) { return x + y; }, tols);
  }
  return bivariate_op(alpha, beta, [](Complex x, Complex y) { return x * y; }, tols);
}

namespace {

CMatrix dft_unitary(std::size_t n) {
  CMatrix w(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      double angle = 2.0 * std::numbers::pi * static_cast<double>(j * k) /
                     static_cast<double>(n);
      w(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
          Complex(std::cos(angle), std::sin(angle)) * scale;
    }
  }
  return w;
}

}  // namespace

std::optional<NoncommutingWitness> search_noncommuting_family(
    const Cone& cone, const NoncommutingSearchParams& params, const Tolerances& tols) {
  if (is_effective_monic(cone).status != EmStatus::Yes) {
    throw Error(Errc::NotEffectiveMonic,
                "witness search is only meaningful on effective-monic cones");
  }
  const std::size_t L = cone.size();
  const std::size_t n = params.dim;
  const Eigen::Index ni = static_cast<Eigen::Index>(n);

  // Image point lists per leg; projections off the image must vanish for
  // compatibility, so candidates only populate image points.
  std::vector<std::vector<std::size_t>> image(L);
  for (std::size_t i = 0; i < L; ++i) {
    std::vector<char> seen(cone.leg(i).codomain().size(), 0);
    for (std::size_t x = 0; x < cone.apex().size(); ++x) {
      seen[cone.leg(i).apply(x)] = 1;
    }
    for (std::size_t y = 0; y < seen.size(); ++y) {
      if (seen[y]) image[i].push_back(y);
    }
    if (image[i].empty()) return std::nullopt;  // empty apex: nothing to refute
  }

  auto assemble = [&](std::size_t leg, const CMatrix& u,
                      const std::vector<std::size_t>& basis_point) {
    std::vector<CMatrix> projections(cone.leg(leg).codomain().size(),
                                     CMatrix::Zero(ni, ni));
    for (std::size_t j = 0; j < n; ++j) {
      projections[basis_point[j]] +=
          u.col(static_cast<Eigen::Index>(j)) * u.col(static_cast<Eigen::Index>(j)).adjoint();
    }
    return PartitionOfUnity(cone.leg(leg).codomain(), std::move(projections));
  };

  auto make_family = [&](std::uint64_t trial) {
    std::vector<PartitionOfUnity> members;
    members.reserve(L);
    if (trial == 0) {
      // Structured candidate: coordinate partition conjugated by DFT powers.
      CMatrix w = dft_unitary(n);
      CMatrix v = CMatrix::Identity(ni, ni);
      for (std::size_t i = 0; i < L; ++i) {
        std::vector<std::size_t> basis_point(n);
        for (std::size_t j = 0; j < n; ++j) {
          basis_point[j] = image[i][j % image[i].size()];
        }
        members.push_back(assemble(i, v, basis_point));
        v = v * w;
      }
    } else {
      SplitMix64 rng(derive_seed(params.seed, trial));
      for (std::size_t i = 0; i < L; ++i) {
        CMatrix u = random_unitary(n, rng);
        std::vector<std::size_t> basis_point(n);
        for (std::size_t j = 0; j < n; ++j) {
          basis_point[j] = image[i][rng.below(image[i].size())];
        }
        members.push_back(assemble(i, u, basis_point));
      }
    }
    return MatrixFamily{cone, std::move(members)};
  };

  auto eval = [&](std::uint64_t trial) -> std::optional<NoncommutingWitness> {
    MatrixFamily fam = make_family(trial);
    if (!check_compatibility(fam, tols).compatible) return std::nullopt;
    LiftResult lift = lift_family(fam, tols);
    if (lift.status != LiftResult::Status::Noncommuting) return std::nullopt;
    NoncommutingWitness w{std::move(fam), trial, lift.leg_i, lift.leg_j,
                          lift.point_i,  lift.point_j, lift.residual};
    return w;
  };

  const unsigned jobs = std::max(1u, params.jobs);
  if (jobs == 1 || params.trials < 2 * jobs) {
    for (std::uint64_t t = 0; t < params.trials; ++t) {
      if (auto w = eval(t)) return w;
    }
    return std::nullopt;
  }

  // Deterministic merge: the lowest successful trial index wins.
  std::atomic<std::uint64_t> best{params.trials};
  std::vector<std::optional<NoncommutingWitness>> found(jobs);
  const std::uint64_t chunk = (params.trials + jobs - 1) / jobs;
  std::vector<std::thread> threads;
  for (unsigned t = 0; t < jobs; ++t) {
    threads.emplace_back([&, t] {
      const std::uint64_t lo = t * chunk;
      const std::uint64_t hi = std::min<std::uint64_t>(params.trials, lo + chunk);
      for (std::uint64_t trial = lo; trial < hi; ++trial) {
        if (best.load(std::memory_order_relaxed) < lo) return;
        if (auto w = eval(trial)) {
          found[t] = std::move(w);
          std::uint64_t expected = best.load();
          while (trial < expected && !best.compare_exchange_weak(expected, trial)) {
          }
          return;
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  std::optional<NoncommutingWitness> winner;
  for (auto& w : found) {
    if (w && w->trial == best.load()) winner = std::move(w);
  }
  return winner;
}

}  // namespace conesheaf
