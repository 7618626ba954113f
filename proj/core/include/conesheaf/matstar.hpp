#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "conesheaf/finspace.hpp"

namespace conesheaf {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

// All residuals below are Frobenius norms. ||A||_F dominates the operator
// norm and exceeds it by at most a factor sqrt(n).
struct Tolerances {
  double tol_normal = 1e-9;
  double tol_commute = 1e-9;
  double cluster_gap = 1e-8;
  double tol_hom = 1e-7;  // piecewise / almost verification checks
};

double frobenius_norm(const CMatrix& a);
double normality_residual(const CMatrix& a);   // ||AA* - A*A||_F
double commutator_norm(const CMatrix& a, const CMatrix& b);
double unitarity_residual(const CMatrix& a);   // ||A*A - I||_F
double projection_residual(const CMatrix& a);  // max(||A^2-A||_F, ||A*-A||_F)

/// Square matrix with AA* = A*A up to tol_normal.
class NormalMatrix {
 public:
  explicit NormalMatrix(CMatrix m, double tol = 1e-9);
  const CMatrix& get() const { return m_; }
  double residual() const { return residual_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }

 private:
  CMatrix m_;
  double residual_;
};

class Unitary {
 public:
  explicit Unitary(CMatrix m, double tol = 1e-9);
  const CMatrix& get() const { return m_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }

 private:
  CMatrix m_;
};

class Projection {
 public:
  explicit Projection(CMatrix m, double tol = 1e-9);
  const CMatrix& get() const { return m_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }

 private:
  CMatrix m_;
};

/// X-indexed family of pairwise orthogonal projections summing to 1;
/// the matrix-algebra picture of a unital *-homomorphism C(X) -> M_n.
class PartitionOfUnity {
 public:
  PartitionOfUnity(FinSpace space, std::vector<CMatrix> projections,
                   const Tolerances& tols = {});

  const FinSpace& space() const { return space_; }
  std::size_t dim() const { return dim_; }
  const CMatrix& projection(std::size_t point) const { return projections_[point]; }
  const std::vector<CMatrix>& projections() const { return projections_; }

 private:
  FinSpace space_;
  std::vector<CMatrix> projections_;
  std::size_t dim_ = 0;
};

/// Distinct eigenvalues with orthogonal spectral projections; eigenvalues
/// sorted by (re, im) and separated by more than cluster_gap.
struct SpectralDecomposition {
  std::vector<Complex> eigenvalues;
  std::vector<CMatrix> projections;

  CMatrix reconstruct() const;
};

/// Two-stage decomposition: diagonalize the self-adjoint part, then the
/// skew part within each eigenvalue cluster. Throws NotNormal.
SpectralDecomposition spectral_decompose(const NormalMatrix& alpha,
                                         const Tolerances& tols = {});

/// Table-based functions on spectra: (point, value) pairs matched to
/// eigenvalues within cluster_gap.
using SpectrumTable = std::vector<std::pair<Complex, Complex>>;

NormalMatrix apply_function(const NormalMatrix& alpha,
                            const std::function<Complex(Complex)>& f,
                            const Tolerances& tols = {});
/// Throws DomainGap when some eigenvalue has no table point within cluster_gap.
NormalMatrix apply_function(const NormalMatrix& alpha, const SpectrumTable& table,
                            const Tolerances& tols = {});

struct JointDiagResult {
  bool ok = false;
  CMatrix transform;  // common unitary U with U*AU diagonal, on success
  std::vector<Eigen::VectorXcd> diagonals;
  std::size_t bad_i = 0, bad_j = 0;  // violating pair when !ok
  double residual = 0;
};

/// Succeeds iff all pairs commute to tol_commute; then all U*AU are
/// diagonal to 1e-8.
JointDiagResult joint_diagonalize(const std::vector<CMatrix>& family,
                                  const Tolerances& tols = {});

/// Q_y = sum of P_x over the fiber f^{-1}(y). Functorial on the nose.
/// Throws SpaceMismatch.
PartitionOfUnity coarse_grain(const PartitionOfUnity& p, const FinMap& f);

/// One partition of unity per leg, over the leg codomains, common dimension.
struct MatrixFamily {
  Cone cone;
  std::vector<PartitionOfUnity> members;
};

struct CompatibilityResult {
  bool compatible = true;
  std::size_t leg_i = 0, leg_j = 0;
  double residual = 0;
};

/// For every leg pair, the coarse-grainings into the pushout agree to
/// tol_commute (the diagonal case checks vanishing off the leg image).
CompatibilityResult check_compatibility(const MatrixFamily& fam,
                                        const Tolerances& tols = {});

struct LiftResult {
  enum class Status { Ok, NotCompatible, NotSeparating, Noncommuting, NotALift };
  Status status = Status::Ok;
  std::optional<PartitionOfUnity> partition;
  // Noncommuting details: members (leg_i, point_i) vs (leg_j, point_j).
  std::size_t leg_i = 0, leg_j = 0;
  std::string point_i, point_j;
  double residual = 0;
};

/// P_x = prod_i Q_{i, f_i(x)}; requires a compatible family over a jointly
/// injective cone and commuting cross-member projections, and verifies that
/// the products reassemble into a partition of unity that coarse-grains back
/// onto the family.
LiftResult lift_family(const MatrixFamily& fam, const Tolerances& tols = {});

enum class BivariateOp { Add, Mul };

/// Joint diagonalization followed by eigenvalue-pairwise application.
/// Throws Noncommuting when the commutator exceeds tol_commute.
NormalMatrix bivariate_op(const NormalMatrix& alpha, const NormalMatrix& beta,
                          BivariateOp op, const Tolerances& tols = {});
NormalMatrix bivariate_op(const NormalMatrix& alpha, const NormalMatrix& beta,
                          const std::function<Complex(Complex, Complex)>& op,
                          const Tolerances& tols = {});

struct NoncommutingWitness {
  MatrixFamily family;
  std::uint64_t trial = 0;
  std::size_t leg_i = 0, leg_j = 0;
  std::string point_i, point_j;
  double residual = 0;
};

struct NoncommutingSearchParams {
  std::size_t dim = 2;
  std::uint64_t trials = 10'000;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

/// Samples structured (trial 0) and Haar-like random families, keeps the
/// compatible ones, and returns the first (lowest trial index, independent
/// of jobs) whose lift fails with noncommuting projections.
/// Throws NotEffectiveMonic if the cone is not effective-monic.
std::optional<NoncommutingWitness> search_noncommuting_family(
    const Cone& cone, const NoncommutingSearchParams& params = {},
    const Tolerances& tols = {});

}  // namespace conesheaf
