#include "conesheaf/rng.hpp"

#include <cmath>
#include <numbers>

namespace conesheaf {

double SplitMix64::gaussian() {
  if (have_cached_) {
    have_cached_ = false;
    return cached_;
  }
  // Box-Muller; u1 in (0,1] to keep the log finite.
  double u1 = (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double t = 2.0 * std::numbers::pi * u2;
  cached_ = r * std::sin(t);
  have_cached_ = true;
  return r * std::cos(t);
}

std::complex<double> SplitMix64::complex_gaussian() {
  double re = gaussian();
  double im = gaussian();
  return {re / std::numbers::sqrt2, im / std::numbers::sqrt2};
}

Eigen::MatrixXcd random_gaussian_matrix(std::size_t n, SplitMix64& rng) {
  Eigen::MatrixXcd m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rng.complex_gaussian();
    }
  }
  return m;
}

Eigen::MatrixXcd random_unitary(std::size_t n, SplitMix64& rng) {
  Eigen::MatrixXcd g = random_gaussian_matrix(n, rng);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    std::complex<double> d = r(j, j);
    double a = std::abs(d);
    q.col(j) *= (a > 0.0) ? d / a : std::complex<double>(1.0, 0.0);
  }
  return q;
}

Eigen::VectorXcd random_complex_vector(std::size_t n, SplitMix64& rng) {
  Eigen::VectorXcd v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v(static_cast<Eigen::Index>(i)) = rng.complex_gaussian();
  }
  return v;
}

}  // namespace conesheaf
