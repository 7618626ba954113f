#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

namespace conesheaf {

/// SplitMix64 with a hand-rolled Box-Muller on top. Fixed algorithm, so
/// streams are identical across platforms, runs and standard libraries.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Uniform in {0, ..., n-1}; n must be positive.
  std::uint64_t below(std::uint64_t n) { return next() % n; }

  double gaussian();
  std::complex<double> complex_gaussian();

 private:
  std::uint64_t state_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

/// Per-trial stream derivation: seed xor trial index.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return seed ^ index;
}

Eigen::MatrixXcd random_gaussian_matrix(std::size_t n, SplitMix64& rng);

/// QR-orthonormalized complex Gaussian with the R-diagonal phase fixed,
/// so the result is a deterministic function of the stream.
Eigen::MatrixXcd random_unitary(std::size_t n, SplitMix64& rng);

Eigen::VectorXcd random_complex_vector(std::size_t n, SplitMix64& rng);

}  // namespace conesheaf
