#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "conesheaf/error.hpp"

namespace conesheaf {

// Letters of the free group on {a, b}; uppercase marks the inverse.
enum class Letter : std::uint8_t { a = 0, A = 1, b = 2, B = 3 };

Letter inverse_letter(Letter l);
char to_char(Letter l);
Letter letter_from_char(char c);  // throws InvalidInput

/// A freely reduced word.
class FreeWord {
 public:
  FreeWord() = default;
  static FreeWord parse(std::string_view text);
  static FreeWord from_letters(std::vector<Letter> letters);

  const std::vector<Letter>& letters() const { return letters_; }
  std::size_t length() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  std::string str() const;

  friend bool operator==(const FreeWord&, const FreeWord&) = default;

 private:
  friend FreeWord reduce(std::vector<Letter> letters);
  std::vector<Letter> letters_;
};

FreeWord reduce(std::vector<Letter> letters);
FreeWord concat(const FreeWord& v, const FreeWord& w);
FreeWord inverse(const FreeWord& w);
FreeWord power(const FreeWord& u, long long k);
/// g^{-1} w g, reduced.
FreeWord conjugate(const FreeWord& w, const FreeWord& g);

/// Cyclically reduced, stored in its lexicographically least rotation.
class CyclicWord {
 public:
  CyclicWord() = default;
  const std::vector<Letter>& letters() const { return letters_; }
  std::size_t length() const { return letters_.size(); }
  std::string str() const;
  friend bool operator==(const CyclicWord&, const CyclicWord&) = default;

 private:
  friend CyclicWord cyclic_reduce(const FreeWord& w);
  std::vector<Letter> letters_;
};

CyclicWord cyclic_reduce(const FreeWord& w);

/// Cyclic count of "a immediately followed by b" minus "b^{-1} immediately
/// followed by a^{-1}" in the cyclic reduction, wraparound included.
long long zeta(const FreeWord& w);

bool commute_free(const FreeWord& v, const FreeWord& w);

struct CommonRoot {
  FreeWord root;  // primitive; positive exponent on the first nonempty input
  long long m = 0;
  long long n = 0;
};

/// v = root^m, w = root^n. Throws NotCommuting unless the words commute.
CommonRoot common_root(const FreeWord& v, const FreeWord& w);

struct ZetaReport {
  bool power_law_pass = false;
  std::uint64_t power_law_samples = 0;
  bool conjugation_invariance_pass = false;
  std::uint64_t conjugation_samples = 0;
  bool inversion_antisymmetry_pass = false;
  long long zeta_a = 0, zeta_b = 0, zeta_ab = 0;
  bool not_additive = false;

  bool all_pass() const {
    return power_law_pass && conjugation_invariance_pass &&
           inversion_antisymmetry_pass && zeta_a == 0 && zeta_b == 0 &&
           zeta_ab == 1 && not_additive;
  }
};

/// Seeded evidence that zeta is a conjugation-invariant piecewise
/// homomorphism (k-th power law) yet fails additivity on (a, b).
ZetaReport verify_zeta_counterexample(std::uint64_t samples, std::uint64_t seed);

}  // namespace conesheaf
