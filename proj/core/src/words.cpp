#include "conesheaf/words.hpp"

#include <algorithm>
#include <cstdlib>

#include "conesheaf/rng.hpp"

namespace conesheaf {

Letter inverse_letter(Letter l) {
  switch (l) {
    case Letter::a: return Letter::A;
    case Letter::A: return Letter::a;
    case Letter::b: return Letter::B;
    case Letter::B: return Letter::b;
  }
  return Letter::a;
}

char to_char(Letter l) {
  switch (l) {
    case Letter::a: return 'a';
    case Letter::A: return 'A';
    case Letter::b: return 'b';
    case Letter::B: return 'B';
  }
  return '?';
}

Letter letter_from_char(char c) {
  switch (c) {
    case 'a': return Letter::a;
    case 'A': return Letter::A;
    case 'b': return Letter::b;
    case 'B': return Letter::B;
  }
  throw Error(Errc::InvalidInput, std::string("invalid letter '") + c +
                                      "'; words use {a, A, b, B}");
}

FreeWord reduce(std::vector<Letter> letters) {
  std::vector<Letter> stack;
  stack.reserve(letters.size());
  for (Letter l : letters) {
    if (!stack.empty() && stack.back() == inverse_letter(l)) {
      stack.pop_back();
    } else {
      stack.push_back(l);
    }
  }
  FreeWord w;
  w.letters_ = std::move(stack);
  return w;
}

FreeWord FreeWord::parse(std::string_view text) {
  std::vector<Letter> letters;
  letters.reserve(text.size());
  for (char c : text) letters.push_back(letter_from_char(c));
  return reduce(std::move(letters));
}

FreeWord FreeWord::from_letters(std::vector<Letter> letters) {
  return reduce(std::move(letters));
}

std::string FreeWord::str() const {
  std::string out;
  out.reserve(letters_.size());
  for (Letter l : letters_) out.push_back(to_char(l));
  return out;
}

FreeWord concat(const FreeWord& v, const FreeWord& w) {
  std::vector<Letter> letters = v.letters();
  letters.insert(letters.end(), w.letters().begin(), w.letters().end());
  return reduce(std::move(letters));
}

FreeWord inverse(const FreeWord& w) {
  std::vector<Letter> letters;
  letters.reserve(w.length());
  for (auto it = w.letters().rbegin(); it != w.letters().rend(); ++it) {
    letters.push_back(inverse_letter(*it));
  }
  return reduce(std::move(letters));
}

FreeWord power(const FreeWord& u, long long k) {
  FreeWord base = k < 0 ? inverse(u) : u;
  long long reps = k < 0 ? -k : k;
  std::vector<Letter> letters;
  letters.reserve(base.length() * static_cast<std::size_t>(reps));
  for (long long i = 0; i < reps; ++i) {
    letters.insert(letters.end(), base.letters().begin(), base.letters().end());
  }
  return reduce(std::move(letters));
}

FreeWord conjugate(const FreeWord& w, const FreeWord& g) {
  return concat(concat(inverse(g), w), g);
}

std::string CyclicWord::str() const {
  std::string out;
  out.reserve(letters_.size());
  for (Letter l : letters_) out.push_back(to_char(l));
  return out;
}

CyclicWord cyclic_reduce(const FreeWord& w) {
  std::vector<Letter> core = w.letters();
  while (core.size() >= 2 && core.front() == inverse_letter(core.back())) {
    core.erase(core.begin());
    core.pop_back();
  }
  // Lexicographically least rotation.
  if (!core.empty()) {
    std::size_t best = 0;
    const std::size_t n = core.size();
    for (std::size_t start = 1; start < n; ++start) {
      for (std::size_t k = 0; k < n; ++k) {
        Letter lhs = core[(start + k) % n];
        Letter rhs = core[(best + k) % n];
        if (lhs != rhs) {
          if (static_cast<int>(lhs) < static_cast<int>(rhs)) best = start;
          break;
        }
      }
    }
    std::rotate(core.begin(), core.begin() + static_cast<std::ptrdiff_t>(best),
                core.end());
  }
  CyclicWord out;
  out.letters_ = std::move(core);
  return out;
}

long long zeta(const FreeWord& w) {
  CyclicWord cw = cyclic_reduce(w);
  const auto& s = cw.letters();
  if (s.size() < 2) return 0;
  long long count = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    Letter cur = s[i];
    Letter nxt = s[(i + 1) % s.size()];
    if (cur == Letter::a && nxt == Letter::b) ++count;
    if (cur == Letter::B && nxt == Letter::A) --count;
  }
  return count;
}

bool commute_free(const FreeWord& v, const FreeWord& w) {
  return concat(v, w) == concat(w, v);
}

namespace {

// Primitive root of a nonempty word: peel the conjugator, find the smallest
// period of the cyclically reduced core, conjugate back.
FreeWord primitive_root(const FreeWord& w) {
  std::vector<Letter> core = w.letters();
  std::vector<Letter> conj;  // prefix g with w = g core g^{-1}
  while (core.size() >= 2 && core.front() == inverse_letter(core.back())) {
    conj.push_back(core.front());
    core.erase(core.begin());
    core.pop_back();
  }
  const std::size_t n = core.size();
  std::size_t period = n;
  for (std::size_t d = 1; d < n; ++d) {
    if (n % d != 0) continue;
    bool ok = true;
    for (std::size_t i = d; i < n && ok; ++i) ok = core[i] == core[i - d];
    if (ok) {
      period = d;
      break;
    }
  }
  std::vector<Letter> letters = conj;
  letters.insert(letters.end(), core.begin(), core.begin() + static_cast<std::ptrdiff_t>(period));
  for (auto it = conj.rbegin(); it != conj.rend(); ++it) {
    letters.push_back(inverse_letter(*it));
  }
  return reduce(std::move(letters));
}

}  // namespace

CommonRoot common_root(const FreeWord& v, const FreeWord& w) {
  if (!commute_free(v, w)) {
    throw Error(Errc::NotCommuting, "common root needs commuting words");
  }
  CommonRoot out;
  if (v.empty() && w.empty()) {
    return out;  // empty root, exponents 0
  }
  const FreeWord& anchor = v.empty() ? w : v;
  out.root = primitive_root(anchor);

  auto exponent_of = [&](const FreeWord& target) -> long long {
    if (target.empty()) return 0;
    // The root may carry a conjugator, so only the core length bounds the
    // exponent; the target length itself is always a safe cap.
    long long bound = static_cast<long long>(target.length());
    for (long long k = 1; k <= bound; ++k) {
      if (power(out.root, k) == target) return k;
      if (power(out.root, -k) == target) return -k;
    }
    throw Error(Errc::NotCommuting, "no common power; inputs do not share a root");
  };
  out.m = exponent_of(v);
  out.n = exponent_of(w);
  // Positive exponent on the first nonempty input.
  if ((v.empty() ? out.n : out.m) < 0) {
    out.root = inverse(out.root);
    out.m = -out.m;
    out.n = -out.n;
  }
  return out;
}

namespace {

FreeWord random_word(SplitMix64& rng, std::size_t max_len) {
  std::size_t len = rng.below(max_len + 1);
  std::vector<Letter> letters;
  letters.reserve(len);
  for (std::size_t i = 0; i < len; ++i) {
    letters.push_back(static_cast<Letter>(rng.below(4)));
  }
  return reduce(std::move(letters));
}

}  // namespace

ZetaReport verify_zeta_counterexample(std::uint64_t samples, std::uint64_t seed) {
  ZetaReport report;
  report.zeta_a = zeta(FreeWord::parse("a"));
  report.zeta_b = zeta(FreeWord::parse("b"));
  report.zeta_ab = zeta(FreeWord::parse("ab"));
  report.not_additive = report.zeta_ab != report.zeta_a + report.zeta_b;

  SplitMix64 rng(seed);
  report.power_law_pass = true;
  for (std::uint64_t s = 0; s < samples; ++s) {
    FreeWord u = random_word(rng, 20);
    long long k = static_cast<long long>(rng.below(21)) - 10;
    if (zeta(power(u, k)) != k * zeta(u)) {
      report.power_law_pass = false;
      break;
    }
    ++report.power_law_samples;
  }

  report.conjugation_invariance_pass = true;
  report.inversion_antisymmetry_pass = true;
  for (std::uint64_t s = 0; s < samples; ++s) {
    FreeWord w = random_word(rng, 20);
    FreeWord g = random_word(rng, 20);
    if (zeta(conjugate(w, g)) != zeta(w)) {
      report.conjugation_invariance_pass = false;
      break;
    }
    if (zeta(w) + zeta(inverse(w)) != 0) {
      report.inversion_antisymmetry_pass = false;
      break;
    }
    ++report.conjugation_samples;
  }
  return report;
}

}  // namespace conesheaf
