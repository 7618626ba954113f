#include <benchmark/benchmark.h>

#include "conesheaf/cone_analysis.hpp"
#include "conesheaf/matstar.hpp"
#include "conesheaf/rng.hpp"
#include "conesheaf/words.hpp"

namespace cs = conesheaf;

namespace {

cs::FinSpace numbered(const std::string& name, std::size_t n) {
  std::vector<std::string> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back(std::to_string(i));
  return cs::FinSpace(name, pts);
}

// All maps from a 2-point space into `codomain` points, as one cone.
cs::Cone all_maps_cone(std::size_t codomain) {
  cs::FinSpace x = numbered("X", 2);
  cs::FinSpace y = numbered("Y", codomain);
  std::vector<cs::FinMap> legs;
  for (std::size_t a = 0; a < codomain; ++a) {
    for (std::size_t b = 0; b < codomain; ++b) {
      legs.emplace_back(x, y, std::vector<std::size_t>{a, b});
    }
  }
  return cs::Cone(x, std::move(legs));
}

void BM_pushout(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  cs::FinSpace x = numbered("X", n);
  cs::FinSpace y = numbered("Y", n / 2 + 1);
  std::vector<std::size_t> af(n), ag(n);
  for (std::size_t i = 0; i < n; ++i) {
    af[i] = i / 2;
    ag[i] = (i + 1) % (n / 2 + 1);
  }
  cs::FinMap f(x, y, af);
  cs::FinMap g(x, y, ag);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cs::pushout(f, g));
  }
}
BENCHMARK(BM_pushout)->Arg(8)->Arg(32)->Arg(128);

void BM_enumerate_families(benchmark::State& state) {
  cs::Cone cone = all_maps_cone(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(cs::enumerate_compatible_families(cone));
  }
}
BENCHMARK(BM_enumerate_families)->Arg(3)->Arg(4)->Arg(5);

void BM_is_directed_facecone(benchmark::State& state) {
  std::vector<std::string> cube;
  for (int i = 0; i < 8; ++i) {
    cube.push_back({char('0' + ((i >> 2) & 1)), char('0' + ((i >> 1) & 1)),
                    char('0' + (i & 1))});
  }
  cs::FinSpace x("cube", cube);
  std::vector<std::string> square = {"00", "01", "10", "11"};
  auto proj = [&](int c1, int c2, const std::string& name) {
    cs::FinSpace y(name, square);
    std::vector<std::size_t> a(x.size());
    for (std::size_t p = 0; p < x.size(); ++p) {
      const std::string& l = x.label(p);
      a[p] = *y.index_of(std::string{l[static_cast<std::size_t>(c1)],
                                     l[static_cast<std::size_t>(c2)]});
    }
    return cs::FinMap(x, y, a);
  };
  cs::Cone cone(x, {proj(0, 1, "a"), proj(0, 2, "b"), proj(1, 2, "c")});
  for (auto _ : state) {
    benchmark::DoNotOptimize(cs::is_directed(cone));
  }
}
BENCHMARK(BM_is_directed_facecone);

void BM_spectral_decompose(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  cs::SplitMix64 rng(1);
  cs::CMatrix u = cs::random_unitary(n, rng);
  Eigen::VectorXcd d = cs::random_complex_vector(n, rng);
  cs::NormalMatrix a(u * d.asDiagonal() * u.adjoint(), 1e-9);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cs::spectral_decompose(a));
  }
}
BENCHMARK(BM_spectral_decompose)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_zeta(benchmark::State& state) {
  cs::SplitMix64 rng(2);
  std::vector<cs::Letter> letters;
  for (int i = 0; i < 400; ++i) {
    letters.push_back(static_cast<cs::Letter>(rng.below(4)));
  }
  cs::FreeWord w = cs::FreeWord::from_letters(letters);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cs::zeta(w));
  }
}
BENCHMARK(BM_zeta);

}  // namespace

BENCHMARK_MAIN();
