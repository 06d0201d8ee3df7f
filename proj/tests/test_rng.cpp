#include <doctest.h>

#include <array>
#include <cmath>
#include <set>

#include "persim/rng.hpp"

using persim::KeyedRng;
using persim::Stream;

TEST_CASE("keyed draws are a pure function of the key") {
  KeyedRng a(42, Stream::testing, {7, 9});
  KeyedRng b(42, Stream::testing, {7, 9});
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("pinned sequence stays stable across builds") {
  // Locked once; a change here means every stored artifact changes too.
  KeyedRng r(42, Stream::testing, {7, 9});
  CHECK(r.next_u64() == 0x16548b30304a74fcULL);
  CHECK(r.next_u64() == 0x0792740c1b205288ULL);
  CHECK(r.next_u64() == 0x1b9cf905e31b6fedULL);
  CHECK(r.next_u64() == 0x94df4c915b1f825bULL);

  KeyedRng d(42, Stream::testing, {7, 9});
  CHECK(d.next_double() == doctest::Approx(0.087227534546664875).epsilon(1e-15));
  KeyedRng g(1, Stream::shadowing, {3, 50, 60});
  CHECK(g.gaussian() == doctest::Approx(0.25444629440464139).epsilon(1e-12));
  KeyedRng e(1, Stream::fading, {2, 100});
  CHECK(e.exponential() == doctest::Approx(0.16191008209078284).epsilon(1e-12));
}

TEST_CASE("stream purpose and id order both matter") {
  KeyedRng a(1, Stream::fading, {5, 6});
  KeyedRng b(1, Stream::shadowing, {5, 6});
  KeyedRng c(1, Stream::fading, {6, 5});
  const auto va = a.next_u64();
  CHECK(va != b.next_u64());
  CHECK(va != c.next_u64());
}

TEST_CASE("nearby keys land far apart") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t u = 0; u < 100; ++u)
    for (std::uint64_t t = 0; t < 100; ++t)
      seen.insert(KeyedRng(1, Stream::qos_sample, {u, t}).next_u64());
  CHECK(seen.size() == 10000);
}

TEST_CASE("next_double lies in [0, 1) with the right mean") {
  KeyedRng r(3, Stream::testing, {});
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double v = r.next_double();
    REQUIRE(v >= 0.0);
    REQUIRE(v < 1.0);
    sum += v;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("gaussian moments") {
  KeyedRng r(4, Stream::testing, {});
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double v = r.gaussian();
    sum += v;
    sq += v * v;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(mean == doctest::Approx(0.0).scale(1.0).epsilon(0.02));
  CHECK(std::sqrt(var) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("exponential has unit mean and never goes negative") {
  KeyedRng r(5, Stream::testing, {});
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double v = r.exponential();
    REQUIRE(v >= 0.0);
    sum += v;
  }
  CHECK(sum / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("uniform_int covers its range") {
  KeyedRng r(6, Stream::testing, {});
  std::array<int, 7> counts{};
  for (int i = 0; i < 70000; ++i) {
    const int v = r.uniform_int(7);
    REQUIRE(v >= 0);
    REQUIRE(v < 7);
    ++counts[static_cast<std::size_t>(v)];
  }
  for (int c : counts) CHECK(c > 9000);  // expected 10000 each
}
