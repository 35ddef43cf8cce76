#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "udf/composer.hpp"

using namespace udf;

namespace {

SizeTable fake_table(const std::vector<long long>& sizes) {
  // sizes[i] is s_{i+1}; s_0 = 1 is implicit
  SizeTable t("fake", 2);
  for (size_t i = 0; i < sizes.size(); ++i) {
    SizeEntry e;
    e.m = static_cast<int>(i + 1);
    e.s = sizes[i];
    e.t = 0;
    e.t_vec = Vec::Zero(1);
    t.add(std::move(e));
  }
  return t;
}

}  // namespace

TEST_CASE("decompose greedy examples") {
  SizeTable t = fake_table({2, 5, 12});
  CHECK(decompose(20, t) == std::vector<int>{3, 2, 1, 0});
  CHECK(decompose(4, t) == std::vector<int>{1, 1});
  CHECK(decompose(1, t) == std::vector<int>{0});
}

TEST_CASE("decompose always sums to n and is non-increasing") {
  Rng rng(5);
  for (int it = 0; it < 100; ++it) {
    std::vector<long long> sizes;
    long long s = 1;
    int levels = 1 + static_cast<int>(rng.next_u64() % 6);
    for (int i = 0; i < levels; ++i) {
      s += 1 + static_cast<long long>(rng.next_u64() % (2 * static_cast<uint64_t>(s)));
      sizes.push_back(s);
    }
    SizeTable t = fake_table(sizes);
    long long n = 1 + static_cast<long long>(rng.next_u64() % 500);
    auto parts = decompose(n, t);
    long long total = 0;
    for (size_t i = 0; i < parts.size(); ++i) {
      total += t.s(parts[i]);
      if (i > 0) CHECK(parts[i] <= parts[i - 1]);
      // greedy: the chosen part is the largest that fits the remainder
      long long rem = n - (total - t.s(parts[i]));
      for (int m = t.max_m(); m > parts[i]; --m) {
        CHECK(t.s(m) > rem);
      }
    }
    CHECK(total == n);
  }
}

TEST_CASE("size table build, invariants and cache round-trip") {
  NormOracle l2 = make_lp(2, 2.0);
  std::string cache = (std::filesystem::temp_directory_path() /
                       ("udf_cache_test_" + std::to_string(::getpid())))
                          .string();
  SizeTable t = build_size_table(l2, 40, 1, {}, cache);
  CHECK(t.max_m() >= 2);
  for (int m = 1; m <= t.max_m(); ++m) {
    const SizeEntry* e = t.find(m);
    REQUIRE(e != nullptr);
    double cap = std::pow(2.0, m) * std::pow(m, 3.0 * (2 - 1));
    CHECK(static_cast<double>(e->s) <= cap);
    CHECK(e->t >= rat_ceil(proposition_lower_bound(2, m, e->s)));
    CHECK(e->spec.has_value());
  }

  SizeTable reloaded = build_size_table(l2, 40, 1, {}, cache);
  CHECK(reloaded.to_json() == t.to_json());
  std::filesystem::remove_all(cache);
}

TEST_CASE("compose_pointset: single-copy case equals the spec report") {
  NormOracle l2 = make_lp(2, 2.0);
  SizeTable t = build_size_table(l2, 40, 1, {});
  long long s2 = t.s(2);
  Composition comp = compose_pointset(l2, s2, 1, t);
  CHECK(comp.parts == std::vector<int>{2});
  CHECK(comp.points.size() == s2);
  CHECK(comp.report.total == t.t(2));
  CHECK(comp.certified_total == t.t(2));
}

TEST_CASE("compose_pointset: exact size and certified totals") {
  NormOracle l2 = make_lp(2, 2.0);
  SizeTable t = build_size_table(l2, 300, 9, {});
  Composition comp = compose_pointset(l2, 300, 9, t);
  CHECK(comp.points.size() == 300);
  long long sum_t = 0;
  for (int m : comp.parts) sum_t += t.t(m);
  CHECK(comp.report.total >= sum_t);
  CHECK(comp.points.near_merge_events() == 0);
}

TEST_CASE("ratio_report trend rows") {
  NormOracle l2 = make_lp(2, 2.0);
  SizeTable t = build_size_table(l2, 256, 0, {});
  auto rows = ratio_report(l2, {64, 128, 256}, 0, t);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.target == 1.0);
    CHECK(r.ratio > 0.0);
  }
}

TEST_CASE("degenerate construction on the square and the diamond") {
  NormOracle linf = make_linf(2);
  ConvexityVerdict v = strict_convexity_probe(linf, 10000, 1);
  REQUIRE(v.kind == ConvexityKind::SegmentFound);
  DegenerateResult res = degenerate_construction(linf, v, 20);
  CHECK(res.points.size() == 20);
  CHECK(res.count >= 100);

  NormOracle l1 = make_lp(2, 1.0);
  ConvexityVerdict v1 = strict_convexity_probe(l1, 10000, 3);
  REQUIRE(v1.kind == ConvexityKind::SegmentFound);
  DegenerateResult res1 = degenerate_construction(l1, v1, 40);
  CHECK(res1.points.size() == 40);
  CHECK(res1.count >= 400);
}

TEST_CASE("degenerate construction rejects bad inputs") {
  NormOracle l2 = make_lp(2, 2.0);
  ConvexityVerdict strict = strict_convexity_probe(l2, 5000, 1);
  CHECK(strict.kind == ConvexityKind::Strict);
  CHECK_THROWS_AS(degenerate_construction(l2, strict, 10), Error);

  NormOracle linf = make_linf(2);
  ConvexityVerdict v = strict_convexity_probe(linf, 10000, 1);
  CHECK_THROWS_AS(degenerate_construction(linf, v, 7), Error);  // odd n
  try {
    degenerate_construction(linf, v, 2000000000LL, {});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SegmentTooShort);
  }
}

TEST_CASE("compose rejects non-strictly-convex norms") {
  NormOracle linf = make_linf(2);
  SizeTable t("linf_d2", 2);
  CHECK_THROWS_AS(compose_pointset(linf, 10, 1, t), Error);
}
