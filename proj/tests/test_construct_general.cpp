#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "udf/construct_general.hpp"

using namespace udf;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Vec v3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

}  // namespace

TEST_CASE("phi_map on the euclidean sphere is 2x") {
  NormOracle l2 = make_lp(3, 2.0);
  auto ws = default_frame_ws(3);
  Vec phi = phi_map(l2, {v3(0.6, 0.0, 0.8), 0.0}, ws);
  CHECK(phi[0] == doctest::Approx(1.2).epsilon(1e-10));
  CHECK(std::abs(phi[1]) < 1e-7);

  Vec phi2 = phi_map(l2, {v3(0.36, 0.48, 0.8), 0.0}, ws);
  CHECK(phi2[0] == doctest::Approx(0.72).epsilon(1e-10));
  CHECK(phi2[1] == doctest::Approx(0.96).epsilon(1e-10));
}

TEST_CASE("phi_map symmetry on the l4 ball") {
  NormOracle l4 = make_lp(3, 4.0);
  BoundaryPoint x = boundary_point(l4, v3(1, 1, 1));
  Vec phi = phi_map(l4, x, default_frame_ws(3));
  CHECK(std::abs(phi[0] - phi[1]) < 1e-10);
  CHECK(phi[0] > 0.1);
}

TEST_CASE("phi_map rejects dependent directions") {
  NormOracle l2 = make_lp(3, 2.0);
  std::vector<Vec> ws = {v3(1, 0, 0), v3(2, 0, 0)};
  CHECK_THROWS_AS(phi_map(l2, {v3(0.6, 0, 0.8), 0.0}, ws), Error);
}

TEST_CASE("seed_target postconditions") {
  NormOracle l2 = make_lp(3, 2.0);
  auto ws = default_frame_ws(3);
  Vec wd = default_frame_wd(3);
  Rng rng(42);
  SeedResult res = seed_target(l2, ws, wd, 0.1, 0.1, rng);
  CHECK(res.x.coords.dot(wd) > 0.1);
  CHECK(std::abs(res.t[0]) >= 0.1);
  CHECK(std::abs(res.t[1]) >= 0.1);
  CHECK(std::abs(res.t[0] - 2.0 * res.x.coords[0]) < 1e-9);

  NormOracle l2d2 = make_lp(2, 2.0);
  Rng rng2(42);
  SeedResult res2 = seed_target(l2d2, default_frame_ws(2), default_frame_wd(2),
                                0.1, 0.1, rng2);
  CHECK(std::abs(res2.t[0]) >= 0.1);
  CHECK(res2.x.coords[1] > 0.1);
}

TEST_CASE("seed_target exhausts a zero budget") {
  NormOracle l2 = make_lp(2, 2.0);
  Rng rng(1);
  try {
    seed_target(l2, default_frame_ws(2), default_frame_wd(2), 0.1, 0.1, rng, 0);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SeedExhausted);
  }
}

TEST_CASE("solve_on_boundary closed forms") {
  NormOracle l2 = make_lp(3, 2.0);
  Vec target = v2(0.42, 0.42);
  BoundaryPoint init = boundary_point(l2, v3(0.21, 0.21, 0.95));
  BoundaryPoint p = solve_on_boundary(l2, default_frame_ws(3),
                                      default_frame_wd(3), target, init);
  CHECK(p.coords[0] == doctest::Approx(0.21).epsilon(1e-9));
  CHECK(p.coords[1] == doctest::Approx(0.21).epsilon(1e-9));
  CHECK(p.coords[2] == doctest::Approx(std::sqrt(1.0 - 0.0882)).epsilon(1e-9));

  NormOracle l2d2 = make_lp(2, 2.0);
  Vec target1(1);
  target1 << 1.0;
  BoundaryPoint init2 = boundary_point(l2d2, v2(0.4, 0.9));
  BoundaryPoint q = solve_on_boundary(l2d2, default_frame_ws(2),
                                      default_frame_wd(2), target1, init2);
  CHECK(q.coords[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(q.coords[1] == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-9));
}

TEST_CASE("solve_on_boundary fails on unreachable targets") {
  NormOracle l2 = make_lp(2, 2.0);
  Vec target(1);
  target << 5.0;  // phi is bounded by the diameter
  BoundaryPoint init = boundary_point(l2, v2(0.4, 0.9));
  try {
    solve_on_boundary(l2, default_frame_ws(2), default_frame_wd(2), target, init);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NoConvergence);
  }
}

TEST_CASE("find_ap_points matches the sphere closed form") {
  NormOracle l2 = make_lp(3, 2.0);
  int m = 4;
  ApWitness w = find_ap_points(l2, default_frame_ws(3), default_frame_wd(3), m, 7);
  REQUIRE(static_cast<int>(w.points.size()) == m);
  CHECK(w.lambda > 0.0);
  for (int j = 1; j <= m; ++j) {
    const Vec& p = w.points[static_cast<size_t>(j - 1)].coords;
    double f = 1.0 + j * w.lambda;
    // Phi(p) = 2(p1, p2) on the sphere, so p = (f t / 2; lift)
    CHECK(std::abs(p[0] - f * w.t[0] / 2.0) < 1e-8);
    CHECK(std::abs(p[1] - f * w.t[1] / 2.0) < 1e-8);
    double lift2 = 1.0 - p[0] * p[0] - p[1] * p[1];
    CHECK(p[2] == doctest::Approx(std::sqrt(lift2)).epsilon(1e-8));
    CHECK(p[2] > 0.0);
  }
}

TEST_CASE("find_ap_points handles m = 1 in the plane") {
  NormOracle l2 = make_lp(2, 2.0);
  ApWitness w = find_ap_points(l2, default_frame_ws(2), default_frame_wd(2), 1, 3);
  REQUIRE(w.points.size() == 1);
  CHECK(std::abs(w.t[0]) >= 1e-3);
  CHECK(w.points[0].coords[1] > 1e-3);
  Vec phi = phi_map(l2, w.points[0], w.ws);
  CHECK(std::abs(phi[0] - (1.0 + w.lambda) * w.t[0]) <= 1e-9);
}

TEST_CASE("assemble_generators layout and certificates") {
  NormOracle l2 = make_lp(2, 2.0);
  int m = 3;
  ApWitness w = find_ap_points(l2, default_frame_ws(2), default_frame_wd(2), m, 5);
  GapSpec spec = assemble_generators(l2, m, w);
  CHECK(spec.generators.size() == static_cast<size_t>(m + 2 * 2 - 2));
  CHECK(spec.ranges == std::vector<long long>{2, 2, 2, 3, 9});
  CHECK(spec.directions.size() == static_cast<size_t>(2 * m));
  CHECK(spec.codes.size() == spec.directions.size());

  for (size_t k = 0; k < spec.directions.size(); ++k) {
    CHECK(std::abs(l2(spec.directions[k]) - 1.0) <= 1e-11);
    Vec sum = Vec::Zero(2);
    for (size_t g = 0; g < spec.generators.size(); ++g) {
      sum += static_cast<double>(spec.codes[k][g]) * spec.generators[g];
    }
    CHECK((sum - spec.directions[k]).norm() <= 1e-10);
  }
  // realized q_ij = p_j - (1 + j lambda) t_i w_i stay on the boundary
  for (int j = 1; j <= m; ++j) {
    Vec q = w.points[static_cast<size_t>(j - 1)].coords -
            (1.0 + j * w.lambda) * w.t[0] * w.ws[0];
    CHECK(std::abs(l2(q) - 1.0) <= 1e-9);
  }
  for (const auto& p : w.points) {
    CHECK(p.coords.dot(w.wd) > 0.0);
  }
}

TEST_CASE("verify_non_overlapping classifies violations") {
  GapSpec ok;
  ok.d = 2;
  ok.m = 1;
  ok.directions = {v2(0, 1), v2(0.6, 0.8)};
  ok.tags = {{DirectionTag::P, 0, 1}, {DirectionTag::P, 0, 2}};
  CHECK(verify_non_overlapping(ok).ok);

  GapSpec anti = ok;
  anti.directions = {v2(0, 1), v2(0, -1)};
  OverlapCheck oc = verify_non_overlapping(anti);
  CHECK(!oc.ok);
  CHECK(oc.case_id == 1);

  GapSpec dup = ok;
  dup.directions = {v2(0, 1), v2(0, 1)};
  OverlapCheck oc2 = verify_non_overlapping(dup);
  CHECK(!oc2.ok);
  CHECK(oc2.case_id == 2);

  GapSpec qq = ok;
  qq.directions = {v2(0, 1), v2(0, 1)};
  qq.tags = {{DirectionTag::Q, 1, 1}, {DirectionTag::Q, 2, 1}};
  CHECK(verify_non_overlapping(qq).case_id == 5);
}

TEST_CASE("full spec build for l3 in dimension 3") {
  NormOracle l3 = make_lp(3, 3.0);
  GapSpec spec = build_spec(l3, 4, 21);
  CHECK(spec.directions.size() == 12);  // d m = 3 * 4
  CHECK(verify_non_overlapping(spec).ok);
}

TEST_CASE("construction rejects non-strictly-convex norms") {
  NormOracle linf = make_linf(2);
  Rng rng(2);
  CHECK_THROWS_AS(
      seed_target(linf, default_frame_ws(2), default_frame_wd(2), 0.1, 0.1, rng),
      Error);
}
