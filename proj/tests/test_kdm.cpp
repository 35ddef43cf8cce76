#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "udf/kdm.hpp"

using namespace udf;

TEST_CASE("bump plateaus and midpoint") {
  Vec x(2);
  x << 0.5, 0.0;
  CHECK(bump_chi(x) == 1.0);
  x << 2.5, 0.0;
  CHECK(bump_chi(x) == 0.0);
  x << 1.5, 0.0;
  CHECK(bump_chi(x) == doctest::Approx(0.5).epsilon(1e-12));
  x << 0.0, 0.7;
  CHECK(bump_chi(x) == 1.0);
}

TEST_CASE("unperturbed paraboloid has Hessian 2I") {
  // finite-difference check of the h = 0 limit
  auto f = [](const VecRef& x) { return x.squaredNorm(); };
  Vec x(2);
  x << 0.3, -1.1;
  double step = 1e-4;
  for (int i = 0; i < 2; ++i) {
    Vec xp = x, xm = x;
    xp[i] += step;
    xm[i] -= step;
    double second = (f(xp) - 2.0 * f(x) + f(xm)) / (step * step);
    CHECK(second == doctest::Approx(2.0).epsilon(1e-6));
  }
}

TEST_CASE("select_h passes its own eigenvalue scan and is monotone") {
  double h1 = select_h(1, 3);
  double h4 = select_h(4, 3);
  CHECK(h1 > 0.0);
  CHECK(h4 > 0.0);
  CHECK(h4 < h1);
  CHECK(h1 <= 1.0 / std::pow(M_PI, 2.0));
}

TEST_CASE("build_model geometry") {
  LocalModel model = build_model(3, 1);
  CHECK(model.d == 3);
  CHECK(model.n == 1);
  // the top of the body is on the boundary
  Vec top(3);
  top << 0.0, 0.0, 16.0 - model.rho(Vec::Zero(2));
  CHECK(std::abs(model.body(top) - 1.0) <= 1e-11);
  REQUIRE(model.simplex.size() == 2);
  for (const Vec& p : model.simplex) {
    CHECK(p.norm() == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(p[0] == 0.0);
    CHECK(p.norm() > 2.0);
    CHECK(p.norm() < 3.0);
  }
  REQUIRE(model.centers.size() == 3);
  CHECK(model.centers[0].norm() == 0.0);
}

TEST_CASE("seed point formulas") {
  LocalModel m1 = build_model(3, 1);
  auto seeds1 = seed_points(m1);
  REQUIRE(seeds1.size() == 2);
  CHECK(seeds1[0][0] == doctest::Approx(-0.5));
  CHECK(seeds1[1][0] == doctest::Approx(0.5));
  CHECK(seeds1[0][2] == doctest::Approx(0.25 - 16.0));

  LocalModel m2 = build_model(3, 2);
  auto seeds2 = seed_points(m2);
  REQUIRE(seeds2.size() == 4);
  CHECK(seeds2[0][0] == doctest::Approx(-0.75));
  CHECK(seeds2[1][0] == doctest::Approx(-0.25));
  CHECK(seeds2[2][0] == doctest::Approx(0.25));
  CHECK(seeds2[3][0] == doctest::Approx(0.75));
  for (const Vec& s : seeds2) {
    CHECK(s[2] == doctest::Approx(s[0] * s[0] - 16.0));
  }
}

TEST_CASE("seeds already satisfy Phi = 0") {
  LocalModel model = build_model(3, 2);
  for (const Vec& s : seed_points(model)) {
    for (const Vec& q : model.centers) {
      CHECK(std::abs(model.body(s - q) - 1.0) <= 1e-10);
    }
  }
}

TEST_CASE("solve_intersections yields a certificate") {
  LocalModel model = build_model(3, 2);
  KdmCertificate cert = solve_intersections(model, model.body);
  REQUIRE(cert.points.size() == 4);
  auto seeds = seed_points(model);
  for (size_t k = 0; k < cert.points.size(); ++k) {
    CHECK(cert.residuals[k] <= 1e-10);
    CHECK(std::abs(cert.jac_dets[k]) >= 1e-6);
    CHECK((cert.points[k] - seeds[k]).norm() < 1e-8);
  }
  CHECK(verify_kdm(cert, model, model.body));
}

TEST_CASE("gradients align with the analytic normals") {
  LocalModel model = build_model(3, 2);
  KdmCertificate cert = solve_intersections(model, model.body);
  for (int k = -model.n; k < model.n; ++k) {
    size_t idx = static_cast<size_t>(k + model.n);
    std::vector<Vec> nus = analytic_normals(model, k);
    double analytic_sign = 0.0;
    Mat N(model.d, model.d);
    for (size_t j = 0; j < nus.size(); ++j) {
      Vec g = gauge_gradient_fd(model.body, model.centers[j], cert.points[idx]);
      double cosang = g.dot(nus[j]) / (g.norm() * nus[j].norm());
      CHECK(cosang > 0.0);
      CHECK(std::acos(std::min(1.0, cosang)) <= 1e-4);
      N.col(static_cast<int>(j)) = nus[j];
    }
    analytic_sign = N.determinant();
    // determinant signs agree with the analytic normal matrix
    CHECK(analytic_sign * cert.jac_dets[idx] > 0.0);
  }
}

TEST_CASE("verify_kdm rejects tampered certificates") {
  LocalModel model = build_model(3, 1);
  KdmCertificate cert = solve_intersections(model, model.body);
  CHECK(verify_kdm(cert, model, model.body));
  KdmCertificate bad = cert;
  bad.points[0][0] += 1e-3;
  CHECK(!verify_kdm(bad, model, model.body));
  KdmCertificate few = cert;
  few.points.pop_back();
  CHECK(!verify_kdm(few, model, model.body));
}

TEST_CASE("persistence under gauge perturbations") {
  LocalModel model = build_model(3, 2);
  KdmCertificate cert = solve_intersections(model, model.body);

  KdmCertificate c0 = cert;
  CHECK(perturb_and_persist(model, c0, 0.0, 1, 4));
  CHECK(c0.persisted);

  KdmCertificate c1 = cert;
  CHECK(perturb_and_persist(model, c1, 1e-3, 5, 4));
  // persistence is monotone: half the magnitude with the same seeds
  KdmCertificate c2 = cert;
  CHECK(perturb_and_persist(model, c2, 5e-4, 5, 4));

  CHECK_THROWS_AS(perturb_and_persist(model, cert, 0.5, 1, 4), Error);
}

TEST_CASE("model construction preconditions") {
  CHECK_THROWS_AS(build_model(2, 1), Error);
  CHECK_THROWS_AS(build_model(3, 0), Error);
}

TEST_CASE("bump support: rho minus the paraboloid vanishes outside radius 2") {
  LocalModel model = build_model(3, 2);
  Rng rng(6);
  for (int i = 0; i < 200; ++i) {
    Vec x = rng.gaussian_vec(2) * 1.5;
    double gap = model.rho(x) - x.squaredNorm();
    if (x.norm() >= 2.0) {
      CHECK(gap == 0.0);
    } else {
      CHECK(std::abs(gap) <= model.h);
    }
  }
}
