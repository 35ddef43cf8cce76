#include "udf/kdm.hpp"

#include <cmath>
#include <memory>
#include <sstream>

#include "udf/rng.hpp"

namespace udf {
namespace {

double smooth_g(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

struct RhoParams {
  int d = 0;  // ambient dimension; rho acts on R^{d-1}
  int n = 0;
  double h = 0.0;

  double operator()(const VecRef& x) const {
    double q = x.squaredNorm();
    // cos is even; |x1| keeps the evaluation bitwise symmetric under x -> -x
    return q + h * bump_chi(x) * std::cos(M_PI * n * std::abs(x[0]));
  }
};

}  // namespace

double bump_chi(const VecRef& x) {
  double r = x.norm();
  double a = smooth_g(2.0 - r);
  if (a == 0.0) return 0.0;
  double b = smooth_g(r - 1.0);
  return a / (a + b);
}

namespace {

// Finite-difference Hessian of f at x, central second differences.
Mat fd_hessian(const std::function<double(const VecRef&)>& f, const Vec& x,
               double step) {
  int k = static_cast<int>(x.size());
  Mat H(k, k);
  double f0 = f(x);
  for (int i = 0; i < k; ++i) {
    Vec xp = x, xm = x;
    xp[i] += step;
    xm[i] -= step;
    H(i, i) = (f(xp) - 2.0 * f0 + f(xm)) / (step * step);
    for (int j = i + 1; j < k; ++j) {
      Vec a = x, b = x, c = x, e = x;
      a[i] += step; a[j] += step;
      b[i] += step; b[j] -= step;
      c[i] -= step; c[j] += step;
      e[i] -= step; e[j] -= step;
      H(i, j) = H(j, i) = (f(a) - f(b) - f(c) + f(e)) / (4.0 * step * step);
    }
  }
  return H;
}

bool hessian_positive_on_grid(const RhoParams& rho, double grid_step) {
  int k = rho.d - 1;
  auto f = [&rho](const VecRef& x) { return rho(x); };
  const double radius = 2.5;
  int steps = static_cast<int>(std::floor(radius / grid_step));
  std::vector<int> idx(static_cast<size_t>(k), -steps);
  Vec x(k);
  while (true) {
    double r2 = 0.0;
    for (int i = 0; i < k; ++i) {
      x[i] = idx[static_cast<size_t>(i)] * grid_step;
      r2 += x[i] * x[i];
    }
    if (r2 <= radius * radius) {
      Mat H = fd_hessian(f, x, 1e-4);
      Eigen::SelfAdjointEigenSolver<Mat> eig(H);
      if (eig.eigenvalues().minCoeff() <= 1e-6) return false;
    }
    int c = 0;
    while (c < k && idx[static_cast<size_t>(c)] == steps) idx[static_cast<size_t>(c++)] = -steps;
    if (c == k) return true;
    ++idx[static_cast<size_t>(c)];
  }
}

}  // namespace

double select_h(int n, int d, double grid_step) {
  if (n < 1 || d < 2) fail(Errc::InvalidArgument, "select_h needs n >= 1, d >= 2");
  double h = 1.0 / std::pow(M_PI * n, 2.0);
  while (h >= 1e-12) {
    RhoParams rho{d, n, h};
    if (hessian_positive_on_grid(rho, grid_step)) return h;
    h *= 0.5;
  }
  fail(Errc::HUnderflow, "bump height underflow before reaching convexity");
}

double LocalModel::rho(const VecRef& x) const {
  return RhoParams{d, n, h}(x);
}

LocalModel build_model(int d, int n) {
  if (d < 3) fail(Errc::InvalidArgument, "the local model needs d >= 3");
  if (n < 1) fail(Errc::InvalidArgument, "n must be positive");
  LocalModel model;
  model.d = d;
  model.n = n;
  model.h = select_h(n, d);
  auto rho = std::make_shared<RhoParams>(RhoParams{d, n, model.h});

  auto member = [rho, d](const VecRef& z) -> bool {
    Eigen::Map<const Vec> x(z.data(), d - 1);
    double y = z[d - 1];
    return std::abs(y) <= 16.0 - (*rho)(x);
  };
  std::ostringstream name;
  name << "kdm_body_d" << d << "_n" << n;
  model.body = NormOracle::from_membership(d, name.str(), std::move(member), true,
                                           Convexity::StrictByConstruction);
  model.body.set_spec_json({{"schema", "udf/1"},
                            {"kind", "kdm_body"},
                            {"d", d},
                            {"n", n},
                            {"h", model.h}});

  // regular-simplex directions at radius 2.5 in coordinates 2..d-1
  int k = d - 1;
  for (int j = 1; j <= d - 1; ++j) {
    Vec p = Vec::Zero(k);
    if (k == 2) {
      p[1] = (j == 1) ? 2.5 : -2.5;
    } else {
      double theta = 2.0 * M_PI * (j - 1) / (d - 1);
      p[1] = 2.5 * std::cos(theta);
      p[2] = 2.5 * std::sin(theta);
    }
    model.simplex.push_back(p);
  }

  // centers of the d translated spheres: the map (gauge(x - q_j) - 1)_j
  // vanishes at the seed points below with q_j = -(p_j; rho(p_j))
  model.centers.push_back(Vec::Zero(d));
  for (const Vec& p : model.simplex) {
    Vec q(d);
    q.head(k) = -p;
    q[d - 1] = -model.rho(p);
    model.centers.push_back(std::move(q));
  }
  return model;
}

std::vector<Vec> seed_points(const LocalModel& model) {
  std::vector<Vec> seeds;
  int d = model.d, n = model.n;
  for (int k = -n; k < n; ++k) {
    double x1 = (2.0 * k + 1.0) / (2.0 * n);
    Vec s = Vec::Zero(d);
    s[0] = x1;
    s[d - 1] = x1 * x1 - 16.0;
    seeds.push_back(std::move(s));
  }
  return seeds;
}

namespace {

Vec phi_b(const NormOracle& B, const std::vector<Vec>& centers, const Vec& x) {
  Vec out(static_cast<int>(centers.size()));
  for (size_t j = 0; j < centers.size(); ++j) {
    out[static_cast<int>(j)] = B(x - centers[j]) - 1.0;
  }
  return out;
}

struct NewtonRoot {
  Vec x;
  double residual = 0.0;
  double jac_det = 0.0;
};

std::optional<NewtonRoot> newton_root(const NormOracle& B,
                                      const std::vector<Vec>& centers,
                                      const Vec& init) {
  int d = static_cast<int>(init.size());
  const double fd_step = 1e-6;
  Vec x = init;
  Vec r = phi_b(B, centers, x);
  Mat J(d, d);
  for (int iter = 0; iter < 50; ++iter) {
    for (int i = 0; i < d; ++i) {
      Vec xp = x;
      xp[i] += fd_step;
      J.col(i) = (phi_b(B, centers, xp) - r) / fd_step;
    }
    if (r.cwiseAbs().maxCoeff() <= 1e-10) {
      NewtonRoot root;
      root.x = x;
      root.residual = r.cwiseAbs().maxCoeff();
      root.jac_det = J.determinant();
      return root;
    }
    Vec step = J.fullPivLu().solve(-r);
    if (!step.allFinite()) return std::nullopt;
    double scale = 1.0;
    bool improved = false;
    for (int h = 0; h < 30; ++h) {
      Vec xn = x + scale * step;
      Vec rn = phi_b(B, centers, xn);
      if (rn.cwiseAbs().maxCoeff() < r.cwiseAbs().maxCoeff()) {
        x = xn;
        r = rn;
        improved = true;
        break;
      }
      scale *= 0.5;
    }
    if (!improved) return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

KdmCertificate solve_intersections_from(const LocalModel& model,
                                        const NormOracle& B,
                                        const std::vector<Vec>& inits,
                                        const Tolerances&) {
  KdmCertificate cert;
  for (size_t k = 0; k < inits.size(); ++k) {
    auto root = newton_root(B, model.centers, inits[k]);
    if (!root) {
      fail(Errc::RootLost, "seed " + std::to_string(k) + " did not converge");
    }
    if (std::abs(root->jac_det) < 1e-6) {
      fail(Errc::RootLost, "seed " + std::to_string(k) + " has a near-singular Jacobian");
    }
    cert.points.push_back(root->x);
    cert.residuals.push_back(root->residual);
    cert.jac_dets.push_back(root->jac_det);
  }
  for (size_t a = 0; a + 1 < cert.points.size(); ++a) {
    for (size_t b = a + 1; b < cert.points.size(); ++b) {
      if ((cert.points[a] - cert.points[b]).norm() <= 1e-4) {
        fail(Errc::RootLost, "two roots merged");
      }
    }
  }
  return cert;
}

KdmCertificate solve_intersections(const LocalModel& model, const NormOracle& B,
                                   const Tolerances& tol) {
  return solve_intersections_from(model, B, seed_points(model), tol);
}

NormOracle perturb_gauge(const NormOracle& base, double delta, uint64_t seed) {
  int d = base.dim();
  // fixed random even function on the sphere, bounded by 1
  Rng rng(mix_seed(seed, 0xbadc0de5ULL));
  int ncoef = 1 + d * (d + 1) / 2;
  auto coef = std::make_shared<std::vector<double>>();
  double mass = 0.0;
  for (int i = 0; i < ncoef; ++i) {
    coef->push_back(rng.uniform(-1.0, 1.0));
    mass += std::abs(coef->back());
  }
  auto psi = [coef, mass, d](const VecRef& u) -> double {
    double s = (*coef)[0];
    int k = 1;
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) s += (*coef)[static_cast<size_t>(k++)] * u[i] * u[j];
    }
    return s / mass;
  };
  auto g = [base, psi, delta](const VecRef& x) -> double {
    double g0 = base(x);
    if (g0 == 0.0) return 0.0;
    Vec u = x / x.norm();
    return g0 * (1.0 + delta * psi(u));
  };
  auto out = NormOracle::from_gauge(d, base.name() + "_pert", std::move(g),
                                    base.smooth_hint(), Convexity::Unknown);
  nlohmann::json j = base.spec_json();
  j["perturbation"] = {{"delta", delta}, {"seed", seed}};
  out.set_spec_json(j);
  return out;
}

bool perturb_and_persist(const LocalModel& model, KdmCertificate& cert,
                         double delta, int trials, uint64_t seed,
                         const Tolerances& tol) {
  if (!(delta >= 0.0) || delta > 1e-2) {
    fail(Errc::InvalidArgument, "persistence delta must lie in [0, 1e-2]");
  }
  if (trials < 1) fail(Errc::InvalidArgument, "need at least one trial");
  if (cert.points.empty()) fail(Errc::InvalidArgument, "empty certificate");
  for (int trial = 0; trial < trials; ++trial) {
    NormOracle pert = perturb_gauge(model.body, delta, mix_seed(seed, trial));
    try {
      KdmCertificate again = solve_intersections_from(model, pert, cert.points, tol);
      if (again.points.size() != cert.points.size()) return false;
    } catch (const Error& e) {
      if (e.code() == Errc::RootLost) return false;
      throw;
    }
  }
  cert.persisted = true;
  return true;
}

bool verify_kdm(const KdmCertificate& cert, const LocalModel& model,
                const NormOracle& B) {
  if (static_cast<int>(cert.points.size()) != 2 * model.n) return false;
  for (const Vec& x : cert.points) {
    for (const Vec& q : model.centers) {
      if (std::abs(B(x - q) - 1.0) > 1e-9) return false;
    }
  }
  for (size_t a = 0; a + 1 < cert.points.size(); ++a) {
    for (size_t b = a + 1; b < cert.points.size(); ++b) {
      if ((cert.points[a] - cert.points[b]).norm() <= 1e-4) return false;
    }
  }
  return true;
}

std::vector<Vec> analytic_normals(const LocalModel& model, int k) {
  if (k < -model.n || k >= model.n) fail(Errc::OutOfRange, "seed index k");
  int d = model.d;
  double n = model.n;
  double sign = (std::abs(k) % 2 == 0) ? 1.0 : -1.0;  // (-1)^k
  std::vector<Vec> nus;
  Vec nu0 = Vec::Zero(d);
  nu0[0] = (2.0 * k + 1.0) / n - sign * model.h * M_PI * n;
  nu0[d - 1] = -1.0;
  nus.push_back(std::move(nu0));
  for (const Vec& p : model.simplex) {
    Vec nu = Vec::Zero(d);
    nu[0] = (2.0 * k + 1.0) / n;
    nu.head(d - 1) += 2.0 * p;
    nu[d - 1] = -1.0;
    nus.push_back(std::move(nu));
  }
  return nus;
}

Vec gauge_gradient_fd(const NormOracle& B, const Vec& center, const Vec& x,
                      double step) {
  int d = static_cast<int>(x.size());
  Vec g(d);
  double f0 = B(x - center);
  for (int i = 0; i < d; ++i) {
    Vec xp = x;
    xp[i] += step;
    g[i] = (B(xp - center) - f0) / step;
  }
  return g;
}

nlohmann::json certificate_to_json(const KdmCertificate& cert,
                                   const LocalModel& model, double delta,
                                   int trials, uint64_t seed) {
  nlohmann::json j;
  j["schema"] = "udf/1";
  j["type"] = "kdm_certificate";
  j["d"] = model.d;
  j["n"] = model.n;
  j["h"] = model.h;
  auto vecj = [](const Vec& v) {
    nlohmann::json a = nlohmann::json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
  };
  nlohmann::json centers = nlohmann::json::array();
  for (const auto& c : model.centers) centers.push_back(vecj(c));
  j["centers"] = centers;
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : cert.points) pts.push_back(vecj(p));
  j["points"] = pts;
  j["residuals"] = cert.residuals;
  j["jacobian_determinants"] = cert.jac_dets;
  j["persisted"] = cert.persisted;
  j["perturbation"] = {{"delta", delta}, {"trials", trials}, {"seed", seed}};
  return j;
}

}  // namespace udf
