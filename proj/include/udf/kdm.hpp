#pragma once

#include <vector>

#include <json.hpp>

#include "udf/norm.hpp"

namespace udf {

// Radial C-infinity bump: 1 inside the unit ball, 0 outside radius 2.
double bump_chi(const VecRef& x);

// Largest h from the halving schedule (starting at 1/(pi n)^2) for which the
// finite-difference Hessian of rho stays positive definite on the sampled
// grid.
double select_h(int n, int d, double grid_step = 0.05);

// Bump-perturbed paraboloid body and the d sphere-translate centers.
struct LocalModel {
  int d = 0;
  int n = 0;      // the intersection has 2n points
  double h = 0.0;
  NormOracle body;
  std::vector<Vec> centers;  // q_0 = 0 and the d-1 simplex centers, in R^d
  std::vector<Vec> simplex;  // p_j in R^{d-1}, first coordinate 0, |p_j| = 2.5

  double rho(const VecRef& x) const;  // R^{d-1} -> R
};

LocalModel build_model(int d, int n);

// The 2n analytic intersection points ((2k+1)/(2n), 0, ..., 0,
// ((2k+1)/(2n))^2 - 16) for -n <= k < n.
std::vector<Vec> seed_points(const LocalModel& model);

struct KdmCertificate {
  std::vector<Vec> points;
  std::vector<double> residuals;  // per point, max over the d centers
  std::vector<double> jac_dets;
  bool persisted = false;
};

// Newton on Phi_B(x) = (gauge_B(x - q_j) - 1)_j from every seed point.
KdmCertificate solve_intersections(const LocalModel& model, const NormOracle& B,
                                   const Tolerances& tol = {});
KdmCertificate solve_intersections_from(const LocalModel& model,
                                        const NormOracle& B,
                                        const std::vector<Vec>& inits,
                                        const Tolerances& tol = {});

// Multiplicative gauge perturbation by a fixed random smooth even function.
NormOracle perturb_gauge(const NormOracle& base, double delta, uint64_t seed);

// Re-solves from the unperturbed roots under `trials` seeded perturbations of
// magnitude delta; true iff every root survives with certificates each time.
bool perturb_and_persist(const LocalModel& model, KdmCertificate& cert,
                         double delta, int trials, uint64_t seed,
                         const Tolerances& tol = {});

bool verify_kdm(const KdmCertificate& cert, const LocalModel& model,
                const NormOracle& B);

// Analytic normal directions nu_0..nu_{d-1} at seed index k (-n <= k < n).
std::vector<Vec> analytic_normals(const LocalModel& model, int k);

// Finite-difference gradient of x -> gauge_B(x - center) at x.
Vec gauge_gradient_fd(const NormOracle& B, const Vec& center, const Vec& x,
                      double step = 1e-6);

nlohmann::json certificate_to_json(const KdmCertificate& cert,
                                   const LocalModel& model, double delta,
                                   int trials, uint64_t seed);

}  // namespace udf
