#pragma once

#include <vector>

#include "udf/boundary.hpp"
#include "udf/gap_spec.hpp"
#include "udf/norm.hpp"
#include "udf/rng.hpp"

namespace udf {

// Witness of the arithmetic-progression property: points p_1..p_m on the
// boundary with Phi(p_j) = (1 + j*lambda) t, all strictly on the positive
// side of span{w_1..w_{d-1}}.
struct ApWitness {
  std::vector<Vec> ws;  // d-1 linearly independent chord directions
  Vec wd;               // unit vector orthogonal to all ws
  Vec t;                // in R^{d-1}
  double lambda = 0.0;
  std::vector<BoundaryPoint> points;
};

Vec phi_map(const NormOracle& norm, const BoundaryPoint& x,
            const std::vector<Vec>& ws, const Tolerances& tol = {});

struct SeedResult {
  BoundaryPoint x;
  Vec t;
};

// Rejection-samples a boundary point with <x, wd> > eta and all coordinates
// of Phi(x) at least eps_coord in magnitude.
SeedResult seed_target(const NormOracle& norm, const std::vector<Vec>& ws,
                       const Vec& wd, double eps_coord, double eta, Rng& rng,
                       int budget = 100000, const Tolerances& tol = {});

// Newton iteration on the boundary chart over wd-perp for Phi(x) = target.
BoundaryPoint solve_on_boundary(const NormOracle& norm, const std::vector<Vec>& ws,
                                const Vec& wd, const Vec& target,
                                const BoundaryPoint& init,
                                const Tolerances& tol = {});

struct ApOptions {
  double eps_coord = 0.1;
  double eta = 0.1;
  double lambda0 = 0.01;     // initial lambda is lambda0 / m^2
  double lambda_min = 1e-8;
  int seed_budget = 100000;
};

ApWitness find_ap_points(const NormOracle& norm, const std::vector<Vec>& ws,
                         const Vec& wd, int m, uint64_t seed,
                         const ApOptions& opt = {}, const Tolerances& tol = {});

GapSpec assemble_generators(const NormOracle& norm, int m, const ApWitness& witness,
                            const Tolerances& tol = {});

// Pairwise separation check over +-directions; on violation reports which of
// the five distinctness cases of the construction it contradicts.
struct OverlapCheck {
  bool ok = true;
  int case_id = 0;  // 1..5
  int a = -1, b = -1;
  std::string detail;
};

OverlapCheck verify_non_overlapping(const GapSpec& spec, double min_sep = 1e-8);

std::vector<Vec> default_frame_ws(int d);
Vec default_frame_wd(int d);

// Default-frame pipeline: seed, AP search, assembly, non-overlap check.
GapSpec build_spec(const NormOracle& norm, int m, uint64_t seed,
                   const Tolerances& tol = {});

}  // namespace udf
