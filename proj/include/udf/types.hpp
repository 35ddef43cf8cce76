#pragma once

#include <Eigen/Dense>

namespace udf {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using VecRef = Eigen::Ref<const Eigen::VectorXd>;

// Numerical tolerances shared across the pipeline. Every module takes these
// as an optional parameter so the CLI can override them uniformly.
struct Tolerances {
  double tau = 1e-9;       // point dedup / hash-lookup radius
  double eps_bnd = 1e-11;  // membership band around the unit boundary
  double eps_unit = 1e-9;  // pairwise unit-distance acceptance band
  double tau_tan = 1e-7;   // chord roots below this collapse to tangency
};

}  // namespace udf
