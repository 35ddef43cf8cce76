#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "udf/error.hpp"
#include "udf/rng.hpp"
#include "udf/types.hpp"

namespace udf {

enum class Convexity { Unknown, StrictByConstruction, NotStrict };

// A norm presented as a gauge (Minkowski functional) oracle. Closed-form
// norms evaluate directly; norms given only through a membership test for
// their unit ball are resolved by radial bisection to 1e-13. Immutable after
// construction, safe to share across threads.
class NormOracle {
 public:
  using Gauge = std::function<double(const VecRef&)>;
  using Membership = std::function<bool(const VecRef&)>;
  using Gradient = std::function<Vec(const VecRef&)>;

  static NormOracle from_gauge(int dim, std::string name, Gauge gauge,
                               bool smooth, Convexity conv,
                               Gradient grad = nullptr);
  static NormOracle from_membership(int dim, std::string name, Membership member,
                                    bool smooth, Convexity conv);

  int dim() const { return dim_; }
  const std::string& name() const { return name_; }
  bool smooth_hint() const { return smooth_; }
  Convexity convexity_hint() const { return conv_; }
  bool bisection_backed() const { return bisected_; }
  bool has_gradient() const { return static_cast<bool>(grad_); }
  Vec gradient(const VecRef& x) const;

  const nlohmann::json& spec_json() const { return spec_; }
  void set_spec_json(nlohmann::json j) { spec_ = std::move(j); }

  // gauge evaluation with finiteness/dimension checks
  double operator()(const VecRef& x) const;

 private:
  int dim_ = 0;
  std::string name_;
  bool smooth_ = false;
  Convexity conv_ = Convexity::Unknown;
  bool bisected_ = false;
  Gauge gauge_;
  Gradient grad_;
  nlohmann::json spec_;
};

double gauge_eval(const NormOracle& norm, const VecRef& x);

struct BoundaryPoint {
  Vec coords;
  double residual = 0.0;  // |gauge(coords) - 1|
};

BoundaryPoint boundary_point(const NormOracle& norm, const VecRef& x);

// Factories
NormOracle make_lp(int d, double p);
NormOracle make_linf(int d);
NormOracle make_ellipsoid(int d, const Vec& semi_axes);
NormOracle make_perturbed_lp(int d, double p, double amplitude, uint64_t seed);
NormOracle make_polygon_table(const std::vector<Eigen::Vector2d>& vertices);
NormOracle make_rotated2d(const NormOracle& base, double angle);

// JSON norm specification: {"kind":"lp"|"ellipsoid"|"perturbed_lp"|"table", ...}
NormOracle parse_norm_json(const nlohmann::json& spec);
// CLI shorthand: "lp:2", "l1", "l2", "linf", "ellipsoid:1,0.5",
// "perturbed_lp:2:0.03:7", "@file.json" or inline JSON text.
NormOracle parse_norm_arg(const std::string& arg, int d);

// Samples the norm axioms (positivity, homogeneity, triangle inequality,
// central symmetry). Advisory: a black-box oracle cannot be certified.
struct AxiomReport {
  double min_gauge_on_sphere = 0.0;
  double worst_homogeneity = 0.0;  // relative error
  double worst_triangle = 0.0;     // positive excess of g(x+y) over g(x)+g(y)
  bool symmetric_exact = true;     // gauge(-x) == gauge(x) as evaluated
  bool ok(double tol = 1e-12) const {
    return min_gauge_on_sphere > 0 && worst_homogeneity <= tol &&
           worst_triangle <= tol && symmetric_exact;
  }
};

AxiomReport probe_norm_axioms(const NormOracle& norm, int samples, uint64_t seed);

// Smallest/largest Euclidean radius information used for bracketing.
double outer_radius_bound(const NormOracle& norm);

}  // namespace udf
