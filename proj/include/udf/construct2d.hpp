#pragma once

#include <vector>

#include "udf/boundary.hpp"
#include "udf/gap_spec.hpp"
#include "udf/norm.hpp"

namespace udf {

// Horizontal-slice profile of a 2-d unit ball: height of the body above the
// x-axis and the width function lambda(t) = |slice at height t|.
struct ChordProfile {
  double height = 0.0;  // sup of the second coordinate over the ball
  double width = 0.0;   // lambda(0)
  double radius = 0.0;  // Euclidean bound used for bracketing
};

ChordProfile make_chord_profile(const NormOracle& norm);

struct Slice {
  double left = 0.0;
  double right = 0.0;
  double length() const { return right - left; }
};

Slice slice_at(const NormOracle& norm, const ChordProfile& prof, double t);

double chord_length(const NormOracle& norm, const ChordProfile& prof, double t);

// Heights t_1 > ... > t_m with lambda(t_i) = i*w/(m+1).
std::vector<double> find_heights(const NormOracle& norm, int m);

struct Generators2d {
  std::vector<BoundaryPoint> p;  // left slice endpoints, one per height
  Vec v;                         // (w/(m+1)) e1
  double width = 0.0;
  std::vector<double> heights;
};

Generators2d build_2d_generators(const NormOracle& norm, int m);

// Warm-up GAP: generators (p_1..p_m, v), ranges (2,..,2, m^2), directions
// p_j and p_j + j*v.
GapSpec build_2d_warmup_spec(const NormOracle& norm, int m);

}  // namespace udf
