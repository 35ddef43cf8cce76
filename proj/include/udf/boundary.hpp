#pragma once

#include <optional>

#include "udf/norm.hpp"
#include "udf/types.hpp"

namespace udf {

struct ChordResult {
  double value = 0.0;
  bool tangent = false;
};

// Chord function: the unique nonzero scalar s with x - s*w on the boundary,
// or tangent when no root beyond tau_tan exists on either side. Requires a
// strictly convex oracle; a flat root interval wider than tau_tan raises
// NotStrictlyConvex.
ChordResult chord_scalar(const NormOracle& norm, const BoundaryPoint& x,
                         const VecRef& w, const Tolerances& tol = {});

bool is_shadow_boundary(const NormOracle& norm, const BoundaryPoint& x,
                        const VecRef& w, double tau_tan);

struct SegmentWitness {
  Vec a, b;      // boundary pair certifying the segment
  Vec midpoint;  // on the boundary
  Vec half;      // (b - a) / 2
};

enum class ConvexityKind { Strict, SegmentFound, Inconclusive };

struct ConvexityVerdict {
  ConvexityKind kind = ConvexityKind::Inconclusive;
  std::optional<SegmentWitness> segment;
};

ConvexityVerdict strict_convexity_probe(const NormOracle& norm, int samples,
                                        uint64_t seed);

// Whether the construction pipeline may treat the norm as strictly convex:
// trusts the factory hint, probes only when the hint is Unknown.
bool accepted_as_strictly_convex(const NormOracle& norm);

BoundaryPoint sample_boundary(const NormOracle& norm, Rng& rng);

// Extends a certified boundary segment to (numerically) maximal length along
// its own line.
SegmentWitness extend_segment(const NormOracle& norm, const SegmentWitness& w);

}  // namespace udf
