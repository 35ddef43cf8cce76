#include "udf/boundary.hpp"

#include <cmath>

namespace udf {
namespace {

// One-sided root hunt for f(s) = gauge(x - s*sigma*w) - 1, f(0) ~ 0 and f
// convex along the line. Returns the magnitude of the crossing, or nullopt
// when f stays nonnegative (no chord on this side).
std::optional<double> root_on_side(const NormOracle& norm, const Vec& x,
                                   const Vec& w, double sigma, double tau_tan) {
  auto f = [&](double s) { return norm(x - (sigma * s) * w) - 1.0; };
  double gauge_w = norm(w);
  // f(s) >= s*gauge(w) - 1, so f is positive no later than s = 2/gauge(w)
  double s_sure = 2.0 / gauge_w;
  double hi = 0.1;
  int steps = 0;
  while (f(hi) <= 0.0) {
    hi *= 2.0;
    if (hi > 4.0 * s_sure || ++steps > 64) {
      fail(Errc::BisectionFailure, "chord bracket did not close");
    }
  }
  double lo = 0.0;
  while (hi - lo > 1e-13 * std::max(1.0, hi)) {
    double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  double root = 0.5 * (lo + hi);
  if (root <= tau_tan) return std::nullopt;
  if (f(0.5 * root) < -1e-12) return root;  // f dips inside: a genuine chord
  // f is numerically zero on all of [0, root]. A boundary segment keeps the
  // corner slope of the gauge past its far end; a degenerate tangency (flat
  // contact beyond second order) leaves f at noise level there.
  if (f(2.0 * root) > 1e-9) {
    fail(Errc::NotStrictlyConvex, "chord root set is an interval");
  }
  return std::nullopt;
}

}  // namespace

ChordResult chord_scalar(const NormOracle& norm, const BoundaryPoint& x,
                         const VecRef& w, const Tolerances& tol) {
  if (w.size() != norm.dim()) fail(Errc::InvalidArgument, "w dimension mismatch");
  if (w.isZero(0.0)) fail(Errc::ZeroVector, "chord direction is zero");
  double g = norm(x.coords);
  if (std::abs(g - 1.0) > tol.eps_bnd) {
    fail(Errc::NotOnBoundary, "chord base point is off the boundary");
  }
  Vec wv = w;
  auto pos = root_on_side(norm, x.coords, wv, +1.0, tol.tau_tan);
  auto neg = root_on_side(norm, x.coords, wv, -1.0, tol.tau_tan);
  if (pos && neg) {
    // convexity of gauge along the line forbids chords on both sides
    fail(Errc::NotStrictlyConvex, "chord roots found on both sides");
  }
  ChordResult r;
  if (pos) {
    r.value = *pos;
  } else if (neg) {
    r.value = -*neg;
  } else {
    r.tangent = true;
  }
  return r;
}

bool is_shadow_boundary(const NormOracle& norm, const BoundaryPoint& x,
                        const VecRef& w, double tau_tan) {
  Tolerances tol;
  tol.tau_tan = tau_tan;
  return chord_scalar(norm, x, w, tol).tangent;
}

BoundaryPoint sample_boundary(const NormOracle& norm, Rng& rng) {
  for (int tries = 0; tries < 256; ++tries) {
    Vec x = rng.gaussian_vec(norm.dim());
    if (x.norm() < 1e-9) continue;
    return boundary_point(norm, x);
  }
  fail(Errc::BisectionFailure, "boundary sampling failed");
}

ConvexityVerdict strict_convexity_probe(const NormOracle& norm, int samples,
                                        uint64_t seed) {
  Rng rng(seed);
  ConvexityVerdict v;
  int valid = 0;
  for (int s = 0; s < samples; ++s) {
    BoundaryPoint x, y;
    try {
      x = sample_boundary(norm, rng);
      y = sample_boundary(norm, rng);
    } catch (const Error&) {
      continue;
    }
    ++valid;
    if ((x.coords - y.coords).norm() <= 1e-6) continue;
    Vec mid = 0.5 * (x.coords + y.coords);
    if (norm(mid) >= 1.0 - 1e-12) {
      SegmentWitness w;
      w.a = x.coords;
      w.b = y.coords;
      w.midpoint = mid;
      w.half = 0.5 * (y.coords - x.coords);
      v.kind = ConvexityKind::SegmentFound;
      v.segment = std::move(w);
      return v;
    }
  }
  v.kind = valid > 0 ? ConvexityKind::Strict : ConvexityKind::Inconclusive;
  return v;
}

bool accepted_as_strictly_convex(const NormOracle& norm) {
  switch (norm.convexity_hint()) {
    case Convexity::StrictByConstruction:
      return true;
    case Convexity::NotStrict:
      return false;
    case Convexity::Unknown:
      break;
  }
  return strict_convexity_probe(norm, 2000, 0x5eedu).kind == ConvexityKind::Strict;
}

SegmentWitness extend_segment(const NormOracle& norm, const SegmentWitness& w) {
  Vec dir = w.half;
  double len = dir.norm();
  if (len < 1e-12) fail(Errc::InvalidArgument, "segment witness is degenerate");
  dir /= len;
  auto on_boundary = [&](double s) {
    return norm(w.midpoint + s * dir) <= 1.0 + 1e-12;
  };
  auto extent = [&](double sigma) {
    double lo = 0.0, hi = len;
    while (on_boundary(sigma * hi)) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e6) fail(Errc::BisectionFailure, "segment extension diverged");
    }
    while (hi - lo > 1e-12) {
      double mid = 0.5 * (lo + hi);
      if (on_boundary(sigma * mid)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return lo;
  };
  double splus = extent(+1.0);
  double sminus = extent(-1.0);
  SegmentWitness out;
  out.a = w.midpoint - sminus * dir;
  out.b = w.midpoint + splus * dir;
  out.midpoint = 0.5 * (out.a + out.b);
  out.half = 0.5 * (out.b - out.a);
  return out;
}

}  // namespace udf
