#include "udf/construct2d.hpp"

#include <cmath>
#include <sstream>

namespace udf {
namespace {

void require_2d(const NormOracle& norm) {
  if (norm.dim() != 2) fail(Errc::InvalidArgument, "construct2d needs d = 2");
}

void require_strict(const NormOracle& norm) {
  if (!accepted_as_strictly_convex(norm)) {
    fail(Errc::NotStrictlyConvex, norm.name() + " is not strictly convex");
  }
}

// Minimum of the convex function x -> gauge((x, t)) by golden-section search.
std::pair<double, double> slice_min(const NormOracle& norm, double radius, double t) {
  auto f = [&](double x) {
    Vec p(2);
    p[0] = x;
    p[1] = t;
    return norm(p);
  };
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = -radius, b = radius;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    }
  }
  double xm = 0.5 * (a + b);
  return {f(xm), xm};
}

bool slice_nonempty(const NormOracle& norm, double radius, double t) {
  return slice_min(norm, radius, t).first <= 1.0 + 1e-13;
}

}  // namespace

ChordProfile make_chord_profile(const NormOracle& norm) {
  require_2d(norm);
  ChordProfile prof;
  prof.radius = outer_radius_bound(norm);
  double lo = 0.0, hi = prof.radius;
  // the slice at t = radius is empty (the body stays inside the radius bound)
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (lo + hi);
    if (slice_nonempty(norm, prof.radius, mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  prof.height = lo;
  prof.width = chord_length(norm, prof, 0.0);
  return prof;
}

Slice slice_at(const NormOracle& norm, const ChordProfile& prof, double t) {
  require_2d(norm);
  if (t < 0.0 || t > prof.height) {
    std::ostringstream os;
    os << "slice height " << t << " outside [0, " << prof.height << "]";
    fail(Errc::OutOfRange, os.str());
  }
  auto [fmin, x0] = slice_min(norm, prof.radius, t);
  if (fmin > 1.0 + 1e-12) {
    // collapsed slice at the very top
    return {x0, x0};
  }
  auto inside = [&](double x) {
    Vec p(2);
    p[0] = x;
    p[1] = t;
    return norm(p) <= 1.0;
  };
  auto endpoint = [&](double sigma) {
    double lo = x0, hi = x0 + sigma * 2.0 * prof.radius;
    // hi is outside the radius bound, hence outside the ball
    for (int it = 0; it < 80; ++it) {
      double mid = 0.5 * (lo + hi);
      if (inside(mid)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };
  Slice s;
  s.right = endpoint(+1.0);
  s.left = endpoint(-1.0);
  return s;
}

double chord_length(const NormOracle& norm, const ChordProfile& prof, double t) {
  return slice_at(norm, prof, t).length();
}

namespace {

// Bisection assuming lambda non-increasing on [0, h]; verified a posteriori.
double height_for_target(const NormOracle& norm, const ChordProfile& prof,
                         double target) {
  double lo = 0.0, hi = prof.height;
  for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
    double mid = 0.5 * (lo + hi);
    if (chord_length(norm, prof, mid) >= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Fallback for oracles whose lambda is not numerically monotone: locate a
// bracketing interval by scanning, then bisect inside it.
double height_for_target_scan(const NormOracle& norm, const ChordProfile& prof,
                              double target) {
  const int n = 4096;
  double prev_t = 0.0;
  double prev_l = prof.width;
  for (int i = 1; i <= n; ++i) {
    double t = prof.height * i / n;
    double l = chord_length(norm, prof, t);
    if ((prev_l >= target && l <= target) || (prev_l <= target && l >= target)) {
      double lo = prev_t, hi = t;
      bool dec = prev_l >= l;
      for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
        double mid = 0.5 * (lo + hi);
        bool above = chord_length(norm, prof, mid) >= target;
        if (above == dec) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
    prev_t = t;
    prev_l = l;
  }
  fail(Errc::BisectionFailure, "no slice attains the target width");
}

}  // namespace

std::vector<double> find_heights(const NormOracle& norm, int m) {
  require_2d(norm);
  require_strict(norm);
  if (m < 1) fail(Errc::InvalidArgument, "m must be positive");
  ChordProfile prof = make_chord_profile(norm);
  std::vector<double> heights(static_cast<size_t>(m));
  for (int i = 1; i <= m; ++i) {
    double target = prof.width * i / (m + 1);
    double t = height_for_target(norm, prof, target);
    if (std::abs(chord_length(norm, prof, t) - target) > 1e-10) {
      t = height_for_target_scan(norm, prof, target);
      if (std::abs(chord_length(norm, prof, t) - target) > 1e-10) {
        fail(Errc::BisectionFailure, "slice width bisection stalled");
      }
    }
    heights[static_cast<size_t>(i - 1)] = t;
  }
  for (int i = 0; i + 1 < m; ++i) {
    if (!(heights[static_cast<size_t>(i)] > heights[static_cast<size_t>(i + 1)])) {
      fail(Errc::BisectionFailure, "heights are not strictly decreasing");
    }
  }
  return heights;
}

Generators2d build_2d_generators(const NormOracle& norm, int m) {
  require_2d(norm);
  require_strict(norm);
  ChordProfile prof = make_chord_profile(norm);
  Generators2d out;
  out.width = prof.width;
  out.heights = find_heights(norm, m);
  out.v = Vec(2);
  out.v << prof.width / (m + 1), 0.0;
  Tolerances tol;
  for (int i = 1; i <= m; ++i) {
    Slice s = slice_at(norm, prof, out.heights[static_cast<size_t>(i - 1)]);
    BoundaryPoint p;
    p.coords = Vec(2);
    p.coords << s.left, out.heights[static_cast<size_t>(i - 1)];
    p.residual = std::abs(norm(p.coords) - 1.0);
    if (p.residual > tol.eps_bnd) {
      fail(Errc::NotOnBoundary, "slice endpoint missed the boundary");
    }
    Vec q = p.coords + static_cast<double>(i) * out.v;
    if (std::abs(norm(q) - 1.0) > tol.eps_bnd) {
      fail(Errc::UnitCertificateFailed, "right endpoint p_i + i*v off the boundary");
    }
    out.p.push_back(std::move(p));
  }
  return out;
}

GapSpec build_2d_warmup_spec(const NormOracle& norm, int m) {
  Generators2d gen = build_2d_generators(norm, m);
  GapSpec spec;
  spec.d = 2;
  spec.m = m;
  spec.norm_id = norm.name();
  spec.t = Vec::Zero(1);
  for (const auto& p : gen.p) spec.generators.push_back(p.coords);
  spec.generators.push_back(gen.v);
  spec.ranges.assign(static_cast<size_t>(m), 2);
  spec.ranges.push_back(static_cast<long long>(m) * m);
  for (int j = 1; j <= m; ++j) {
    std::vector<int> c(static_cast<size_t>(m + 1), 0);
    c[static_cast<size_t>(j - 1)] = 1;
    spec.codes.push_back(c);
    spec.directions.push_back(gen.p[static_cast<size_t>(j - 1)].coords);
    spec.tags.push_back({DirectionTag::P, 0, j});
  }
  for (int j = 1; j <= m; ++j) {
    std::vector<int> c(static_cast<size_t>(m + 1), 0);
    c[static_cast<size_t>(j - 1)] = 1;
    c[static_cast<size_t>(m)] = j;
    spec.codes.push_back(c);
    spec.directions.push_back(gen.p[static_cast<size_t>(j - 1)].coords +
                              static_cast<double>(j) * gen.v);
    spec.tags.push_back({DirectionTag::Q, 1, j});
  }
  return spec;
}

}  // namespace udf
