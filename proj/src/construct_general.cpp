#include "udf/construct_general.hpp"

#include <cmath>
#include <sstream>

namespace udf {
namespace {

void check_frame(const NormOracle& norm, const std::vector<Vec>& ws, const Vec& wd) {
  int d = norm.dim();
  if (static_cast<int>(ws.size()) != d - 1) {
    fail(Errc::InvalidArgument, "need d-1 chord directions");
  }
  Mat W(d, d - 1);
  for (int i = 0; i < d - 1; ++i) {
    if (ws[static_cast<size_t>(i)].size() != d) {
      fail(Errc::InvalidArgument, "chord direction dimension mismatch");
    }
    W.col(i) = ws[static_cast<size_t>(i)];
  }
  Eigen::ColPivHouseholderQR<Mat> qr(W);
  if (qr.rank() != d - 1) {
    fail(Errc::InvalidArgument, "chord directions are linearly dependent");
  }
  if (wd.size() != d) fail(Errc::InvalidArgument, "wd dimension mismatch");
  for (int i = 0; i < d - 1; ++i) {
    if (std::abs(wd.dot(ws[static_cast<size_t>(i)])) > 1e-9 * wd.norm() *
                                                           ws[static_cast<size_t>(i)].norm()) {
      fail(Errc::InvalidArgument, "wd is not orthogonal to the chord directions");
    }
  }
}

void check_independent(const std::vector<Vec>& ws, int d) {
  Mat W(d, static_cast<int>(ws.size()));
  for (size_t i = 0; i < ws.size(); ++i) W.col(static_cast<int>(i)) = ws[i];
  Eigen::ColPivHouseholderQR<Mat> qr(W);
  if (qr.rank() != static_cast<int>(ws.size())) {
    fail(Errc::InvalidArgument, "chord directions are linearly dependent");
  }
}

// Boundary chart over wd-perp: a tangential coordinate u maps to the upper
// intersection of the column {basis*u + c*wd : c} with the boundary.
class BoundaryChart {
 public:
  BoundaryChart(const NormOracle& norm, const Vec& wd, const Tolerances& tol)
      : norm_(norm), tol_(tol) {
    int d = norm.dim();
    wd_ = wd / wd.norm();
    Mat A(d, 1);
    A.col(0) = wd_;
    Eigen::HouseholderQR<Mat> qr(A);
    Mat Q = qr.householderQ();
    basis_ = Q.rightCols(d - 1);
    radius_ = outer_radius_bound(norm);
  }

  const Mat& basis() const { return basis_; }
  const Vec& wd_unit() const { return wd_; }

  Vec tangential(const Vec& x) const { return basis_.transpose() * x; }

  // Returns the chart point, or nullopt when the column misses the body.
  std::optional<Vec> lift(const Vec& u) const {
    Vec base = basis_ * u;
    auto g = [&](double c) { return norm_(base + c * wd_); };
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = -radius_, b = radius_;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = g(x1), f2 = g(x2);
    for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
      if (f1 <= f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - gr * (b - a);
        f1 = g(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (b - a);
        f2 = g(x2);
      }
    }
    double c_min = 0.5 * (a + b);
    if (g(c_min) > 1.0 + 1e-13) return std::nullopt;
    // upper crossing: bracket upward from the minimizer, then bisect
    double lo = c_min, hi = c_min + 0.1 * radius_;
    int grow = 0;
    while (g(hi) <= 1.0) {
      lo = hi;
      hi += 0.2 * radius_ * std::pow(2.0, grow);
      if (++grow > 40) fail(Errc::BisectionFailure, "chart bracket diverged");
    }
    while (hi - lo > 1e-13) {
      double mid = 0.5 * (lo + hi);
      if (g(mid) <= 1.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return base + (0.5 * (lo + hi)) * wd_;
  }

 private:
  const NormOracle& norm_;
  Tolerances tol_;
  Vec wd_;
  Mat basis_;
  double radius_ = 0.0;
};

}  // namespace

Vec phi_map(const NormOracle& norm, const BoundaryPoint& x,
            const std::vector<Vec>& ws, const Tolerances& tol) {
  check_independent(ws, norm.dim());
  Vec out(static_cast<int>(ws.size()));
  for (size_t i = 0; i < ws.size(); ++i) {
    out[static_cast<int>(i)] = chord_scalar(norm, x, ws[i], tol).value;
  }
  return out;
}

SeedResult seed_target(const NormOracle& norm, const std::vector<Vec>& ws,
                       const Vec& wd, double eps_coord, double eta, Rng& rng,
                       int budget, const Tolerances& tol) {
  if (!accepted_as_strictly_convex(norm)) {
    fail(Errc::NotStrictlyConvex, norm.name() + " is not strictly convex");
  }
  check_frame(norm, ws, wd);
  BoundaryChart chart(norm, wd, tol);
  for (int it = 0; it < budget; ++it) {
    BoundaryPoint x = sample_boundary(norm, rng);
    if (x.coords.dot(wd) < 0) x.coords = -x.coords;
    if (x.coords.dot(wd) <= eta) continue;
    // project onto the chart so continuation stays on one boundary sheet
    auto lifted = chart.lift(chart.tangential(x.coords));
    if (!lifted) continue;
    x.coords = *lifted;
    x.residual = std::abs(norm(x.coords) - 1.0);
    if (x.coords.dot(wd) <= eta) continue;
    Vec t;
    try {
      t = phi_map(norm, x, ws, tol);
    } catch (const Error&) {
      continue;
    }
    if (t.cwiseAbs().minCoeff() < eps_coord) continue;
    return {std::move(x), std::move(t)};
  }
  fail(Errc::SeedExhausted, "no admissible seed within the sample budget");
}

BoundaryPoint solve_on_boundary(const NormOracle& norm, const std::vector<Vec>& ws,
                                const Vec& wd, const Vec& target,
                                const BoundaryPoint& init, const Tolerances& tol) {
  check_frame(norm, ws, wd);
  int k = norm.dim() - 1;
  if (target.size() != k) fail(Errc::InvalidArgument, "target dimension mismatch");
  if (init.coords.dot(wd) <= 0) {
    fail(Errc::InvalidArgument, "initial point is on the wrong side of wd-perp");
  }
  BoundaryChart chart(norm, wd, tol);

  auto eval = [&](const Vec& u) -> std::optional<Vec> {
    auto x = chart.lift(u);
    if (!x) return std::nullopt;
    BoundaryPoint b{*x, 0.0};
    Vec r(k);
    for (int i = 0; i < k; ++i) {
      ChordResult c = chord_scalar(norm, b, ws[static_cast<size_t>(i)], tol);
      r[i] = c.value - target[i];
    }
    return r;
  };

  Vec u = chart.tangential(init.coords);
  auto r0 = eval(u);
  if (!r0) fail(Errc::NoConvergence, "initial chart point left the body");
  Vec r = *r0;
  const double fd_step = 1e-6;
  for (int iter = 0; iter < 50; ++iter) {
    if (r.cwiseAbs().maxCoeff() <= 1e-10) {
      auto x = chart.lift(u);
      BoundaryPoint out;
      out.coords = *x;
      out.residual = std::abs(norm(out.coords) - 1.0);
      return out;
    }
    Mat J(k, k);
    for (int i = 0; i < k; ++i) {
      Vec up = u;
      up[i] += fd_step;
      auto rp = eval(up);
      if (!rp) fail(Errc::NoConvergence, "finite-difference probe left the body");
      J.col(i) = (*rp - r) / fd_step;
    }
    Vec step = J.fullPivLu().solve(-r);
    if (!step.allFinite()) fail(Errc::NoConvergence, "singular chart Jacobian");
    double scale = 1.0;
    bool improved = false;
    for (int h = 0; h < 30; ++h) {
      auto rn = eval(u + scale * step);
      if (rn && rn->cwiseAbs().maxCoeff() < r.cwiseAbs().maxCoeff()) {
        u += scale * step;
        r = *rn;
        improved = true;
        break;
      }
      scale *= 0.5;
    }
    if (!improved) fail(Errc::NoConvergence, "Newton step stalled");
  }
  fail(Errc::NoConvergence, "Newton did not reach tolerance in 50 iterations");
}

ApWitness find_ap_points(const NormOracle& norm, const std::vector<Vec>& ws,
                         const Vec& wd, int m, uint64_t seed, const ApOptions& opt,
                         const Tolerances& tol) {
  if (m < 1) fail(Errc::InvalidArgument, "m must be positive");
  if (norm.dim() < 2) fail(Errc::InvalidArgument, "need d >= 2");
  Rng rng(mix_seed(seed, 0xa9u));
  SeedResult seedres =
      seed_target(norm, ws, wd, opt.eps_coord, opt.eta, rng, opt.seed_budget, tol);

  double lambda = opt.lambda0 / (static_cast<double>(m) * m);
  while (lambda >= opt.lambda_min) {
    std::vector<BoundaryPoint> pts;
    pts.reserve(static_cast<size_t>(m));
    BoundaryPoint prev = seedres.x;
    bool ok = true;
    for (int j = 1; j <= m; ++j) {
      Vec target = (1.0 + j * lambda) * seedres.t;
      try {
        BoundaryPoint p = solve_on_boundary(norm, ws, wd, target, prev, tol);
        if (p.coords.dot(wd) <= opt.eta) {
          ok = false;
          break;
        }
        prev = p;
        pts.push_back(std::move(p));
      } catch (const Error& e) {
        if (e.code() != Errc::NoConvergence) throw;
        ok = false;
        break;
      }
    }
    if (ok) {
      for (size_t a = 0; a + 1 < pts.size(); ++a) {
        for (size_t b = a + 1; b < pts.size(); ++b) {
          if ((pts[a].coords - pts[b].coords).norm() <= 1e-8) ok = false;
        }
      }
    }
    if (ok) {
      ApWitness w;
      w.ws = ws;
      w.wd = wd / wd.norm();
      w.t = seedres.t;
      w.lambda = lambda;
      w.points = std::move(pts);
      for (size_t j = 0; j < w.points.size(); ++j) {
        Vec phi = phi_map(norm, w.points[j], ws, tol);
        double factor = 1.0 + static_cast<double>(j + 1) * lambda;
        if ((phi - factor * w.t).cwiseAbs().maxCoeff() > 1e-9) {
          fail(Errc::ApSearchFailed, "witness residual exceeds 1e-9");
        }
      }
      return w;
    }
    lambda *= 0.5;
  }
  fail(Errc::ApSearchFailed, "lambda schedule underflowed (no case-b witness)");
}

GapSpec assemble_generators(const NormOracle& norm, int m, const ApWitness& witness,
                            const Tolerances& tol) {
  int d = norm.dim();
  if (static_cast<int>(witness.points.size()) != m) {
    fail(Errc::InvalidArgument, "witness has the wrong number of points");
  }
  GapSpec spec;
  spec.d = d;
  spec.m = m;
  spec.norm_id = norm.name();
  spec.lambda = witness.lambda;
  spec.t = witness.t;
  for (const auto& p : witness.points) spec.generators.push_back(p.coords);
  for (int i = 0; i < d - 1; ++i) {
    spec.generators.push_back(-witness.t[i] * witness.ws[static_cast<size_t>(i)]);
  }
  for (int i = 0; i < d - 1; ++i) {
    spec.generators.push_back(-witness.lambda * witness.t[i] *
                              witness.ws[static_cast<size_t>(i)]);
  }
  spec.ranges = proposition_ranges(d, m);
  spec.codes = proposition_codes(d, m);

  for (int j = 1; j <= m; ++j) {
    spec.directions.push_back(witness.points[static_cast<size_t>(j - 1)].coords);
    spec.tags.push_back({DirectionTag::P, 0, j});
  }
  for (int i = 1; i <= d - 1; ++i) {
    for (int j = 1; j <= m; ++j) {
      const BoundaryPoint& p = witness.points[static_cast<size_t>(j - 1)];
      ChordResult c = chord_scalar(norm, p, witness.ws[static_cast<size_t>(i - 1)], tol);
      if (c.tangent) {
        fail(Errc::UnitCertificateFailed, "chord became tangent during assembly");
      }
      Vec q = p.coords - c.value * witness.ws[static_cast<size_t>(i - 1)];
      spec.directions.push_back(std::move(q));
      spec.tags.push_back({DirectionTag::Q, i, j});
    }
  }

  // certify gauges and the code realizations
  for (size_t k = 0; k < spec.directions.size(); ++k) {
    double g = norm(spec.directions[k]);
    if (std::abs(g - 1.0) > tol.eps_bnd) {
      std::ostringstream os;
      os << "direction " << k << " has gauge " << g;
      fail(Errc::UnitCertificateFailed, os.str());
    }
    Vec sum = Vec::Zero(d);
    const auto& code = spec.codes[k];
    for (size_t gix = 0; gix < code.size(); ++gix) {
      if (code[gix] != 0) sum += static_cast<double>(code[gix]) * spec.generators[gix];
    }
    if ((sum - spec.directions[k]).norm() > 1e-10) {
      fail(Errc::UnitCertificateFailed, "realized direction drifted from its code");
    }
  }
  return spec;
}

OverlapCheck verify_non_overlapping(const GapSpec& spec, double min_sep) {
  struct Entry {
    const Vec* v;
    int sign;
    const DirectionTag* tag;
  };
  std::vector<Entry> all;
  for (size_t i = 0; i < spec.directions.size(); ++i) {
    all.push_back({&spec.directions[i], +1, &spec.tags[i]});
    all.push_back({&spec.directions[i], -1, &spec.tags[i]});
  }
  for (size_t a = 0; a < all.size(); ++a) {
    for (size_t b = a + 1; b < all.size(); ++b) {
      Vec va = all[a].sign * *all[a].v;
      Vec vb = all[b].sign * *all[b].v;
      if ((va - vb).norm() > min_sep) continue;
      OverlapCheck oc;
      oc.ok = false;
      oc.a = static_cast<int>(a);
      oc.b = static_cast<int>(b);
      const DirectionTag& ta = *all[a].tag;
      const DirectionTag& tb = *all[b].tag;
      if (all[a].sign != all[b].sign) {
        oc.case_id = 1;
        oc.detail = "antipodal pair collided";
      } else if (ta.kind == DirectionTag::P && tb.kind == DirectionTag::P) {
        oc.case_id = 2;
        oc.detail = "two base points p_j coincide";
      } else if (ta.kind != tb.kind) {
        oc.case_id = 3;
        oc.detail = "reflected point q_ij equals a base point";
      } else if (ta.i == tb.i) {
        oc.case_id = 4;
        oc.detail = "q_ij = q_ij' within one chord direction";
      } else {
        oc.case_id = 5;
        oc.detail = "q_ij = q_i'j' across chord directions";
      }
      return oc;
    }
  }
  return {};
}

std::vector<Vec> default_frame_ws(int d) {
  std::vector<Vec> ws;
  for (int i = 0; i < d - 1; ++i) {
    Vec e = Vec::Zero(d);
    e[i] = 1.0;
    ws.push_back(std::move(e));
  }
  return ws;
}

Vec default_frame_wd(int d) {
  Vec e = Vec::Zero(d);
  e[d - 1] = 1.0;
  return e;
}

GapSpec build_spec(const NormOracle& norm, int m, uint64_t seed,
                   const Tolerances& tol) {
  int d = norm.dim();
  ApWitness w = find_ap_points(norm, default_frame_ws(d), default_frame_wd(d), m,
                               seed, {}, tol);
  GapSpec spec = assemble_generators(norm, m, w, tol);
  spec.seed = seed;
  OverlapCheck oc = verify_non_overlapping(spec);
  if (!oc.ok) {
    fail(Errc::UnitCertificateFailed,
         "direction set overlaps (case " + std::to_string(oc.case_id) + ")");
  }
  return spec;
}

}  // namespace udf
