#include "udf/norm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

namespace udf {
namespace {

constexpr double kRadialTol = 1e-13;

bool all_finite(const VecRef& x) {
  for (int i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) return false;
  }
  return true;
}

std::string format_p(double p) {
  std::ostringstream os;
  os << p;
  return os.str();
}

// gauge of x for a ball given only by a membership test: smallest r with
// x in r*B, located by bracket growth then bisection.
double radial_bisect(const NormOracle::Membership& member, const VecRef& x) {
  double lo = 0.0;
  double hi = 1.0;
  int grow = 0;
  while (!member(x / hi)) {
    lo = hi;
    hi *= 2.0;
    if (++grow > 80) fail(Errc::BisectionFailure, "radial bracket did not close");
  }
  while (hi - lo > kRadialTol) {
    double mid = 0.5 * (lo + hi);
    if (member(x / mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

NormOracle NormOracle::from_gauge(int dim, std::string name, Gauge gauge,
                                  bool smooth, Convexity conv, Gradient grad) {
  if (dim < 1) fail(Errc::InvalidArgument, "norm dimension must be positive");
  NormOracle n;
  n.dim_ = dim;
  n.name_ = std::move(name);
  n.smooth_ = smooth;
  n.conv_ = conv;
  n.bisected_ = false;
  n.gauge_ = std::move(gauge);
  n.grad_ = std::move(grad);
  return n;
}

NormOracle NormOracle::from_membership(int dim, std::string name,
                                       Membership member, bool smooth,
                                       Convexity conv) {
  if (dim < 1) fail(Errc::InvalidArgument, "norm dimension must be positive");
  NormOracle n;
  n.dim_ = dim;
  n.name_ = std::move(name);
  n.smooth_ = smooth;
  n.conv_ = conv;
  n.bisected_ = true;
  n.gauge_ = [member = std::move(member)](const VecRef& x) -> double {
    if (x.isZero(0.0)) return 0.0;
    return radial_bisect(member, x);
  };
  return n;
}

Vec NormOracle::gradient(const VecRef& x) const {
  if (!grad_) fail(Errc::InvalidArgument, "oracle has no analytic gradient");
  return grad_(x);
}

double NormOracle::operator()(const VecRef& x) const {
  if (x.size() != dim_) fail(Errc::InvalidArgument, "vector dimension mismatch");
  if (!all_finite(x)) fail(Errc::NonFinite, "non-finite coordinate");
  return gauge_(x);
}

double gauge_eval(const NormOracle& norm, const VecRef& x) { return norm(x); }

BoundaryPoint boundary_point(const NormOracle& norm, const VecRef& x) {
  double g = norm(x);
  if (g < 1e-300) fail(Errc::ZeroVector, "cannot normalize the zero vector");
  BoundaryPoint b;
  b.coords = x / g;
  b.residual = std::abs(norm(b.coords) - 1.0);
  return b;
}

NormOracle make_lp(int d, double p) {
  if (std::isinf(p)) return make_linf(d);
  if (!(p >= 1.0)) fail(Errc::InvalidArgument, "lp norm requires p >= 1");
  NormOracle::Gauge g;
  NormOracle::Gradient grad;
  if (p == 2.0) {
    g = [](const VecRef& x) { return x.norm(); };
    grad = [](const VecRef& x) -> Vec {
      double n = x.norm();
      return x / n;
    };
  } else if (p == 1.0) {
    g = [](const VecRef& x) { return x.template lpNorm<1>(); };
  } else {
    g = [p](const VecRef& x) {
      double s = 0.0;
      for (int i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i]), p);
      return std::pow(s, 1.0 / p);
    };
    grad = [p](const VecRef& x) -> Vec {
      double s = 0.0;
      for (int i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i]), p);
      double gp = std::pow(s, 1.0 / p - 1.0);
      Vec out(x.size());
      for (int i = 0; i < x.size(); ++i) {
        double a = std::abs(x[i]);
        out[i] = (x[i] >= 0 ? 1.0 : -1.0) * std::pow(a, p - 1.0) * gp;
      }
      return out;
    };
  }
  std::ostringstream name;
  name << "lp" << format_p(p) << "_d" << d;
  Convexity conv = p > 1.0 ? Convexity::StrictByConstruction : Convexity::NotStrict;
  auto n = NormOracle::from_gauge(d, name.str(), std::move(g), p > 1.0, conv,
                                  std::move(grad));
  n.set_spec_json({{"schema", "udf/1"}, {"kind", "lp"}, {"d", d}, {"p", p}});
  return n;
}

NormOracle make_linf(int d) {
  auto g = [](const VecRef& x) { return x.template lpNorm<Eigen::Infinity>(); };
  auto n = NormOracle::from_gauge(d, "linf_d" + std::to_string(d), g, false,
                                  Convexity::NotStrict);
  n.set_spec_json({{"schema", "udf/1"}, {"kind", "lp"}, {"d", d}, {"p", "inf"}});
  return n;
}

NormOracle make_ellipsoid(int d, const Vec& semi_axes) {
  if (semi_axes.size() != d) fail(Errc::InvalidArgument, "axes/dim mismatch");
  for (int i = 0; i < d; ++i) {
    if (!(semi_axes[i] > 0)) fail(Errc::InvalidArgument, "axes must be positive");
  }
  auto axes = std::make_shared<Vec>(semi_axes);
  auto g = [axes](const VecRef& x) {
    double s = 0.0;
    for (int i = 0; i < x.size(); ++i) {
      double r = x[i] / (*axes)[i];
      s += r * r;
    }
    return std::sqrt(s);
  };
  auto grad = [axes](const VecRef& x) -> Vec {
    Vec out(x.size());
    double s = 0.0;
    for (int i = 0; i < x.size(); ++i) {
      double r = x[i] / (*axes)[i];
      s += r * r;
      out[i] = x[i] / ((*axes)[i] * (*axes)[i]);
    }
    return out / std::sqrt(s);
  };
  auto n = NormOracle::from_gauge(d, "ellipsoid_d" + std::to_string(d),
                                  std::move(g), true,
                                  Convexity::StrictByConstruction, std::move(grad));
  std::vector<double> ax(semi_axes.data(), semi_axes.data() + d);
  n.set_spec_json({{"schema", "udf/1"}, {"kind", "ellipsoid"}, {"d", d}, {"axes", ax}});
  return n;
}

namespace {

// Fixed random even function on the sphere, |psi| <= 1: normalized quadratic
// form plus constant, coefficients drawn from the seed.
struct SpherePerturbation {
  int d;
  double c0;
  std::vector<double> cij;  // packed upper triangle, i <= j
  double scale;             // 1 / (|c0| + sum |cij|)

  static SpherePerturbation make(int d, uint64_t seed) {
    SpherePerturbation p;
    p.d = d;
    Rng rng(mix_seed(seed, 0x7073690aULL));
    p.c0 = rng.uniform(-1.0, 1.0);
    double m = std::abs(p.c0);
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) {
        double c = rng.uniform(-1.0, 1.0);
        p.cij.push_back(c);
        m += std::abs(c);
      }
    }
    p.scale = 1.0 / m;
    return p;
  }

  double operator()(const VecRef& u) const {
    double s = c0;
    int k = 0;
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) {
        s += cij[static_cast<size_t>(k++)] * u[i] * u[j];
      }
    }
    return s * scale;
  }
};

}  // namespace

NormOracle make_perturbed_lp(int d, double p, double amplitude, uint64_t seed) {
  if (!(amplitude >= 0.0) || amplitude > 0.2) {
    fail(Errc::InvalidArgument, "perturbation amplitude out of range [0, 0.2]");
  }
  NormOracle base = make_lp(d, p);
  auto psi = std::make_shared<SpherePerturbation>(SpherePerturbation::make(d, seed));
  auto g = [base, psi, amplitude](const VecRef& x) -> double {
    double g0 = base(x);
    if (g0 == 0.0) return 0.0;
    double r2 = x.norm();
    Vec u = x / r2;
    return g0 * (1.0 + amplitude * (*psi)(u));
  };
  std::ostringstream name;
  name << "perturbed_lp" << format_p(p) << "_a" << amplitude << "_s" << seed
       << "_d" << d;
  // strictness is inherited from the base for small amplitudes; spot-probed
  Convexity conv = (p > 1.0 && amplitude <= 0.05) ? Convexity::StrictByConstruction
                                                  : Convexity::Unknown;
  auto n = NormOracle::from_gauge(d, name.str(), std::move(g), p > 1.0, conv);
  n.set_spec_json({{"schema", "udf/1"},
                   {"kind", "perturbed_lp"},
                   {"d", d},
                   {"p", p},
                   {"amplitude", amplitude},
                   {"seed", seed}});
  return n;
}

namespace {

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

// Andrew monotone chain; returns CCW hull without repeated endpoint.
std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const auto& a, const auto& b) {
                          return (a - b).norm() < 1e-14;
                        }),
            pts.end());
  size_t n = pts.size();
  if (n < 3) return pts;
  std::vector<Eigen::Vector2d> hull(2 * n);
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross2(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i];
  }
  size_t lower = k + 1;
  for (size_t i = n - 1; i-- > 0;) {
    while (k >= lower && cross2(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

}  // namespace

NormOracle make_polygon_table(const std::vector<Eigen::Vector2d>& vertices) {
  if (vertices.empty()) fail(Errc::InvalidArgument, "table norm needs vertices");
  std::vector<Eigen::Vector2d> sym;
  sym.reserve(2 * vertices.size());
  for (const auto& v : vertices) {
    if (!v.allFinite()) fail(Errc::NonFinite, "table vertex not finite");
    sym.push_back(v);
    sym.push_back(-v);
  }
  auto hull = std::make_shared<std::vector<Eigen::Vector2d>>(convex_hull(sym));
  if (hull->size() < 4) {
    fail(Errc::InvalidArgument, "table polygon is degenerate");
  }
  // the symmetrized hull contains 0 iff it is full-dimensional; checked above
  auto member = [hull](const VecRef& x) -> bool {
    const auto& h = *hull;
    Eigen::Vector2d p(x[0], x[1]);
    size_t n = h.size();
    for (size_t i = 0; i < n; ++i) {
      const Eigen::Vector2d& a = h[i];
      const Eigen::Vector2d& b = h[(i + 1) % n];
      if (cross2(b - a, p - a) < -1e-14) return false;
    }
    return true;
  };
  auto n = NormOracle::from_membership(2, "table_d2", std::move(member), false,
                                       Convexity::NotStrict);
  nlohmann::json verts = nlohmann::json::array();
  for (const auto& v : vertices) verts.push_back({v.x(), v.y()});
  n.set_spec_json({{"schema", "udf/1"}, {"kind", "table"}, {"d", 2}, {"vertices", verts}});
  return n;
}

NormOracle make_rotated2d(const NormOracle& base, double angle) {
  if (base.dim() != 2) fail(Errc::InvalidArgument, "rotation wrapper is 2-d only");
  double c = std::cos(angle), s = std::sin(angle);
  auto g = [base, c, s](const VecRef& x) -> double {
    Vec y(2);
    // inverse rotation applied to the query point
    y[0] = c * x[0] + s * x[1];
    y[1] = -s * x[0] + c * x[1];
    return base(y);
  };
  auto n = NormOracle::from_gauge(2, base.name() + "_rot", std::move(g),
                                  base.smooth_hint(), base.convexity_hint());
  nlohmann::json j = base.spec_json();
  j["rotation"] = angle;
  n.set_spec_json(j);
  return n;
}

NormOracle parse_norm_json(const nlohmann::json& spec) {
  if (!spec.is_object()) fail(Errc::ParseError, "norm spec must be a JSON object");
  if (spec.contains("schema") && spec["schema"] != "udf/1") {
    fail(Errc::ParseError, "unsupported schema: " + spec["schema"].dump());
  }
  if (!spec.contains("kind") || !spec["kind"].is_string()) {
    fail(Errc::ParseError, "norm spec missing string field 'kind'");
  }
  std::string kind = spec["kind"].get<std::string>();
  if (!spec.contains("d") || !spec["d"].is_number_integer()) {
    fail(Errc::ParseError, "norm spec missing integer field 'd'");
  }
  int d = spec["d"].get<int>();
  if (d < 1) fail(Errc::ParseError, "norm spec field 'd' must be positive");

  if (kind == "lp") {
    if (!spec.contains("p")) fail(Errc::ParseError, "lp norm needs field 'p'");
    if (spec["p"].is_string()) {
      if (spec["p"] == "inf") return make_linf(d);
      fail(Errc::ParseError, "lp field 'p' must be a number or \"inf\"");
    }
    return make_lp(d, spec["p"].get<double>());
  }
  if (kind == "ellipsoid") {
    if (!spec.contains("axes") || !spec["axes"].is_array()) {
      fail(Errc::ParseError, "ellipsoid norm needs array field 'axes'");
    }
    auto ax = spec["axes"].get<std::vector<double>>();
    if (static_cast<int>(ax.size()) != d) {
      fail(Errc::ParseError, "ellipsoid axes length must equal d");
    }
    Vec v = Eigen::Map<const Vec>(ax.data(), d);
    return make_ellipsoid(d, v);
  }
  if (kind == "perturbed_lp") {
    double p = spec.value("p", 2.0);
    double amp = spec.value("amplitude", 0.03);
    uint64_t seed = spec.value("seed", 0ULL);
    return make_perturbed_lp(d, p, amp, seed);
  }
  if (kind == "table") {
    if (d != 2) fail(Errc::ParseError, "table norms are 2-d only");
    if (!spec.contains("vertices") || !spec["vertices"].is_array()) {
      fail(Errc::ParseError, "table norm needs array field 'vertices'");
    }
    std::vector<Eigen::Vector2d> verts;
    for (const auto& row : spec["vertices"]) {
      if (!row.is_array() || row.size() != 2) {
        fail(Errc::ParseError, "table vertex must be a 2-element array");
      }
      verts.emplace_back(row[0].get<double>(), row[1].get<double>());
    }
    return make_polygon_table(verts);
  }
  fail(Errc::ParseError, "unknown norm kind '" + kind + "'");
}

NormOracle parse_norm_arg(const std::string& arg, int d) {
  if (arg.empty()) fail(Errc::ParseError, "empty norm spec");
  if (arg[0] == '@' || arg[0] == '{') {
    nlohmann::json j;
    try {
      if (arg[0] == '{') {
        j = nlohmann::json::parse(arg);
      } else {
        std::ifstream f(arg.substr(1));
        if (!f) fail(Errc::IoError, "cannot open norm file " + arg.substr(1));
        f >> j;
      }
    } catch (const nlohmann::json::exception& e) {
      fail(Errc::ParseError, std::string("norm JSON: ") + e.what());
    }
    NormOracle n = parse_norm_json(j);
    if (n.dim() != d) fail(Errc::ParseError, "norm dimension does not match --d");
    return n;
  }
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : arg) {
    if (ch == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  parts.push_back(cur);
  const std::string& head = parts[0];
  auto want = [&](size_t n_args, const char* usage) {
    if (parts.size() != n_args + 1) {
      fail(Errc::ParseError, std::string("norm spec usage: ") + usage);
    }
  };
  try {
    if (head == "l1") return make_lp(d, 1.0);
    if (head == "l2") return make_lp(d, 2.0);
    if (head == "linf") return make_linf(d);
    if (head == "lp") {
      want(1, "lp:<p>");
      if (parts[1] == "inf") return make_linf(d);
      return make_lp(d, std::stod(parts[1]));
    }
    if (head == "ellipsoid") {
      want(1, "ellipsoid:a1,a2,...");
      std::vector<double> ax;
      std::string tok;
      std::istringstream is(parts[1]);
      while (std::getline(is, tok, ',')) ax.push_back(std::stod(tok));
      if (static_cast<int>(ax.size()) != d) {
        fail(Errc::ParseError, "ellipsoid axes length must equal --d");
      }
      Vec v = Eigen::Map<const Vec>(ax.data(), d);
      return make_ellipsoid(d, v);
    }
    if (head == "perturbed_lp") {
      want(3, "perturbed_lp:<p>:<amplitude>:<seed>");
      return make_perturbed_lp(d, std::stod(parts[1]), std::stod(parts[2]),
                               std::stoull(parts[3]));
    }
  } catch (const std::invalid_argument&) {
    fail(Errc::ParseError, "malformed number in norm spec '" + arg + "'");
  } catch (const std::out_of_range&) {
    fail(Errc::ParseError, "number out of range in norm spec '" + arg + "'");
  }
  fail(Errc::ParseError, "unknown norm spec '" + arg + "'");
}

AxiomReport probe_norm_axioms(const NormOracle& norm, int samples, uint64_t seed) {
  Rng rng(seed);
  int d = norm.dim();
  AxiomReport rep;
  rep.min_gauge_on_sphere = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Vec x = rng.gaussian_vec(d);
    if (x.norm() < 1e-9) continue;
    Vec u = x / x.norm();
    double gx = norm(x);
    rep.min_gauge_on_sphere = std::min(rep.min_gauge_on_sphere, norm(u));
    if (norm(-x) != gx) rep.symmetric_exact = false;

    double a = rng.uniform(0.25, 4.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
    double lhs = norm(a * x);
    double rhs = std::abs(a) * gx;
    if (rhs > 0) {
      rep.worst_homogeneity =
          std::max(rep.worst_homogeneity, std::abs(lhs - rhs) / rhs);
    }

    Vec y = rng.gaussian_vec(d);
    double excess = norm(x + y) - (gx + norm(y));
    rep.worst_triangle = std::max(rep.worst_triangle, excess);
  }
  return rep;
}

double outer_radius_bound(const NormOracle& norm) {
  int d = norm.dim();
  double min_gauge = std::numeric_limits<double>::infinity();
  Rng rng(0x0d1ec7u);
  for (int i = 0; i < d; ++i) {
    Vec e = Vec::Zero(d);
    e[i] = 1.0;
    min_gauge = std::min(min_gauge, norm(e));
  }
  for (int s = 0; s < 128; ++s) {
    Vec x = rng.gaussian_vec(d);
    double n2 = x.norm();
    if (n2 < 1e-9) continue;
    min_gauge = std::min(min_gauge, norm(x / n2));
  }
  if (!(min_gauge > 0)) fail(Errc::InvalidArgument, "degenerate gauge");
  return 2.0 / min_gauge;
}

}  // namespace udf
