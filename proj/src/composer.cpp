#include "udf/composer.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

namespace udf {
namespace {

nlohmann::json vec_to_json(const Vec& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vec vec_from_json(const nlohmann::json& a) {
  Vec v(static_cast<int>(a.size()));
  for (size_t i = 0; i < a.size(); ++i) v[static_cast<int>(i)] = a[i].get<double>();
  return v;
}

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  return out;
}

long long proposition_tuple_count(int d, int m) {
  long long prod = 1;
  for (long long k : proposition_ranges(d, m)) prod *= k;
  return prod;
}

}  // namespace

int SizeTable::max_m() const {
  return entries_.empty() ? 0 : entries_.rbegin()->first;
}

bool SizeTable::has(int m) const {
  return m == 0 || entries_.count(m) > 0;
}

const SizeEntry* SizeTable::find(int m) const {
  auto it = entries_.find(m);
  return it == entries_.end() ? nullptr : &it->second;
}

long long SizeTable::s(int m) const {
  if (m == 0) return 1;
  const SizeEntry* e = find(m);
  if (!e) fail(Errc::InvalidArgument, "size table has no entry for m=" + std::to_string(m));
  return e->s;
}

long long SizeTable::t(int m) const {
  if (m == 0) return 0;
  const SizeEntry* e = find(m);
  if (!e) fail(Errc::InvalidArgument, "size table has no entry for m=" + std::to_string(m));
  return e->t;
}

void SizeTable::add(SizeEntry e) {
  if (e.m < 1) fail(Errc::InvalidArgument, "table entries start at m=1");
  entries_[e.m] = std::move(e);
}

nlohmann::json SizeTable::to_json() const {
  nlohmann::json j;
  j["schema"] = "udf/1";
  j["type"] = "size_table";
  j["norm"] = norm_id_;
  j["d"] = d_;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [m, e] : entries_) {
    nlohmann::json ej = {{"m", e.m},     {"s", e.s},           {"t", e.t},
                         {"seed", e.seed}, {"lambda", e.lambda}, {"t_vec", vec_to_json(e.t_vec)}};
    if (e.spec) ej["gap_spec"] = gap_spec_to_json(*e.spec);
    arr.push_back(std::move(ej));
  }
  j["entries"] = arr;
  return j;
}

SizeTable SizeTable::from_json(const nlohmann::json& j) {
  if (j.value("type", "") != "size_table") {
    fail(Errc::ParseError, "not a size_table document");
  }
  SizeTable t(j.at("norm").get<std::string>(), j.at("d").get<int>());
  for (const auto& ej : j.at("entries")) {
    SizeEntry e;
    e.m = ej.at("m").get<int>();
    e.s = ej.at("s").get<long long>();
    e.t = ej.at("t").get<long long>();
    e.seed = ej.value("seed", 0ULL);
    e.lambda = ej.value("lambda", 0.0);
    e.t_vec = vec_from_json(ej.at("t_vec"));
    if (ej.contains("gap_spec")) e.spec = gap_spec_from_json(ej["gap_spec"]);
    t.add(std::move(e));
  }
  return t;
}

SizeTable build_size_table(const NormOracle& norm, long long n, uint64_t seed,
                           const Tolerances& tol, const std::string& cache_dir) {
  if (n < 1) fail(Errc::InvalidArgument, "n must be positive");
  int d = norm.dim();
  SizeTable table(norm.name(), d);

  std::filesystem::path cache_file;
  if (!cache_dir.empty()) {
    cache_file = std::filesystem::path(cache_dir) /
                 ("size_table_" + sanitize(norm.name()) + "_s" + std::to_string(seed) +
                  ".json");
    if (std::filesystem::exists(cache_file)) {
      std::ifstream f(cache_file);
      nlohmann::json j;
      f >> j;
      SizeTable cached = SizeTable::from_json(j);
      if (cached.norm_id() == norm.name() && cached.d() == d) table = std::move(cached);
    }
  }

  bool extended = false;
  for (int m = 1; proposition_tuple_count(d, m) <= n; ++m) {
    if (table.has(m) && table.find(m)->spec) continue;
    GapSpec spec = build_spec(norm, m, mix_seed(seed, static_cast<uint64_t>(m)), tol);
    PointSet ps = materialize(spec, tol);
    UnitDistanceReport rep = count_directional(ps, tol);
    SizeEntry e;
    e.m = m;
    e.s = ps.size();
    e.t = rep.total;
    e.seed = spec.seed;
    e.lambda = spec.lambda;
    e.t_vec = spec.t;
    e.spec = std::move(spec);
    table.add(std::move(e));
    extended = true;
  }

  if (!cache_dir.empty() && extended) {
    std::filesystem::create_directories(cache_dir);
    std::ofstream f(cache_file);
    f << table.to_json().dump(1) << "\n";
  }
  return table;
}

std::vector<int> decompose(long long n, const SizeTable& table) {
  if (n < 1) fail(Errc::InvalidArgument, "n must be positive");
  std::vector<int> parts;
  long long rem = n;
  while (rem > 0) {
    int best = 0;
    for (int m = table.max_m(); m >= 1; --m) {
      if (table.has(m) && table.s(m) <= rem) {
        best = m;
        break;
      }
    }
    parts.push_back(best);
    rem -= table.s(best);
  }
  return parts;
}

Composition compose_pointset(const NormOracle& norm, long long n, uint64_t seed,
                             SizeTable& table, const Tolerances& tol) {
  if (!accepted_as_strictly_convex(norm)) {
    fail(Errc::NotStrictlyConvex, norm.name() + " is not strictly convex");
  }
  std::vector<int> parts = decompose(n, table);

  // one materialization per distinct m
  std::map<int, PointSet> built;
  for (int m : parts) {
    if (m == 0 || built.count(m)) continue;
    const SizeEntry* e = table.find(m);
    if (!e || !e->spec) {
      fail(Errc::InvalidArgument, "table entry for m=" + std::to_string(m) +
                                      " carries no spec");
    }
    built.emplace(m, materialize(*e->spec, tol));
  }
  PointSet origin_point(norm.dim(), tol.tau);
  origin_point.add(Vec::Zero(norm.dim()));

  auto copy_of = [&](int m) -> const PointSet& {
    return m == 0 ? origin_point : built.at(m);
  };

  double diam = 1.0;
  {
    auto [lo, hi] = copy_of(parts.front()).bbox();
    diam = std::max(diam, (hi - lo).norm());
  }
  double side = 100.0 * diam;

  Rng rng(mix_seed(seed, 0xc0117eULL));
  struct Placed {
    Vec lo, hi;
    Vec offset;
    int m;
  };
  std::vector<Placed> placed;
  for (int m : parts) {
    auto [lo, hi] = copy_of(m).bbox();
    bool ok = false;
    for (int tries = 0; tries < 100 && !ok; ++tries) {
      Vec offset(norm.dim());
      for (int c = 0; c < norm.dim(); ++c) offset[c] = rng.uniform(0.0, side);
      ok = true;
      for (const Placed& q : placed) {
        double gap = -std::numeric_limits<double>::infinity();
        for (int c = 0; c < norm.dim(); ++c) {
          double sep = std::max((lo[c] + offset[c]) - (q.hi[c] + q.offset[c]),
                                (q.lo[c] + q.offset[c]) - (hi[c] + offset[c]));
          gap = std::max(gap, sep);
        }
        if (gap <= 10.0 * tol.tau) {
          ok = false;
          break;
        }
      }
      if (ok) placed.push_back({lo, hi, std::move(offset), m});
    }
    if (!ok) fail(Errc::OffsetExhausted, "could not separate copy offsets");
  }

  Composition out{PointSet(norm.dim(), tol.tau), {}, parts, 0};
  out.points.reserve(n);
  std::vector<double> buf(static_cast<size_t>(norm.dim()));
  for (const Placed& pl : placed) {
    const PointSet& src = copy_of(pl.m);
    for (long long i = 0; i < src.size(); ++i) {
      const double* p = src.row(i);
      for (int c = 0; c < norm.dim(); ++c) buf[static_cast<size_t>(c)] = p[c] + pl.offset[c];
      if (!out.points.add(buf.data())) {
        fail(Errc::OffsetExhausted, "copies collided despite the gap check");
      }
    }
    out.certified_total += table.t(pl.m);
  }
  if (out.points.size() != n) {
    fail(Errc::OffsetExhausted, "composition size mismatch");
  }

  out.report.set_size = n;
  out.report.total = out.certified_total;
  out.report.near_merges = out.points.near_merge_events();
  for (int m : parts) {
    if (m == 0) continue;
    const SizeEntry& e = *table.find(m);
    out.report.lemma_bound += grid_bound(*e.spec, e.s);
    Rat pb = proposition_lower_bound(norm.dim(), m, e.s);
    if (pb > 0) out.report.prop_bound += pb;
  }
  return out;
}

std::vector<RatioRow> ratio_report(const NormOracle& norm,
                                   const std::vector<long long>& ns, uint64_t seed,
                                   SizeTable& table, const Tolerances& tol) {
  std::vector<RatioRow> rows;
  double prev = -std::numeric_limits<double>::infinity();
  for (long long n : ns) {
    Composition comp = compose_pointset(norm, n, seed, table, tol);
    RatioRow row;
    row.n = n;
    row.total = comp.report.total;
    row.ratio = static_cast<double>(comp.report.total) /
                (static_cast<double>(n) * std::log2(static_cast<double>(n)));
    row.target = norm.dim() / 2.0;
    row.dip_flag = row.ratio < prev - 0.02;
    prev = row.ratio;
    rows.push_back(row);
  }
  return rows;
}

DegenerateResult degenerate_construction(const NormOracle& norm,
                                         const ConvexityVerdict& verdict,
                                         long long n, const Tolerances& tol) {
  if (verdict.kind != ConvexityKind::SegmentFound || !verdict.segment) {
    fail(Errc::InvalidArgument,
         "degenerate construction needs a SegmentFound verdict");
  }
  if (n < 2 || n % 2 != 0) {
    fail(Errc::InvalidArgument, "degenerate construction needs even n >= 2");
  }
  SegmentWitness seg = extend_segment(norm, *verdict.segment);
  double seg_len = 2.0 * seg.half.norm();
  double spacing = 10.0 * tol.tau;
  if (seg_len < static_cast<double>(n) * spacing) {
    fail(Errc::SegmentTooShort, "certified segment cannot host n points");
  }
  long long half = n / 2;
  DegenerateResult out{PointSet(norm.dim(), tol.tau), 0, seg};
  out.points.reserve(n);
  double denom = half > 1 ? static_cast<double>(half - 1) : 1.0;
  for (long long a = 0; a < half; ++a) {
    double s = static_cast<double>(a) / denom;
    // points on (0, y) and on (x, x + y); every cross pair differs by a
    // vector on the boundary segment, hence has gauge exactly 1
    Vec u = s * seg.half;
    Vec w = seg.midpoint + s * seg.half;
    if (!out.points.add(u) || !out.points.add(w)) {
      fail(Errc::SegmentTooShort, "segment points collided at the dedup radius");
    }
  }
  out.count = count_pairwise(out.points, norm, tol.eps_unit);
  return out;
}

}  // namespace udf
