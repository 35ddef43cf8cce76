#include "udf/gap_engine.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <set>
#include <thread>

namespace udf {
namespace {

uint64_t splitmix(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr uint64_t kEmptyKey = 0xffffffffffffffffULL;

}  // namespace

long long rat_ceil(const Rat& r) {
  BigInt num = boost::multiprecision::numerator(r);
  BigInt den = boost::multiprecision::denominator(r);  // positive by canonicalization
  BigInt q = num / den;
  if (num % den != 0 && num > 0) ++q;
  return q.convert_to<long long>();
}

double rat_double(const Rat& r) { return r.convert_to<double>(); }

nlohmann::json rat_to_json(const Rat& r) {
  return {{"num", boost::multiprecision::numerator(r).str()},
          {"den", boost::multiprecision::denominator(r).str()},
          {"approx", rat_double(r)}};
}

PointSet::PointSet(int d, double tau) : d_(d), tau_(tau), cell_(20.0 * tau) {
  if (d < 1 || d > 8) fail(Errc::InvalidArgument, "PointSet supports 1 <= d <= 8");
  if (!(tau > 0)) fail(Errc::InvalidArgument, "dedup radius must be positive");
  rehash(1024);
}

void PointSet::reserve(long long n) {
  coords_.reserve(static_cast<size_t>(n) * d_);
  chain_next_.reserve(static_cast<size_t>(n));
  size_t cap = 1024;
  while (cap < 2 * static_cast<size_t>(n)) cap <<= 1;
  if (cap > slot_key_.size()) rehash(cap);
}

uint64_t PointSet::cell_hash(const double* p) const {
  uint64_t h = 0x2545f4914f6cdd1dULL;
  for (int i = 0; i < d_; ++i) {
    auto c = static_cast<int64_t>(std::floor(p[i] / cell_));
    h = splitmix(h ^ static_cast<uint64_t>(c));
  }
  return h == kEmptyKey ? 0 : h;
}

std::pair<long long, double> PointSet::nearest_within(const double* p,
                                                      double radius) const {
  // only cells whose slab is within `radius` of the query can hold a match;
  // the slack absorbs the rounding of p/cell at large cell indices
  const double slack = 1e-12;
  int64_t base[8];
  int opts[8][3];
  int nopts[8];
  for (int i = 0; i < d_; ++i) {
    double q = p[i] / cell_;
    double fl = std::floor(q);
    base[i] = static_cast<int64_t>(fl);
    double low_gap = (q - fl) * cell_;
    int n = 0;
    opts[i][n++] = 0;
    if (low_gap <= radius + slack) opts[i][n++] = -1;
    if (cell_ - low_gap <= radius + slack) opts[i][n++] = 1;
    nopts[i] = n;
  }
  long long best = -1;
  double best2 = radius * radius;
  int sel[8] = {0};
  while (true) {
    uint64_t h = 0x2545f4914f6cdd1dULL;
    for (int i = 0; i < d_; ++i) {
      int64_t c = base[i] + opts[i][sel[i]];
      h = splitmix(h ^ static_cast<uint64_t>(c));
    }
    uint64_t key = h == kEmptyKey ? 0 : h;
    size_t pos = key & mask_;
    while (slot_key_[pos] != kEmptyKey) {
      if (slot_key_[pos] == key) {
        for (int32_t i = slot_head_[pos]; i >= 0;
             i = chain_next_[static_cast<size_t>(i)]) {
          const double* q = row(i);
          double dist2 = 0.0;
          for (int c = 0; c < d_; ++c) {
            double dlt = p[c] - q[c];
            dist2 += dlt * dlt;
          }
          if (dist2 <= best2) {
            best2 = dist2;
            best = i;
          }
        }
        break;
      }
      pos = (pos + 1) & mask_;
    }
    int c = 0;
    while (c < d_ && sel[c] + 1 >= nopts[c]) sel[c++] = 0;
    if (c == d_) break;
    ++sel[c];
  }
  return {best, best2};
}

void PointSet::insert_slot(uint64_t key, int32_t point_idx) {
  size_t pos = key & mask_;
  while (true) {
    if (slot_key_[pos] == kEmptyKey) {
      slot_key_[pos] = key;
      slot_head_[pos] = point_idx;
      chain_next_[static_cast<size_t>(point_idx)] = -1;
      ++used_;
      break;
    }
    if (slot_key_[pos] == key) {
      chain_next_[static_cast<size_t>(point_idx)] = slot_head_[pos];
      slot_head_[pos] = point_idx;
      break;
    }
    pos = (pos + 1) & mask_;
  }
  if (used_ * 5 > slot_key_.size() * 3) rehash(slot_key_.size() * 2);
}

void PointSet::rehash(size_t cap) {
  slot_key_.assign(cap, kEmptyKey);
  slot_head_.assign(cap, -1);
  mask_ = cap - 1;
  used_ = 0;
  for (long long i = 0; i < n_; ++i) {
    uint64_t key = cell_hash(row(i));
    size_t pos = key & mask_;
    while (true) {
      if (slot_key_[pos] == kEmptyKey) {
        slot_key_[pos] = key;
        slot_head_[pos] = static_cast<int32_t>(i);
        chain_next_[static_cast<size_t>(i)] = -1;
        ++used_;
        break;
      }
      if (slot_key_[pos] == key) {
        chain_next_[static_cast<size_t>(i)] = slot_head_[pos];
        slot_head_[pos] = static_cast<int32_t>(i);
        break;
      }
      pos = (pos + 1) & mask_;
    }
  }
}

long long PointSet::find_within(const double* p, double tol) const {
  if (tol > cell_) fail(Errc::InvalidArgument, "lookup radius exceeds the cell size");
  return nearest_within(p, tol).first;
}

long long PointSet::find_within(const Vec& p, double tol) const {
  return find_within(p.data(), tol);
}

bool PointSet::add(const double* p) {
  // the near-merge radius 10*tau is half the cell size
  auto [idx, best2] = nearest_within(p, 10.0 * tau_);
  if (idx >= 0 && best2 <= tau_ * tau_) return false;
  if (idx >= 0) ++near_events_;
  coords_.insert(coords_.end(), p, p + d_);
  chain_next_.push_back(-1);
  int32_t i = static_cast<int32_t>(n_++);
  insert_slot(cell_hash(p), i);
  return true;
}

bool PointSet::add(const Vec& p) {
  if (p.size() != d_) fail(Errc::InvalidArgument, "point dimension mismatch");
  return add(p.data());
}

std::pair<Vec, Vec> PointSet::bbox() const {
  Vec lo = Vec::Constant(d_, std::numeric_limits<double>::infinity());
  Vec hi = -lo;
  for (long long i = 0; i < n_; ++i) {
    const double* p = row(i);
    for (int c = 0; c < d_; ++c) {
      lo[c] = std::min(lo[c], p[c]);
      hi[c] = std::max(hi[c], p[c]);
    }
  }
  return {lo, hi};
}

PointSet materialize(const GapSpec& spec, const Tolerances& tol, long long cap) {
  long long tuples = spec.tuple_count();
  if (tuples > cap) {
    fail(Errc::Overflow, "tuple count " + std::to_string(tuples) +
                             " exceeds cap " + std::to_string(cap));
  }
  int d = spec.d;
  int g = static_cast<int>(spec.generators.size());
  for (const auto& v : spec.generators) {
    if (v.size() != d) fail(Errc::InvalidArgument, "generator dimension mismatch");
  }
  PointSet ps(d, tol.tau);
  ps.reserve(tuples);

  // odometer with suffix partial sums: suffix[i] = sum_{j >= i} a_j v_j,
  // recomputed from the changed digit upward so equal tuples yield identical
  // floating-point images
  std::vector<long long> a(static_cast<size_t>(g), 0);
  std::vector<Vec> suffix(static_cast<size_t>(g) + 1, Vec::Zero(d));
  for (int i = g - 1; i >= 0; --i) {
    suffix[static_cast<size_t>(i)] =
        static_cast<double>(a[static_cast<size_t>(i)]) * spec.generators[static_cast<size_t>(i)] +
        suffix[static_cast<size_t>(i) + 1];
  }
  while (true) {
    ps.add(suffix[0].data());
    int i = 0;
    while (i < g && a[static_cast<size_t>(i)] + 1 >= spec.ranges[static_cast<size_t>(i)]) {
      a[static_cast<size_t>(i)] = 0;
      ++i;
    }
    if (i == g) break;
    ++a[static_cast<size_t>(i)];
    for (int j = i; j >= 0; --j) {
      suffix[static_cast<size_t>(j)] =
          static_cast<double>(a[static_cast<size_t>(j)]) * spec.generators[static_cast<size_t>(j)] +
          suffix[static_cast<size_t>(j) + 1];
    }
  }
  ps.set_origin(spec);
  return ps;
}

namespace {

long long count_one_direction(const PointSet& ps, const Vec& u, double tol) {
  int d = ps.dim();
  double buf[8];
  long long count = 0;
  for (long long i = 0; i < ps.size(); ++i) {
    const double* p = ps.row(i);
    for (int c = 0; c < d; ++c) buf[c] = p[c] + u[c];
    if (ps.find_within(buf, tol) >= 0) ++count;
  }
  return count;
}

}  // namespace

UnitDistanceReport count_directional(const PointSet& ps,
                                     const std::vector<Vec>& directions,
                                     const Tolerances& tol) {
  UnitDistanceReport rep;
  rep.set_size = ps.size();
  rep.near_merges = ps.near_merge_events();
  rep.per_direction.resize(directions.size(), 0);

  size_t workers = std::min<size_t>(std::thread::hardware_concurrency(),
                                    directions.size());
  if (workers > 1 && ps.size() > 100000) {
    std::vector<std::future<long long>> jobs;
    jobs.reserve(directions.size());
    for (const auto& u : directions) {
      jobs.push_back(std::async(std::launch::async, [&ps, &u, &tol] {
        return count_one_direction(ps, u, tol.tau);
      }));
    }
    for (size_t k = 0; k < directions.size(); ++k) {
      rep.per_direction[k] = jobs[k].get();
    }
  } else {
    for (size_t k = 0; k < directions.size(); ++k) {
      rep.per_direction[k] = count_one_direction(ps, directions[k], tol.tau);
    }
  }
  for (long long c : rep.per_direction) rep.total += c;

  if (ps.origin()) {
    const GapSpec& spec = *ps.origin();
    rep.lemma_bound = grid_bound(spec, ps.size());
    rep.prop_bound = proposition_lower_bound(spec.d, spec.m, ps.size());
  }
  return rep;
}

UnitDistanceReport count_directional(const PointSet& ps, const Tolerances& tol) {
  if (!ps.origin()) {
    fail(Errc::InvalidArgument, "point set has no origin spec with directions");
  }
  return count_directional(ps, ps.origin()->directions, tol);
}

long long count_pairwise(const PointSet& ps, const NormOracle& norm,
                         double eps_unit, long long max_points) {
  if (ps.size() > max_points) {
    fail(Errc::TooLarge, "pairwise oracle capped at " + std::to_string(max_points) +
                             " points");
  }
  int d = ps.dim();
  if (d > 8) fail(Errc::TooLarge, "pairwise oracle supports d <= 8");
  long long count = 0;
  double buf[8];
  Eigen::Map<const Vec> diff(buf, d);
  for (long long i = 0; i < ps.size(); ++i) {
    const double* p = ps.row(i);
    for (long long j = i + 1; j < ps.size(); ++j) {
      const double* q = ps.row(j);
      for (int c = 0; c < d; ++c) buf[c] = p[c] - q[c];
      if (std::abs(norm(diff) - 1.0) <= eps_unit) ++count;
    }
  }
  return count;
}

bool sumset_ratio_check(const std::vector<Eigen::VectorXi>& X,
                        const Eigen::VectorXi& x, int k, int c) {
  if (X.empty()) fail(Errc::InvalidArgument, "X must be nonempty");
  if (c < 2 || k < c) fail(Errc::InvalidArgument, "need k >= c >= 2");
  int d = static_cast<int>(x.size());
  auto sum_size = [&](int steps) -> long long {
    // |X + [0, steps-1] * x|; empty multiplier set gives the empty sumset
    if (steps <= 0) return 0;
    std::set<std::vector<long long>> seen;
    std::vector<long long> key(static_cast<size_t>(d));
    for (const auto& p : X) {
      if (p.size() != d) fail(Errc::InvalidArgument, "X element dimension mismatch");
      for (int s = 0; s < steps; ++s) {
        for (int i = 0; i < d; ++i) {
          key[static_cast<size_t>(i)] =
              static_cast<long long>(p[i]) + static_cast<long long>(s) * x[i];
        }
        seen.insert(key);
      }
    }
    return static_cast<long long>(seen.size());
  };
  long long small = sum_size(k - c);
  long long big = sum_size(k);
  // |small| >= (1 - c/k) |big|, exactly
  return static_cast<long long>(k) * small >= static_cast<long long>(k - c) * big;
}

Rat grid_bound(const GapSpec& spec, long long set_size) {
  Rat sum = 0;
  for (const auto& code : spec.codes) {
    BigInt num = 1, den = 1;
    for (size_t i = 0; i < code.size(); ++i) {
      long long k = spec.ranges[i];
      long long c = code[i];
      if (c < 0 || c > k) fail(Errc::InvalidArgument, "code entry outside [0, k]");
      num *= (k - c);
      den *= k;
    }
    sum += Rat(num, den);
  }
  return Rat(set_size) * sum;
}

Rat proposition_lower_bound(int d, int m, long long set_size) {
  return Rat(static_cast<long long>(d) * (m - 2) * set_size, 2);
}

nlohmann::json report_to_json(const UnitDistanceReport& rep, const GapSpec* spec,
                              const Tolerances& tol) {
  nlohmann::json j;
  j["schema"] = "udf/1";
  j["type"] = "unit_distance_report";
  j["set_size"] = rep.set_size;
  j["total"] = rep.total;
  j["per_direction"] = rep.per_direction;
  j["lemma_bound"] = rat_to_json(rep.lemma_bound);
  j["lemma_bound_ceil"] = rat_ceil(rep.lemma_bound);
  j["prop_bound"] = rat_to_json(rep.prop_bound);
  j["prop_bound_ceil"] = rat_ceil(rep.prop_bound);
  if (rep.pairwise_total) {
    j["pairwise_total"] = *rep.pairwise_total;
  } else {
    j["pairwise_total"] = nullptr;
  }
  j["near_merge_events"] = rep.near_merges;
  j["tolerances"] = {{"tau", tol.tau},
                     {"eps_bnd", tol.eps_bnd},
                     {"eps_unit", tol.eps_unit},
                     {"tau_tan", tol.tau_tan}};
  if (spec != nullptr) {
    j["d"] = spec->d;
    j["m"] = spec->m;
    j["norm"] = spec->norm_id;
  }
  return j;
}

}  // namespace udf
