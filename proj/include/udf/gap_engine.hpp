#pragma once

#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include "udf/gap_spec.hpp"
#include "udf/norm.hpp"

namespace udf {

using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

long long rat_ceil(const Rat& r);
double rat_double(const Rat& r);
nlohmann::json rat_to_json(const Rat& r);

// Deduplicated point collection with a spatial hash over cells of side
// 10*tau; merges points within tau, answers tau-tolerant lookups, and keeps
// count of suspicious near-merges at distance in (tau, 10*tau].
class PointSet {
 public:
  PointSet(int d, double tau);

  int dim() const { return d_; }
  long long size() const { return n_; }
  double tau() const { return tau_; }
  long long near_merge_events() const { return near_events_; }
  const std::optional<GapSpec>& origin() const { return origin_; }
  void set_origin(GapSpec spec) { origin_ = std::move(spec); }

  void reserve(long long n);
  bool add(const double* p);  // false when merged into an existing point
  bool add(const Vec& p);
  // index of a stored point within tol of p, or -1
  long long find_within(const double* p, double tol) const;
  long long find_within(const Vec& p, double tol) const;

  const double* row(long long i) const { return coords_.data() + i * d_; }
  Vec point(long long i) const {
    return Eigen::Map<const Vec>(row(i), d_);
  }
  std::pair<Vec, Vec> bbox() const;

 private:
  uint64_t cell_hash(const double* p) const;
  // nearest stored point within radius (<= cell size) of p: index and squared
  // distance, index -1 when the ball is empty
  std::pair<long long, double> nearest_within(const double* p, double radius) const;
  void insert_slot(uint64_t key, int32_t point_idx);
  void rehash(size_t cap);

  int d_;
  double tau_;
  double cell_;
  long long n_ = 0;
  long long near_events_ = 0;
  std::vector<double> coords_;
  std::vector<uint64_t> slot_key_;
  std::vector<int32_t> slot_head_;
  std::vector<int32_t> chain_next_;
  size_t mask_ = 0;
  size_t used_ = 0;
  std::optional<GapSpec> origin_;
};

// Enumerates all lattice tuples of the spec through Psi and deduplicates.
PointSet materialize(const GapSpec& spec, const Tolerances& tol = {},
                     long long cap = (1LL << 24));

struct UnitDistanceReport {
  std::vector<long long> per_direction;
  long long total = 0;
  Rat lemma_bound;  // |S| * sum over codes of prod (1 - c_i/k_i)
  Rat prop_bound;   // d(m-2)|S|/2
  std::optional<long long> pairwise_total;
  long long set_size = 0;
  long long near_merges = 0;
};

UnitDistanceReport count_directional(const PointSet& ps,
                                     const std::vector<Vec>& directions,
                                     const Tolerances& tol = {});
// Uses the directions and bounds of the origin spec.
UnitDistanceReport count_directional(const PointSet& ps, const Tolerances& tol = {});

long long count_pairwise(const PointSet& ps, const NormOracle& norm,
                         double eps_unit = 1e-9, long long max_points = 20000);

// Exact enumeration check of |X + [0,k-c-1]x| >= (1 - c/k) |X + [0,k-1]x|.
bool sumset_ratio_check(const std::vector<Eigen::VectorXi>& X,
                        const Eigen::VectorXi& x, int k, int c);

Rat grid_bound(const GapSpec& spec, long long set_size);
Rat proposition_lower_bound(int d, int m, long long set_size);  // d(m-2)|S|/2

nlohmann::json report_to_json(const UnitDistanceReport& rep, const GapSpec* spec,
                              const Tolerances& tol);

}  // namespace udf
