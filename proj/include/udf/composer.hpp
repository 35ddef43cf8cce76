#pragma once

#include <map>
#include <string>
#include <vector>

#include "udf/boundary.hpp"
#include "udf/construct_general.hpp"
#include "udf/gap_engine.hpp"

namespace udf {

struct SizeEntry {
  int m = 0;
  long long s = 0;  // |S_m|
  long long t = 0;  // certified directional unit-distance count
  uint64_t seed = 0;
  double lambda = 0.0;
  Vec t_vec;
  std::optional<GapSpec> spec;
};

// Size table of the composition: entry 0 is the implicit single point with
// s_0 = 1, t_0 = 0.
class SizeTable {
 public:
  SizeTable() = default;
  SizeTable(std::string norm_id, int d) : norm_id_(std::move(norm_id)), d_(d) {}

  const std::string& norm_id() const { return norm_id_; }
  int d() const { return d_; }
  int max_m() const;
  bool has(int m) const;
  const SizeEntry* find(int m) const;
  long long s(int m) const;
  long long t(int m) const;
  void add(SizeEntry e);

  nlohmann::json to_json() const;
  static SizeTable from_json(const nlohmann::json& j);

 private:
  std::string norm_id_;
  int d_ = 0;
  std::map<int, SizeEntry> entries_;
};

// Builds (or extends, honoring a JSON cache) the table with every m whose
// tuple count fits under n.
SizeTable build_size_table(const NormOracle& norm, long long n, uint64_t seed,
                           const Tolerances& tol = {},
                           const std::string& cache_dir = "");

// Greedy decomposition n = sum s_{m_i}, lexicographically largest
// non-increasing sequence.
std::vector<int> decompose(long long n, const SizeTable& table);

struct Composition {
  PointSet points;
  UnitDistanceReport report;
  std::vector<int> parts;
  long long certified_total = 0;  // sum of table t over the parts
};

Composition compose_pointset(const NormOracle& norm, long long n, uint64_t seed,
                             SizeTable& table, const Tolerances& tol = {});

struct RatioRow {
  long long n = 0;
  long long total = 0;
  double ratio = 0.0;   // total / (n log2 n)
  double target = 0.0;  // d / 2
  bool dip_flag = false;
};

std::vector<RatioRow> ratio_report(const NormOracle& norm,
                                   const std::vector<long long>& ns, uint64_t seed,
                                   SizeTable& table, const Tolerances& tol = {});

struct DegenerateResult {
  PointSet points;
  long long count = 0;
  SegmentWitness segment;
};

// Theta(n^2) fallback for non-strictly-convex norms: n/2 points on each of
// two parallel boundary-segment translates.
DegenerateResult degenerate_construction(const NormOracle& norm,
                                         const ConvexityVerdict& verdict,
                                         long long n, const Tolerances& tol = {});

}  // namespace udf
