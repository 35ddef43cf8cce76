#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "udf/error.hpp"
#include "udf/types.hpp"

namespace udf {

// Provenance tag for a realized unit direction: either one of the base
// boundary points p_j or a reflected point q_ij = p_j - phi_{w_i}(p_j) w_i.
struct DirectionTag {
  enum Kind { P = 0, Q = 1 };
  int kind = P;
  int i = 0;  // 1-based chord index, 0 for P entries
  int j = 0;  // 1-based point index
};

// A generalized arithmetic progression together with the lattice codes whose
// realizations are certified unit vectors.
struct GapSpec {
  int d = 0;
  int m = 0;
  std::vector<Vec> generators;
  std::vector<long long> ranges;          // k_i, one per generator
  std::vector<std::vector<int>> codes;    // U, each of generator length
  std::vector<Vec> directions;            // realized unit vectors, |U| of them
  std::vector<DirectionTag> tags;         // parallel to directions

  // provenance
  std::string norm_id;
  uint64_t seed = 0;
  double lambda = 0.0;
  Vec t;

  long long tuple_count() const;  // product of ranges, Overflow-guarded
};

// Range and code layout of the main construction: k = (2,...,2, m,...,m,
// m^2,...,m^2) and U = {e_j} u {e_j + e_{m+i} + j e_{m+d-1+i}}.
std::vector<long long> proposition_ranges(int d, int m);
std::vector<std::vector<int>> proposition_codes(int d, int m);

nlohmann::json gap_spec_to_json(const GapSpec& spec);
GapSpec gap_spec_from_json(const nlohmann::json& j);

}  // namespace udf
