#pragma once

#include <string>

#include <json.hpp>

#include "udf/gap_engine.hpp"

namespace udf {

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// One point per row, full-precision hex floats, header row of column names.
void write_pointset_csv(const PointSet& ps, const std::string& path);

void write_json_file(const nlohmann::json& j, const std::string& path);

// Diagnostic plot for d = 2: the point set plus the unit boundary overlay.
void write_svg_plot(const PointSet& ps, const NormOracle* norm,
                    const std::string& path);

uint64_t fnv1a64(const std::string& bytes);
uint64_t fnv1a64_file(const std::string& path);
std::string hex64(uint64_t v);

std::string iso_timestamp_utc();

// Deterministic record of one CLI run: command, inputs, tolerances and the
// digests of every emitted file.
class Manifest {
 public:
  Manifest(std::string command, nlohmann::json norm_spec, uint64_t seed,
           const Tolerances& tol);
  void set_param(const std::string& key, const nlohmann::json& value);
  void add_output(const std::string& path);
  void write(const std::string& path) const;
  const nlohmann::json& json() const { return j_; }

 private:
  nlohmann::json j_;
};

}  // namespace udf
