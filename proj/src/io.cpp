#include "udf/io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "udf/boundary.hpp"

namespace udf {

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(Errc::IoError, "cannot open " + path + " for writing");
  f << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(Errc::IoError, "cannot open " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void write_pointset_csv(const PointSet& ps, const std::string& path) {
  std::ostringstream os;
  for (int c = 0; c < ps.dim(); ++c) {
    if (c) os << ',';
    os << 'x' << c;
  }
  os << '\n';
  char buf[64];
  for (long long i = 0; i < ps.size(); ++i) {
    const double* p = ps.row(i);
    for (int c = 0; c < ps.dim(); ++c) {
      if (c) os << ',';
      std::snprintf(buf, sizeof buf, "%a", p[c]);
      os << buf;
    }
    os << '\n';
  }
  write_text_file(path, os.str());
}

void write_json_file(const nlohmann::json& j, const std::string& path) {
  write_text_file(path, j.dump(1) + "\n");
}

void write_svg_plot(const PointSet& ps, const NormOracle* norm,
                    const std::string& path) {
  if (ps.dim() != 2) fail(Errc::InvalidArgument, "SVG plots are 2-d only");
  double lo[2] = {-1.5, -1.5}, hi[2] = {1.5, 1.5};
  for (long long i = 0; i < ps.size(); ++i) {
    const double* p = ps.row(i);
    for (int c = 0; c < 2; ++c) {
      lo[c] = std::min(lo[c], p[c] - 0.2);
      hi[c] = std::max(hi[c], p[c] + 0.2);
    }
  }
  double span = std::max(hi[0] - lo[0], hi[1] - lo[1]);
  double scale = 800.0 / span;
  auto sx = [&](double x) { return (x - lo[0]) * scale; };
  auto sy = [&](double y) { return 800.0 - (y - lo[1]) * scale; };

  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='800' height='800' "
        "viewBox='0 0 800 800'>\n";
  os << "<rect width='800' height='800' fill='white'/>\n";
  if (norm != nullptr && norm->dim() == 2) {
    os << "<polyline fill='none' stroke='#4477aa' stroke-width='1' points='";
    const int steps = 512;
    for (int i = 0; i <= steps; ++i) {
      double a = 2.0 * M_PI * i / steps;
      Vec dir(2);
      dir << std::cos(a), std::sin(a);
      BoundaryPoint b = boundary_point(*norm, dir);
      os << sx(b.coords[0]) << ',' << sy(b.coords[1]) << ' ';
    }
    os << "'/>\n";
  }
  double r = std::max(1.0, 2.5 - ps.size() / 4000.0);
  for (long long i = 0; i < ps.size(); ++i) {
    const double* p = ps.row(i);
    os << "<circle cx='" << sx(p[0]) << "' cy='" << sy(p[1]) << "' r='" << r
       << "' fill='#222222'/>\n";
  }
  os << "</svg>\n";
  write_text_file(path, os.str());
}

uint64_t fnv1a64(const std::string& bytes) {
  uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

uint64_t fnv1a64_file(const std::string& path) {
  return fnv1a64(read_text_file(path));
}

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string iso_timestamp_utc() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Manifest::Manifest(std::string command, nlohmann::json norm_spec, uint64_t seed,
                   const Tolerances& tol) {
  j_["schema"] = "udf/1";
  j_["type"] = "run_manifest";
  j_["command"] = std::move(command);
  j_["norm"] = std::move(norm_spec);
  j_["seed"] = seed;
  j_["tolerances"] = {{"tau", tol.tau},
                      {"eps_bnd", tol.eps_bnd},
                      {"eps_unit", tol.eps_unit},
                      {"tau_tan", tol.tau_tan}};
  j_["started"] = iso_timestamp_utc();
  j_["outputs"] = nlohmann::json::array();
}

void Manifest::set_param(const std::string& key, const nlohmann::json& value) {
  j_["params"][key] = value;
}

void Manifest::add_output(const std::string& path) {
  j_["outputs"].push_back(
      {{"file", std::filesystem::path(path).filename().string()},
       {"fnv1a64", hex64(fnv1a64_file(path))}});
}

void Manifest::write(const std::string& path) const {
  nlohmann::json j = j_;
  j["finished"] = iso_timestamp_utc();
  write_json_file(j, path);
}

}  // namespace udf
