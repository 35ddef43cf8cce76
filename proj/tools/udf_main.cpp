// Command-line surface of the unit-distance construction library:
//   construct      build one GAP spec, materialize it and count
//   compose        n-point composition (or the quadratic fallback)
//   kdm            local K_{d,m} intersection model with persistence check
//   verify-lemmas  brute-force fuzzing of the counting lemmas

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "udf/composer.hpp"
#include "udf/construct2d.hpp"
#include "udf/construct_general.hpp"
#include "udf/io.hpp"
#include "udf/kdm.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
  std::string norm_arg = "lp:2";
  int d = 2;
  uint64_t seed = 0;
  std::string out_dir = "udf-out";
  udf::Tolerances tol;
};

void add_common(CLI::App* cmd, CommonOpts& c, bool with_norm = true) {
  if (with_norm) {
    cmd->add_option("--norm", c.norm_arg,
                    "norm spec: lp:<p> | l1 | l2 | linf | ellipsoid:a1,a2,... | "
                    "perturbed_lp:<p>:<amp>:<seed> | @file.json | inline JSON");
    cmd->add_option("--d", c.d, "ambient dimension")->check(CLI::Range(2, 8));
  }
  cmd->add_option("--seed", c.seed, "random seed, recorded in the manifest");
  cmd->add_option("--out-dir", c.out_dir, "output directory");
  cmd->add_option("--tol-tau", c.tol.tau, "dedup / hash radius");
  cmd->add_option("--tol-bnd", c.tol.eps_bnd, "boundary membership band");
  cmd->add_option("--tol-unit", c.tol.eps_unit, "pairwise unit acceptance band");
  cmd->add_option("--tol-tan", c.tol.tau_tan, "tangency collapse threshold");
}

std::string out_path(const CommonOpts& c, const std::string& name) {
  fs::create_directories(c.out_dir);
  return (fs::path(c.out_dir) / name).string();
}

int run_construct(const CommonOpts& c, int m, bool warmup, bool pairwise, bool svg) {
  udf::NormOracle norm = udf::parse_norm_arg(c.norm_arg, c.d);
  udf::Manifest manifest("construct", norm.spec_json(), c.seed, c.tol);
  manifest.set_param("d", c.d);
  manifest.set_param("m", m);
  manifest.set_param("warmup", warmup);

  udf::GapSpec spec;
  if (warmup) {
    if (c.d != 2) {
      std::cerr << "error: --warmup requires --d 2\n";
      return 2;
    }
    spec = udf::build_2d_warmup_spec(norm, m);
    spec.seed = c.seed;
  } else {
    spec = udf::build_spec(norm, m, c.seed, c.tol);
  }

  udf::OverlapCheck oc = udf::verify_non_overlapping(spec);
  if (!oc.ok) {
    std::cerr << "certificate failure: direction set overlaps (case " << oc.case_id
              << ": " << oc.detail << ")\n";
    return 1;
  }
  udf::PointSet ps = udf::materialize(spec, c.tol);
  udf::UnitDistanceReport rep = udf::count_directional(ps, c.tol);
  if (pairwise) {
    rep.pairwise_total = udf::count_pairwise(ps, norm, c.tol.eps_unit);
  }

  std::string spec_path = out_path(c, "gap_spec.json");
  std::string csv_path = out_path(c, "points.csv");
  std::string rep_path = out_path(c, "report.json");
  udf::write_json_file(udf::gap_spec_to_json(spec), spec_path);
  udf::write_pointset_csv(ps, csv_path);
  udf::write_json_file(udf::report_to_json(rep, &spec, c.tol), rep_path);
  manifest.add_output(spec_path);
  manifest.add_output(csv_path);
  manifest.add_output(rep_path);
  if (svg && c.d == 2) {
    std::string svg_path = out_path(c, "plot.svg");
    udf::write_svg_plot(ps, &norm, svg_path);
    manifest.add_output(svg_path);
  }
  manifest.write(out_path(c, "manifest.json"));

  long long need = udf::rat_ceil(rep.lemma_bound);
  bool counts_ok = rep.total >= need &&
                   (!rep.pairwise_total || *rep.pairwise_total >= rep.total);
  std::cout << "norm=" << norm.name() << " d=" << c.d << " m=" << m
            << " |S|=" << rep.set_size << " total=" << rep.total
            << " lemma_bound=" << need
            << " prop_bound=" << udf::rat_ceil(rep.prop_bound)
            << " directions=" << spec.directions.size() << "\n";
  if (!counts_ok) {
    std::cerr << "certificate failure: counts fell below the certified bound\n";
    return 1;
  }
  std::cout << "certificates: ok\n";
  return 0;
}

int run_compose(const CommonOpts& c, long long n, const std::vector<long long>& n_list,
                bool svg) {
  udf::NormOracle norm = udf::parse_norm_arg(c.norm_arg, c.d);
  udf::Manifest manifest("compose", norm.spec_json(), c.seed, c.tol);
  manifest.set_param("d", c.d);
  manifest.set_param("n", n);

  if (!udf::accepted_as_strictly_convex(norm)) {
    udf::ConvexityVerdict verdict = udf::strict_convexity_probe(norm, 10000, c.seed);
    if (verdict.kind != udf::ConvexityKind::SegmentFound) {
      std::cerr << "error: norm is neither certified strictly convex nor "
                   "segment-witnessed\n";
      return 1;
    }
    udf::DegenerateResult res =
        udf::degenerate_construction(norm, verdict, n, c.tol);
    std::string csv_path = out_path(c, "points.csv");
    udf::write_pointset_csv(res.points, csv_path);
    json rj = {{"schema", "udf/1"},
               {"type", "degenerate_report"},
               {"n", n},
               {"pairwise_count", res.count},
               {"quadratic_bound", n * n / 4},
               {"segment_length", 2.0 * res.segment.half.norm()}};
    std::string rep_path = out_path(c, "report.json");
    udf::write_json_file(rj, rep_path);
    manifest.add_output(csv_path);
    manifest.add_output(rep_path);
    if (svg && c.d == 2) {
      std::string svg_path = out_path(c, "plot.svg");
      udf::write_svg_plot(res.points, &norm, svg_path);
      manifest.add_output(svg_path);
    }
    manifest.write(out_path(c, "manifest.json"));
    std::cout << "degenerate route: n=" << n << " unit distances=" << res.count
              << " (>= " << n * n / 4 << ")\n";
    return res.count >= n * n / 4 ? 0 : 1;
  }

  const char* cache_env = std::getenv("UDF_CACHE_DIR");
  std::string cache_dir = cache_env ? cache_env : "";
  std::vector<long long> ns = n_list.empty() ? std::vector<long long>{n} : n_list;
  long long n_max = *std::max_element(ns.begin(), ns.end());
  udf::SizeTable table = udf::build_size_table(norm, n_max, c.seed, c.tol, cache_dir);

  std::vector<udf::RatioRow> rows = udf::ratio_report(norm, ns, c.seed, table, c.tol);
  udf::Composition comp = udf::compose_pointset(norm, ns.back(), c.seed, table, c.tol);

  std::string csv_path = out_path(c, "points.csv");
  udf::write_pointset_csv(comp.points, csv_path);
  json cj = {{"schema", "udf/1"},
             {"type", "composition_report"},
             {"n", ns.back()},
             {"parts", comp.parts},
             {"certified_total", comp.certified_total},
             {"lemma_bound", udf::rat_to_json(comp.report.lemma_bound)}};
  std::string comp_path = out_path(c, "composition.json");
  udf::write_json_file(cj, comp_path);

  std::ostringstream csv;
  csv << "n,total,ratio,target,dip_flag\n";
  json ratios = json::array();
  for (const auto& row : rows) {
    csv << row.n << ',' << row.total << ',' << row.ratio << ',' << row.target << ','
        << (row.dip_flag ? 1 : 0) << '\n';
    ratios.push_back({{"n", row.n},
                      {"total", row.total},
                      {"ratio", row.ratio},
                      {"target", row.target},
                      {"dip_flag", row.dip_flag}});
  }
  std::string ratio_csv = out_path(c, "ratio_report.csv");
  std::string ratio_json = out_path(c, "ratio_report.json");
  udf::write_text_file(ratio_csv, csv.str());
  udf::write_json_file({{"schema", "udf/1"}, {"type", "ratio_report"}, {"rows", ratios}},
                       ratio_json);
  std::string table_path = out_path(c, "size_table.json");
  udf::write_json_file(table.to_json(), table_path);

  manifest.add_output(csv_path);
  manifest.add_output(comp_path);
  manifest.add_output(ratio_csv);
  manifest.add_output(ratio_json);
  manifest.add_output(table_path);
  if (svg && c.d == 2) {
    std::string svg_path = out_path(c, "plot.svg");
    udf::write_svg_plot(comp.points, &norm, svg_path);
    manifest.add_output(svg_path);
  }
  manifest.write(out_path(c, "manifest.json"));

  for (const auto& row : rows) {
    std::cout << "n=" << row.n << " total=" << row.total << " ratio=" << row.ratio
              << " target=" << row.target << (row.dip_flag ? "  [ratio dip]" : "")
              << "\n";
  }
  return 0;
}

int run_kdm(const CommonOpts& c, int d, int m, double delta, int trials) {
  if (d < 3) {
    std::cerr << "error: the local model requires d >= 3\n";
    return 2;
  }
  if (m < 1) {
    std::cerr << "error: m must be positive\n";
    return 2;
  }
  int n = (m + 1) / 2;  // K_{d,m} is realized inside K_{d,2n}
  udf::LocalModel model = udf::build_model(d, n);
  udf::Manifest manifest("kdm", model.body.spec_json(), c.seed, c.tol);
  manifest.set_param("d", d);
  manifest.set_param("m", m);
  manifest.set_param("n", n);
  manifest.set_param("delta", delta);
  manifest.set_param("trials", trials);

  udf::KdmCertificate cert = udf::solve_intersections(model, model.body, c.tol);
  bool verified = udf::verify_kdm(cert, model, model.body);
  bool persisted =
      udf::perturb_and_persist(model, cert, delta, trials, c.seed, c.tol);

  std::string cert_path = out_path(c, "kdm_certificate.json");
  udf::write_json_file(
      udf::certificate_to_json(cert, model, delta, trials, c.seed), cert_path);
  manifest.add_output(cert_path);
  manifest.write(out_path(c, "manifest.json"));

  std::cout << "K_{" << d << "," << 2 * n << "}: points=" << cert.points.size()
            << " verified=" << (verified ? "true" : "false")
            << " persisted(delta=" << delta << ")=" << (persisted ? "true" : "false")
            << "\n";
  return verified && persisted ? 0 : 1;
}

int run_verify_lemmas(const CommonOpts& c, const std::string& cases, int budget) {
  udf::Rng rng(c.seed);
  bool run_sumset = cases.find("sumset") != std::string::npos;
  bool run_grid = cases.find("gridbound") != std::string::npos;
  bool run_dedup = cases.find("dedup") != std::string::npos;
  if (!run_sumset && !run_grid && !run_dedup) {
    std::cerr << "error: --cases must mention sumset, gridbound or dedup\n";
    return 2;
  }

  if (run_sumset) {
    for (int it = 0; it < budget; ++it) {
      int d = 1 + static_cast<int>(rng.next_u64() % 3);
      int k = 2 + static_cast<int>(rng.next_u64() % 11);
      int cc = 2 + static_cast<int>(rng.next_u64() % static_cast<uint64_t>(k - 1));
      int xsize = 1 + static_cast<int>(rng.next_u64() % 50);
      std::vector<Eigen::VectorXi> X;
      for (int i = 0; i < xsize; ++i) {
        Eigen::VectorXi v(d);
        for (int j = 0; j < d; ++j) {
          v[j] = static_cast<int>(rng.next_u64() % 41) - 20;
        }
        X.push_back(v);
      }
      Eigen::VectorXi x(d);
      for (int j = 0; j < d; ++j) x[j] = static_cast<int>(rng.next_u64() % 21) - 10;
      if (!udf::sumset_ratio_check(X, x, k, cc)) {
        // shrink the instance before reporting it
        std::vector<Eigen::VectorXi> min_x = X;
        for (size_t i = 0; i < min_x.size();) {
          std::vector<Eigen::VectorXi> trial = min_x;
          trial.erase(trial.begin() + static_cast<long>(i));
          if (!trial.empty() && !udf::sumset_ratio_check(trial, x, k, cc)) {
            min_x = std::move(trial);
          } else {
            ++i;
          }
        }
        std::cerr << "sumset counterexample (minimized): |X|=" << min_x.size()
                  << " k=" << k << " c=" << cc << " x=" << x.transpose() << "\n";
        for (const auto& v : min_x) std::cerr << "  X: " << v.transpose() << "\n";
        return 1;
      }
    }
    std::cout << "sumset: " << budget << " instances ok\n";
  }

  if (run_grid) {
    for (int d = 2; d <= 4; ++d) {
      for (int m = 1; m <= 64; ++m) {
        udf::GapSpec spec;
        spec.d = d;
        spec.m = m;
        spec.ranges = udf::proposition_ranges(d, m);
        spec.codes = udf::proposition_codes(d, m);
        udf::Rat bound = udf::grid_bound(spec, 1);
        udf::Rat target = udf::proposition_lower_bound(d, m, 1);
        if (bound < target) {
          std::cerr << "gridbound counterexample: d=" << d << " m=" << m << "\n";
          return 1;
        }
      }
    }
    std::cout << "gridbound: exact-rational inequality holds for d<=4, m<=64\n";
  }

  if (run_dedup) {
    int done = 0;
    for (int it = 0; it < budget; ++it) {
      int d = 1 + static_cast<int>(rng.next_u64() % 3);
      int k = 2 + static_cast<int>(rng.next_u64() % 11);
      int cc = 2 + static_cast<int>(rng.next_u64() % static_cast<uint64_t>(k - 1));
      udf::GapSpec big;
      big.d = d;
      big.m = 1;
      udf::Vec gen(d);
      for (int j = 0; j < d; ++j) {
        gen[j] = static_cast<double>(static_cast<int>(rng.next_u64() % 9) - 4);
      }
      big.generators.push_back(gen);
      big.ranges.push_back(k);
      udf::GapSpec small = big;
      small.ranges[0] = k - cc;
      long long nb = udf::materialize(big, c.tol).size();
      long long nsml = small.ranges[0] <= 0 ? 0 : udf::materialize(small, c.tol).size();
      if (static_cast<long long>(k) * nsml < static_cast<long long>(k - cc) * nb) {
        std::cerr << "dedup counterexample: k=" << k << " c=" << cc
                  << " x=" << gen.transpose() << "\n";
        return 1;
      }
      ++done;
    }
    std::cout << "dedup: " << done << " materialized instances ok\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unit-distance constructions for arbitrary norms"};
  app.require_subcommand(1);

  CommonOpts c_construct, c_compose, c_kdm, c_verify;
  int m = 4;
  bool warmup = false, pairwise = false, svg = false;
  auto* construct = app.add_subcommand("construct", "build and count one GAP spec");
  add_common(construct, c_construct);
  construct->add_option("--m", m, "progression length")->check(CLI::Range(1, 64));
  construct->add_flag("--warmup", warmup, "use the 2-d slice construction");
  construct->add_flag("--pairwise", pairwise, "also run the quadratic oracle");
  construct->add_flag("--svg", svg, "emit a diagnostic plot (d = 2)");

  long long n = 1024;
  std::string n_list_arg;
  bool svg2 = false;
  auto* compose = app.add_subcommand("compose", "compose an n-point set");
  add_common(compose, c_compose);
  compose->add_option("--n", n, "number of points")
      ->check(CLI::PositiveNumber);
  compose->add_option("--n-list", n_list_arg,
                      "comma-separated n values for the ratio report");
  compose->add_flag("--svg", svg2, "emit a diagnostic plot (d = 2)");

  int kdm_d = 3, kdm_m = 4, trials = 5;
  double delta = 1e-3;
  auto* kdm = app.add_subcommand("kdm", "local K_{d,m} model with persistence");
  add_common(kdm, c_kdm, false);
  kdm->add_option("--d", kdm_d, "ambient dimension (>= 3)");
  kdm->add_option("--m", kdm_m, "right side of K_{d,m}");
  kdm->add_option("--delta", delta, "perturbation magnitude");
  kdm->add_option("--trials", trials, "perturbation trials");

  std::string cases = "sumset,gridbound,dedup";
  int budget = 1000;
  auto* verify = app.add_subcommand("verify-lemmas", "fuzz the counting lemmas");
  add_common(verify, c_verify, false);
  verify->add_option("--cases", cases, "subset of sumset,gridbound,dedup");
  verify->add_option("--budget", budget, "instances per fuzzed case")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (construct->parsed()) {
      return run_construct(c_construct, m, warmup, pairwise, svg);
    }
    if (compose->parsed()) {
      std::vector<long long> ns;
      if (!n_list_arg.empty()) {
        std::istringstream is(n_list_arg);
        std::string tok;
        while (std::getline(is, tok, ',')) ns.push_back(std::stoll(tok));
      }
      return run_compose(c_compose, n, ns, svg2);
    }
    if (kdm->parsed()) {
      return run_kdm(c_kdm, kdm_d, kdm_m, delta, trials);
    }
    if (verify->parsed()) {
      return run_verify_lemmas(c_verify, cases, budget);
    }
  } catch (const udf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return (e.code() == udf::Errc::InvalidArgument || e.code() == udf::Errc::ParseError)
               ? 2
               : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
