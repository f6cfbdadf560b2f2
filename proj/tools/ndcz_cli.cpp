// Command-line front end: lattice / filtration / spaces / operators /
// sparse / matrixval / report subcommands over measure and field files.
// Exit codes: 0 pass, 1 asserted-invariant failure, 2 usage or IO error.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "json.hpp"
#include "ndcz/filtration.hpp"
#include "ndcz/io.hpp"
#include "ndcz/matrixval.hpp"
#include "ndcz/operators.hpp"
#include "ndcz/report.hpp"
#include "ndcz/rng.hpp"
#include "ndcz/sparse.hpp"
#include "ndcz/spaces.hpp"
#include "ndcz/testmeasures.hpp"

using nlohmann::json;
using namespace ndcz;

namespace {

struct CommonArgs {
  RunConfig cfg;
  std::string lattice_path;
  std::string field_path;
  std::string weights_path;
  std::string out_path;
  std::string gen_name;
  double lambda = 0.0;
  int jobs = 0;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--measure", a.cfg.measure,
                  "measure file (JSON/CSV) or bundled:<name>");
  cmd->add_option("--growth-degree", a.cfg.growth_degree, "growth degree n");
  cmd->add_option("--mode", a.cfg.mode, "test|paper");
  cmd->add_option("--alpha", a.cfg.alpha, "lattice dilation parameter");
  cmd->add_option("--ell", a.cfg.ell, "beta = alpha^ell");
  cmd->add_option("--A", a.cfg.A, "scale base (0 = derived)");
  cmd->add_option("--kernel", a.cfg.kernel, "cauchy|riesz:<j>|custom:<path>");
  cmd->add_option("--seed", a.cfg.seed, "corpus seed");
  cmd->add_option("--fields", a.cfg.corpus_fields, "corpus size");
  cmd->add_option("--lambda-osc", a.cfg.lambda_osc,
                  "oscillation parameter in (1/4, 1/2)");
  cmd->add_option("--out", a.cfg.out_dir, "output directory");
  cmd->add_option("--jobs", a.jobs, "OpenMP thread count");
}

PointMeasure resolve_measure(const CommonArgs& a) {
  if (a.cfg.measure.empty())
    throw std::runtime_error("--measure is required");
  return open_measure(a.cfg.measure, a.cfg.growth_degree);
}

Lattice resolve_lattice(const CommonArgs& a, const PointMeasure& mu) {
  if (!a.lattice_path.empty()) return load_lattice(a.lattice_path, mu);
  return build_lattice(mu, a.cfg.lattice_params(mu.dim()));
}

json error_record(int code, const std::string& what) {
  return json{{"error", what}, {"exit", code}};
}

void apply_mode_checks(const CommonArgs& a, int dim) {
  if (a.cfg.mode != "test" && a.cfg.mode != "paper")
    throw std::invalid_argument("mode must be test or paper");
  (void)a.cfg.lattice_params(dim);  // throws on bad combinations
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nondoubling dyadic harmonic analysis toolkit"};
  app.require_subcommand(1);
  CommonArgs a;

  auto* gen = app.add_subcommand("gen", "write a bundled measure to a file");
  gen->add_option("--name", a.gen_name, "bundled measure name")->required();
  gen->add_option("--out", a.out_path, "output measure file")->required();

  auto* lattice = app.add_subcommand("lattice", "lattice commands");
  auto* lattice_build = lattice->add_subcommand("build", "build and export");
  add_common(lattice_build, a);

  auto* filtration = app.add_subcommand("filtration", "filtration commands");
  auto* filtration_verify =
      filtration->add_subcommand("verify", "build and verify invariants");
  add_common(filtration_verify, a);

  auto* spaces = app.add_subcommand("spaces", "norm computations");
  auto* spaces_norms = spaces->add_subcommand("norms", "norm report bundle");
  add_common(spaces_norms, a);
  spaces_norms->add_option("--lattice", a.lattice_path, "lattice JSON");
  spaces_norms->add_option("--field", a.field_path, "field file");

  auto* operators_cmd = app.add_subcommand("operators", "operator commands");
  auto* op_apply = operators_cmd->add_subcommand("apply", "apply T to a field");
  add_common(op_apply, a);
  op_apply->add_option("--field", a.field_path, "field file")->required();
  op_apply->add_option("--result", a.out_path, "output field file");
  auto* op_czd = operators_cmd->add_subcommand("czd", "CZ decomposition");
  add_common(op_czd, a);
  op_czd->add_option("--field", a.field_path, "field file");
  op_czd->add_option("--lambda", a.lambda, "decomposition height");
  auto* op_weak11 = operators_cmd->add_subcommand("weak11", "weak (1,1) table");
  add_common(op_weak11, a);

  auto* sparse_cmd = app.add_subcommand("sparse", "sparse domination / A2");
  auto* sp_dom = sparse_cmd->add_subcommand("dominate", "pointwise domination");
  add_common(sp_dom, a);
  sp_dom->add_option("--field", a.field_path, "field file");
  auto* sp_a2 = sparse_cmd->add_subcommand("a2-sweep", "weighted norm sweep");
  add_common(sp_a2, a);
  sp_a2->add_option("--weights", a.weights_path, "weight spec JSON");

  auto* mx = app.add_subcommand("matrixval", "operator-valued commands");
  auto* mx_endpoint = mx->add_subcommand("endpoint", "four-term report");
  add_common(mx_endpoint, a);
  mx_endpoint->add_option("--field", a.field_path, "matrix field JSON");

  auto* report = app.add_subcommand("report", "aggregate reports");
  auto* report_all = report->add_subcommand("all", "full pipeline");
  add_common(report_all, a);

  CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
  if (a.jobs > 0) omp_set_num_threads(a.jobs);
#endif

  try {
    if (gen->parsed()) {
      bundled_measure(a.gen_name).save(a.out_path);
      return 0;
    }

    if (lattice_build->parsed()) {
      PointMeasure mu = resolve_measure(a);
      apply_mode_checks(a, mu.dim());
      Lattice lat = build_lattice(mu, a.cfg.lattice_params(mu.dim()));
      std::filesystem::create_directories(a.cfg.out_dir);
      write_json_file(
          (std::filesystem::path(a.cfg.out_dir) / "lattice.json").string(),
          lattice_to_json(lat));
      bool ok = lat.reports.partition_ok && lat.reports.nesting_ok &&
                lat.reports.five_b_disjoint_ok &&
                lat.reports.radius_sandwich_ok;
      if (!ok) {
        std::cout << error_record(1, "lattice invariant failure").dump(2)
                  << "\n";
        return 1;
      }
      return 0;
    }

    if (filtration_verify->parsed()) {
      PointMeasure mu = resolve_measure(a);
      apply_mode_checks(a, mu.dim());
      Lattice lat = build_lattice(mu, a.cfg.lattice_params(mu.dim()));
      Filtration fil = build_filtration(mu, lat);
      std::filesystem::create_directories(a.cfg.out_dir);
      write_json_file(
          (std::filesystem::path(a.cfg.out_dir) / "filtration.json").string(),
          filtration_to_json(mu, lat, fil));
      bool ok = fil.all_doubling;
      auto fields = random_fields(mu.size(), a.cfg.corpus_fields, a.cfg.seed);
      for (const auto& f : fields) {
        double ref = 0.0;
        for (std::size_t i = 0; i < mu.size(); ++i)
          ref += mu.weight(i) * f[i];
        for (int k = 0; k <= fil.depth; ++k) {
          ScalarField ek = cond_exp(fil, f, k);
          double s = 0.0;
          for (std::size_t i = 0; i < mu.size(); ++i)
            s += mu.weight(i) * ek[i];
          ok = ok && std::abs(s - ref) <= 1e-12 * std::max(std::abs(ref), 1.0);
        }
      }
      if (a.cfg.mode == "paper")
        ok = ok && key_decay_check(mu, lat, fil).violations == 0;
      if (!ok) {
        std::cout << error_record(1, "filtration invariant failure").dump(2)
                  << "\n";
        return 1;
      }
      return 0;
    }

    if (spaces_norms->parsed()) {
      PointMeasure mu = resolve_measure(a);
      apply_mode_checks(a, mu.dim());
      Lattice lat = resolve_lattice(a, mu);
      Filtration fil = build_filtration(mu, lat);
      ScalarField f = a.field_path.empty()
                          ? random_field(mu.size(), a.cfg.seed)
                          : load_field(a.field_path, mu.size());
      json bundle;
      auto r1 = rbmo_sigma_norm(fil, f, 1.0);
      auto r2 = rbmo_sigma_norm(fil, f, 2.0);
      bundle["sigma_p1"] = {{"value", r1.value},
                            {"witness_atom", r1.witness_atom}};
      bundle["sigma_p2"] = {{"value", r2.value},
                            {"witness_atom", r2.witness_atom}};
      double beta = std::pow(a.cfg.alpha, mu.dim() + 1);
      if (mu.size() <= 150) {
        auto t = rbmo_tolsa_norm(mu, f, beta);
        bundle["tolsa"] = {{"value", t.value},
                           {"star", t.star},
                           {"dist", t.dist},
                           {"star_center", t.star_center},
                           {"star_radius", t.star_radius}};
      }
      bundle["h1"] = h1_sigma_norm(fil, f);
      try {
        JNReport jn = john_nirenberg_report(fil, f);
        bundle["jn_rate"] = jn.rate;
        bundle["jn_degenerate"] = jn.degenerate;
        std::filesystem::create_directories(a.cfg.out_dir);
        std::ofstream csv(
            (std::filesystem::path(a.cfg.out_dir) / "jn.csv").string());
        csv << "t,ratio\n";
        for (auto& [t, r] : jn.rows)
          csv << fmt_double(t) << "," << fmt_double(r) << "\n";
      } catch (const std::invalid_argument&) {
        bundle["jn_rate"] = nullptr;
      }
      std::filesystem::create_directories(a.cfg.out_dir);
      write_json_file(
          (std::filesystem::path(a.cfg.out_dir) / "norms.json").string(),
          bundle);
      std::cout << bundle.dump(2) << "\n";
      return 0;
    }

    if (op_apply->parsed()) {
      PointMeasure mu = resolve_measure(a);
      KernelSpec k = KernelSpec::parse(a.cfg.kernel_name(mu), mu);
      DiscreteOperator t = build_operator(mu, k);
      ScalarField f = load_field(a.field_path, mu.size());
      ScalarField tf = ndcz::apply(t, f);
      if (!a.out_path.empty())
        save_field(a.out_path, tf);
      else
        std::cout << json(tf).dump(2) << "\n";
      return 0;
    }

    if (op_czd->parsed()) {
      PointMeasure mu = resolve_measure(a);
      apply_mode_checks(a, mu.dim());
      Lattice lat = build_lattice(mu, a.cfg.lattice_params(mu.dim()));
      Filtration fil = build_filtration(mu, lat);
      ScalarField f = a.field_path.empty()
                          ? random_field(mu.size(), a.cfg.seed)
                          : load_field(a.field_path, mu.size());
      // signed input: decompose positive and negative parts separately
      ScalarField fp(f.size(), 0.0), fn(f.size(), 0.0);
      double l1 = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) {
        fp[i] = std::max(f[i], 0.0);
        fn[i] = std::max(-f[i], 0.0);
        l1 += mu.weight(i) * std::abs(f[i]);
      }
      double lambda = a.lambda > 0.0 ? a.lambda : 2.0 * l1 / mu.total_mass();
      json out;
      for (auto& [name, part] : {std::pair<std::string, ScalarField*>{
                                     "positive_part", &fp},
                                 {"negative_part", &fn}}) {
        double pl1 = 0.0;
        for (std::size_t i = 0; i < part->size(); ++i)
          pl1 += mu.weight(i) * (*part)[i];
        if (pl1 == 0.0) {
          out[name] = nullptr;
          continue;
        }
        if (!(lambda > pl1 / mu.total_mass())) {
          out[name] = {{"skipped", "lambda at or below the global average"}};
          continue;
        }
        CZDecomposition d = cz_decompose(fil, *part, lambda);
        out[name] = {{"lambda", d.lambda},
                     {"maximal_atoms", d.maximal_atoms},
                     {"bad_l1", d.bad_l1},
                     {"good_l2_sq", d.good_l2_sq},
                     {"mean_zero_defect", d.mean_zero_defect}};
      }
      std::filesystem::create_directories(a.cfg.out_dir);
      write_json_file(
          (std::filesystem::path(a.cfg.out_dir) / "czd.json").string(), out);
      std::cout << out.dump(2) << "\n";
      return 0;
    }

    if (op_weak11->parsed()) {
      PointMeasure mu = resolve_measure(a);
      KernelSpec k = KernelSpec::parse(a.cfg.kernel_name(mu), mu);
      DiscreteOperator t = build_operator(mu, k);
      auto fields = random_fields(mu.size(), a.cfg.corpus_fields, a.cfg.seed);
      std::vector<double> lambdas;
      for (int e = -2; e <= 8; ++e) lambdas.push_back(std::ldexp(1.0, e));
      Weak11Report rep = weak11_report(mu, t, fields, lambdas);
      json out;
      out["max"] = rep.max_value;
      std::cout << out.dump(2) << "\n";
      return 0;
    }

    if (sp_dom->parsed()) {
      PointMeasure mu = resolve_measure(a);
      apply_mode_checks(a, mu.dim());
      Lattice lat = build_lattice(mu, a.cfg.lattice_params(mu.dim()));
      Filtration fil = build_filtration(mu, lat);
      KernelSpec k = KernelSpec::parse(a.cfg.kernel_name(mu), mu);
      DiscreteOperator t = build_operator(mu, k);
      ScalarField f = a.field_path.empty()
                          ? random_field(mu.size(), a.cfg.seed)
                          : load_field(a.field_path, mu.size());
      DominationReport rep =
          dominate(mu, fil, t, f, fil.root, a.cfg.lambda_osc);
      json out = {{"max_ratio", rep.max_ratio},
                  {"failed", rep.failed},
                  {"witness_point", rep.witness_point},
                  {"family_size", rep.family.atoms.size()},
                  {"eta", rep.family.eta}};
      std::filesystem::create_directories(a.cfg.out_dir);
      write_json_file((std::filesystem::path(a.cfg.out_dir) /
                       "sparse_report.json")
                          .string(),
                      out);
      std::cout << out.dump(2) << "\n";
      return rep.failed ? 1 : 0;
    }

    if (sp_a2->parsed()) {
      PointMeasure mu = resolve_measure(a);
      KernelSpec k = KernelSpec::parse(a.cfg.kernel_name(mu), mu);
      DiscreteOperator t = build_operator(mu, k);
      double ap = 2.0, bp = std::pow(ap, mu.dim()) * 2.0;
      std::vector<std::vector<double>> weights;
      if (!a.weights_path.empty()) {
        std::ifstream in(a.weights_path);
        if (!in)
          throw std::runtime_error("cannot open weights: " + a.weights_path);
        json spec;
        in >> spec;
        if (spec.contains("weights")) {
          for (const auto& w : spec["weights"])
            weights.push_back(w.get<std::vector<double>>());
        } else if (spec.contains("step_contrasts")) {
          for (double c : spec["step_contrasts"]) {
            std::vector<double> w(mu.size(), 1.0);
            for (std::size_t i = 0; i < mu.size() / 2; ++i) w[i] = c;
            weights.push_back(std::move(w));
          }
        }
      } else {
        for (int e = 0; e <= 13; ++e) {
          std::vector<double> w(mu.size(), 1.0);
          for (std::size_t i = 0; i < mu.size() / 2; ++i)
            w[i] = std::ldexp(1.0, e);
          weights.push_back(std::move(w));
        }
      }
      std::filesystem::create_directories(a.cfg.out_dir);
      std::ofstream csv(
          (std::filesystem::path(a.cfg.out_dir) / "a2_sweep.csv").string());
      csv << "characteristic,op_norm,ratio2,ratio1\n";
      for (const auto& wv : weights) {
        Weight w{wv};
        WeightedNormReport r = weighted_norm_experiment(mu, t, w, ap, bp);
        csv << fmt_double(r.a2) << "," << fmt_double(r.op_norm) << ","
            << fmt_double(r.ratio2) << "," << fmt_double(r.ratio1) << "\n";
      }
      return 0;
    }

    if (mx_endpoint->parsed()) {
      PointMeasure mu = resolve_measure(a);
      apply_mode_checks(a, mu.dim());
      Lattice lat = build_lattice(mu, a.cfg.lattice_params(mu.dim()));
      Filtration fil = build_filtration(mu, lat);
      KernelSpec k = KernelSpec::parse(a.cfg.kernel_name(mu), mu);
      MatrixField f = a.field_path.empty()
                          ? MatrixField{}
                          : MatrixField::load(a.field_path, mu.size());
      if (a.field_path.empty())
        throw std::runtime_error("matrixval endpoint needs --field");
      MatrixKernel mk =
          MatrixKernel::scalar_times(k, CMat::identity(f.m));
      json out;
      out["size_constant"] = matrix_size_constant(mu, mk);
      json terms = json::array();
      double ratio_max = 0.0;
      for (std::size_t at = 0; at < fil.atoms.size(); ++at) {
        if (fil.atoms[at].sigma_parent < 0) continue;
        TheoremDTerms td = theorem_d_terms(mu, lat, fil, mk, f,
                                           static_cast<uint32_t>(at));
        ratio_max = std::max(ratio_max, td.ratio);
        terms.push_back({{"atom", at},
                         {"local", td.local},
                         {"parent", td.parent},
                         {"annulus", td.annulus},
                         {"far", td.far},
                         {"total", td.total},
                         {"lhs", td.lhs},
                         {"ratio", td.ratio}});
      }
      out["terms"] = std::move(terms);
      out["ratio_max"] = ratio_max;
      std::filesystem::create_directories(a.cfg.out_dir);
      write_json_file((std::filesystem::path(a.cfg.out_dir) /
                       "matrix_endpoint.json")
                          .string(),
                      out);
      std::cout << out.dump(2) << "\n";
      return 0;
    }

    if (report_all->parsed()) {
      PointMeasure mu = resolve_measure(a);
      apply_mode_checks(a, mu.dim());
      return run_report_all(a.cfg);
    }
  } catch (const std::invalid_argument& e) {
    std::cout << error_record(2, e.what()).dump(2) << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cout << error_record(2, e.what()).dump(2) << "\n";
    return 2;
  }
  return 2;
}
