#include "ndcz/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "ndcz/filtration.hpp"
#include "ndcz/io.hpp"
#include "ndcz/matrixval.hpp"
#include "ndcz/operators.hpp"
#include "ndcz/rng.hpp"
#include "ndcz/sparse.hpp"
#include "ndcz/spaces.hpp"
#include "ndcz/testmeasures.hpp"

namespace ndcz {

using nlohmann::json;

LatticeParams RunConfig::lattice_params(int dim) const {
  LatticeParams p;
  p.paper_mode = mode == "paper";
  p.alpha = alpha;
  p.ell = ell;
  p.A = A;
  if (p.paper_mode) {
    if (alpha < 100.0)
      throw std::invalid_argument("paper mode requires alpha >= 100");
    p.ell = std::max(ell, dim + 1);
  }
  return p;
}

std::string RunConfig::kernel_name(const PointMeasure& mu) const {
  if (kernel != "auto") return kernel;
  return mu.dim() == 1 ? "cauchy" : "riesz:0";
}

PointMeasure open_measure(const std::string& spec, double growth_degree) {
  if (spec.rfind("bundled:", 0) == 0) return bundled_measure(spec.substr(8));
  return PointMeasure::load(spec, growth_degree);
}

namespace {

MatrixField random_hermitian_field(std::size_t n, int m, uint64_t seed) {
  Rng rng(seed);
  MatrixField f;
  f.m = m;
  f.npoints = n;
  f.values.resize(n * m * m);
  for (std::size_t i = 0; i < n; ++i) {
    CMat a(m);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) a.at(r, c) = Cplx(rng.gauss(), rng.gauss());
    CMat h = a + a.adjoint();
    f.set(i, h.scaled(0.5));
  }
  return f;
}

struct Asserted {
  json j = json::object();
  bool all_ok = true;
  void add(const std::string& name, bool ok) {
    j[name] = ok;
    all_ok = all_ok && ok;
  }
};

double integral(const PointMeasure& mu, const ScalarField& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) s += mu.weight(i) * f[i];
  return s;
}

double l2sq(const PointMeasure& mu, const ScalarField& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i)
    s += mu.weight(i) * f[i] * f[i];
  return s;
}

}  // namespace

std::string fmt_double(double v) { return json(v).dump(); }

int run_report_all(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  auto outpath = [&](const std::string& name) {
    return (fs::path(cfg.out_dir) / name).string();
  };

  Asserted asserted;
  json measured = json::object();

  PointMeasure mu = open_measure(cfg.measure, cfg.growth_degree);
  measured["growth_constant"] = mu.growth_constant();

  // ---- lattice
  Lattice lat = build_lattice(mu, cfg.lattice_params(mu.dim()));
  write_json_file(outpath("lattice.json"), lattice_to_json(lat));
  asserted.add("lattice_partition", lat.reports.partition_ok);
  asserted.add("lattice_nesting", lat.reports.nesting_ok);
  asserted.add("lattice_5b_disjoint", lat.reports.five_b_disjoint_ok);
  asserted.add("lattice_radius_sandwich", lat.reports.radius_sandwich_ok);
  measured["containment_ball_in_cube"] = lat.reports.frac_ball_in_cube;
  measured["containment_cube_in_28ball"] = lat.reports.frac_cube_in_28ball;

  // ---- filtration
  Filtration fil = build_filtration(mu, lat);
  write_json_file(outpath("filtration.json"),
                  filtration_to_json(mu, lat, fil));
  asserted.add("filtration_atoms_doubling", fil.all_doubling);
  {
    auto fields = random_fields(mu.size(), cfg.corpus_fields, cfg.seed);
    bool tower_ok = true, mass_ok = true, orth_ok = true, finest_ok = true;
    for (const auto& f : fields) {
      double ref = integral(mu, f);
      double l2 = l2sq(mu, f);
      for (int k = 0; k <= fil.depth; ++k) {
        ScalarField ek = cond_exp(fil, f, k);
        mass_ok = mass_ok && std::abs(integral(mu, ek) - ref) <=
                                 1e-12 * std::max(std::abs(ref), 1.0);
        for (int j : {k / 2, std::min(k + 1, fil.depth)}) {
          ScalarField ejk = cond_exp(fil, ek, j);
          ScalarField emin = cond_exp(fil, f, std::min(j, k));
          for (std::size_t i = 0; i < ek.size(); ++i)
            tower_ok = tower_ok && std::abs(ejk[i] - emin[i]) <=
                                       1e-12 * std::max(std::abs(emin[i]), 1.0);
        }
      }
      ScalarField fin = cond_exp(fil, f, fil.depth);
      for (std::size_t i = 0; i < f.size(); ++i)
        finest_ok = finest_ok && fin[i] == f[i];
      for (int k = 1; k <= fil.depth && k <= 4; ++k)
        for (int j = k + 1; j <= fil.depth && j <= k + 2; ++j) {
          ScalarField dk = mart_diff(fil, f, k);
          ScalarField dj = mart_diff(fil, f, j);
          double ip = 0.0;
          for (std::size_t i = 0; i < dk.size(); ++i)
            ip += mu.weight(i) * dk[i] * dj[i];
          orth_ok = orth_ok && std::abs(ip) <= 1e-10 * std::max(l2, 1e-300);
        }
    }
    asserted.add("filtration_tower", tower_ok);
    asserted.add("filtration_mass_conservation", mass_ok);
    asserted.add("filtration_orthogonality", orth_ok);
    asserted.add("filtration_finest_identity", finest_ok);
  }
  double civ = c_iv_constant(mu, lat, fil);
  measured["c_iv"] = civ;
  KeyDecayReport kd = key_decay_check(mu, lat, fil);
  measured["key_decay_worst_ratio"] = kd.worst_ratio;
  if (cfg.mode == "paper")
    asserted.add("key_decay", kd.violations == 0);

  // ---- norms
  {
    json norms;
    auto fields = random_fields(mu.size(), cfg.corpus_fields, cfg.seed + 1);
    bool mono_ok = true;
    double max_p2 = 0.0;
    for (const auto& f : fields) {
      double n1 = rbmo_sigma_norm(fil, f, 1.0).value;
      double n2 = rbmo_sigma_norm(fil, f, 2.0).value;
      mono_ok = mono_ok && n1 <= n2 * (1.0 + 1e-12);
      max_p2 = std::max(max_p2, n2);
    }
    asserted.add("norms_p_monotone", mono_ok);
    norms["max_sigma_p2"] = max_p2;

    // duality surrogate: integral of f g against h1(f) * sigma2(g)
    double dual_c = 0.0;
    for (std::size_t i = 0; i + 1 < std::min<std::size_t>(fields.size(), 40);
         i += 2) {
      double num = 0.0;
      for (std::size_t p = 0; p < mu.size(); ++p)
        num += mu.weight(p) * fields[i][p] * fields[i + 1][p];
      double den = h1_sigma_norm(fil, fields[i]) *
                   rbmo_sigma_norm(fil, fields[i + 1], 2.0).value;
      if (den > 0.0) dual_c = std::max(dual_c, std::abs(num) / den);
    }
    norms["duality_surrogate_constant"] = dual_c;

    // the family scan is quadratic in the ball count; skip it for irregular
    // measures whose distance set is too rich
    const bool family_ok =
        mu.size() <= 150 && mu.size() * mu.canonical_grid().size() <= 40000;
    if (family_ok) {
      double beta = std::pow(cfg.alpha, mu.dim() + 1);
      std::size_t nf = std::min<std::size_t>(fields.size(),
                                             mu.size() <= 100 ? 50 : 16);
      std::vector<ScalarField> sub(fields.begin(), fields.begin() + nf);
      InclusionReport inc = inclusion_ratio(mu, fil, sub, beta);
      norms["inclusion_max_ratio"] = inc.max_ratio;
      auto tol = rbmo_tolsa_norm(mu, sub.front(), beta);
      norms["tolsa_example"] = {{"value", tol.value},
                                {"star", tol.star},
                                {"dist", tol.dist}};
    } else {
      norms["inclusion_max_ratio"] = nullptr;  // family scan skipped at size
    }

    JNReport jn = john_nirenberg_report(fil, fields.front());
    norms["jn_rate"] = jn.rate;
    norms["jn_degenerate"] = jn.degenerate;
    {
      std::ofstream csv(outpath("jn.csv"));
      csv << "t,ratio\n";
      for (auto& [t, r] : jn.rows)
        csv << fmt_double(t) << "," << fmt_double(r) << "\n";
    }
    write_json_file(outpath("norms.json"), norms);
  }

  // ---- operators: kernel, CZ decomposition, weak (1,1)
  KernelSpec kspec = KernelSpec::parse(cfg.kernel_name(mu), mu);
  KernelValidation kv = validate_kernel(mu, kspec);
  asserted.add("kernel_size_condition", kv.size_ok);
  measured["kernel_size_constant"] = kv.size_constant;
  measured["kernel_lipschitz_ratio"] = kv.lipschitz_ratio;
  DiscreteOperator top = build_operator(mu, kspec);
  measured["operator_l2_norm"] = l2_norm_estimate(mu, top);

  {
    json czd;
    auto fields = random_fields(mu.size(), 20, cfg.seed + 2);
    bool recon_ok = true, mean_ok = true, level_ok = true;
    double worst_bad = 0.0, worst_good = 0.0, worst_good_sq = 0.0;
    for (auto& f : fields) {
      for (double& v : f) v = std::abs(v);
      double l1 = integral(mu, f);
      double base = l1 / mu.total_mass();
      for (double mult : {1.5, 3.0, 8.0}) {
        double lambda = base * mult;
        CZDecomposition d = cz_decompose(fil, f, lambda);
        double fmax = 0.0;
        for (double v : f) fmax = std::max(fmax, std::abs(v));
        ScalarField recon = d.good;
        for (const auto& phi : d.phis)
          for (std::size_t i = 0; i < recon.size(); ++i) recon[i] += phi[i];
        for (std::size_t i = 0; i < recon.size(); ++i)
          recon_ok =
              recon_ok && std::abs(recon[i] - f[i]) <= 1e-12 * std::max(fmax, 1.0);
        mean_ok = mean_ok && d.mean_zero_defect <= 1e-12;
        if (l1 > 0.0) {
          worst_bad = std::max(worst_bad, d.bad_l1 / l1);
          worst_good = std::max(worst_good, d.good_l2_sq / (lambda * l1));
          worst_good_sq =
              std::max(worst_good_sq, std::sqrt(d.good_l2_sq) / (lambda * l1));
        }
        // good part stays at or below lambda outside the maximal atoms
        std::vector<char> inside(mu.size(), 0);
        for (uint32_t a : d.maximal_atoms)
          for (uint32_t i : fil.atoms[a].members) inside[i] = 1;
        for (uint32_t a : d.maximal_atoms) {
          const SigmaAtom& parent = fil.atoms[fil.atoms[a].sigma_parent];
          double num = 0.0, den = 0.0;
          for (uint32_t i : parent.members)
            if (!inside[i]) {
              num += mu.weight(i) * d.good[i];
              den += mu.weight(i);
            }
          if (den > 0.0)
            level_ok = level_ok && num / den <= lambda * (1.0 + 1e-9);
        }
      }
    }
    asserted.add("czd_reconstruction", recon_ok);
    asserted.add("czd_mean_zero", mean_ok);
    czd["good_level_bound_ok"] = level_ok;
    czd["bad_l1_over_f_l1"] = worst_bad;
    czd["good_l2sq_over_lambda_l1"] = worst_good;
    czd["good_l2_over_lambda_l1"] = worst_good_sq;

    std::vector<double> lambdas;
    for (int t = -2; t <= 8; ++t)
      lambdas.push_back(std::ldexp(1.0, t));
    std::vector<ScalarField> wfields(fields.begin(), fields.begin() + 10);
    Weak11Report w11 = weak11_report(mu, top, wfields, lambdas);
    czd["weak11_max"] = w11.max_value;
    measured["weak11_max"] = w11.max_value;
    write_json_file(outpath("czd.json"), czd);
  }

  // ---- sparse domination + A2
  {
    json sparse;
    auto fields = random_fields(mu.size(), std::min<std::size_t>(
                                               cfg.corpus_fields, 50),
                                cfg.seed + 3);
    bool cert_ok = true, witness_ok = true, bound_ok = true;
    double eta_min = 1.0, cert_max = 0.0, ratio_max = 0.0;
    for (const auto& f : fields) {
      SparseDecomposition sd =
          sparse_decompose(mu, fil, f, fil.root, cfg.lambda_osc);
      if (sd.cert.defined_points > 0)
        cert_ok = cert_ok && sd.cert.min_ratio >= 1.0 - 1e-9;
      cert_max = std::max(cert_max, sd.cert.max_ratio);
      eta_min = std::min(eta_min, sd.family.eta);
      std::vector<char> seen(mu.size(), 0);
      for (const auto& w : sd.family.witness)
        for (uint32_t i : w) {
          if (seen[i]) witness_ok = false;
          seen[i] = 1;
        }
      DominationReport dom = dominate(mu, fil, top, f, fil.root, cfg.lambda_osc);
      bound_ok = bound_ok && !dom.failed;
      ratio_max = std::max(ratio_max, dom.max_ratio);
    }
    asserted.add("sparse_certificate", cert_ok);
    asserted.add("sparse_witness_disjoint", witness_ok);
    asserted.add("sparse_bound_nonvanishing", bound_ok);
    sparse["eta_min"] = eta_min;
    sparse["certificate_max"] = cert_max;
    sparse["domination_ratio_max"] = ratio_max;
    measured["domination_ratio_max"] = ratio_max;
    measured["sparse_eta_min"] = eta_min;

    // A2 sweep over step weights
    double ap = 2.0, bp = std::pow(ap, mu.dim()) * 2.0;
    {
      Weight ones{std::vector<double>(mu.size(), 1.0)};
      double a2_one = a2_characteristic(mu, ones, ap, bp).value;
      asserted.add("a2_unit_weight_is_one", a2_one == 1.0);
      Weight scaled = ones;
      for (double& v : scaled.values) v *= 4.0;
      asserted.add("a2_scaling_invariance",
                   a2_characteristic(mu, scaled, ap, bp).value == a2_one);
    }
    std::ofstream csv(outpath("a2_sweep.csv"));
    csv << "characteristic,op_norm,ratio2,ratio1\n";
    double sweep_max_ratio2 = 0.0;
    for (int e = 0; e <= 13; ++e) {
      Weight w;
      w.values.assign(mu.size(), 1.0);
      double c = std::ldexp(1.0, e);
      for (std::size_t i = 0; i < mu.size() / 2; ++i) w.values[i] = c;
      WeightedNormReport r = weighted_norm_experiment(mu, top, w, ap, bp);
      csv << fmt_double(r.a2) << "," << fmt_double(r.op_norm) << ","
          << fmt_double(r.ratio2) << "," << fmt_double(r.ratio1) << "\n";
      sweep_max_ratio2 = std::max(sweep_max_ratio2, r.ratio2);
      if (r.a2 > 100.0) break;
    }
    sparse["a2_sweep_max_ratio2"] = sweep_max_ratio2;
    measured["a2_sweep_max_ratio2"] = sweep_max_ratio2;
    write_json_file(outpath("sparse_report.json"), sparse);
  }

  // ---- matrix-valued endpoint
  {
    json mx;
    const int m = 3;
    CMat u(m);  // fixed rotation-flavored unitary factor
    u.at(0, 0) = Cplx(0.0, 1.0);
    u.at(1, 2) = 1.0;
    u.at(2, 1) = -1.0;
    MatrixKernel mk = MatrixKernel::scalar_times(kspec, u);
    measured["matrix_size_constant"] = matrix_size_constant(mu, mk);

    bool ks_ok = true, m1_ok = true;
    double ks_gap = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 20; ++t) {
      MatrixField f = random_hermitian_field(mu.size(), m, cfg.seed + 100 + t);
      KSReport ks = kadison_schwarz_check(fil, f);
      ks_ok = ks_ok && ks.ok;
      ks_gap = std::min(ks_gap, ks.min_gap);
    }
    asserted.add("matrix_kadison_schwarz", ks_ok);
    mx["ks_min_gap"] = ks_gap;

    // scalar consistency at m = 1
    {
      ScalarField f = random_field(mu.size(), cfg.seed + 7);
      MatrixField f1;
      f1.m = 1;
      f1.npoints = mu.size();
      for (double v : f) f1.values.emplace_back(v, 0.0);
      double a = rbmo_sigma_c_norm(fil, f1);
      double b = rbmo_sigma_norm(fil, f, 2.0).value;
      m1_ok = std::abs(a - b) <= 1e-12 * std::max(b, 1.0);
      asserted.add("matrix_scalar_consistency", m1_ok);
    }

    HormanderReport hr = hormander_report(mu, lat, mk);
    mx["hormander_max_sum"] = hr.max_sum;
    if (mu.size() <= 150) {
      ModuleBoundsReport mb = module_bounds(mu, mk);
      mx["module_col_norm"] = mb.col_norm;
      mx["module_row_norm"] = mb.row_norm;
    }

    double ratio_max = 0.0;
    json terms = json::array();
    MatrixField f = random_hermitian_field(mu.size(), m, cfg.seed + 11);
    std::size_t step = std::max<std::size_t>(1, fil.atoms.size() / 24);
    for (std::size_t a = 1; a < fil.atoms.size(); a += step) {
      if (fil.atoms[a].sigma_parent < 0) continue;
      TheoremDTerms td = theorem_d_terms(mu, lat, fil, mk, f,
                                         static_cast<uint32_t>(a));
      ratio_max = std::max(ratio_max, td.ratio);
      terms.push_back({{"atom", a},
                       {"local", td.local},
                       {"parent", td.parent},
                       {"annulus", td.annulus},
                       {"far", td.far},
                       {"total", td.total},
                       {"lhs", td.lhs},
                       {"ratio", td.ratio}});
    }
    mx["terms"] = std::move(terms);
    mx["endpoint_ratio_max"] = ratio_max;
    measured["matrix_endpoint_ratio_max"] = ratio_max;
    write_json_file(outpath("matrix_endpoint.json"), mx);
  }

  json summary;
  summary["config"] = {{"measure", cfg.measure},
                       {"mode", cfg.mode},
                       {"alpha", cfg.alpha},
                       {"ell", cfg.ell},
                       {"kernel", cfg.kernel_name(mu)},
                       {"seed", cfg.seed},
                       {"corpus_fields", cfg.corpus_fields},
                       {"lambda_osc", cfg.lambda_osc}};
  summary["asserted"] = asserted.j;
  summary["measured"] = measured;
  summary["pass"] = asserted.all_ok;
  write_json_file(outpath("summary.json"), summary);
  return asserted.all_ok ? 0 : 1;
}

}  // namespace ndcz
