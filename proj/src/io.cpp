#include "ndcz/io.hpp"

#include <fstream>
#include <stdexcept>

namespace ndcz {

using nlohmann::json;

json lattice_to_json(const Lattice& lat) {
  json j;
  j["params"] = {{"alpha", lat.params.alpha}, {"ell", lat.params.ell},
                 {"A", lat.params.scale_base()},
                 {"paper_mode", lat.params.paper_mode}};
  j["k_min"] = lat.k_min;
  j["k_max"] = lat.k_max;
  j["designated_point"] = lat.designated_point;
  json cubes = json::array();
  for (const Cube& q : lat.cubes) {
    cubes.push_back({{"id", q.id},
                     {"generation", q.generation},
                     {"center_index", q.center_index},
                     {"radius", q.radius},
                     {"member_indices", q.members},
                     {"parent_id", q.parent},
                     {"is_doubling", q.doubling}});
  }
  j["cubes"] = std::move(cubes);
  json gens = json::array();
  for (std::size_t g = 0; g < lat.gens.size(); ++g)
    gens.push_back({{"k", lat.k_min + static_cast<int>(g)},
                    {"cube_ids", lat.gens[g]}});
  j["generations"] = std::move(gens);
  j["reports"] = {{"partition_ok", lat.reports.partition_ok},
                  {"nesting_ok", lat.reports.nesting_ok},
                  {"five_b_disjoint_ok", lat.reports.five_b_disjoint_ok},
                  {"radius_sandwich_ok", lat.reports.radius_sandwich_ok},
                  {"frac_ball_in_cube", lat.reports.frac_ball_in_cube},
                  {"frac_cube_in_28ball", lat.reports.frac_cube_in_28ball},
                  {"global_five_b_disjoint_frac",
                   lat.reports.global_five_b_disjoint_frac},
                  {"forcing_skipped_generations",
                   lat.reports.forcing_skipped_generations}};
  return j;
}

Lattice lattice_from_json(const json& j, const PointMeasure& mu) {
  Lattice lat;
  lat.params.alpha = j.at("params").at("alpha").get<double>();
  lat.params.ell = j.at("params").at("ell").get<int>();
  lat.params.A = j.at("params").at("A").get<double>();
  lat.params.paper_mode = j.at("params").at("paper_mode").get<bool>();
  lat.k_min = j.at("k_min").get<int>();
  lat.k_max = j.at("k_max").get<int>();
  lat.designated_point = j.at("designated_point").get<uint32_t>();
  for (const auto& cj : j.at("cubes")) {
    Cube q;
    q.id = cj.at("id").get<uint32_t>();
    q.generation = cj.at("generation").get<int>();
    q.center_index = cj.at("center_index").get<uint32_t>();
    q.radius = cj.at("radius").get<double>();
    q.members = cj.at("member_indices").get<std::vector<uint32_t>>();
    q.parent = cj.at("parent_id").get<int32_t>();
    q.doubling = cj.at("is_doubling").get<bool>();
    lat.cubes.push_back(std::move(q));
  }
  lat.gens.assign(lat.k_max - lat.k_min + 1, {});
  for (const auto& gj : j.at("generations")) {
    int k = gj.at("k").get<int>();
    lat.gens[k - lat.k_min] = gj.at("cube_ids").get<std::vector<uint32_t>>();
  }
  lat.kids.assign(lat.cubes.size(), {});
  for (const Cube& q : lat.cubes)
    if (q.parent >= 0) lat.kids[q.parent].push_back(q.id);
  lat.cube_of.assign(lat.gens.size(), std::vector<uint32_t>(mu.size(), 0));
  for (std::size_t g = 0; g < lat.gens.size(); ++g)
    for (uint32_t id : lat.gens[g])
      for (uint32_t i : lat.cubes[id].members) lat.cube_of[g][i] = id;
  if (j.contains("reports")) {
    const auto& r = j["reports"];
    lat.reports.partition_ok = r.value("partition_ok", false);
    lat.reports.nesting_ok = r.value("nesting_ok", false);
    lat.reports.five_b_disjoint_ok = r.value("five_b_disjoint_ok", false);
    lat.reports.radius_sandwich_ok = r.value("radius_sandwich_ok", false);
    lat.reports.frac_ball_in_cube = r.value("frac_ball_in_cube", 0.0);
    lat.reports.frac_cube_in_28ball = r.value("frac_cube_in_28ball", 0.0);
  }
  return lat;
}

Lattice load_lattice(const std::string& path, const PointMeasure& mu) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open lattice file: " + path);
  json j;
  in >> j;
  return lattice_from_json(j, mu);
}

json filtration_to_json(const PointMeasure& mu, const Lattice& lat,
                        const Filtration& f) {
  json j;
  json atoms = json::array();
  for (const SigmaAtom& a : f.atoms)
    atoms.push_back({{"id", a.id},
                     {"cube_id", a.cube_id},
                     {"level", a.level},
                     {"sigma_parent", a.sigma_parent},
                     {"gen_gap", a.gen_gap},
                     {"doubling", a.doubling},
                     {"members", a.members}});
  j["atoms"] = std::move(atoms);
  json levels = json::array();
  for (const auto& l : f.level_atoms) levels.push_back(l);
  j["levels"] = std::move(levels);
  j["depth"] = f.depth;
  j["all_atoms_doubling"] = f.all_doubling;
  j["c_iv"] = c_iv_constant(mu, lat, f);
  KeyDecayReport kd = key_decay_check(mu, lat, f);
  j["key_decay"] = {{"chains_checked", kd.chains_checked},
                    {"violations", kd.violations},
                    {"worst_ratio", kd.worst_ratio}};
  KRatioReport kr = k_ratio_report(mu, lat, f);
  j["k_coefficient_vs_level_gap"] = {
      {"min_ratio", kr.min_ratio}, {"max_ratio", kr.max_ratio},
      {"pairs", kr.pairs}};
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace ndcz
