#pragma once

// JSON exchange formats for lattices and filtrations. Exports are
// deterministic for a fixed (measure, params) input: keys are ordered and
// doubles use the shortest round-trip form.

#include <string>

#include "json.hpp"
#include "ndcz/filtration.hpp"
#include "ndcz/lattice.hpp"
#include "ndcz/measure.hpp"

namespace ndcz {

nlohmann::json lattice_to_json(const Lattice& lat);
Lattice lattice_from_json(const nlohmann::json& j, const PointMeasure& mu);
Lattice load_lattice(const std::string& path, const PointMeasure& mu);

nlohmann::json filtration_to_json(const PointMeasure& mu, const Lattice& lat,
                                  const Filtration& f);

void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace ndcz
