#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "pltower/metric.hpp"
#include "pltower/pl_map.hpp"
#include "pltower/tower.hpp"

namespace pltower {

// %.17g, so values round-trip exactly.
std::string format_double(double v);

nlohmann::json to_json(const PLMap& f);
nlohmann::json to_json(const PLMetric& m);

// {"knots": [[x,y],...]} or a family spec {"family": "tent", "slope": s},
// {"family": "asym_tent", "peak": c}, {"family": "deg6", "a": a},
// {"family": "logistic", "samples": n}. Throws ParseError.
PLMap map_from_json(const nlohmann::json& j);
// {"cmf": [[x,y],...]}, {"family": "lebesgue"} or
// {"family": "alpha_block", "alpha": a, "I0": [l0,r0], "I1": [l1,r1]}.
PLMetric metric_from_json(const nlohmann::json& j);

// Accepts inline JSON, a gallery name, or a path to a JSON file, in that order.
PLMap parse_map_spec(std::string_view spec);
PLMetric parse_metric_spec(std::string_view spec);

// Columns n,s_n,residual_f,residual_h,residual_H,knots_f,knots_H; one row per record.
void write_trace_csv(std::ostream& out, const TowerTrace& trace);
nlohmann::json trace_summary(const TowerTrace& trace);
nlohmann::json snapshots_to_json(const TowerTrace& trace);

}  // namespace pltower
