#include "pltower/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "pltower/errors.hpp"
#include "pltower/gallery.hpp"

namespace pltower {

using nlohmann::json;

namespace {

std::vector<Knot> knots_from_json(const json& arr, const char* key) {
    if (!arr.is_array() || arr.size() < 2) throw ParseError(std::string("'") + key + "' must be an array of >= 2 points");
    std::vector<Knot> out;
    out.reserve(arr.size());
    for (const json& p : arr) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
            throw ParseError(std::string("'") + key + "' entries must be [x, y] number pairs");
        }
        out.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    return out;
}

json knots_to_json(const std::vector<Knot>& knots) {
    json arr = json::array();
    for (const Knot& k : knots) arr.push_back({k.x, k.y});
    return arr;
}

double number_field(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number()) throw ParseError(std::string("missing numeric field '") + key + "'");
    return j[key].get<double>();
}

Arc arc_field(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_array() || j[key].size() != 2 || !j[key][0].is_number() ||
        !j[key][1].is_number()) {
        throw ParseError(std::string("field '") + key + "' must be [lo, hi]");
    }
    try {
        return Arc(j[key][0].get<double>(), j[key][1].get<double>());
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
}

// Turns construction failures of well-formed JSON into ParseError; library
// errors (DegenerateCV and friends) pass through.
template <typename F>
auto guarded(F&& build) -> decltype(build()) {
    try {
        return build();
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
}

std::optional<json> try_parse(std::string_view text) {
    json j = json::parse(text.begin(), text.end(), nullptr, false);
    if (j.is_discarded()) return std::nullopt;
    return j;
}

std::string read_file(std::string_view path) {
    std::ifstream in{std::string(path)};
    if (!in) throw ParseError("cannot open '" + std::string(path) + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool looks_like_json(std::string_view s) {
    const auto pos = s.find_first_not_of(" \t\r\n");
    return pos != std::string_view::npos && (s[pos] == '{' || s[pos] == '[');
}

json load_spec(std::string_view spec) {
    if (looks_like_json(spec)) {
        if (auto j = try_parse(spec)) return *j;
        throw ParseError("malformed JSON");
    }
    const std::string text = read_file(spec);
    if (auto j = try_parse(text)) return *j;
    throw ParseError("malformed JSON in '" + std::string(spec) + "'");
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json to_json(const PLMap& f) { return json{{"knots", knots_to_json(f.knots())}}; }

json to_json(const PLMetric& m) { return json{{"cmf", knots_to_json(m.cmf())}}; }

PLMap map_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("map spec must be a JSON object");
    if (j.contains("knots")) {
        auto knots = knots_from_json(j["knots"], "knots");
        return guarded([&] { return PLMap(std::move(knots)); });
    }
    if (!j.contains("family") || !j["family"].is_string()) throw ParseError("map spec needs 'knots' or 'family'");
    const std::string family = j["family"].get<std::string>();
    if (family == "tent") return guarded([&] { return make_tent(number_field(j, "slope")); });
    if (family == "asym_tent") return guarded([&] { return make_asym_tent(number_field(j, "peak")); });
    if (family == "deg6") return guarded([&] { return make_deg6(number_field(j, "a")); });
    if (family == "logistic") {
        const double n = j.contains("samples") ? number_field(j, "samples") : 2048.0;
        if (n != std::floor(n) || n > 1e7) throw ParseError("'samples' must be an integer");
        return guarded([&] { return logistic_adapter(static_cast<int>(n)); });
    }
    throw ParseError("unknown map family '" + family + "'");
}

PLMetric metric_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("metric spec must be a JSON object");
    if (j.contains("cmf")) {
        auto knots = knots_from_json(j["cmf"], "cmf");
        return guarded([&] { return PLMetric(std::move(knots)); });
    }
    if (!j.contains("family") || !j["family"].is_string()) throw ParseError("metric spec needs 'cmf' or 'family'");
    const std::string family = j["family"].get<std::string>();
    if (family == "lebesgue") return PLMetric::lebesgue();
    if (family == "alpha_block") {
        const double alpha = number_field(j, "alpha");
        const Arc i0 = arc_field(j, "I0");
        const Arc i1 = arc_field(j, "I1");
        return guarded([&] { return alpha_block(alpha, i0, i1); });
    }
    throw ParseError("unknown metric family '" + family + "'");
}

PLMap parse_map_spec(std::string_view spec) {
    if (!looks_like_json(spec)) {
        if (auto named = guarded([&] { return gallery_map(spec); })) return *named;
    }
    return map_from_json(load_spec(spec));
}

PLMetric parse_metric_spec(std::string_view spec) {
    if (spec == "lebesgue") return PLMetric::lebesgue();
    return metric_from_json(load_spec(spec));
}

void write_trace_csv(std::ostream& out, const TowerTrace& trace) {
    out << "n,s_n,residual_f,residual_h,residual_H,knots_f,knots_H\n";
    for (const TowerRecord& r : trace.records) {
        out << r.n << ',' << format_double(r.slope) << ',' << format_double(r.residual_f) << ','
            << format_double(r.residual_h) << ',' << format_double(r.residual_H) << ',' << r.knots_f << ','
            << r.knots_H << '\n';
    }
}

json trace_summary(const TowerTrace& trace) {
    json j{{"converged", trace.converged},
           {"s_final", trace.s_final},
           {"stop_reason", to_string(trace.stop)},
           {"iterations", trace.iterations()},
           {"trailing_min_residual", trace.trailing_min_residual}};
    if (trace.oscillation_period) j["oscillation_period"] = *trace.oscillation_period;
    if (!trace.budget_message.empty()) j["budget_message"] = trace.budget_message;
    return j;
}

json snapshots_to_json(const TowerTrace& trace) {
    json arr = json::array();
    for (const TowerSnapshot& s : trace.snapshots) {
        arr.push_back({{"n", s.n},
                       {"f", knots_to_json(s.f.knots())},
                       {"g", knots_to_json(s.g.knots())},
                       {"h", knots_to_json(s.h.knots())},
                       {"H", knots_to_json(s.H.knots())}});
    }
    return arr;
}

}  // namespace pltower
