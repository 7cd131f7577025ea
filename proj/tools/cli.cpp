#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pltower/constant_slope.hpp"
#include "pltower/entropy.hpp"
#include "pltower/errors.hpp"
#include "pltower/gallery.hpp"
#include "pltower/io.hpp"
#include "pltower/tower.hpp"
#include "pltower/transfer.hpp"

namespace pltower::cli {

using nlohmann::json;

namespace {

struct Result {
    int code = kOk;
    std::string out;  // text for the caller's stdout
    std::string err;  // diagnostics
};

struct Common {
    std::vector<std::string> maps;
    std::string out;
    std::size_t knot_budget = 0;
    double approx_tol = 0.0;
    int jobs = 1;

    [[nodiscard]] KnotPolicy policy() const { return {knot_budget, approx_tol}; }
};

Result failure(int code, const std::string& what) { return {code, "", "pltower: error: " + what + "\n"}; }

template <typename F>
Result guarded(F&& task) {
    try {
        return task();
    } catch (const ParseError& e) {
        return failure(kParse, e.what());
    } catch (const DegenerateCV& e) {
        return failure(kDegenerate, e.what());
    } catch (const ZeroSlopeSegment& e) {
        return failure(kDegenerate, e.what());
    } catch (const KnotBudgetExceeded& e) {
        return failure(kBudget, e.what());
    } catch (const Error& e) {
        return failure(kPrecondition, e.what());
    } catch (const std::invalid_argument& e) {
        return failure(kPrecondition, e.what());
    } catch (const std::exception& e) {
        return failure(kFailure, e.what());
    }
}

// Runs tasks on up to `jobs` threads; results keep their input order.
std::vector<Result> run_all(std::size_t n, int jobs, const std::function<Result(std::size_t)>& task) {
    std::vector<Result> results(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) results[i] = guarded([&] { return task(i); });
    };
    const std::size_t threads = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    return results;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void add_common(CLI::App* cmd, Common& c, bool batch) {
    if (batch) {
        cmd->add_option("--map", c.maps, "Map spec: inline JSON, gallery name or JSON file (repeatable)")->required();
        cmd->add_option("--jobs", c.jobs, "Worker threads across map specs")->check(CLI::PositiveNumber);
    }
    cmd->add_option("--out", c.out, "Output file (JSON) or prefix (CSV + JSON)");
    cmd->add_option("--knot-budget", c.knot_budget, "Knot budget; 0 uses the default");
    cmd->add_option("--approx-tol", c.approx_tol, "Lossy sup-norm compression tolerance")->check(CLI::NonNegativeNumber);
}

// Combines one JSON document per map into the command's output.
int emit_json(const Common& c, const std::vector<Result>& results, std::ostream& out, std::ostream& err) {
    int code = kOk;
    json docs = json::array();
    for (const Result& r : results) {
        if (code == kOk) code = r.code;
        err << r.err;
        docs.push_back(r.out.empty() ? json{{"error", r.err}, {"exit_code", r.code}} : json::parse(r.out));
    }
    const std::string text = dump(results.size() == 1 ? docs.front() : docs);
    if (results.size() == 1 && results.front().out.empty()) return code;
    if (c.out.empty()) {
        out << text;
    } else {
        write_file(c.out, text);
    }
    return code;
}

Result linearize(const std::string& spec) {
    const PLMap f = parse_map_spec(spec);
    const ConstantSlopeModel model = constant_slope_model(critical_values(f));
    const PLMap h = factor_homeomorphism(f, model.map);
    return {kOk, json{{"s", model.slope}, {"g", to_json(model.map)}, {"h", to_json(h)}}.dump(), ""};
}

struct TowerArgs {
    int iters = 200;
    double stop_tol = 1e-10;
    bool snapshots = false;
    bool cross_check = false;
};

Result tower(const std::string& spec, const Common& c, const TowerArgs& a, const std::string& prefix) {
    const PLMap f = parse_map_spec(spec);
    TowerOptions opt;
    opt.knots = c.policy();
    opt.keep_snapshots = a.snapshots;
    opt.cross_check_metric = a.cross_check;
    const TowerTrace trace = run_tower(f, a.iters, a.stop_tol, opt);

    std::ostringstream csv;
    write_trace_csv(csv, trace);
    json summary = trace_summary(trace);
    if (a.cross_check) {
        double gap = 0.0;
        for (const TowerRecord& r : trace.records) gap = std::max(gap, r.metric_gap);
        summary["max_metric_gap"] = gap;
    }
    Result r;
    r.code = trace.stop == StopReason::KnotBudget ? kBudget : kOk;
    if (trace.stop == StopReason::KnotBudget) r.err = "pltower: warning: " + trace.budget_message + "\n";
    if (prefix.empty()) {
        r.out = csv.str();
        r.err += summary.dump() + "\n";
    } else {
        write_file(prefix + ".csv", csv.str());
        write_file(prefix + ".json", dump(summary));
        if (a.snapshots) write_file(prefix + "_snapshots.json", dump(snapshots_to_json(trace)));
    }
    return r;
}

struct EntropyArgs {
    std::string method = "all";
    int terms = 400;
    int depth = 60;
    int n_max = 16;
};

json kneading_json(const PLMap& f, const EntropyArgs& a) {
    const KneadingData kd = kneading_sequence(f, a.terms);
    const KneadingEntropy e = kneading_entropy(kd);
    json flags = json::array();
    if (e.zero_entropy) flags.push_back("zero_entropy");
    if (kd.flipped) flags.push_back("flipped");
    if (kd.period) flags.push_back("periodic_kneading");
    return {{"method", "kneading"}, {"h", e.h}, {"err_bound", e.err_bound}, {"flags", flags}};
}

json hofbauer_json(const PLMap& f, const EntropyArgs& a) {
    const HofbauerEntropy e = hofbauer_entropy(hofbauer_build(f, a.depth));
    json flags = json::array();
    if (e.truncated) flags.push_back("truncated");
    if (!e.converged) flags.push_back("not_converged");
    // A truncated tower only gives a lower bound.
    const json bound = e.truncated || !e.converged ? json(nullptr) : json(1e-10 / std::max(e.rho, 1.0));
    return {{"method", "hofbauer"}, {"h", e.h}, {"err_bound", bound}, {"flags", flags}, {"iterations", e.iterations}};
}

json growth_json(const PLMap& f, const EntropyArgs& a, const KnotPolicy& policy) {
    const GrowthEntropy e = growth_entropy(f, a.n_max, policy);
    return {{"method", "growth"},
            {"h", e.h},
            {"err_bound", e.gap},
            {"flags", json::array()},
            {"h_laps", e.h_laps},
            {"h_variation", e.h_variation}};
}

Result entropy(const std::string& spec, const Common& c, const EntropyArgs& a) {
    const PLMap f = parse_map_spec(spec);
    json doc;
    if (a.method == "kneading") {
        doc = kneading_json(f, a);
    } else if (a.method == "hofbauer") {
        doc = hofbauer_json(f, a);
    } else if (a.method == "growth") {
        doc = growth_json(f, a, c.policy());
    } else {
        json estimates = json::object();
        json flags = json::array();
        if (f.degree() == 2) {
            estimates["kneading"] = kneading_json(f, a);
        } else {
            flags.push_back("kneading_skipped_not_unimodal");
        }
        estimates["hofbauer"] = hofbauer_json(f, a);
        estimates["growth"] = growth_json(f, a, c.policy());
        double gap = 0.0;
        for (auto i = estimates.begin(); i != estimates.end(); ++i) {
            for (auto j = std::next(i); j != estimates.end(); ++j) {
                gap = std::max(gap, std::abs((*i)["h"].get<double>() - (*j)["h"].get<double>()));
            }
        }
        const json& primary = estimates.contains("kneading") ? estimates["kneading"] : estimates["hofbauer"];
        doc = {{"method", "all"},
               {"h", primary["h"]},
               {"err_bound", primary["err_bound"]},
               {"flags", flags},
               {"max_gap", gap},
               {"estimates", estimates}};
    }
    return {kOk, doc.dump(), ""};
}

Result spectrum(const std::string& spec, const Common& c, int iters) {
    const PLMap f = parse_map_spec(spec);
    json doc;
    if (auto m = markov_matrix(f)) {
        const LeadingEigen e = leading_eigen(*m);
        doc = {{"lambda", e.lambda}, {"markov", true}, {"partition_size", m->size()}, {"gap_ratio", nullable(e.gap_ratio)}};
    } else {
        // Growth of <L^n 1, Lebesgue> on refining partitions.
        StepFunction phi = StepFunction::constant(1.0);
        const PLMetric leb = PLMetric::lebesgue();
        double prev = pairing(phi, leb), lambda = 0.0;
        for (int k = 1; k <= iters; ++k) {
            phi = apply_transfer(f, phi, 1, c.policy());
            const double cur = pairing(phi, leb);
            lambda = cur / prev;
            prev = cur;
        }
        doc = {{"lambda", lambda}, {"markov", false}, {"partition_size", phi.cells()}, {"gap_ratio", nullptr}};
    }
    return {kOk, doc.dump(), ""};
}

Result deg6_report(double a, int iters, const Common& c) {
    const Deg6Report r = deg6_experiment(a, iters, c.policy());
    std::ostringstream csv;
    csv << "N,mass_left,closed_form,pass\n";
    bool all_pass = true;
    for (std::size_t n = 0; n < r.mass_left.size(); ++n) {
        const double expected = n % 2 == 0 ? a : 1.0 - a;
        const bool pass = std::abs(r.mass_left[n] - expected) <= 1e-10;
        all_pass = all_pass && pass;
        csv << n << ',' << format_double(r.mass_left[n]) << ',' << format_double(expected) << ',' << (pass ? 1 : 0)
            << '\n';
    }
    json summary{{"experiment", "deg6"},
                 {"a", a},
                 {"closed_form_pass", all_pass},
                 {"tower", trace_summary(r.tower)}};
    if (r.tower.oscillation_period) summary["oscillation_period"] = *r.tower.oscillation_period;
    Result res{kOk, csv.str(), ""};
    if (c.out.empty()) {
        res.err = summary.dump() + "\n";
    } else {
        write_file(c.out + ".csv", res.out);
        write_file(c.out + ".json", dump(summary));
        res.out.clear();
    }
    return res;
}

Result renorm_report(double s, double alpha, int iters, int tower_steps, const Common& c) {
    RenormOptions opt;
    opt.tower_steps = tower_steps;
    opt.knots = c.policy();
    const RenormReport r = renorm_alpha_experiment(s, alpha, iters, opt);
    std::ostringstream csv;
    csv << "k,mass_I0,closed_form,pass\n";
    bool all_pass = true;
    for (std::size_t k = 0; k < r.mass_i0.size(); ++k) {
        const bool pass = std::abs(r.mass_i0[k] - r.closed_form[k]) <= 1e-8;
        all_pass = all_pass && pass;
        csv << k << ',' << format_double(r.mass_i0[k]) << ',' << format_double(r.closed_form[k]) << ','
            << (pass ? 1 : 0) << '\n';
    }
    json summary{{"experiment", "renorm"},
                 {"slope", s},
                 {"alpha", alpha},
                 {"I0", {r.intervals.i0.lo(), r.intervals.i0.hi()}},
                 {"I1", {r.intervals.i1.lo(), r.intervals.i1.hi()}},
                 {"closed_form_pass", all_pass},
                 {"max_closed_form_error", r.max_closed_form_error},
                 {"even_limit", r.even_limit},
                 {"odd_limit", r.odd_limit},
                 {"limits_agree", std::abs(r.even_limit - r.odd_limit) <= 1e-6},
                 {"balanced_alpha", r.balanced_alpha},
                 {"H_at_p", r.H_at_p},
                 {"fixed_points", r.fixed_points},
                 {"tower", trace_summary(r.tower)}};
    Result res{kOk, csv.str(), ""};
    if (c.out.empty()) {
        res.err = summary.dump() + "\n";
    } else {
        write_file(c.out + ".csv", res.out);
        write_file(c.out + ".json", dump(summary));
        res.out.clear();
    }
    return res;
}

std::string batch_prefix(const Common& c, std::size_t i) {
    if (c.out.empty()) return "";
    return c.maps.size() == 1 ? c.out : c.out + "_" + std::to_string(i);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Piecewise-linear interval maps: constant-slope towers, entropy and transfer operators", "pltower"};
    app.require_subcommand(1);

    Common lin, tow, ent, tra, cex;

    auto* cmd_lin = app.add_subcommand("linearize", "Factor f = g∘h with g of constant slope");
    add_common(cmd_lin, lin, true);

    TowerArgs targs;
    auto* cmd_tow = app.add_subcommand("tower", "Iterate the tower operator and write its trace");
    add_common(cmd_tow, tow, true);
    cmd_tow->add_option("--iters", targs.iters, "Maximum iterations")->check(CLI::PositiveNumber);
    cmd_tow->add_option("--stop-tol", targs.stop_tol, "Stop once sup|f_n - f_(n-1)| is below this");
    cmd_tow->add_flag("--snapshots", targs.snapshots, "Also dump every f_n, g_n, h_n, H_n (needs --out)");
    cmd_tow->add_flag("--cross-check", targs.cross_check, "Recompute H_n from the metric iteration");

    EntropyArgs eargs;
    auto* cmd_ent = app.add_subcommand("entropy", "Estimate topological entropy");
    add_common(cmd_ent, ent, true);
    cmd_ent->add_option("--method", eargs.method)->check(CLI::IsMember({"kneading", "hofbauer", "growth", "all"}));
    cmd_ent->add_option("--terms", eargs.terms, "Kneading terms")->check(CLI::Range(8, 1000000));
    cmd_ent->add_option("--depth", eargs.depth, "Hofbauer tower depth")->check(CLI::PositiveNumber);
    cmd_ent->add_option("--n-max", eargs.n_max, "Growth estimator iterations")->check(CLI::Range(4, 64));

    int spec_iters = 12;
    auto* cmd_tra = app.add_subcommand("transfer", "Transfer operator tools");
    cmd_tra->require_subcommand(1);
    auto* cmd_spec = cmd_tra->add_subcommand("spectrum", "Leading eigenvalue of the transfer operator");
    add_common(cmd_spec, tra, true);
    cmd_spec->add_option("--iters", spec_iters, "Refinements for non-Markov maps")->check(CLI::PositiveNumber);

    auto* cmd_cex = app.add_subcommand("counterexample", "Non-convergence experiments");
    cmd_cex->require_subcommand(1);
    double a = 0.4;
    int deg6_iters = 12;
    auto* cmd_deg6 = cmd_cex->add_subcommand("deg6", "Degree-6 interval exchange");
    add_common(cmd_deg6, cex, false);
    cmd_deg6->add_option("--a", a, "Exchange point")->check(CLI::Range(0.0, 1.0));
    cmd_deg6->add_option("--iters", deg6_iters)->check(CLI::PositiveNumber);
    double slope = 1.3, alpha = 0.5;
    int renorm_iters = 60, tower_steps = 24;
    auto* cmd_ren = cmd_cex->add_subcommand("renorm", "Renormalizable tent with a two-block initial metric");
    add_common(cmd_ren, cex, false);
    cmd_ren->add_option("--slope", slope);
    cmd_ren->add_option("--alpha", alpha)->check(CLI::Range(0.0, 1.0));
    cmd_ren->add_option("--iters", renorm_iters)->check(CLI::PositiveNumber);
    cmd_ren->add_option("--tower-steps", tower_steps)->check(CLI::NonNegativeNumber);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kParse;
    }

    try {
        if (*cmd_lin) {
            auto rs = run_all(lin.maps.size(), lin.jobs, [&](std::size_t i) { return linearize(lin.maps[i]); });
            return emit_json(lin, rs, out, err);
        }
        if (*cmd_ent) {
            auto rs = run_all(ent.maps.size(), ent.jobs, [&](std::size_t i) { return entropy(ent.maps[i], ent, eargs); });
            return emit_json(ent, rs, out, err);
        }
        if (*cmd_spec) {
            auto rs = run_all(tra.maps.size(), tra.jobs,
                              [&](std::size_t i) { return spectrum(tra.maps[i], tra, spec_iters); });
            return emit_json(tra, rs, out, err);
        }
        if (*cmd_tow) {
            if (tow.maps.size() > 1 && tow.out.empty()) {
                err << "pltower: error: batch tower runs need --out\n";
                return kParse;
            }
            if (targs.snapshots && tow.out.empty()) {
                err << "pltower: error: --snapshots needs --out\n";
                return kParse;
            }
            auto rs = run_all(tow.maps.size(), tow.jobs,
                              [&](std::size_t i) { return tower(tow.maps[i], tow, targs, batch_prefix(tow, i)); });
            int code = kOk;
            for (const Result& r : rs) {
                if (code == kOk) code = r.code;
                out << r.out;
                err << r.err;
            }
            return code;
        }
        Result r = *cmd_deg6 ? guarded([&] { return deg6_report(a, deg6_iters, cex); })
                             : guarded([&] { return renorm_report(slope, alpha, renorm_iters, tower_steps, cex); });
        out << r.out;
        err << r.err;
        return r.code;
    } catch (const std::exception& e) {
        err << "pltower: error: " << e.what() << "\n";
        return kFailure;
    }
}

}  // namespace pltower::cli
