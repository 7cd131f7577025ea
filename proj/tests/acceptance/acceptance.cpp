#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pltower/entropy.hpp"
#include "pltower/gallery.hpp"
#include "pltower/tower.hpp"
#include "pltower/transfer.hpp"

using namespace pltower;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
    std::printf("criterion %d %s: %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

void note(const std::string& label, bool pass, const std::string& detail) {
    std::printf("supplementary %s %s: %s\n", label.c_str(), pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

PLMap inverse_homeo(const PLMap& psi) {
    std::vector<Knot> k;
    for (const Knot& p : psi.knots()) k.push_back({p.y, p.x});
    return PLMap(std::move(k));
}

PLMap conjugate(const PLMap& t, const PLMap& psi) { return compose(inverse_homeo(psi), compose(t, psi)); }

// Levy distance between nondecreasing maps of [0,1], by bisection on eps.
double levy_distance(const PLMap& a, const PLMap& b) {
    auto within = [&](const PLMap& p, const PLMap& q, double eps) {
        auto at = [](const PLMap& f, double x) { return f(std::clamp(x, 0.0, 1.0)); };
        std::vector<double> xs;
        for (const Knot& k : p.knots()) xs.push_back(k.x);
        for (const Knot& k : q.knots()) {
            xs.push_back(std::clamp(k.x - eps, 0.0, 1.0));
            xs.push_back(std::clamp(k.x + eps, 0.0, 1.0));
        }
        for (double x : xs) {
            const double v = at(p, x);
            if (v < at(q, x - eps) - eps - 1e-15 || v > at(q, x + eps) + eps + 1e-15) return false;
        }
        return true;
    };
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (within(a, b, mid) && within(b, a, mid) ? hi : lo) = mid;
    }
    return hi;
}

void criterion1() {
    const auto t0 = Clock::now();
    const Deg6Report r = deg6_experiment(0.4, 12);
    double mass_err = 0.0;
    for (std::size_t n = 0; n < r.mass_left.size(); ++n) {
        mass_err = std::max(mass_err, std::abs(r.mass_left[n] - (n % 2 == 0 ? 0.4 : 0.6)));
    }
    double period_err = 0.0;
    const auto& snaps = r.tower.snapshots;
    for (std::size_t n = 0; n + 2 < snaps.size(); ++n) period_err = std::max(period_err, sup_distance(snaps[n + 2].f, snaps[n].f));
    const double dt = seconds_since(t0);
    const bool pass = r.mass_left.size() == 13 && mass_err <= 1e-10 && r.tower.oscillation_period == 2 &&
                      snaps.size() >= 3 && period_err <= 1e-10 && dt < 1.0;
    report(1, pass,
           fmt("mass error %.3g over N<=12, period %d, sup|f_{N+2}-f_N| %.3g, %.3f s", mass_err,
               r.tower.oscillation_period.value_or(0), period_err, dt));
}

void criterion2() {
    const auto t0 = Clock::now();
    RenormOptions opt;
    opt.tower_steps = 4;
    bool pass = true;
    std::string detail;
    double balanced = 0.0;
    for (double alpha : {0.5, 0.2, 0.3, 0.7}) {
        const RenormReport r = renorm_alpha_experiment(1.3, alpha, 60, opt);
        const double gap = std::abs(r.even_limit - r.odd_limit);
        const bool gap_ok = alpha == 0.5 ? gap <= 1e-6 : gap > 0.03;
        const bool cf_ok = r.max_closed_form_error <= 1e-8;
        pass = pass && gap_ok && cf_ok;
        balanced = r.balanced_alpha;
        detail += fmt("alpha %.1f gap %.6f%s cf %.2g; ", alpha, gap, gap_ok ? "" : " (bad)", r.max_closed_form_error);
    }
    const double dt = seconds_since(t0);
    pass = pass && dt < 5.0;
    report(2, pass, detail + fmt("%.3f s", dt));

    const RenormReport b = renorm_alpha_experiment(1.3, balanced, 60, opt);
    const double gap = std::abs(b.even_limit - b.odd_limit);
    note("2b", gap <= 1e-6, fmt("balanced alpha %.9f gives gap %.3g", balanced, gap));
}

struct GalleryCase {
    std::string name;
    PLMap f;
    KnotPolicy knots;
};

std::vector<GalleryCase> convergence_gallery() {
    std::vector<GalleryCase> cases;
    const KnotPolicy exact{8'000'000, 0.0};
    for (double peak : {0.3, 0.35, 0.4, 0.45, 0.55, 0.6, 0.65, 0.7}) {
        cases.push_back({fmt("asym_tent:%.2f", peak), make_asym_tent(peak), exact});
    }
    const double eps = 1e-3;
    const PLMap psi({{0.0, 0.0}, {0.3, 0.3 + eps}, {0.7, 0.7 - eps}, {1.0, 1.0}});
    for (double s : {1.7, 1.75, 1.8, 1.85, 1.9, 1.95, 1.99, 2.0}) {
        cases.push_back({fmt("perturbed_tent:%.2f", s), conjugate(make_tent(s), psi), exact});
    }
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-eps, eps);
    for (double s : {1.8, 1.9, 1.97}) {
        std::vector<Knot> k{{0.0, 0.0}};
        for (double x : oracle::sorted_interior(rng, 3, 0.1)) k.push_back({x, x + u(rng)});
        k.push_back({1.0, 1.0});
        cases.push_back({fmt("random_perturbed_tent:%.2f", s), conjugate(make_tent(s), PLMap(std::move(k))), exact});
    }
    cases.push_back({"logistic:2048", logistic_adapter(2048), {8'000'000, 1e-7}});
    return cases;
}

void criteria3and8() {
    const auto t0 = Clock::now();
    int converged = 0, entropy_ok = 0, eligible = 0;
    int c8_traces = 0, c8_ok = 0;
    double worst_dh = 0.0, worst_step = 0.0, worst_comm = 0.0;
    std::string failed;
    const std::vector<GalleryCase> cases = convergence_gallery();
    for (const GalleryCase& c : cases) {
        const double h = kneading_entropy(kneading_sequence(c.f, 400)).h;
        if (h > 0.5 * std::log(2.0)) ++eligible;
        TowerOptions opt;
        opt.knots = c.knots;
        const TowerTrace tr = run_tower(c.f, 200, 1e-6, opt);
        const double dh = std::abs(std::log(tr.s_final) - h);
        if (tr.converged) ++converged;
        if (tr.converged && dh < 1e-4) ++entropy_ok;
        else failed += " " + c.name;
        worst_dh = std::max(worst_dh, dh);
        if (tr.converged) {
            ++c8_traces;
            const TowerRecord& last = tr.records.back();
            const double step = std::max(last.residual_g_step, last.residual_h_step);
            const double comm = std::max(commutation_residual(tr.f_final, tr.h_final),
                                         commutation_residual(tr.g_final, tr.h_final));
            worst_step = std::max(worst_step, step);
            worst_comm = std::max(worst_comm, comm);
            if (step < 1e-4 && comm < 1e-3) ++c8_ok;
        }
        std::printf("  %-28s n=%-3d s=%.12f |log s - h|=%.2e knots=%zu %s\n", c.name.c_str(), tr.iterations(), tr.s_final,
                    dh, tr.f_final.knots().size(), to_string(tr.stop));
        std::fflush(stdout);
    }
    const double dt = seconds_since(t0);
    const int total = static_cast<int>(cases.size());
    report(3, total == 20 && eligible == total && entropy_ok == total && dt < 60.0,
           fmt("%d/%d converged, %d/%d within 1e-4 of kneading entropy, worst gap %.2e, %.1f s%s", converged, total,
               entropy_ok, total, worst_dh, dt, failed.empty() ? "" : (", failed:" + failed).c_str()));
    report(8, c8_traces > 0 && c8_ok == c8_traces,
           fmt("%d/%d converged traces, worst step residual %.2e, worst commutation %.2e", c8_ok, c8_traces, worst_step,
               worst_comm));
}

void criterion4() {
    std::mt19937_64 rng(4);
    const PLMetric leb = PLMetric::lebesgue();
    double worst_rel = 0.0, worst_H = 0.0, worst_levy = 0.0;
    int maps = 0, over = 0, levy_checked = 0;
    const auto t0 = Clock::now();
    for (int t = 0; t < 50; ++t) {
        const PLMap f = oracle::random_map(rng, 1 + t % 2);
        ++maps;
        TowerOptions opt;
        opt.keep_snapshots = true;
        const TowerTrace tr = run_tower(f, 15, 0.0, opt);
        MetricIterator it(f, leb);
        double log_prod = 0.0, map_H = 0.0;
        for (int n = 1; n <= tr.iterations(); ++n) {
            it.step();
            log_prod += std::log(tr.records[static_cast<std::size_t>(n - 1)].slope);
            worst_rel = std::max(worst_rel, std::abs(std::expm1(it.log_growth() - log_prod)));
            const PLMap Hm = metric_to_map(normalize(it.current()));
            const PLMap& Ht = tr.snapshots[static_cast<std::size_t>(n)].H;
            const double gap = sup_distance(Hm, Ht);
            map_H = std::max(map_H, gap);
            if (gap > 1e-9) {
                worst_levy = std::max(worst_levy, levy_distance(Hm, Ht));
                ++levy_checked;
            }
        }
        worst_H = std::max(worst_H, map_H);
        over += map_H > 1e-9;
    }
    report(4, worst_rel <= 1e-8 && worst_H <= 1e-9,
           fmt("%d maps, n<=15: worst relative product gap %.2e, worst sup|H_n - H_n'| %.2e (%d maps above 1e-9), %.1f s",
               maps, worst_rel, worst_H, over, seconds_since(t0)));
    note("4b", worst_levy <= 1e-9,
         fmt("worst Levy distance %.2e over the %d (map, n) pairs whose sup gap exceeds 1e-9", worst_levy, levy_checked));
}

void criterion5() {
    std::mt19937_64 rng(5);
    double worst_dual = 0.0;
    for (int t = 0; t < 100; ++t) {
        const PLMap f = oracle::random_map(rng, 1 + t % 6);
        const StepFunction phi = oracle::random_step(rng, 1 + t % 8);
        const PLMetric m = oracle::random_metric(rng, 1 + t % 5);
        worst_dual = std::max(worst_dual, duality_residual(f, phi, m));
    }
    const PLMetric leb = PLMetric::lebesgue();
    double worst_rel = 0.0;
    std::vector<PLMap> maps{make_tent(golden_slope()), make_deg6(0.4), make_asym_tent(0.3)};
    for (int t = 0; t < 7; ++t) maps.push_back(oracle::random_map(rng, 1 + t % 3));
    for (const PLMap& f : maps) {
        StepFunction phi = StepFunction::constant(1.0);
        PLMap fn = PLMap::identity();
        for (int n = 1; n <= 10; ++n) {
            phi = apply_transfer(f, phi);
            fn = compose(f, fn);
            const double v = variation(fn);
            worst_rel = std::max(worst_rel, std::abs(pairing(phi, leb) - v) / v);
        }
    }
    report(5, worst_dual < 1e-12 && worst_rel <= 1e-8,
           fmt("worst duality residual %.2e over 100 triples, worst relative mass gap %.2e over %zu maps, n<=10",
               worst_dual, worst_rel, maps.size()));
}

void criterion6() {
    std::vector<double> slopes{2.0, golden_slope(), supergolden_slope()};
    const std::vector<double> detected = markov_tent_slopes(8);
    for (std::size_t i = 1; i < detected.size() && slopes.size() < 8; i += 6) slopes.push_back(detected[i]);
    double worst_pair = 0.0, worst_growth = 0.0;
    std::string detail;
    bool all_markov = true;
    for (double s : slopes) {
        const PLMap f = make_tent(s);
        const double hk = kneading_entropy(kneading_sequence(f, 400)).h;
        const double hh = hofbauer_entropy(hofbauer_build(f, 60)).h;
        const auto m = markov_matrix(f);
        all_markov = all_markov && m.has_value();
        const double ht = m ? std::log(leading_eigen(*m).lambda) : NAN;
        const double hg = growth_entropy(f, 16).h;
        worst_pair = std::max({worst_pair, std::abs(hk - hh), std::abs(hk - ht), std::abs(hh - ht)});
        worst_growth = std::max(worst_growth, std::abs(hg - hh));
        detail += fmt("%.6f ", s);
    }
    const double rho_full = leading_eigen(TransferMatrix({0.0, 0.5, 1.0}, {{1, 1}, {1, 1}})).lambda;
    const double rho_gold = leading_eigen(TransferMatrix({0.0, 0.5, 1.0}, {{1, 1}, {1, 0}})).lambda;
    const double oracle_err = std::max(std::abs(rho_full - 2.0), std::abs(rho_gold - golden_slope()));
    report(6, slopes.size() == 8 && all_markov && worst_pair <= 1e-6 && worst_growth <= 1e-2 && oracle_err <= 1e-10,
           fmt("slopes %sworst pairwise gap %.2e, worst growth gap %.2e, small oracle error %.2e", detail.c_str(),
               worst_pair, worst_growth, oracle_err));
}

void criterion7() {
    const PLMap f = make_tent(1.3);
    const PLMap H = limit_conjugacy(f, 40);
    int flat = 0, slow = 0, mismatched = 0;
    for (int i = 0; i < 200; ++i) {
        const double lo = i / 200.0, hi = (i + 1) / 200.0;
        const bool is_flat = H(hi) - H(lo) < 1e-6;
        const bool is_slow = classify_interval(f, Arc(lo, hi), 40).kind == IntervalClass::Kind::SlowUpTo;
        flat += is_flat;
        slow += is_slow;
        mismatched += is_flat != is_slow;
    }
    report(7, mismatched == 0,
           fmt("200 probe cells: %d flat under H_40, %d SlowUpTo(40), %d mismatched", flat, slow, mismatched));
}

}  // namespace

int main() {
    const std::vector<std::pair<std::vector<int>, std::function<void()>>> checks{
        {{1}, criterion1}, {{2}, criterion2}, {{3, 8}, criteria3and8}, {{4}, criterion4},
        {{5}, criterion5}, {{6}, criterion6}, {{7}, criterion7}};
    for (const auto& [ids, check] : checks) {
        try {
            check();
        } catch (const std::exception& e) {
            for (int id : ids) report(id, false, std::string("threw: ") + e.what());
        }
    }
    std::printf("%d failing\n", failures);
    return failures == 0 ? 0 : 1;
}
