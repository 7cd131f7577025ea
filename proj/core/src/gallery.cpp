#include "pltower/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "pltower/errors.hpp"
#include "pltower/transfer.hpp"

namespace pltower {

namespace {

constexpr double kExchangeTol = 1e-12;

// Inverse of a nondecreasing PL map whose only flat pieces sit at levels 0
// and 1. On the flat ends we keep the endpoint adjacent to the increasing
// part, which is the right-continuous choice at 0 and keeps the inverse
// continuous at 1.
PLMap continuous_pseudo_inverse(const PLMap& h) {
    const auto& k = h.knots();
    std::vector<Knot> inv;
    for (std::size_t i = 0; i + 1 < k.size(); ++i) {
        const Knot& a = k[i];
        const Knot& b = k[i + 1];
        if (b.y < a.y) throw std::invalid_argument("pseudo-inverse requires a nondecreasing map");
        if (b.y == a.y) {
            if (a.y != 0.0 && a.y != 1.0) throw std::invalid_argument("pseudo-inverse requires flats at 0 or 1 only");
            continue;
        }
        if (inv.empty()) inv.push_back({a.y, a.x});
        inv.push_back({b.y, b.x});
    }
    if (inv.empty() || inv.front().x != 0.0 || inv.back().x != 1.0) {
        throw std::invalid_argument("pseudo-inverse requires a surjective map");
    }
    return PLMap(std::move(inv));
}

double tent_orbit_return(double s, int k) {
    double x = 0.5;
    for (int i = 0; i < k; ++i) x = s * std::min(x, 1.0 - x);
    return x - 0.5;
}

std::optional<double> parse_number(std::string_view text) {
    const std::string s(text);
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

}  // namespace

PLMap make_tent(double s) {
    if (!(s > 1.0 && s <= 2.0)) throw std::invalid_argument("tent slope must lie in (1, 2]");
    return PLMap({{0.0, 0.0}, {0.5, 0.5 * s}, {1.0, 0.0}});
}

PLMap make_asym_tent(double peak) {
    if (!(peak > 0.0 && peak < 1.0)) throw std::invalid_argument("tent peak must lie in (0, 1)");
    return PLMap({{0.0, 0.0}, {peak, 1.0}, {1.0, 0.0}});
}

PLMap make_deg6(double a) {
    if (!(a > 0.0 && a < 1.0) || a == 0.5) throw std::invalid_argument("deg6 parameter must lie in (0,1) and differ from 1/2");
    const double b = 1.0 - a;
    return PLMap({{0.0, 1.0},
                  {a / 3.0, a},
                  {2.0 * a / 3.0, 1.0},
                  {a, a},
                  {a + b / 3.0, 0.0},
                  {a + 2.0 * b / 3.0, a},
                  {1.0, 0.0}});
}

double golden_slope() { return 0.5 * (1.0 + std::sqrt(5.0)); }

double supergolden_slope() {
    double t = 1.5;
    for (int i = 0; i < 60; ++i) {
        const double step = (t * t * t - t * t - 1.0) / (3.0 * t * t - 2.0 * t);
        t -= step;
        if (std::abs(step) < 1e-17) break;
    }
    return t;
}

std::vector<double> markov_tent_slopes(int max_period) {
    if (max_period < 3) throw std::invalid_argument("markov_tent_slopes requires max_period >= 3");
    const double lo = std::sqrt(2.0) + 1e-9;
    const double hi = 2.0 - 1e-9;
    constexpr int kGrid = 20000;
    std::vector<double> found;
    for (int k = 3; k <= max_period; ++k) {
        double s0 = lo;
        double v0 = tent_orbit_return(s0, k);
        for (int i = 1; i <= kGrid; ++i) {
            const double s1 = lo + (hi - lo) * i / kGrid;
            const double v1 = tent_orbit_return(s1, k);
            if ((v0 < 0.0) != (v1 < 0.0)) {
                double a = s0, b = s1, va = v0;
                for (int it = 0; it < 200 && b - a > 1e-16; ++it) {
                    const double m = 0.5 * (a + b);
                    const double vm = tent_orbit_return(m, k);
                    if ((vm < 0.0) == (va < 0.0)) {
                        a = m;
                        va = vm;
                    } else {
                        b = m;
                    }
                }
                const double root = 0.5 * (a + b);
                if (std::abs(tent_orbit_return(root, k)) < 1e-10) found.push_back(root);
            }
            s0 = s1;
            v0 = v1;
        }
    }
    std::sort(found.begin(), found.end());
    std::vector<double> out;
    for (double s : found) {
        if (!out.empty() && s - out.back() < 1e-9) continue;
        if (markov_matrix(make_tent(s))) out.push_back(s);
    }
    return out;
}

PLMap SampledMapAdapter::to_plmap() const {
    if (branches.size() != turning_points.size() + 1) {
        throw std::invalid_argument("sampled map needs one branch per lap");
    }
    if (samples_per_branch < 1) throw std::invalid_argument("sampled map needs at least one sample per branch");
    std::vector<double> ends{0.0};
    ends.insert(ends.end(), turning_points.begin(), turning_points.end());
    ends.push_back(1.0);
    for (std::size_t i = 1; i < ends.size(); ++i) {
        if (!(ends[i] > ends[i - 1])) throw std::invalid_argument("turning points must increase inside (0,1)");
    }

    std::vector<Knot> knots;
    for (std::size_t b = 0; b < branches.size(); ++b) {
        const double x0 = ends[b], x1 = ends[b + 1];
        int direction = 0;
        for (int j = 0; j <= samples_per_branch; ++j) {
            const double x = j == samples_per_branch ? x1 : x0 + (x1 - x0) * j / samples_per_branch;
            const double y = branches[b](x);
            if (!(y >= -tolerance && y <= 1.0 + tolerance)) {
                throw std::invalid_argument("sampled branch leaves [0,1] at x = " + std::to_string(x));
            }
            if (j == 0 && !knots.empty()) {
                if (std::abs(knots.back().y - y) > tolerance) {
                    throw std::invalid_argument("sampled branches disagree at x = " + std::to_string(x));
                }
                continue;
            }
            if (j > 0) {
                const double dy = y - knots.back().y;
                const int d = dy > 0.0 ? 1 : (dy < 0.0 ? -1 : 0);
                if (d == 0 || (direction != 0 && d != direction)) {
                    throw std::invalid_argument("sampled branch is not monotone near x = " + std::to_string(x));
                }
                direction = d;
            }
            knots.push_back({x, std::clamp(y, 0.0, 1.0)});
        }
    }
    return PLMap(std::move(knots));
}

PLMap logistic_adapter(int samples) {
    if (samples < 64 || samples % 2 != 0) throw std::invalid_argument("logistic_adapter needs an even sample count >= 64");
    auto logistic = [](double x) { return 4.0 * x * (1.0 - x); };
    SampledMapAdapter adapter{{0.5}, {logistic, logistic}, samples / 2, 1e-12};
    return adapter.to_plmap();
}

RenormalizationIntervals renormalization_intervals(double s) {
    if (!(s > 1.0 && s < std::sqrt(2.0))) throw NotRenormalizable("tent slope must lie in (1, sqrt 2)");
    const PLMap f = make_tent(s);
    const double r1 = f(0.5);
    const double l0 = f(r1);
    const double p = s / (1.0 + s);
    if (!(l0 < 0.5 && 0.5 < p && p < r1)) throw NotRenormalizable("exchange intervals are out of order");
    const Interval img0 = image(f, Interval{l0, p});
    const Interval img1 = image(f, Interval{p, r1});
    const double err = std::max({std::abs(img0.lo - p), std::abs(img0.hi - r1), std::abs(img1.lo - l0),
                                 std::abs(img1.hi - p)});
    if (err > kExchangeTol) throw NotRenormalizable("f does not exchange the intervals");
    return {Arc(l0, p), Arc(p, r1), p};
}

RenormReport renorm_alpha_experiment(double s, double alpha, int n, const RenormOptions& options) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
    if (n < 2) throw std::invalid_argument("renorm_alpha_experiment requires n >= 2");
    RenormReport r;
    r.s = s;
    r.alpha = alpha;
    r.intervals = renormalization_intervals(s);
    const Arc& i0 = r.intervals.i0;
    const Arc& i1 = r.intervals.i1;
    const PLMap f = make_tent(s);
    const Interval core{i0.lo(), i1.hi()};
    auto step = [&](const PLMetric& m) { return restrict_to(pullback(f, m, options.knots), core); };

    const PLMetric m0 = alpha_block(alpha, i0, i1);
    PLMetric m = m0;
    r.mass_i0.push_back(m.mass(i0));
    for (int k = 1; k <= n; ++k) {
        m = normalize(step(m));
        r.mass_i0.push_back(m.mass(i0));
    }

    // a_k = ((f*)^k μ_{k mod 2})(I0), tracked in log form under a shared rescaling.
    PLMetric u = uniform_on(i0), v = uniform_on(i1);
    double log_scale = 0.0;
    std::vector<double> log_a{0.0};
    r.ratio.assign(1, std::nan(""));
    r.closed_form.assign(1, alpha);
    for (int k = 1; k <= n; ++k) {
        u = step(u);
        v = step(v);
        const double c = u.total_mass() + v.total_mass();
        if (!(c > 0.0)) throw ZeroMass("core pullback lost all mass");
        u = scale(u, 1.0 / c);
        v = scale(v, 1.0 / c);
        log_scale += std::log(c);
        const double a = (k % 2 == 0 ? u : v).mass(i0);
        log_a.push_back(std::log(a) + log_scale);
        const double rk = std::exp(log_a[k - 1] - log_a[k]);
        r.ratio.push_back(rk);
        const double w = k % 2 == 0 ? (1.0 - alpha) / alpha : alpha / (1.0 - alpha);
        r.closed_form.push_back(1.0 / (1.0 + w * rk));
        r.max_closed_form_error = std::max(r.max_closed_form_error, std::abs(r.closed_form[k] - r.mass_i0[k]));
    }
    const int last_even = n % 2 == 0 ? n : n - 1;
    const int last_odd = n % 2 == 1 ? n : n - 1;
    r.even_limit = r.mass_i0[static_cast<std::size_t>(last_even)];
    r.odd_limit = r.mass_i0[static_cast<std::size_t>(last_odd)];
    r.balanced_alpha = 1.0 / (1.0 + std::sqrt(r.ratio[static_cast<std::size_t>(last_odd)] /
                                              r.ratio[static_cast<std::size_t>(last_even)]));

    r.h_alpha = metric_to_map(m0);
    r.h_alpha_inverse = continuous_pseudo_inverse(r.h_alpha);
    r.f_alpha = compose(r.h_alpha, compose(f, r.h_alpha_inverse));

    TowerOptions topt;
    topt.knots = options.knots;
    topt.keep_snapshots = true;
    r.tower = run_tower(r.f_alpha, std::min(n, options.tower_steps), 0.0, topt);
    const double marker = r.h_alpha(r.intervals.p);
    for (const TowerSnapshot& snap : r.tower.snapshots) {
        r.H_at_p.push_back(snap.H(marker));
        const std::vector<double> fp = fixed_point(snap.f);
        r.fixed_points.push_back(fp.empty() ? std::nan("") : fp.front());
    }
    return r;
}

Deg6Report deg6_experiment(double a, int n, const KnotPolicy& policy) {
    if (n < 1) throw std::invalid_argument("deg6_experiment requires n >= 1");
    Deg6Report r;
    r.a = a;
    const PLMap f = make_deg6(a);
    MetricIterator it(f, PLMetric::lebesgue(), policy);
    r.mass_left.push_back(it.current().mass(0.0, a));
    for (int k = 1; k <= n; ++k) {
        it.step();
        r.mass_left.push_back(it.current().mass(0.0, a));
    }
    TowerOptions topt;
    topt.knots = policy;
    topt.keep_snapshots = true;
    r.tower = run_tower(f, n, 0.0, topt);
    return r;
}

std::vector<std::string> gallery_names() {
    return {"tent2", "golden_tent", "supergolden_tent", "renorm_tent", "deg6", "logistic",
            "tent:<s>", "asym_tent:<peak>", "deg6:<a>", "logistic:<samples>"};
}

std::optional<PLMap> gallery_map(std::string_view name) {
    if (name == "tent2") return make_tent(2.0);
    if (name == "golden_tent") return make_tent(golden_slope());
    if (name == "supergolden_tent") return make_tent(supergolden_slope());
    if (name == "renorm_tent") return make_tent(1.3);
    if (name == "deg6") return make_deg6(0.4);
    if (name == "logistic") return logistic_adapter(2048);

    const auto colon = name.find(':');
    if (colon == std::string_view::npos) return std::nullopt;
    const std::string_view family = name.substr(0, colon);
    const std::optional<double> value = parse_number(name.substr(colon + 1));
    if (!value) return std::nullopt;
    if (family == "tent") return make_tent(*value);
    if (family == "asym_tent") return make_asym_tent(*value);
    if (family == "deg6") return make_deg6(*value);
    if (family == "logistic") {
        if (*value != std::floor(*value) || *value > 1e7) return std::nullopt;
        return logistic_adapter(static_cast<int>(*value));
    }
    return std::nullopt;
}

}  // namespace pltower
