#include "pltower/tower.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <utility>

#include "knot_kernels.hpp"
#include "pltower/constant_slope.hpp"
#include "pltower/errors.hpp"

namespace pltower {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kDiagonalTol = 1e-15;

struct Factorization {
    PLMap g;
    PLMap h;
    double slope;
};

Factorization factor(const PLMap& f, const KnotPolicy& policy) {
    ConstantSlopeModel model = constant_slope_model(critical_values(f));
    PLMap h = factor_homeomorphism(f, model.map);
    if (policy.approx_tol > 0.0) h = enforce_knot_policy(std::move(h), policy);
    return {std::move(model.map), std::move(h), model.slope};
}

}  // namespace

const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::Converged: return "converged";
        case StopReason::MaxIterations: return "max_iterations";
        case StopReason::KnotBudget: return "knot_budget";
    }
    return "unknown";
}

ThetaStep theta_step(const PLMap& f, const KnotPolicy& policy) {
    Factorization fac = factor(f, policy);
    PLMap next = compose(fac.h, fac.g, policy);
    return {std::move(next), std::move(fac.g), std::move(fac.h), fac.slope};
}

TowerTrace run_tower(const PLMap& f0, int n_max, double stop_tol, const TowerOptions& options) {
    if (n_max < 1) throw std::invalid_argument("run_tower requires n_max >= 1");
    TowerTrace trace;
    PLMap f = f0;
    PLMap H = PLMap::identity();
    std::optional<MetricIterator> metric;
    if (options.cross_check_metric) metric.emplace(f0, PLMetric::lebesgue(), options.knots);

    std::deque<PLMap> history{f0};
    std::optional<PLMap> prev_g, prev_h;

    for (int k = 1; k <= n_max; ++k) {
        std::optional<ThetaStep> st;
        std::optional<PLMap> H_next;
        try {
            st.emplace(theta_step(f, options.knots));
            H_next.emplace(compose(st->h, H, options.knots));
            if (metric) metric->step();
        } catch (const KnotBudgetExceeded& e) {
            trace.stop = StopReason::KnotBudget;
            trace.budget_message = e.what();
            break;
        }

        TowerRecord rec{};
        rec.n = k;
        rec.slope = st->slope;
        rec.residual_f = sup_distance(st->f_next, f);
        rec.residual_h = sup_distance_to_identity(st->h);
        rec.residual_H = sup_distance(*H_next, H);
        rec.residual_g_step = prev_g ? sup_distance(st->g, *prev_g) : kNaN;
        rec.residual_h_step = prev_h ? sup_distance(st->h, *prev_h) : kNaN;
        rec.knots_f = st->f_next.size();
        rec.knots_H = H_next->size();
        rec.metric_gap = metric ? kernels::sup_difference(H_next->knots(), metric->current().cmf()) : kNaN;
        trace.records.push_back(rec);

        if (options.keep_snapshots) trace.snapshots.push_back({k - 1, f, st->g, st->h, H});

        if (!trace.oscillation_period && rec.residual_f >= stop_tol) {
            for (int p = 2; p <= options.max_period; ++p) {
                if (static_cast<int>(history.size()) < p) break;
                if (sup_distance(st->f_next, history[history.size() - p]) < options.period_tol) {
                    trace.oscillation_period = p;
                    break;
                }
            }
        }

        prev_g = st->g;
        prev_h = st->h;
        f = std::move(st->f_next);
        H = std::move(*H_next);
        history.push_back(f);
        while (static_cast<int>(history.size()) > std::max(options.max_period, 1)) history.pop_front();

        if (rec.residual_f < stop_tol) {
            trace.stop = StopReason::Converged;
            trace.converged = true;
            break;
        }
    }

    trace.f_final = f;
    trace.H_final = H;
    try {
        Factorization fac = factor(f, options.knots);
        trace.g_final = std::move(fac.g);
        trace.h_final = std::move(fac.h);
        trace.s_final = fac.slope;
    } catch (const KnotBudgetExceeded&) {
        trace.g_final = prev_g.value_or(f);
        trace.h_final = prev_h.value_or(PLMap::identity());
        trace.s_final = trace.records.empty() ? 0.0 : trace.records.back().slope;
    }
    if (options.keep_snapshots) {
        trace.snapshots.push_back({trace.iterations(), trace.f_final, trace.g_final, trace.h_final, trace.H_final});
    }

    const int window = std::max(options.trailing_window, 1);
    double trailing = std::numeric_limits<double>::infinity();
    for (int i = std::max(0, trace.iterations() - window); i < trace.iterations(); ++i) {
        trailing = std::min(trailing, trace.records[static_cast<std::size_t>(i)].residual_f);
    }
    trace.trailing_min_residual = trace.records.empty() ? kNaN : trailing;
    return trace;
}

MetricIterator::MetricIterator(PLMap f, PLMetric m0, KnotPolicy policy)
    : f_(std::move(f)), current_(std::move(m0)), policy_(policy) {}

void MetricIterator::step() {
    const double before = current_.total_mass();
    if (!(before > 0.0)) throw ZeroMass("metric iteration reached zero mass");
    PLMetric pulled = pullback(f_, current_, policy_);
    const double after = pulled.total_mass();
    if (!(after > 0.0)) throw ZeroMass("pullback has zero mass");
    const double s = after / before;
    slopes_.push_back(s);
    log_growth_ += std::log(s);
    current_ = normalize(pulled);
}

MetricIteration metric_iteration(const PLMap& f0, const PLMetric& m0, int n, const KnotPolicy& policy) {
    if (n < 0) throw std::invalid_argument("metric_iteration requires n >= 0");
    MetricIterator it(f0, m0, policy);
    for (int k = 0; k < n; ++k) it.step();
    PLMetric m_n = normalize(it.current());
    PLMap H = metric_to_map(m_n);
    return {std::move(m_n), std::move(H), it.slopes(), it.log_growth()};
}

std::vector<double> fixed_point(const PLMap& f) {
    std::vector<double> out;
    const auto& k = f.knots();
    auto add = [&](double x) {
        if (out.empty() || x > out.back()) out.push_back(x);
    };
    for (std::size_t i = 0; i + 1 < k.size(); ++i) {
        const double d0 = k[i].y - k[i].x;
        const double d1 = k[i + 1].y - k[i + 1].x;
        if (std::abs(d0) <= kDiagonalTol && std::abs(d1) <= kDiagonalTol) {
            throw IntervalOfFixedPoints(k[i].x, k[i + 1].x);
        }
        if (std::abs(d0) <= kDiagonalTol) {
            add(k[i].x);
        } else if ((d0 < 0.0) != (d1 < 0.0) && std::abs(d1) > kDiagonalTol) {
            add(k[i].x + d0 / (d0 - d1) * (k[i + 1].x - k[i].x));
        }
    }
    const double dlast = k.back().y - k.back().x;
    if (std::abs(dlast) <= kDiagonalTol) add(k.back().x);
    return out;
}

double conjugacy_residual(const PLMap& f_n, const PLMap& H_n, const PLMap& f0) {
    return sup_distance(compose(f_n, H_n), compose(H_n, f0));
}

double commutation_residual(const PLMap& a, const PLMap& b) { return sup_distance(compose(a, b), compose(b, a)); }

}  // namespace pltower
