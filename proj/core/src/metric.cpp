#include "pltower/metric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "knot_kernels.hpp"
#include "pltower/errors.hpp"

namespace pltower {

namespace {

constexpr double kMassSlack = 1e-12;

double mass_scale(const std::vector<Knot>& cmf) { return std::max(1.0, std::abs(cmf.back().y)); }

void push_knot(std::vector<Knot>& out, double x, double y) {
    if (!out.empty() && out.back().x == x) {
        out.back().y = y;
        return;
    }
    out.push_back({x, y});
}

}  // namespace

PLMetric::PLMetric(std::vector<Knot> cmf) : cmf_(std::move(cmf)) {
    if (cmf_.size() < 2) throw std::invalid_argument("metric cmf needs at least two knots");
    if (std::abs(cmf_.front().x) > kMassSlack || std::abs(cmf_.back().x - 1.0) > kMassSlack) {
        throw std::invalid_argument("metric cmf must span [0,1]");
    }
    cmf_.front().x = 0.0;
    cmf_.back().x = 1.0;
    const double scale = mass_scale(cmf_);
    if (std::abs(cmf_.front().y) > kMassSlack * scale) throw std::invalid_argument("metric cmf must vanish at 0");
    cmf_.front().y = 0.0;
    for (std::size_t i = 1; i < cmf_.size(); ++i) {
        if (!(cmf_[i].x > cmf_[i - 1].x)) throw std::invalid_argument("metric cmf positions must increase");
        if (cmf_[i].y < cmf_[i - 1].y) {
            if (cmf_[i - 1].y - cmf_[i].y > kMassSlack * scale) {
                throw std::invalid_argument("metric cmf must be nondecreasing (index " + std::to_string(i) + ")");
            }
            cmf_[i].y = cmf_[i - 1].y;
        }
    }
}

PLMetric PLMetric::lebesgue() { return PLMetric({{0.0, 0.0}, {1.0, 1.0}}); }

PLMetric PLMetric::zero() { return PLMetric({{0.0, 0.0}, {1.0, 0.0}}); }

double PLMetric::cmf_at(double x) const { return kernels::eval(cmf_, std::clamp(x, 0.0, 1.0)); }

PLMetric uniform_on(const Arc& j) {
    if (j.lo() < 0.0 || j.hi() > 1.0) throw std::invalid_argument("uniform_on requires J within [0,1]");
    std::vector<Knot> k;
    push_knot(k, 0.0, 0.0);
    push_knot(k, j.lo(), 0.0);
    push_knot(k, j.hi(), 1.0);
    push_knot(k, 1.0, 1.0);
    return PLMetric(std::move(k));
}

PLMetric alpha_block(double alpha, const Arc& i0, const Arc& i1) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
    if (i0.hi() > i1.lo() && i1.hi() > i0.lo()) {
        throw std::invalid_argument("alpha_block intervals overlap");
    }
    return combine(alpha, uniform_on(i0), 1.0 - alpha, uniform_on(i1));
}

PLMetric scale(const PLMetric& m, double c) {
    if (c < 0.0) throw std::invalid_argument("metric scale factor must be nonnegative");
    std::vector<Knot> k = m.cmf();
    for (Knot& kn : k) kn.y *= c;
    return PLMetric(std::move(k));
}

PLMetric combine(double a, const PLMetric& m1, double b, const PLMetric& m2) {
    if (a < 0.0 || b < 0.0) throw std::invalid_argument("metric combination needs nonnegative weights");
    return PLMetric(kernels::combine(m1.cmf(), a, m2.cmf(), b));
}

PLMetric restrict_to(const PLMetric& m, const Interval& j) {
    const double lo = std::clamp(j.lo, 0.0, 1.0);
    const double hi = std::clamp(j.hi, lo, 1.0);
    const double base = m.cmf_at(lo);
    const double top = m.cmf_at(hi) - base;
    std::vector<Knot> k;
    push_knot(k, 0.0, 0.0);
    push_knot(k, lo, 0.0);
    for (const Knot& kn : m.cmf()) {
        if (kn.x > lo && kn.x < hi) push_knot(k, kn.x, kn.y - base);
    }
    push_knot(k, hi, top);
    push_knot(k, 1.0, top);
    return PLMetric(std::move(k));
}

PLMetric simplify(const PLMetric& m, double eps) {
    return PLMetric(kernels::simplify(m.cmf(), eps * mass_scale(m.cmf())));
}

PLMetric enforce_knot_policy(PLMetric m, const KnotPolicy& policy) {
    if (policy.approx_tol > 0.0) m = simplify(m, policy.approx_tol);
    const std::size_t budget = policy.effective_budget();
    if (m.size() > budget) {
        m = simplify(m, kBudgetSimplifyTol);
        if (m.size() > budget) throw KnotBudgetExceeded(m.size(), budget);
    }
    return m;
}

PLMetric pullback(const PLMap& f, const PLMetric& m) {
    std::vector<Knot> k = kernels::pullback_cmf(m.cmf(), f.knots());
    return PLMetric(kernels::simplify(k, kCanonicalTol * mass_scale(k)));
}

PLMetric pullback(const PLMap& f, const PLMetric& m, const KnotPolicy& policy) {
    return enforce_knot_policy(pullback(f, m), policy);
}

PLMetric normalize(const PLMetric& m) {
    const double total = m.total_mass();
    if (!(total > 0.0)) throw ZeroMass("cannot normalize a metric of zero mass");
    std::vector<Knot> k = m.cmf();
    for (Knot& kn : k) kn.y /= total;
    k.back().y = 1.0;
    return PLMetric(std::move(k));
}

PLMap metric_to_map(const PLMetric& m) {
    if (std::abs(m.total_mass() - 1.0) > 1e-9) {
        throw std::invalid_argument("metric_to_map requires unit total mass, got " + std::to_string(m.total_mass()));
    }
    std::vector<Knot> k = m.cmf();
    for (Knot& kn : k) kn.y = std::min(kn.y / m.total_mass(), 1.0);
    k.back().y = 1.0;
    return PLMap(std::move(k));
}

double strong_distance(const PLMetric& m1, const PLMetric& m2) {
    auto [lo, hi] = kernels::difference_range(m1.cmf(), m2.cmf());
    return hi - lo;
}

std::optional<double> is_linearly_expanded(const PLMap& f, const PLMetric& m, double tol) {
    if (!(m.total_mass() > 0.0)) throw ZeroMass("linear expansion test needs positive mass");
    const PLMetric pulled = pullback(f, m);
    const double lambda = pulled.total_mass() / m.total_mass();
    if (strong_distance(pulled, scale(m, lambda)) <= tol * lambda) return lambda;
    return std::nullopt;
}

}  // namespace pltower
