#pragma once

#include <optional>
#include <vector>

#include "pltower/pl_map.hpp"

namespace pltower {

// Metric on [0,1] given by a continuous nondecreasing PL cumulative mass
// function with cmf(0) = 0.
class PLMetric {
public:
    explicit PLMetric(std::vector<Knot> cmf);

    static PLMetric lebesgue();
    static PLMetric zero();

    [[nodiscard]] const std::vector<Knot>& cmf() const noexcept { return cmf_; }
    [[nodiscard]] std::size_t size() const noexcept { return cmf_.size(); }
    [[nodiscard]] double cmf_at(double x) const;
    [[nodiscard]] double mass(double lo, double hi) const { return cmf_at(hi) - cmf_at(lo); }
    [[nodiscard]] double mass(const Arc& j) const { return mass(j.lo(), j.hi()); }
    [[nodiscard]] double total_mass() const noexcept { return cmf_.back().y; }

private:
    std::vector<Knot> cmf_;
};

// alpha times normalized Lebesgue on I0 plus (1 - alpha) times normalized
// Lebesgue on I1. I0 and I1 must not overlap.
PLMetric alpha_block(double alpha, const Arc& i0, const Arc& i1);
// Normalized Lebesgue measure on J.
PLMetric uniform_on(const Arc& j);

PLMetric scale(const PLMetric& m, double c);
PLMetric combine(double a, const PLMetric& m1, double b, const PLMetric& m2);
// m restricted to J (zero mass outside).
PLMetric restrict_to(const PLMetric& m, const Interval& j);
PLMetric simplify(const PLMetric& m, double eps);
// Compression / budget rule of `policy`, tolerances relative to total mass.
PLMetric enforce_knot_policy(PLMetric m, const KnotPolicy& policy);

PLMetric pullback(const PLMap& f, const PLMetric& m);
PLMetric pullback(const PLMap& f, const PLMetric& m, const KnotPolicy& policy);
PLMetric normalize(const PLMetric& m);
// x ↦ m([0,x]); m must have unit mass. The result is weakly monotone when
// m lacks full support.
PLMap metric_to_map(const PLMetric& m);
double strong_distance(const PLMetric& m1, const PLMetric& m2);
std::optional<double> is_linearly_expanded(const PLMap& f, const PLMetric& m, double tol);

}  // namespace pltower
