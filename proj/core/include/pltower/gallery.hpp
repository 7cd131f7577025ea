#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pltower/metric.hpp"
#include "pltower/pl_map.hpp"
#include "pltower/tower.hpp"

namespace pltower {

// x ↦ s·min(x, 1 − x), 1 < s ≤ 2.
PLMap make_tent(double s);
// Full-height tent with its peak at x = peak.
PLMap make_asym_tent(double peak);
// Degree-6 map exchanging [0,a] and [a,1], each covered three times.
PLMap make_deg6(double a);

double golden_slope();
// Real root of t³ = t² + 1; the tent's turning point has period 7.
double supergolden_slope();

// Tent slopes in (√2, 2) whose turning point is periodic with period at most
// max_period, found by bisection on f_s^k(½) − ½ and checked by markov_matrix.
std::vector<double> markov_tent_slopes(int max_period);

struct SampledMapAdapter {
    std::vector<double> turning_points;  // interior, increasing
    std::vector<std::function<double(double)>> branches;  // one per lap
    int samples_per_branch = 256;
    double tolerance = 1e-12;

    // Throws std::invalid_argument when a branch is not monotone at the
    // sampling resolution or the branches disagree at a turning point.
    [[nodiscard]] PLMap to_plmap() const;
};

// PL interpolation of 4x(1 − x) on a uniform grid with `samples` cells.
PLMap logistic_adapter(int samples);

struct RenormalizationIntervals {
    Arc i0;   // contains the turning point
    Arc i1;
    double p;  // shared endpoint, the orientation-reversing fixed point
};

// Exchange intervals of tent(s) for s in (1, √2). Throws NotRenormalizable.
RenormalizationIntervals renormalization_intervals(double s);

struct RenormOptions {
    int tower_steps = 24;
    KnotPolicy knots{};
};

struct RenormReport {
    double s = 0.0;
    double alpha = 0.0;
    RenormalizationIntervals intervals{Arc(0.0, 0.5), Arc(0.5, 1.0), 0.5};
    std::vector<double> mass_i0;      // m_k(I0), k = 0..n
    std::vector<double> closed_form;  // closed-form prediction, k = 1..n at index k
    std::vector<double> ratio;        // a_{k-1}/a_k, k = 1..n at index k
    double max_closed_form_error = 0.0;
    double even_limit = 0.0;
    double odd_limit = 0.0;
    double balanced_alpha = 0.0;  // weight whose closed form has equal even and odd limits
    PLMap h_alpha = PLMap::identity();
    PLMap h_alpha_inverse = PLMap::identity();
    PLMap f_alpha = PLMap::identity();
    TowerTrace tower;
    std::vector<double> H_at_p;        // H_n(h_alpha(p)), n = 0..tower_steps
    std::vector<double> fixed_points;  // fixed point of f_n^alpha, n = 0..tower_steps
};

// Iterates the normalized pullback on α·μ0 + (1 − α)·μ1 with pullbacks
// restricted to the core I0 ∪ I1, then runs the tower on h_α∘f∘h_α⁻¹.
RenormReport renorm_alpha_experiment(double s, double alpha, int n, const RenormOptions& options = {});

struct Deg6Report {
    double a = 0.0;
    std::vector<double> mass_left;  // m_N([0,a]), N = 0..n
    TowerTrace tower;
};

Deg6Report deg6_experiment(double a, int n, const KnotPolicy& policy = {});

// Named maps: "tent2", "golden_tent", "supergolden_tent", "renorm_tent",
// "deg6", "logistic", and parametrized forms "tent:<s>", "asym_tent:<peak>",
// "deg6:<a>", "logistic:<samples>".
std::vector<std::string> gallery_names();
std::optional<PLMap> gallery_map(std::string_view name);

}  // namespace pltower
