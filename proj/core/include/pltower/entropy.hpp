#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "pltower/pl_map.hpp"

namespace pltower {

struct KneadingData {
    std::vector<int> eps;  // ε_1..ε_N
    std::vector<int> eta;  // η_k = ε_1⋯ε_k
    int N = 0;
    // True when the map had a minimum at its turning point and was replaced
    // by its orientation-reversed conjugate x ↦ 1 - f(1 - x).
    bool flipped = false;
    // Set when the critical orbit was found to close up: f^{preperiod+period}(c)
    // coincides with f^{preperiod}(c).
    std::optional<int> preperiod;
    std::optional<int> period;
};

KneadingData kneading_sequence(const PLMap& f, int N);

// 1 + Σ η_k t^k
double kneading_series(const KneadingData& kd, double t);

struct KneadingEntropy {
    double h;
    double err_bound;
    double root;
    bool zero_entropy;  // no sign change found on [1/2, 1)
};

KneadingEntropy kneading_entropy(const KneadingData& kd);

struct HofbauerTower {
    std::vector<Arc> vertices;
    std::vector<std::vector<std::size_t>> edges;  // J -> J'
    std::vector<int> generation;
    std::size_t roots = 0;
    int depth = 0;
    bool truncated = false;
};

HofbauerTower hofbauer_build(const PLMap& f, int depth, double endpoint_tol = 1e-10);

struct HofbauerEntropy {
    double h;
    double rho;
    bool converged;
    bool truncated;
    int iterations;
};

HofbauerEntropy hofbauer_entropy(const HofbauerTower& t, int iters = 200000);

struct GrowthEntropy {
    double h;            // from the variation growth
    double h_variation;
    double h_laps;
    double gap;          // |h_variation - h_laps|
    std::vector<double> log_variation;  // log Var(f^n), n = 1..n_max
    std::vector<double> log_laps;       // log ℓ(f^n)
};

GrowthEntropy growth_entropy(const PLMap& f, int n_max, const KnotPolicy& policy = {});

}  // namespace pltower
