#pragma once

#include <vector>

#include "pltower/pl_map.hpp"

namespace pltower {

struct ConstantSlopeModel {
    PLMap map;
    double slope;
    std::vector<double> turning;  // 0 = c̃_0 < c̃_1 < ... < c̃_d = 1
};

// The PL map of constant slope ±s whose critical value vector is cv.
ConstantSlopeModel constant_slope_model(const CriticalValueVector& cv);

// The increasing homeomorphism h with f = g∘h, built lap by lap from the
// closed-form inverse of g. Throws CVMismatch unless CV(f) = CV(g).
PLMap factor_homeomorphism(const PLMap& f, const PLMap& g);

}  // namespace pltower
