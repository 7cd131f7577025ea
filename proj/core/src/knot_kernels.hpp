#pragma once

// Low-level routines on knot lists. A knot list is a continuous PL function
// on [0,1]: x strictly increasing from 0 to 1, arbitrary real values.

#include <span>
#include <utility>
#include <vector>

#include "pltower/pl_map.hpp"

namespace pltower::kernels {

// Index i of the segment [x_i, x_{i+1}] containing x (clamped into range).
std::size_t segment_of(std::span<const Knot> k, double x);
double eval(std::span<const Knot> k, double x);

// outer∘inner where inner takes values in [0,1]. The knot set is the inner
// knots plus every inner-preimage of an outer knot. Values at preimages are
// copied from the outer knot, so they are exact.
std::vector<Knot> compose(std::span<const Knot> outer, std::span<const Knot> inner);

// Cumulative |Δ(F∘f)|: the cmf of the pullback of the metric with cmf F.
std::vector<Knot> pullback_cmf(std::span<const Knot> cmf, std::span<const Knot> f);

std::vector<Knot> simplify(std::span<const Knot> k, double eps);

// a·A + b·B on the union of the knot sets.
std::vector<Knot> combine(std::span<const Knot> a, double ca, std::span<const Knot> b, double cb);

// min and max of A − B over [0,1].
std::pair<double, double> difference_range(std::span<const Knot> a, std::span<const Knot> b);
double sup_difference(std::span<const Knot> a, std::span<const Knot> b);

}  // namespace pltower::kernels
