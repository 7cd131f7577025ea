#include "pltower/constant_slope.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pltower/errors.hpp"

namespace pltower {

namespace {

constexpr double kCVTol = 1e-12;

}  // namespace

ConstantSlopeModel constant_slope_model(const CriticalValueVector& cv) {
    const std::vector<double>& v = cv.values();
    const double s = cv.total_variation();
    if (!(s > 0.0)) throw DegenerateCV("critical value vector has zero total variation");

    std::vector<double> turning(v.size());
    turning.front() = 0.0;
    double acc = 0.0;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        acc += std::abs(v[i] - v[i - 1]);
        turning[i] = acc / s;
    }
    turning.back() = 1.0;

    std::vector<Knot> knots;
    knots.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0 && !(turning[i] > turning[i - 1])) {
            throw DegenerateCV("critical value jump below resolution at index " + std::to_string(i));
        }
        knots.push_back({turning[i], v[i]});
    }
    return {PLMap(std::move(knots)), s, std::move(turning)};
}

PLMap factor_homeomorphism(const PLMap& f, const PLMap& g) {
    const CriticalValueVector cvf = critical_values(f);
    const CriticalValueVector cvg = critical_values(g);
    if (!cvf.approx_equal(cvg, kCVTol)) throw CVMismatch("critical value vectors of f and g differ");

    const PLMap g_canon = simplify(g, kCanonicalTol);
    if (g_canon.size() != cvg.values().size()) {
        throw std::invalid_argument("factor_homeomorphism expects g linear on each lap");
    }
    std::vector<double> model_turning;
    for (const Knot& k : g_canon.knots()) model_turning.push_back(k.x);
    const std::vector<double>& v = cvg.values();

    const std::vector<std::size_t> turn = f.turning_indices();
    const auto& fk = f.knots();
    std::vector<Knot> h;
    h.reserve(fk.size());
    std::size_t lap = 0;
    for (std::size_t i = 0; i < fk.size(); ++i) {
        const bool at_turn = lap < turn.size() && i == turn[lap];
        double y;
        if (i == 0) {
            y = 0.0;
        } else if (i + 1 == fk.size()) {
            y = 1.0;
        } else if (at_turn) {
            y = model_turning[lap + 1];
        } else {
            const double lo = model_turning[lap], hi = model_turning[lap + 1];
            const double t = (fk[i].y - v[lap]) / (v[lap + 1] - v[lap]);
            y = std::clamp(lo + t * (hi - lo), lo, hi);
        }
        h.push_back({fk[i].x, y});
        if (at_turn) ++lap;
    }
    for (std::size_t i = 1; i < h.size(); ++i) {
        if (!(h[i].y > h[i - 1].y)) {
            throw Error("factor_homeomorphism lost strict monotonicity at knot " + std::to_string(i));
        }
    }
    return simplify(PLMap(std::move(h)), kCanonicalTol);
}

}  // namespace pltower
