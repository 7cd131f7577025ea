#include <cmath>
#include <stdexcept>

#include "pltower/entropy.hpp"
#include "pltower/tower.hpp"

namespace pltower {

namespace {

// Least-squares slope of y against n over the last half of n = 1..size.
double tail_slope(const std::vector<double>& y) {
    const std::size_t n = y.size();
    const std::size_t start = n / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double m = 0;
    for (std::size_t i = start; i < n; ++i) {
        const double x = static_cast<double>(i + 1);
        sx += x;
        sy += y[i];
        sxx += x * x;
        sxy += x * y[i];
        m += 1;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace

GrowthEntropy growth_entropy(const PLMap& f, int n_max, const KnotPolicy& policy) {
    if (n_max < 4) throw std::invalid_argument("growth_entropy requires n_max >= 4");
    GrowthEntropy out{};
    MetricIterator it(f, PLMetric::lebesgue(), policy);
    for (int n = 1; n <= n_max; ++n) {
        it.step();
        out.log_variation.push_back(it.log_growth());
    }
    for (std::uint64_t l : lap_counts(f, n_max)) out.log_laps.push_back(std::log(static_cast<double>(l)));
    out.h_variation = tail_slope(out.log_variation);
    out.h_laps = tail_slope(out.log_laps);
    out.h = out.h_variation;
    out.gap = std::abs(out.h_variation - out.h_laps);
    return out;
}

}  // namespace pltower
