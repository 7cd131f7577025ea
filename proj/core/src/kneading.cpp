#include <cmath>
#include <stdexcept>
#include <vector>

#include "pltower/entropy.hpp"

namespace pltower {

namespace {

constexpr double kOrbitCloseTol = 1e-10;
constexpr double kScanStep = 1e-3;
constexpr double kBisectTol = 1e-12;

PLMap reversed(const PLMap& f) {
    std::vector<Knot> k;
    k.reserve(f.size());
    for (auto it = f.knots().rbegin(); it != f.knots().rend(); ++it) k.push_back({1.0 - it->x, 1.0 - it->y});
    k.front().x = 0.0;
    k.back().x = 1.0;
    return PLMap(std::move(k));
}

}  // namespace

KneadingData kneading_sequence(const PLMap& f_in, int N) {
    if (N < 1) throw std::invalid_argument("kneading_sequence requires N >= 1");
    if (f_in.turning_indices().size() != 1) throw std::invalid_argument("kneading_sequence requires a unimodal map");

    KneadingData kd;
    kd.N = N;
    const std::size_t ti = f_in.turning_indices().front();
    const auto& fk = f_in.knots();
    kd.flipped = fk[ti].y < fk[ti - 1].y;
    const PLMap f = kd.flipped ? reversed(f_in) : f_in;
    const double c = f.turning_points().front();

    // orbit[0] = c. Once the orbit closes, later points are copied so the
    // symbolic sequence is exactly eventually periodic.
    std::vector<double> orbit{c};
    orbit.reserve(static_cast<std::size_t>(N) + 1);
    int eta = 1;
    for (int k = 1; k <= N; ++k) {
        double x;
        if (kd.period) {
            x = orbit[static_cast<std::size_t>(k - *kd.period)];
        } else {
            x = f(orbit.back());
            for (int j = 0; j < k; ++j) {
                if (std::abs(x - orbit[static_cast<std::size_t>(j)]) <= kOrbitCloseTol) {
                    kd.preperiod = j;
                    kd.period = k - j;
                    x = orbit[static_cast<std::size_t>(j)];
                    break;
                }
            }
        }
        orbit.push_back(x);
        int e;
        if (x == c) {
            // lim_{y→c} A(f^k(y)) at a maximum equals the sign of (f^{k-1})' at f(c).
            e = eta;
        } else {
            e = x < c ? 1 : -1;
        }
        eta *= e;
        kd.eps.push_back(e);
        kd.eta.push_back(eta);
    }
    return kd;
}

double kneading_series(const KneadingData& kd, double t) {
    double acc = 0.0;
    for (auto it = kd.eta.rbegin(); it != kd.eta.rend(); ++it) acc = (acc + *it) * t;
    return 1.0 + acc;
}

KneadingEntropy kneading_entropy(const KneadingData& kd) {
    if (kd.N < 8) throw std::invalid_argument("kneading_entropy requires N >= 8");
    auto P = [&](double t) { return kneading_series(kd, t); };

    double lo = 0.5;
    double plo = P(lo);
    if (plo == 0.0) {
        return {std::log(2.0), 0.0, 0.5, false};
    }
    double hi = lo;
    bool found = false;
    for (int i = 1; 0.5 + i * kScanStep < 1.0; ++i) {
        hi = 0.5 + i * kScanStep;
        const double phi = P(hi);
        if (phi == 0.0 || (phi < 0.0) != (plo < 0.0)) {
            found = true;
            break;
        }
        lo = hi;
        plo = phi;
    }
    if (!found) return {0.0, -std::log(1.0 - kScanStep), 1.0, true};

    while (hi - lo > kBisectTol) {
        const double mid = 0.5 * (lo + hi);
        const double pm = P(mid);
        if (pm == 0.0) {
            lo = hi = mid;
            break;
        }
        if ((pm < 0.0) == (plo < 0.0)) {
            lo = mid;
            plo = pm;
        } else {
            hi = mid;
        }
    }
    const double root = 0.5 * (lo + hi);
    const double step = 1e-6;
    const double slope = (P(root + step) - P(root - step)) / (2.0 * step);
    const double tail = std::pow(root, kd.N + 1) / (1.0 - root);
    const double dt = tail / std::max(std::abs(slope), 1e-300) + kBisectTol;
    return {-std::log(root), dt / root, root, false};
}

}  // namespace pltower
