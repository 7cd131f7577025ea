#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>

#include "pltower/entropy.hpp"

namespace pltower {

namespace {

class VertexIndex {
public:
    explicit VertexIndex(double tol) : tol_(tol) {}

    std::optional<std::size_t> find(double lo, double hi) const {
        for (auto it = by_lo_.lower_bound(lo - tol_); it != by_lo_.end() && it->first <= lo + tol_; ++it) {
            if (std::abs(it->second.hi - hi) <= tol_) return it->second.index;
        }
        return std::nullopt;
    }
    void insert(double lo, double hi, std::size_t index) { by_lo_.emplace(lo, Entry{hi, index}); }

private:
    struct Entry {
        double hi;
        std::size_t index;
    };
    double tol_;
    std::multimap<double, Entry> by_lo_;
};

}  // namespace

HofbauerTower hofbauer_build(const PLMap& f, int depth, double endpoint_tol) {
    if (depth < 1) throw std::invalid_argument("hofbauer_build requires depth >= 1");
    HofbauerTower t;
    t.depth = depth;
    const std::vector<Arc> laps = f.laps();
    VertexIndex index(endpoint_tol);
    for (const Arc& lap : laps) {
        index.insert(lap.lo(), lap.hi(), t.vertices.size());
        t.vertices.push_back(lap);
        t.generation.push_back(0);
    }
    t.roots = laps.size();
    t.edges.assign(t.vertices.size(), {});

    std::deque<std::size_t> queue;
    for (std::size_t i = 0; i < t.vertices.size(); ++i) queue.push_back(i);
    while (!queue.empty()) {
        const std::size_t j = queue.front();
        queue.pop_front();
        const Arc arc = t.vertices[j];
        const int gen = t.generation[j];
        const double a = f(arc.lo()), b = f(arc.hi());
        const double ilo = std::min(a, b), ihi = std::max(a, b);
        for (const Arc& lap : laps) {
            const double lo = std::max(ilo, lap.lo());
            const double hi = std::min(ihi, lap.hi());
            if (hi - lo <= endpoint_tol) continue;
            std::size_t target;
            if (auto found = index.find(lo, hi)) {
                target = *found;
            } else if (gen >= depth) {
                t.truncated = true;
                continue;
            } else {
                target = t.vertices.size();
                index.insert(lo, hi, target);
                t.vertices.emplace_back(lo, hi);
                t.generation.push_back(gen + 1);
                t.edges.emplace_back();
                queue.push_back(target);
            }
            t.edges[j].push_back(target);
        }
    }
    return t;
}

HofbauerEntropy hofbauer_entropy(const HofbauerTower& t, int iters) {
    if (t.vertices.empty()) throw std::invalid_argument("hofbauer_entropy requires a nonempty tower");
    const std::size_t n = t.vertices.size();
    // Iterating T + I keeps the ratio convergent when T is periodic; the
    // Perron root shifts by exactly one.
    std::vector<double> v(n, 1.0 / static_cast<double>(n)), w(n);
    double prev = 0.0;
    int stable = 0;
    for (int it = 1; it <= iters; ++it) {
        w = v;
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k : t.edges[j]) w[k] += v[j];
        }
        double norm = 0.0;
        for (double x : w) norm += x;
        for (std::size_t j = 0; j < n; ++j) v[j] = w[j] / norm;
        const double ratio = norm;
        if (it > 1 && std::abs(ratio - prev) < 1e-10) {
            if (++stable >= 3) {
                const double rho = ratio - 1.0;
                return {rho > 0.0 ? std::log(rho) : 0.0, rho, true, t.truncated, it};
            }
        } else {
            stable = 0;
        }
        prev = ratio;
    }
    const double rho = prev - 1.0;
    return {rho > 0.0 ? std::log(rho) : 0.0, rho, false, t.truncated, iters};
}

}  // namespace pltower
