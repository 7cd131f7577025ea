#include "pltower/pl_map.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <utility>

#include "knot_kernels.hpp"
#include "pltower/errors.hpp"

namespace pltower {

namespace {

constexpr double kClampSlack = 1e-12;
constexpr double kLapOverlapTol = 1e-12;

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

double clamp_unit(double v, const char* what) {
    if (!(v >= -kClampSlack && v <= 1.0 + kClampSlack)) {
        throw std::invalid_argument(std::string(what) + " outside [0,1]: " + std::to_string(v));
    }
    return std::clamp(v, 0.0, 1.0);
}

}  // namespace

Arc::Arc(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(lo < hi)) {
        throw std::invalid_argument("arc requires lo < hi, got [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
}

PLMap::PLMap(std::vector<Knot> knots) : knots_(std::move(knots)) {
    if (knots_.size() < 2) throw std::invalid_argument("PL map needs at least two knots");
    for (Knot& k : knots_) {
        k.x = clamp_unit(k.x, "knot position");
        k.y = clamp_unit(k.y, "knot value");
    }
    if (std::abs(knots_.front().x) > kClampSlack || std::abs(knots_.back().x - 1.0) > kClampSlack) {
        throw std::invalid_argument("PL map knots must start at x=0 and end at x=1");
    }
    knots_.front().x = 0.0;
    knots_.back().x = 1.0;
    for (std::size_t i = 1; i < knots_.size(); ++i) {
        if (!(knots_[i].x > knots_[i - 1].x)) {
            throw std::invalid_argument("knot positions must be strictly increasing (index " + std::to_string(i) + ")");
        }
    }
}

PLMap PLMap::identity() { return PLMap({{0.0, 0.0}, {1.0, 1.0}}); }

double PLMap::operator()(double x) const { return kernels::eval(knots_, x); }

std::vector<std::size_t> PLMap::turning_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i + 1 < knots_.size(); ++i) {
        const int left = sign_of(knots_[i].y - knots_[i - 1].y);
        const int right = sign_of(knots_[i + 1].y - knots_[i].y);
        if (left * right < 0) out.push_back(i);
    }
    return out;
}

std::vector<double> PLMap::turning_points() const {
    std::vector<double> out;
    for (std::size_t i : turning_indices()) out.push_back(knots_[i].x);
    return out;
}

std::vector<Arc> PLMap::laps() const {
    std::vector<Arc> out;
    double lo = 0.0;
    for (double c : turning_points()) {
        out.emplace_back(lo, c);
        lo = c;
    }
    out.emplace_back(lo, 1.0);
    return out;
}

bool PLMap::has_flat_segments() const noexcept {
    for (std::size_t i = 1; i < knots_.size(); ++i) {
        if (knots_[i].y == knots_[i - 1].y) return true;
    }
    return false;
}

bool PLMap::is_weakly_monotone() const noexcept {
    bool flat = false;
    for (std::size_t i = 1; i < knots_.size(); ++i) {
        if (knots_[i].y < knots_[i - 1].y) return false;
        if (knots_[i].y == knots_[i - 1].y) flat = true;
    }
    return flat;
}

bool PLMap::is_increasing_homeomorphism() const noexcept {
    if (knots_.front().y != 0.0 || knots_.back().y != 1.0) return false;
    for (std::size_t i = 1; i < knots_.size(); ++i) {
        if (!(knots_[i].y > knots_[i - 1].y)) return false;
    }
    return true;
}

bool PLMap::preserves_boundary() const noexcept {
    auto on_boundary = [](double v) { return v == 0.0 || v == 1.0; };
    return on_boundary(knots_.front().y) && on_boundary(knots_.back().y);
}

CriticalValueVector::CriticalValueVector(std::vector<double> values) : values_(std::move(values)), direction_(0) {
    if (values_.size() < 2) throw std::invalid_argument("critical value vector needs at least two entries");
    for (double& v : values_) v = clamp_unit(v, "critical value");
    direction_ = sign_of(values_[1] - values_[0]);
    int expected = direction_;
    for (std::size_t j = 0; j + 1 < values_.size(); ++j) {
        const int dir = sign_of(values_[j + 1] - values_[j]);
        if (dir == 0) {
            throw DegenerateCV("consecutive critical values coincide at index " + std::to_string(j));
        }
        if (dir != expected) {
            throw DegenerateCV("critical value directions do not alternate at index " + std::to_string(j));
        }
        expected = -expected;
    }
}

double CriticalValueVector::total_variation() const {
    double s = 0.0;
    for (std::size_t j = 0; j + 1 < values_.size(); ++j) s += std::abs(values_[j + 1] - values_[j]);
    return s;
}

bool CriticalValueVector::approx_equal(const CriticalValueVector& other, double tol) const {
    if (values_.size() != other.values_.size() || direction_ != other.direction_) return false;
    for (std::size_t j = 0; j < values_.size(); ++j) {
        if (std::abs(values_[j] - other.values_[j]) > tol) return false;
    }
    return true;
}

std::size_t default_knot_budget() {
    constexpr std::size_t kDefault = 200000;
    const char* env = std::getenv("PLTOWER_KNOT_BUDGET");
    if (env == nullptr || *env == '\0') return kDefault;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || v == 0) return kDefault;
    return static_cast<std::size_t>(v);
}

std::size_t KnotPolicy::effective_budget() const { return budget == 0 ? default_knot_budget() : budget; }

double eval(const PLMap& f, double x) { return f(x); }

PLMap simplify(const PLMap& f, double eps) {
    if (eps < 0.0) throw std::invalid_argument("simplify tolerance must be nonnegative");
    return PLMap(kernels::simplify(f.knots(), eps));
}

PLMap compose(const PLMap& outer, const PLMap& inner) {
    return PLMap(kernels::simplify(kernels::compose(outer.knots(), inner.knots()), kCanonicalTol));
}

PLMap enforce_knot_policy(PLMap f, const KnotPolicy& policy) {
    if (policy.approx_tol > 0.0) f = simplify(f, policy.approx_tol);
    const std::size_t budget = policy.effective_budget();
    if (f.size() > budget) {
        f = simplify(f, kBudgetSimplifyTol);
        if (f.size() > budget) throw KnotBudgetExceeded(f.size(), budget);
    }
    return f;
}

PLMap compose(const PLMap& outer, const PLMap& inner, const KnotPolicy& policy) {
    return enforce_knot_policy(compose(outer, inner), policy);
}

PLMap iterate(const PLMap& f, int n, const KnotPolicy& policy) {
    if (n < 0) throw std::invalid_argument("iterate requires n >= 0");
    if (n == 0) return PLMap::identity();
    PLMap out = f;
    for (int i = 1; i < n; ++i) out = compose(f, out, policy);
    return out;
}

CriticalValueVector critical_values(const PLMap& f) {
    if (f.has_flat_segments()) throw ZeroSlopeSegment("map has a flat segment; critical values undefined");
    std::vector<double> v;
    v.push_back(f.knots().front().y);
    for (std::size_t i : f.turning_indices()) v.push_back(f.knots()[i].y);
    v.push_back(f.knots().back().y);
    return CriticalValueVector(std::move(v));
}

namespace {

// Replaces endpoints that agree within tol by a common representative so that
// equal intervals compare exactly.
void snap_endpoints(std::vector<std::pair<Interval, std::uint64_t>>& items, double tol) {
    std::vector<double> pts;
    pts.reserve(2 * items.size());
    for (const auto& [iv, m] : items) {
        pts.push_back(iv.lo);
        pts.push_back(iv.hi);
    }
    std::sort(pts.begin(), pts.end());
    std::vector<double> reps;
    for (double p : pts) {
        if (reps.empty() || p - reps.back() > tol) reps.push_back(p);
    }
    auto snap = [&](double v) {
        auto it = std::lower_bound(reps.begin(), reps.end(), v - tol);
        return it == reps.end() ? v : *it;
    };
    for (auto& [iv, m] : items) {
        iv.lo = snap(iv.lo);
        iv.hi = snap(iv.hi);
    }
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r = 0;
    if (__builtin_add_overflow(a, b, &r)) throw LapCountOverflow("lap count exceeds 64-bit range");
    return r;
}

}  // namespace

std::vector<std::uint64_t> lap_counts(const PLMap& f, int n) {
    if (n < 1) throw std::invalid_argument("lap_counts requires n >= 1");
    const std::vector<Arc> laps = f.laps();
    auto lap_image = [&](double lo, double hi) {
        const double a = f(lo), b = f(hi);
        return Interval{std::min(a, b), std::max(a, b)};
    };

    std::vector<std::uint64_t> counts{laps.size()};
    std::vector<std::pair<Interval, std::uint64_t>> images;
    for (const Arc& lap : laps) images.push_back({lap_image(lap.lo(), lap.hi()), 1});

    for (int k = 1; k < n; ++k) {
        std::vector<std::pair<Interval, std::uint64_t>> next;
        std::uint64_t count = 0;
        for (const auto& [iv, mult] : images) {
            for (const Arc& lap : laps) {
                const double lo = std::max(iv.lo, lap.lo());
                const double hi = std::min(iv.hi, lap.hi());
                if (hi - lo <= kLapOverlapTol) continue;
                next.push_back({lap_image(lo, hi), mult});
                count = checked_add(count, mult);
            }
        }
        counts.push_back(count);
        snap_endpoints(next, kLapOverlapTol);
        std::sort(next.begin(), next.end(), [](const auto& a, const auto& b) {
            return std::pair(a.first.lo, a.first.hi) < std::pair(b.first.lo, b.first.hi);
        });
        images.clear();
        for (const auto& item : next) {
            if (!images.empty() && images.back().first == item.first) {
                images.back().second = checked_add(images.back().second, item.second);
            } else {
                images.push_back(item);
            }
        }
    }
    return counts;
}

std::uint64_t laps_of_iterate(const PLMap& f, int n) {
    if (n < 1) throw std::invalid_argument("laps_of_iterate requires n >= 1");
    return lap_counts(f, n).back();
}

std::uint64_t laps_of_iterate_by_composition(const PLMap& f, int n, const KnotPolicy& policy) {
    if (n < 1) throw std::invalid_argument("laps_of_iterate requires n >= 1");
    return iterate(f, n, policy).degree();
}

std::size_t laps_on(const PLMap& f, const Arc& j) {
    std::size_t n = 1;
    for (double c : f.turning_points()) {
        if (c > j.lo() && c < j.hi()) ++n;
    }
    return n;
}

double variation(const PLMap& f, const Arc& j) {
    const auto& k = f.knots();
    double prev = f(j.lo());
    double total = 0.0;
    for (const Knot& kn : k) {
        if (kn.x <= j.lo()) continue;
        if (kn.x >= j.hi()) break;
        total += std::abs(kn.y - prev);
        prev = kn.y;
    }
    total += std::abs(f(j.hi()) - prev);
    return total;
}

double variation(const PLMap& f) {
    double total = 0.0;
    const auto& k = f.knots();
    for (std::size_t i = 1; i < k.size(); ++i) total += std::abs(k[i].y - k[i - 1].y);
    return total;
}

Interval image(const PLMap& f, const Interval& j) {
    double lo = std::min(f(j.lo), f(j.hi));
    double hi = std::max(f(j.lo), f(j.hi));
    for (const Knot& kn : f.knots()) {
        if (kn.x <= j.lo) continue;
        if (kn.x >= j.hi) break;
        lo = std::min(lo, kn.y);
        hi = std::max(hi, kn.y);
    }
    return {lo, hi};
}

double sup_distance(const PLMap& a, const PLMap& b) { return kernels::sup_difference(a.knots(), b.knots()); }

double sup_distance_to_identity(const PLMap& f) {
    double d = 0.0;
    for (const Knot& k : f.knots()) d = std::max(d, std::abs(k.y - k.x));
    return d;
}

IntervalClass classify_interval(const PLMap& f, const Arc& j, int k_max) {
    const std::vector<double> turning = f.turning_points();
    if (turning.size() != 1) throw std::invalid_argument("classify_interval requires a unimodal map");
    const double c = turning.front();
    Interval current{j.lo(), j.hi()};
    for (int k = 0; k <= k_max; ++k) {
        const Interval next = image(f, current);
        if (current.contains(c) && next.contains(c)) return {IntervalClass::Kind::Fast, k};
        current = next;
    }
    return {IntervalClass::Kind::SlowUpTo, k_max};
}

}  // namespace pltower
