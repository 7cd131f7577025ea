#include "knot_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pltower::kernels {

namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// Knots that must survive simplification: endpoints, sign changes of the
// slope, and the ends of a flat run whose neighbouring laps differ in
// direction. A rounding-sized flat inside a monotone lap is not a turning
// point and may be merged away.
std::vector<char> turning_flags(std::span<const Knot> k) {
    const std::size_t n = k.size();
    std::vector<int> d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) d[i] = sign_of(k[i + 1].y - k[i].y);
    std::vector<int> left(n, 0), right(n, 0);
    for (std::size_t i = 1; i < n; ++i) left[i] = d[i - 1] != 0 ? d[i - 1] : left[i - 1];
    for (std::size_t i = n - 1; i-- > 0;) right[i] = d[i] != 0 ? d[i] : right[i + 1];
    std::vector<char> forced(n, 0);
    forced.front() = forced.back() = 1;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (d[i - 1] != 0 && d[i] != 0) {
            forced[i] = d[i - 1] != d[i];
        } else if ((d[i - 1] == 0) != (d[i] == 0)) {
            forced[i] = left[i] != 0 && right[i] != 0 && left[i] != right[i];
        }
    }
    return forced;
}

double interpolate(const Knot& a, const Knot& b, double x) {
    if (x == a.x) return a.y;
    if (x == b.x) return b.y;
    return a.y + (x - a.x) * ((b.y - a.y) / (b.x - a.x));
}

// Evaluates a knot list at nondecreasing abscissae in amortised O(1).
class Cursor {
public:
    explicit Cursor(std::span<const Knot> k) : k_(k) {}
    double at(double x) {
        while (i_ + 2 < k_.size() && k_[i_ + 1].x <= x) ++i_;
        return interpolate(k_[i_], k_[i_ + 1], x);
    }

private:
    std::span<const Knot> k_;
    std::size_t i_ = 0;
};

template <class Visit>
void for_each_union_abscissa(std::span<const Knot> a, std::span<const Knot> b, Visit visit) {
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        double x;
        if (j == b.size() || (i < a.size() && a[i].x < b[j].x)) {
            x = a[i++].x;
        } else if (i == a.size() || b[j].x < a[i].x) {
            x = b[j++].x;
        } else {
            x = a[i].x;
            ++i;
            ++j;
        }
        visit(x);
    }
}

std::vector<Knot> merge_close_abscissae(std::span<const Knot> k, double eps, const std::vector<char>& forced) {
    std::vector<Knot> out;
    std::vector<char> out_forced;
    out.reserve(k.size());
    out_forced.reserve(k.size());
    out.push_back(k.front());
    out_forced.push_back(1);
    for (std::size_t i = 1; i < k.size(); ++i) {
        const bool last = i + 1 == k.size();
        if (k[i].x - out.back().x > eps) {
            out.push_back(k[i]);
            out_forced.push_back(forced[i]);
            continue;
        }
        const bool keep_prev = out.size() == 1 || out_forced.back();
        if (last || forced[i]) {
            if (keep_prev) {
                out.push_back(k[i]);
                out_forced.push_back(1);
            } else {
                out.back() = k[i];
                out_forced.back() = 1;
            }
        }
    }
    return out;
}

}  // namespace

std::size_t segment_of(std::span<const Knot> k, double x) {
    auto it = std::upper_bound(k.begin(), k.end(), x, [](double v, const Knot& kn) { return v < kn.x; });
    std::size_t idx = static_cast<std::size_t>(it - k.begin());
    if (idx == 0) return 0;
    return std::min(idx - 1, k.size() - 2);
}

double eval(std::span<const Knot> k, double x) {
    const std::size_t i = segment_of(k, x);
    return interpolate(k[i], k[i + 1], x);
}

std::vector<Knot> compose(std::span<const Knot> outer, std::span<const Knot> inner) {
    std::vector<Knot> out;
    out.reserve(2 * inner.size() + outer.size());
    out.push_back({inner.front().x, eval(outer, inner.front().y)});
    for (std::size_t i = 0; i + 1 < inner.size(); ++i) {
        const Knot a = inner[i];
        const Knot b = inner[i + 1];
        const double rise = b.y - a.y;
        const double run = b.x - a.x;
        auto emit = [&](const Knot& ok) {
            const double x = a.x + ((ok.x - a.y) / rise) * run;
            if (x > out.back().x && x < b.x) out.push_back({x, ok.y});
        };
        if (rise > 0.0) {
            auto it = std::upper_bound(outer.begin(), outer.end(), a.y,
                                       [](double v, const Knot& kn) { return v < kn.x; });
            for (; it != outer.end() && it->x < b.y; ++it) emit(*it);
        } else if (rise < 0.0) {
            auto it = std::lower_bound(outer.begin(), outer.end(), a.y,
                                       [](const Knot& kn, double v) { return kn.x < v; });
            while (it != outer.begin()) {
                --it;
                if (it->x <= b.y) break;
                emit(*it);
            }
        }
        out.push_back({b.x, eval(outer, b.y)});
    }
    return out;
}

std::vector<Knot> pullback_cmf(std::span<const Knot> cmf, std::span<const Knot> f) {
    std::vector<Knot> comp = compose(cmf, f);
    double acc = 0.0;
    double prev = comp.front().y;
    comp.front().y = 0.0;
    for (std::size_t i = 1; i < comp.size(); ++i) {
        const double v = comp[i].y;
        acc += std::abs(v - prev);
        prev = v;
        comp[i].y = acc;
    }
    return comp;
}

std::vector<Knot> simplify(std::span<const Knot> k, double eps) {
    if (k.size() <= 2) return {k.begin(), k.end()};

    std::vector<char> forced = turning_flags(k);

    std::vector<Knot> merged;
    std::span<const Knot> src = k;
    if (eps > 0.0) {
        merged = merge_close_abscissae(k, eps, forced);
        src = merged;
        forced = turning_flags(src);
    }

    std::vector<Knot> out;
    out.reserve(src.size());
    out.push_back(src.front());
    std::size_t anchor = 0;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < src.size(); ++i) {
        const Knot& a = src[anchor];
        const double dx = src[i].x - a.x;
        const double lo_i = std::max(lo, (src[i].y - eps - a.y) / dx);
        const double hi_i = std::min(hi, (src[i].y + eps - a.y) / dx);
        const double chord = (src[i + 1].y - a.y) / (src[i + 1].x - a.x);
        if (!forced[i] && lo_i <= chord && chord <= hi_i) {
            lo = lo_i;
            hi = hi_i;
            continue;
        }
        out.push_back(src[i]);
        anchor = i;
        lo = -std::numeric_limits<double>::infinity();
        hi = std::numeric_limits<double>::infinity();
    }
    out.push_back(src.back());
    return out;
}

std::vector<Knot> combine(std::span<const Knot> a, double ca, std::span<const Knot> b, double cb) {
    std::vector<Knot> out;
    out.reserve(a.size() + b.size());
    Cursor ea(a), eb(b);
    for_each_union_abscissa(a, b, [&](double x) { out.push_back({x, ca * ea.at(x) + cb * eb.at(x)}); });
    return out;
}

std::pair<double, double> difference_range(std::span<const Knot> a, std::span<const Knot> b) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    Cursor ea(a), eb(b);
    for_each_union_abscissa(a, b, [&](double x) {
        const double d = ea.at(x) - eb.at(x);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    });
    return {lo, hi};
}

double sup_difference(std::span<const Knot> a, std::span<const Knot> b) {
    auto [lo, hi] = difference_range(a, b);
    return std::max(std::abs(lo), std::abs(hi));
}

}  // namespace pltower::kernels
