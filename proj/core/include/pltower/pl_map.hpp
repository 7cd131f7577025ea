#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pltower {

struct Knot {
    double x;
    double y;
    friend bool operator==(const Knot&, const Knot&) = default;
};

// Closed interval [lo, hi], possibly a single point.
struct Interval {
    double lo;
    double hi;
    [[nodiscard]] bool contains(double x) const noexcept { return lo <= x && x <= hi; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

class Arc {
public:
    Arc(double lo, double hi);
    [[nodiscard]] double lo() const noexcept { return lo_; }
    [[nodiscard]] double hi() const noexcept { return hi_; }
    [[nodiscard]] double length() const noexcept { return hi_ - lo_; }
    [[nodiscard]] bool contains(double x) const noexcept { return lo_ <= x && x <= hi_; }
    friend bool operator==(const Arc&, const Arc&) = default;

private:
    double lo_;
    double hi_;
};

// Continuous piecewise-linear self-map of [0,1], linear between knots.
class PLMap {
public:
    // Knot coordinates may overshoot [0,1] by rounding noise (<= 1e-12); such
    // values are clamped. Anything further out is rejected.
    explicit PLMap(std::vector<Knot> knots);

    static PLMap identity();

    [[nodiscard]] const std::vector<Knot>& knots() const noexcept { return knots_; }
    [[nodiscard]] std::size_t size() const noexcept { return knots_.size(); }
    [[nodiscard]] double operator()(double x) const;

    // Indices of interior knots where the slope changes sign.
    [[nodiscard]] std::vector<std::size_t> turning_indices() const;
    [[nodiscard]] std::vector<double> turning_points() const;
    [[nodiscard]] std::vector<Arc> laps() const;
    [[nodiscard]] std::size_t degree() const { return turning_indices().size() + 1; }

    [[nodiscard]] bool has_flat_segments() const noexcept;
    // Nondecreasing with at least one flat segment.
    [[nodiscard]] bool is_weakly_monotone() const noexcept;
    [[nodiscard]] bool is_increasing_homeomorphism() const noexcept;
    [[nodiscard]] bool preserves_boundary() const noexcept;

    friend bool operator==(const PLMap&, const PLMap&) = default;

private:
    std::vector<Knot> knots_;
};

class CriticalValueVector {
public:
    // Throws DegenerateCV when two consecutive values coincide or the
    // directions fail to alternate.
    explicit CriticalValueVector(std::vector<double> values);

    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
    [[nodiscard]] int initial_direction() const noexcept { return direction_; }
    [[nodiscard]] std::size_t degree() const noexcept { return values_.size() - 1; }
    [[nodiscard]] double total_variation() const;
    [[nodiscard]] bool approx_equal(const CriticalValueVector& other, double tol) const;

private:
    std::vector<double> values_;
    int direction_;
};

struct KnotPolicy {
    std::size_t budget = 0;   // 0 selects default_knot_budget()
    double approx_tol = 0.0;  // > 0 enables lossy sup-norm compression

    [[nodiscard]] std::size_t effective_budget() const;
};

// 200000 unless the PLTOWER_KNOT_BUDGET environment variable overrides it.
std::size_t default_knot_budget();

inline constexpr double kCanonicalTol = 1e-14;
inline constexpr double kBudgetSimplifyTol = 1e-12;

double eval(const PLMap& f, double x);

// Knots whose vertical distance to the simplified chord stays within eps
// are dropped, and knots closer than eps in x are merged. Turning points and
// transitions into or out of flat segments are kept.
PLMap simplify(const PLMap& f, double eps);

// Exact composition outer∘inner in canonical form.
PLMap compose(const PLMap& outer, const PLMap& inner);
// Same, then applies the knot budget rule of `policy`.
PLMap compose(const PLMap& outer, const PLMap& inner, const KnotPolicy& policy);
// Applies compression / budget simplification; throws KnotBudgetExceeded.
PLMap enforce_knot_policy(PLMap f, const KnotPolicy& policy);

PLMap iterate(const PLMap& f, int n, const KnotPolicy& policy = {});

CriticalValueVector critical_values(const PLMap& f);

// Lap count of f^n from the multiset of lap images, without composition.
std::uint64_t laps_of_iterate(const PLMap& f, int n);
// ℓ(f^1), ..., ℓ(f^n) by the same recursion.
std::vector<std::uint64_t> lap_counts(const PLMap& f, int n);
// Lap count of f^n read off the explicit composition.
std::uint64_t laps_of_iterate_by_composition(const PLMap& f, int n, const KnotPolicy& policy = {});
// Number of laps of f restricted to J.
std::size_t laps_on(const PLMap& f, const Arc& j);

double variation(const PLMap& f, const Arc& j);
double variation(const PLMap& f);

// [min f, max f] over J.
Interval image(const PLMap& f, const Interval& j);
double sup_distance(const PLMap& a, const PLMap& b);
double sup_distance_to_identity(const PLMap& f);

struct IntervalClass {
    enum class Kind { Fast, SlowUpTo };
    Kind kind;
    int k;
    friend bool operator==(const IntervalClass&, const IntervalClass&) = default;
};

IntervalClass classify_interval(const PLMap& f, const Arc& j, int k_max);

}  // namespace pltower
