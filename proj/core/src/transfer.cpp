#include "pltower/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <string>

#include "pltower/errors.hpp"
#include "pltower/tower.hpp"

namespace pltower {

namespace {

constexpr double kBreakpointTol = 1e-15;

struct Branch {
    std::size_t first;  // knot index range of one lap
    std::size_t last;
    double image_lo;
    double image_hi;
    bool increasing;
};

std::vector<Branch> branches_of(const PLMap& f) {
    std::vector<Branch> out;
    const auto& k = f.knots();
    std::size_t first = 0;
    auto close = [&](std::size_t last) {
        const double a = k[first].y, b = k[last].y;
        out.push_back({first, last, std::min(a, b), std::max(a, b), b > a});
        first = last;
    };
    for (std::size_t t : f.turning_indices()) close(t);
    close(k.size() - 1);
    return out;
}

// Inverse of f on one lap at a value strictly inside the lap's image.
double branch_inverse(const PLMap& f, const Branch& br, double y) {
    const auto& k = f.knots();
    std::size_t lo = br.first, hi = br.last;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        const bool below = br.increasing ? k[mid].y <= y : k[mid].y >= y;
        if (below) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const Knot& a = k[lo];
    const Knot& b = k[hi];
    return a.x + (y - a.y) / (b.y - a.y) * (b.x - a.x);
}

std::vector<double> dedupe_sorted(std::vector<double> pts, double tol) {
    std::sort(pts.begin(), pts.end());
    std::vector<double> out;
    for (double p : pts) {
        if (out.empty() || p - out.back() > tol) out.push_back(p);
    }
    out.front() = 0.0;
    out.back() = 1.0;
    return out;
}

}  // namespace

StepFunction::StepFunction(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
    if (breakpoints_.size() < 2 || values_.size() + 1 != breakpoints_.size()) {
        throw std::invalid_argument("step function needs k+1 breakpoints for k values");
    }
    if (breakpoints_.front() != 0.0 || breakpoints_.back() != 1.0) {
        throw std::invalid_argument("step function breakpoints must span [0,1]");
    }
    for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
        if (!(breakpoints_[i] > breakpoints_[i - 1])) {
            throw std::invalid_argument("step function breakpoints must increase");
        }
    }
}

StepFunction StepFunction::constant(double c) { return StepFunction({0.0, 1.0}, {c}); }

StepFunction StepFunction::indicator(const Arc& j) {
    std::vector<double> b{0.0};
    std::vector<double> v;
    if (j.lo() > 0.0) {
        b.push_back(j.lo());
        v.push_back(0.0);
    }
    b.push_back(std::min(j.hi(), 1.0));
    v.push_back(1.0);
    if (j.hi() < 1.0) {
        b.push_back(1.0);
        v.push_back(0.0);
    }
    return StepFunction(std::move(b), std::move(v));
}

double StepFunction::operator()(double x) const {
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
    std::size_t cell = it == breakpoints_.begin() ? 0 : static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
    return values_[std::min(cell, values_.size() - 1)];
}

double pairing(const StepFunction& phi, const PLMetric& m) {
    const auto& b = phi.breakpoints();
    double total = 0.0;
    for (std::size_t i = 0; i < phi.cells(); ++i) total += phi.values()[i] * m.mass(b[i], b[i + 1]);
    return total;
}

StepFunction apply_transfer(const PLMap& f, const StepFunction& phi) {
    const std::vector<Branch> brs = branches_of(f);
    const auto& k = f.knots();
    std::vector<double> pts{0.0, 1.0};
    for (const Branch& br : brs) {
        pts.push_back(br.image_lo);
        pts.push_back(br.image_hi);
        const double lo = k[br.first].x, hi = k[br.last].x;
        for (double b : phi.breakpoints()) {
            if (b > lo && b < hi) pts.push_back(f(b));
        }
    }
    std::vector<double> cuts = dedupe_sorted(std::move(pts), kBreakpointTol);
    std::vector<double> vals(cuts.size() - 1, 0.0);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        double acc = 0.0;
        for (const Branch& br : brs) {
            if (mid > br.image_lo && mid < br.image_hi) acc += phi(branch_inverse(f, br, mid));
        }
        vals[i] = acc;
    }
    return StepFunction(std::move(cuts), std::move(vals));
}

StepFunction apply_transfer(const PLMap& f, const StepFunction& phi, int n, const KnotPolicy& policy) {
    if (n < 0) throw std::invalid_argument("apply_transfer requires n >= 0");
    StepFunction out = phi;
    const std::size_t budget = policy.effective_budget();
    for (int i = 0; i < n; ++i) {
        out = apply_transfer(f, out);
        if (out.cells() > budget) throw KnotBudgetExceeded(out.cells(), budget);
    }
    return out;
}

double duality_residual(const PLMap& f, const StepFunction& phi, const PLMetric& m) {
    return std::abs(pairing(apply_transfer(f, phi), m) - pairing(phi, pullback(f, m)));
}

TransferMatrix::TransferMatrix(std::vector<double> partition, const std::vector<std::vector<std::int64_t>>& dense)
    : partition_(std::move(partition)) {
    const std::size_t n = partition_.size() - 1;
    if (partition_.size() < 2 || dense.size() != n) throw std::invalid_argument("transfer matrix shape mismatch");
    rows_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (dense[j].size() != n) throw std::invalid_argument("transfer matrix must be square");
        for (std::size_t kk = 0; kk < n; ++kk) {
            if (dense[j][kk] < 0) throw std::invalid_argument("transfer matrix entries must be nonnegative");
            if (dense[j][kk] != 0) rows_[j].push_back({kk, dense[j][kk]});
        }
    }
}

std::int64_t TransferMatrix::entry(std::size_t j, std::size_t k) const {
    for (const auto& [col, v] : rows_.at(j)) {
        if (col == k) return v;
    }
    return 0;
}

std::vector<double> TransferMatrix::apply(const std::vector<double>& v) const {
    std::vector<double> out(rows_.size(), 0.0);
    for (std::size_t j = 0; j < rows_.size(); ++j) {
        double acc = 0.0;
        for (const auto& [col, c] : rows_[j]) acc += static_cast<double>(c) * v[col];
        out[j] = acc;
    }
    return out;
}

std::optional<TransferMatrix> markov_matrix(const PLMap& f, int orbit_depth, double tol) {
    std::vector<double> seeds{0.0};
    for (double c : f.turning_points()) seeds.push_back(c);
    seeds.push_back(1.0);

    std::vector<double> points = seeds;
    auto known = [&](double x) -> std::optional<double> {
        for (double p : points) {
            if (std::abs(p - x) <= tol) return p;
        }
        return std::nullopt;
    };
    for (double seed : seeds) {
        double x = seed;
        bool closed = false;
        for (int k = 0; k < orbit_depth; ++k) {
            x = f(x);
            if (known(x)) {
                closed = true;
                break;
            }
            points.push_back(x);
        }
        if (!closed) return std::nullopt;
    }

    const std::vector<double> part = dedupe_sorted(points, tol);
    const std::size_t n = part.size() - 1;
    auto locate = [&](double y) -> std::optional<std::size_t> {
        auto it = std::lower_bound(part.begin(), part.end(), y - tol);
        if (it == part.end() || std::abs(*it - y) > tol) return std::nullopt;
        return static_cast<std::size_t>(it - part.begin());
    };
    std::vector<std::vector<std::int64_t>> dense(n, std::vector<std::int64_t>(n, 0));
    for (std::size_t kk = 0; kk < n; ++kk) {
        const auto a = locate(f(part[kk]));
        const auto b = locate(f(part[kk + 1]));
        if (!a || !b) return std::nullopt;
        const std::size_t lo = std::min(*a, *b), hi = std::max(*a, *b);
        for (std::size_t j = lo; j < hi; ++j) dense[j][kk] += 1;
    }
    return TransferMatrix(part, dense);
}

LeadingEigen leading_eigen(const TransferMatrix& m, int iters) {
    const std::size_t n = m.size();
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double frac = std::fmod(static_cast<double>(i + 1) * 0.6180339887498949, 1.0);
        v[i] = 1.0 + 0.5 * frac;
    }
    const double vmax = *std::max_element(v.begin(), v.end());
    for (double& x : v) x /= vmax;

    constexpr int kMaxPeriod = 6;
    std::deque<std::vector<double>> history;
    std::deque<double> lambdas;
    std::vector<double> diffs;
    double lambda_prev = 0.0;

    auto periodic_pattern = [&](double tol) -> int {
        for (int p = 2; p <= kMaxPeriod; ++p) {
            if (static_cast<int>(history.size()) <= p) break;
            const auto& a = history.back();
            const auto& b = history[history.size() - 1 - static_cast<std::size_t>(p)];
            double d = 0.0;
            for (std::size_t i = 0; i < n; ++i) d = std::max(d, std::abs(a[i] - b[i]));
            if (d < tol) return p;
        }
        return 0;
    };
    auto periodic_lambda = [&](int p) {
        double logsum = 0.0;
        for (int i = 0; i < p; ++i) logsum += std::log(lambdas[lambdas.size() - 1 - static_cast<std::size_t>(i)]);
        return std::exp(logsum / p);
    };

    for (int it = 1; it <= iters; ++it) {
        std::vector<double> w = m.apply(v);
        const double lambda = *std::max_element(w.begin(), w.end());
        if (!(lambda > 0.0)) throw NoConvergence("power iteration collapsed to zero", 0.0, 0);
        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            w[i] /= lambda;
            diff = std::max(diff, std::abs(w[i] - v[i]));
        }
        diffs.push_back(diff);
        history.push_back(w);
        lambdas.push_back(lambda);
        if (static_cast<int>(history.size()) > kMaxPeriod + 1) {
            history.pop_front();
            lambdas.pop_front();
        }
        v = std::move(w);

        if (it > 1 && std::abs(lambda - lambda_prev) <= 1e-13 * lambda && diff <= 1e-12) {
            // Geometric fit of the decay of successive differences above the noise floor.
            double sx = 0, sy = 0, sxx = 0, sxy = 0, cnt = 0;
            for (std::size_t i = 0; i < diffs.size(); ++i) {
                if (diffs[i] <= 1e-11 || diffs[i] >= 1e-1) continue;
                const double x = static_cast<double>(i);
                const double y = std::log(diffs[i]);
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += x * y;
                cnt += 1;
            }
            const double gap = cnt >= 3 ? std::exp((cnt * sxy - sx * sy) / (cnt * sxx - sx * sx)) : 0.0;
            return {lambda, StepFunction(m.partition(), v), it, gap};
        }
        lambda_prev = lambda;

        if (it > 64 && diff > 1e-8) {
            if (const int p = periodic_pattern(1e-12)) {
                throw NoConvergence("power iterates cycle with period " + std::to_string(p) +
                                        "; peripheral eigenvalues besides lambda suspected",
                                    periodic_lambda(p), p);
            }
        }
    }
    const int p = periodic_pattern(1e-9);
    const double est = p ? periodic_lambda(p) : lambdas.back();
    throw NoConvergence("power iteration did not converge", est, p);
}

PLMap limit_conjugacy(const PLMap& f, int n, const KnotPolicy& policy) {
    if (n < 1) throw std::invalid_argument("limit_conjugacy requires n >= 1");
    return metric_iteration(f, PLMetric::lebesgue(), n, policy).H_n;
}

}  // namespace pltower
