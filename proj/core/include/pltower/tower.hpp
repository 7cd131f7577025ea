#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pltower/metric.hpp"
#include "pltower/pl_map.hpp"

namespace pltower {

struct ThetaStep {
    PLMap f_next;
    PLMap g;
    PLMap h;
    double slope;
};

// One application of the tower operator: f = g∘h with g of constant slope,
// then f_next = h∘g.
ThetaStep theta_step(const PLMap& f, const KnotPolicy& policy = {});

enum class StopReason { Converged, MaxIterations, KnotBudget };

const char* to_string(StopReason r);

// Record n describes the step f_{n-1} -> f_n. Residuals that need two steps
// of history are NaN on the first record.
struct TowerRecord {
    int n;
    double slope;            // s_{n-1}
    double residual_f;       // sup|f_n - f_{n-1}|
    double residual_h;       // sup|h_{n-1} - id|
    double residual_H;       // sup|H_n - H_{n-1}|
    double residual_g_step;  // sup|g_{n-1} - g_{n-2}|
    double residual_h_step;  // sup|h_{n-1} - h_{n-2}|
    std::size_t knots_f;
    std::size_t knots_H;
    double metric_gap;  // sup|H_n - cmf(P^n m0)|, NaN unless cross-checked
};

struct TowerSnapshot {
    int n;
    PLMap f;  // f_n
    PLMap g;  // g_n
    PLMap h;  // h_n
    PLMap H;  // H_n
};

struct TowerOptions {
    KnotPolicy knots{};
    bool keep_snapshots = false;
    bool cross_check_metric = false;
    int max_period = 4;
    double period_tol = 1e-10;
    int trailing_window = 10;
};

struct TowerTrace {
    std::vector<TowerRecord> records;
    std::vector<TowerSnapshot> snapshots;
    StopReason stop = StopReason::MaxIterations;
    bool converged = false;
    std::optional<int> oscillation_period;
    double trailing_min_residual = 0.0;
    std::string budget_message;
    PLMap f_final = PLMap::identity();
    PLMap g_final = PLMap::identity();
    PLMap h_final = PLMap::identity();
    PLMap H_final = PLMap::identity();
    double s_final = 0.0;

    [[nodiscard]] int iterations() const noexcept { return static_cast<int>(records.size()); }
};

TowerTrace run_tower(const PLMap& f0, int n_max, double stop_tol, const TowerOptions& options = {});

// Stepwise form of iterating P(m) = f*m / |f*m|.
class MetricIterator {
public:
    MetricIterator(PLMap f, PLMetric m0, KnotPolicy policy = {});

    void step();
    [[nodiscard]] int n() const noexcept { return static_cast<int>(slopes_.size()); }
    [[nodiscard]] const PLMetric& current() const noexcept { return current_; }
    // s_k = |f* m_k| / |m_k|
    [[nodiscard]] const std::vector<double>& slopes() const noexcept { return slopes_; }
    // log |(f*)^n m0| - log |m0|
    [[nodiscard]] double log_growth() const noexcept { return log_growth_; }

private:
    PLMap f_;
    PLMetric current_;
    KnotPolicy policy_;
    std::vector<double> slopes_;
    double log_growth_ = 0.0;
};

struct MetricIteration {
    PLMetric m_n;
    PLMap H_n;
    std::vector<double> slopes;
    double log_growth;
};

MetricIteration metric_iteration(const PLMap& f0, const PLMetric& m0, int n, const KnotPolicy& policy = {});

// Solutions of f(x) = x. Throws IntervalOfFixedPoints if a segment lies on
// the diagonal.
std::vector<double> fixed_point(const PLMap& f);

// sup|f_n∘H_n - H_n∘f_0|
double conjugacy_residual(const PLMap& f_n, const PLMap& H_n, const PLMap& f0);
// sup|a∘b - b∘a|
double commutation_residual(const PLMap& a, const PLMap& b);

}  // namespace pltower
