#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "pltower/metric.hpp"
#include "pltower/pl_map.hpp"

namespace pltower {

class StepFunction {
public:
    // breakpoints: 0 = b_0 < b_1 < ... < b_k = 1; one value per cell.
    StepFunction(std::vector<double> breakpoints, std::vector<double> values);

    static StepFunction constant(double c);
    static StepFunction indicator(const Arc& j);

    [[nodiscard]] const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
    [[nodiscard]] std::size_t cells() const noexcept { return values_.size(); }
    // Value on the cell containing x; breakpoints belong to the cell on their right.
    [[nodiscard]] double operator()(double x) const;

private:
    std::vector<double> breakpoints_;
    std::vector<double> values_;
};

// Σ_cells value · m(cell)
double pairing(const StepFunction& phi, const PLMetric& m);

// (Lφ)(x) = Σ_i φ(f_i^{-1} x) over the laps whose image contains x.
StepFunction apply_transfer(const PLMap& f, const StepFunction& phi);
// L^n φ; throws KnotBudgetExceeded once the partition outgrows the budget.
StepFunction apply_transfer(const PLMap& f, const StepFunction& phi, int n, const KnotPolicy& policy = {});

double duality_residual(const PLMap& f, const StepFunction& phi, const PLMetric& m);

class TransferMatrix {
public:
    // dense[J][K] = number of laps whose image of cell K covers cell J.
    TransferMatrix(std::vector<double> partition, const std::vector<std::vector<std::int64_t>>& dense);

    [[nodiscard]] const std::vector<double>& partition() const noexcept { return partition_; }
    [[nodiscard]] std::size_t size() const noexcept { return rows_.size(); }
    [[nodiscard]] std::int64_t entry(std::size_t j, std::size_t k) const;
    [[nodiscard]] const std::vector<std::vector<std::pair<std::size_t, std::int64_t>>>& rows() const noexcept {
        return rows_;
    }
    // (Mv)_J = Σ_K M(J,K) v_K
    [[nodiscard]] std::vector<double> apply(const std::vector<double>& v) const;

private:
    std::vector<double> partition_;
    std::vector<std::vector<std::pair<std::size_t, std::int64_t>>> rows_;
};

// Partition by the forward orbits of 0, 1 and the turning points. Empty when
// some orbit fails to close within orbit_depth steps.
std::optional<TransferMatrix> markov_matrix(const PLMap& f, int orbit_depth = 64, double tol = 1e-10);

struct LeadingEigen {
    double lambda;
    StepFunction phi;  // nonnegative, sup-normalised
    int iterations;
    double gap_ratio;  // fitted geometric decay of successive iterate differences
};

// Throws NoConvergence; a periodic pattern in the iterates is reported as the
// suspected period.
LeadingEigen leading_eigen(const TransferMatrix& m, int iters = 100000);

// H_n(x) = normalised mass of (f*)^n Lebesgue on [0,x].
PLMap limit_conjugacy(const PLMap& f, int n, const KnotPolicy& policy = {});

}  // namespace pltower
