#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pltower {

// Base of every failure raised by the library. Input validation failures that
// are plain programming errors use std::invalid_argument instead.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ZeroSlopeSegment : public Error {
public:
    using Error::Error;
};

class DegenerateCV : public Error {
public:
    using Error::Error;
};

class CVMismatch : public Error {
public:
    using Error::Error;
};

class ZeroMass : public Error {
public:
    using Error::Error;
};

class LapCountOverflow : public Error {
public:
    using Error::Error;
};

class IntervalOfFixedPoints : public Error {
public:
    IntervalOfFixedPoints(double lo, double hi)
        : Error("segment [" + std::to_string(lo) + ", " + std::to_string(hi) + "] lies on the diagonal"),
          lo_(lo), hi_(hi) {}
    [[nodiscard]] double lo() const noexcept { return lo_; }
    [[nodiscard]] double hi() const noexcept { return hi_; }

private:
    double lo_;
    double hi_;
};

class KnotBudgetExceeded : public Error {
public:
    KnotBudgetExceeded(std::size_t knots, std::size_t budget)
        : Error("knot budget exceeded: " + std::to_string(knots) + " > " + std::to_string(budget)),
          knots_(knots), budget_(budget) {}
    [[nodiscard]] std::size_t knots() const noexcept { return knots_; }
    [[nodiscard]] std::size_t budget() const noexcept { return budget_; }

private:
    std::size_t knots_;
    std::size_t budget_;
};

class NoConvergence : public Error {
public:
    NoConvergence(const std::string& what, double lambda_estimate, int suspected_period)
        : Error(what), lambda_(lambda_estimate), period_(suspected_period) {}
    [[nodiscard]] double lambda_estimate() const noexcept { return lambda_; }
    // 0 when no periodic pattern was recognised.
    [[nodiscard]] int suspected_period() const noexcept { return period_; }

private:
    double lambda_;
    int period_;
};

class NotRenormalizable : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace pltower
