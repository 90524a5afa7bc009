#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace potts {

/// Kahan–Babuška (Neumaier) compensated accumulator.
template <typename T = double>
class CompensatedSum {
public:
    void add(T x) {
        const T t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    T value() const { return sum_ + comp_; }

private:
    T sum_{0};
    T comp_{0};
};

/// ln(sum_i exp(x_i)); returns -inf for an empty range.
double log_sum_exp(std::span<const double> xs);

/// Streaming log-sum-exp with compensated summation of the rescaled terms.
class LogSumExp {
public:
    void add(double log_term);
    double value() const;
    bool empty() const { return max_ == -std::numeric_limits<double>::infinity(); }

private:
    double max_ = -std::numeric_limits<double>::infinity();
    CompensatedSum<long double> scaled_;
};

/// ln C(n, r) via lgamma; -inf when r is out of range.
double log_binomial(double n, double r);

/// Exact C(n, 2) for vertex counts.
inline std::int64_t choose2(std::int64_t n) { return n * (n - 1) / 2; }

/// x ln x with the 0 ln 0 = 0 convention.
inline double xlogx(double x) { return x == 0.0 ? 0.0 : x * std::log(x); }

/// ln(n!/prod c_i!).
double log_multinomial(std::span<const int> parts);

/// Mean and variance with Chan's pairwise merge, so per-replica partial
/// statistics can be combined in any grouping.
class RunningStats {
public:
    void add(double x);
    void merge(const RunningStats& other);
    std::int64_t count() const { return count_; }
    double mean() const { return mean_; }
    /// Unbiased sample variance; 0 for fewer than two observations.
    double variance() const;
    double stddev() const { return std::sqrt(variance()); }
    double std_error() const;

private:
    std::int64_t count_ = 0;
    double mean_ = 0;
    double m2_ = 0;
};

struct Interval {
    double lo;
    double hi;
    bool contains(double x) const { return lo <= x && x <= hi; }
};

/// Wilson score interval for a binomial proportion; z = 1.96 gives 95%.
Interval wilson_interval(std::int64_t successes, std::int64_t trials, double z = 1.96);

}  // namespace potts
