#include "potts/numeric.hpp"

#include <algorithm>

namespace potts {

double log_sum_exp(std::span<const double> xs) {
    LogSumExp acc;
    for (double x : xs) acc.add(x);
    return acc.value();
}

void LogSumExp::add(double log_term) {
    if (log_term == -std::numeric_limits<double>::infinity()) return;
    if (log_term > max_) {
        if (!empty()) {
            // rescale what has been accumulated so far to the new maximum
            const long double factor = std::exp(static_cast<long double>(max_ - log_term));
            const long double prev = scaled_.value() * factor;
            scaled_ = CompensatedSum<long double>{};
            scaled_.add(prev);
        }
        max_ = log_term;
    }
    scaled_.add(std::exp(static_cast<long double>(log_term - max_)));
}

double LogSumExp::value() const {
    if (empty()) return -std::numeric_limits<double>::infinity();
    return max_ + static_cast<double>(std::log(scaled_.value()));
}

double log_binomial(double n, double r) {
    if (r < 0 || r > n) return -std::numeric_limits<double>::infinity();
    if (r == 0 || r == n) return 0.0;
    return std::lgamma(n + 1) - std::lgamma(r + 1) - std::lgamma(n - r + 1);
}

double log_multinomial(std::span<const int> parts) {
    double total = 0;
    double acc = 0;
    for (int p : parts) {
        total += p;
        acc -= std::lgamma(p + 1.0);
    }
    return acc + std::lgamma(total + 1.0);
}

void RunningStats::add(double x) {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
}

void RunningStats::merge(const RunningStats& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
        *this = other;
        return;
    }
    const auto n = static_cast<double>(count_ + other.count_);
    const double delta = other.mean_ - mean_;
    mean_ += delta * static_cast<double>(other.count_) / n;
    m2_ += other.m2_ + delta * delta * static_cast<double>(count_) * static_cast<double>(other.count_) / n;
    count_ += other.count_;
}

double RunningStats::variance() const {
    return count_ < 2 ? 0.0 : m2_ / static_cast<double>(count_ - 1);
}

double RunningStats::std_error() const {
    return count_ < 2 ? 0.0 : std::sqrt(variance() / static_cast<double>(count_));
}

Interval wilson_interval(std::int64_t successes, std::int64_t trials, double z) {
    if (trials <= 0) return {0.0, 1.0};
    const auto n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
    const double half = z / (1 + z2 / n) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

}  // namespace potts
