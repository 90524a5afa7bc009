#pragma once

// Exact first and second moments of Z and Z_bal over G(n, m), evaluated as
// finite hypergeometric sums in log space.

#include <cstdint>
#include <map>
#include <vector>

#include "potts/model.hpp"
#include "potts/rng.hpp"

namespace potts {

/// ln k + (d/2) ln(1 - c_beta / k): the annealed free energy per vertex.
double annealed_free_energy(int k, double d, double beta);
double annealed_free_energy(const ModelParams& params);

/// ln E[exp(-beta H_G(sigma))] for a fixed sigma with F = forb(sigma)
/// monochromatic pairs of K_n, G uniform with m edges.
double log_first_moment_forb(std::int64_t forb, int n, std::int64_t m, double beta);
double exact_first_moment_sigma(const ColorAssignment& sigma, const ModelParams& params);

struct MomentReport {
    double exact_value = 0;  ///< natural log of the exact moment
    double mc_estimate = 0;  ///< sample mean of the random variable (linear scale)
    double mc_std_error = 0;
    std::int64_t n_samples = 0;
    double log_reference = 0;  ///< ln(k^n (1 - c_beta/k)^m)
    double log_ratio() const { return exact_value - log_reference; }
};

/// ln E[Z] (or ln E[Z_bal]) summed over class-size profiles.
MomentReport exact_first_moment_total(const ModelParams& params, bool restrict_balanced);

/// Adds a Monte Carlo estimate of E[Z] (or E[Z_bal]) from `samples` graphs
/// drawn from G(n, m), each evaluated by exact enumeration.
void add_mc_first_moment(MomentReport& report, const ModelParams& params, bool restrict_balanced, int samples,
                         std::uint64_t seed, int threads = 1);

/// Pairs of K_n split by which of sigma, tau makes them monochromatic.
struct PairClassCounts {
    std::int64_t a = 0;  ///< monochromatic under both
    std::int64_t b = 0;  ///< under sigma only
    std::int64_t c = 0;  ///< under tau only
    std::int64_t total = 0;  ///< C(n, 2)
    auto operator<=>(const PairClassCounts&) const = default;
};

PairClassCounts pair_class_counts(const ColorAssignment& sigma, const ColorAssignment& tau);
/// Same counts from an overlap count matrix (row sums = sigma's classes).
PairClassCounts pair_class_counts(const std::vector<int>& overlap_counts, int k);

inline constexpr double kPairCompositionGuard = 1e8;

/// ln E[exp(-beta (H(sigma) + H(tau)))] from the four-category hypergeometric sum.
double log_pair_moment(const PairClassCounts& counts, std::int64_t m, double beta);
double exact_pair_moment(const ColorAssignment& sigma, const ColorAssignment& tau, const ModelParams& params);

struct OverlapGroup {
    std::vector<int> counts;  ///< overlap counts, row-major k x k
    double log_pairs;         ///< ln #(sigma, tau) in B^2 with this overlap
    double log_value;         ///< ln E[Z_{rho,bal}]
    double f_value;           ///< f_{d,beta}(rho) at rho = (k/n) counts
    double scaled_gap(int n) const { return log_value / n - f_value; }
};

struct SecondMomentReport {
    double log_total;  ///< ln E[Z_bal^2]
    std::vector<OverlapGroup> groups;  ///< sorted by counts
    const OverlapGroup& dominant() const;
};

inline constexpr double kOverlapMatrixGuard = 1e7;

/// Groups E[Z_bal^2] by overlap matrix: enumerates integer overlap matrices
/// with balanced margins, weighting each by its multinomial pair count.
SecondMomentReport second_moment_by_overlap(const ModelParams& params);

inline constexpr double kBalancedPairGuard = 1e9;

/// ln sum over balanced (sigma, tau) of exp(exact_pair_moment): the direct
/// pair-by-pair route. Requires k^{2n} <= 1e9.
double balanced_pair_sum_direct(const ModelParams& params);

/// Same pair-by-pair route, grouped by overlap counts (group -> ln sum, #pairs).
std::map<std::vector<int>, std::pair<double, std::int64_t>> balanced_pairs_grouped(const ModelParams& params);

}  // namespace potts
