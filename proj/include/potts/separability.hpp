#pragma once

// SEP1/SEP2 predicates for a graph and a balanced coloring, the candidate
// set Sigma_{G,beta}, and pass rates over planted samples.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "potts/landscape.hpp"
#include "potts/model.hpp"
#include "potts/numeric.hpp"
#include "potts/rng.hpp"

namespace potts {

/// Band width shared with the landscape (kappa_eff of a LandscapeParams).
/// The SEP1 threshold is recomputed from the model parameters on every call.
class SepConfig {
public:
    explicit SepConfig(int k, double kappa_cap = LandscapeParams::kDefaultKappaCap);

    double kappa_eff() const { return kappa_eff_; }
    /// 2 n exp(-beta) ln k / k.
    static double sep1_threshold(const ModelParams& params);

private:
    double kappa_eff_;
};

struct Sep1Result {
    bool pass;
    double threshold;
    std::vector<std::int64_t> class_edges;  ///< edges spanned by each color class
};

/// Every color class spans at most the threshold number of edges.
Sep1Result sep1_check(const SimpleGraph& g, const ColorAssignment& sigma, const ModelParams& params);

/// Balanced candidates passing SEP1, in input order.
std::vector<ColorAssignment> sigma_set_filter(const SimpleGraph& g, const ModelParams& params,
                                              const std::vector<ColorAssignment>& candidates);

struct Sep2Violation {
    ColorAssignment tau;
    int i;
    int j;
    double value;  ///< rho_ij(sigma, tau), inside (0.51, 1 - kappa)
};

struct Sep2Result {
    bool pass;
    bool exhaustive;  ///< false: only the supplied witnesses were checked
    std::int64_t witnesses_checked;  ///< witnesses in Sigma_{G,beta}
    std::vector<Sep2Violation> violations;
};

/// Checks overlap entries of sigma against witnesses tau in Sigma_{G,beta};
/// witnesses outside that set are skipped. Throws ContractViolation unless
/// sigma itself is balanced and passes SEP1.
Sep2Result sep2_check(const SimpleGraph& g, const ColorAssignment& sigma, const ModelParams& params,
                      const std::vector<ColorAssignment>& witnesses, const SepConfig& config);

inline constexpr double kExhaustiveSep2Guard = 2e7;

/// Same check over every balanced tau. Requires k^n <= 2e7.
Sep2Result sep2_check_exhaustive(const SimpleGraph& g, const ColorAssignment& sigma, const ModelParams& params,
                                 const SepConfig& config);

/// Inside [2(k-1) ln(k-1), (2k-1) ln k - 2] x [ln k, inf).
bool in_planted_regime(const ModelParams& params);

struct SeparabilityOptions {
    int samples = 100;
    std::uint64_t seed = 1;
    bool exhaustive = false;    ///< SEP2 over all balanced tau (tiny n only)
    int witness_chains = 4;     ///< Glauber chains per sample for SEP2 witnesses
    std::int64_t witness_sweeps = 100;
    int witnesses_per_chain = 10;
    int max_tries = 100000;     ///< rejection budget for a balanced planted coloring
    double kappa_cap = LandscapeParams::kDefaultKappaCap;
    int threads = 1;
};

struct SeparabilityReport {
    int samples;
    std::int64_t sep1_passes;
    std::int64_t sep2_passes;  ///< SEP1 and SEP2 both hold
    double sep1_rate;
    double sep2_rate;
    Interval sep1_interval;
    Interval sep2_interval;
    bool sep2_exhaustive;
    double mean_mono_per_vertex;       ///< H(sigma_hat)/n averaged over samples
    double predicted_mono_per_vertex;  ///< d exp(-beta) / (2k)
    std::optional<std::string> warning;
};

/// Pass rates over planted samples conditioned on a balanced sigma_hat.
/// A finite-n surrogate; without `exhaustive` the SEP2 rate is an upper bound
/// on the exhaustive rate, since only sampled witnesses are tried.
SeparabilityReport empirical_separability_rate(const ModelParams& params, const SeparabilityOptions& opt);

}  // namespace potts
