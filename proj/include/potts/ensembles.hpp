#pragma once

#include <functional>

#include "potts/model.hpp"
#include "potts/rng.hpp"

namespace potts {

/// Erdős–Rényi G(n, m): a uniformly random m-subset of the C(n,2) pairs,
/// drawn by a partial Fisher–Yates shuffle over pair indices.
SimpleGraph sample_gnm(int n, std::int64_t m, SeededStream& rng);
SimpleGraph sample_gnm(const ModelParams& params, SeededStream& rng);

/// Edge probabilities of the planted model.
struct PlantedProbabilities {
    double p1;  ///< monochromatic pairs: d k e^-beta / (n (k - c_beta))
    double p2;  ///< bichromatic pairs: d k / (n (k - c_beta))
};

PlantedProbabilities planted_probabilities(const ModelParams& params);

struct PlantedSample {
    SimpleGraph graph;
    ColorAssignment sigma_hat;
    double p1;
    double p2;
};

/// Uniform sigma_hat in [k]^n.
ColorAssignment sample_uniform_assignment(int n, int k, SeededStream& rng);

/// Planted graph for a given sigma_hat: each pair is present independently
/// with p1 (same color) or p2 (different colors).
SimpleGraph sample_planted_graph(const ModelParams& params, const ColorAssignment& sigma_hat, SeededStream& rng);

/// PM1 followed by PM2. Throws ParameterError if p2 >= 1.
PlantedSample sample_planted(const ModelParams& params, SeededStream& rng);

struct ConditionedSample {
    PlantedSample sample;
    int attempts;
};

using PlantedSampler = std::function<PlantedSample(SeededStream&)>;

/// Rejection-samples `sampler` until sigma_hat is balanced.
/// Throws SamplingFailure after max_tries attempts.
ConditionedSample condition_on_balanced(const PlantedSampler& sampler, SeededStream& rng, int max_tries);

/// Same distribution as condition_on_balanced(sample_planted), but rejects on
/// sigma_hat alone before any edges are drawn.
ConditionedSample sample_planted_balanced(const ModelParams& params, SeededStream& rng, int max_tries);

/// P(uniform sigma in [k]^n is balanced), exact via the class-size profile sum.
double balanced_probability(int n, int k);

}  // namespace potts
