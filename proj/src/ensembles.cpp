#include "potts/ensembles.hpp"

#include <cmath>
#include <unordered_map>

#include "potts/compositions.hpp"
#include "potts/errors.hpp"
#include "potts/numeric.hpp"

namespace potts {

double composition_count(int n, int parts) {
    if (parts <= 0) return n == 0 ? 1.0 : 0.0;
    return std::exp(log_binomial(n + parts - 1.0, parts - 1.0));
}

namespace {

// Pair index t in [0, C(n,2)) -> (u, v), u < v, row-major over u.
Edge decode_pair(std::int64_t t, int n) {
    // offset(u) = u*n - u*(u+1)/2 is the index of (u, u+1)
    const double nn = n;
    auto u = static_cast<std::int64_t>(std::floor((2 * nn - 1 - std::sqrt((2 * nn - 1) * (2 * nn - 1) - 8.0 * t)) / 2));
    auto offset = [n](std::int64_t r) { return r * n - r * (r + 1) / 2; };
    while (u > 0 && offset(u) > t) --u;
    while (offset(u + 1) <= t) ++u;
    const auto v = t - offset(u) + u + 1;
    return {static_cast<int>(u), static_cast<int>(v)};
}

}  // namespace

SimpleGraph sample_gnm(int n, std::int64_t m, SeededStream& rng) {
    const std::int64_t pairs = choose2(n);
    if (m < 0 || m > pairs)
        throw ParameterError("m = " + std::to_string(m) + " exceeds C(n,2) = " + std::to_string(pairs));
    // sparse Fisher–Yates: only displaced positions are stored
    std::unordered_map<std::int64_t, std::int64_t> moved;
    moved.reserve(static_cast<std::size_t>(2 * m));
    auto at = [&](std::int64_t i) {
        auto it = moved.find(i);
        return it == moved.end() ? i : it->second;
    };
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(m));
    for (std::int64_t i = 0; i < m; ++i) {
        const std::int64_t j = i + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(pairs - i)));
        const std::int64_t vi = at(i);
        const std::int64_t vj = at(j);
        moved[j] = vi;
        moved[i] = vj;
        edges.push_back(decode_pair(vj, n));
    }
    return SimpleGraph(n, std::move(edges));
}

SimpleGraph sample_gnm(const ModelParams& params, SeededStream& rng) {
    return sample_gnm(params.n(), params.m(), rng);
}

PlantedProbabilities planted_probabilities(const ModelParams& params) {
    const double k = params.k();
    const double c = params.c_beta();
    const double p2 = params.d() * k / (params.n() * (k - c));
    return {p2 * std::exp(-params.beta()), p2};
}

ColorAssignment sample_uniform_assignment(int n, int k, SeededStream& rng) {
    std::vector<int> colors(n);
    for (auto& c : colors) c = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
    return ColorAssignment(k, std::move(colors));
}

SimpleGraph sample_planted_graph(const ModelParams& params, const ColorAssignment& sigma_hat, SeededStream& rng) {
    const auto [p1, p2] = planted_probabilities(params);
    if (!(p2 < 1)) throw ParameterError("planted model needs p2 < 1 (n too small for d, k)");
    if (sigma_hat.n() != params.n()) throw ContractViolation("sigma_hat has the wrong length");
    const int n = params.n();
    const std::int64_t pairs = choose2(n);
    // Every pair is offered with probability p2 (geometric skips); a
    // monochromatic pair is then kept with probability p1/p2 = e^-beta.
    const double keep_mono = std::exp(-params.beta());
    const double log_q = std::log1p(-p2);
    std::vector<Edge> edges;
    std::int64_t t = -1;
    while (true) {
        const double u = 1.0 - rng.uniform();  // (0, 1]
        const double skip = std::floor(std::log(u) / log_q);
        if (!(t + 1 + skip < static_cast<double>(pairs))) break;
        t += 1 + static_cast<std::int64_t>(skip);
        const auto e = decode_pair(t, n);
        if (sigma_hat[e.first] == sigma_hat[e.second] && !rng.bernoulli(keep_mono)) continue;
        edges.push_back(e);
    }
    return SimpleGraph(n, std::move(edges));
}

PlantedSample sample_planted(const ModelParams& params, SeededStream& rng) {
    const auto probs = planted_probabilities(params);
    if (!(probs.p2 < 1)) throw ParameterError("planted model needs p2 < 1 (n too small for d, k)");
    auto sigma = sample_uniform_assignment(params.n(), params.k(), rng);
    auto graph = sample_planted_graph(params, sigma, rng);
    return {std::move(graph), std::move(sigma), probs.p1, probs.p2};
}

ConditionedSample condition_on_balanced(const PlantedSampler& sampler, SeededStream& rng, int max_tries) {
    if (max_tries < 1) throw ParameterError("max_tries must be at least 1");
    for (int attempt = 1; attempt <= max_tries; ++attempt) {
        auto s = sampler(rng);
        if (s.sigma_hat.is_balanced()) return {std::move(s), attempt};
    }
    throw SamplingFailure("no balanced sigma_hat within " + std::to_string(max_tries) + " attempts");
}

ConditionedSample sample_planted_balanced(const ModelParams& params, SeededStream& rng, int max_tries) {
    if (max_tries < 1) throw ParameterError("max_tries must be at least 1");
    const auto probs = planted_probabilities(params);
    if (!(probs.p2 < 1)) throw ParameterError("planted model needs p2 < 1 (n too small for d, k)");
    for (int attempt = 1; attempt <= max_tries; ++attempt) {
        auto sigma = sample_uniform_assignment(params.n(), params.k(), rng);
        if (!sigma.is_balanced()) continue;
        auto graph = sample_planted_graph(params, sigma, rng);
        return {{std::move(graph), std::move(sigma), probs.p1, probs.p2}, attempt};
    }
    throw SamplingFailure("no balanced sigma_hat within " + std::to_string(max_tries) + " attempts");
}

double balanced_probability(int n, int k) {
    LogSumExp acc;
    const double log_total = n * std::log(static_cast<double>(k));
    for_each_composition(n, k, [&](std::span<const int> sizes) {
        if (is_balanced_profile(sizes, n)) acc.add(log_multinomial(sizes) - log_total);
    });
    return std::exp(acc.value());
}

}  // namespace potts
