#include "potts/separability.hpp"

#include <cmath>

#include "potts/ensembles.hpp"
#include "potts/errors.hpp"
#include "potts/exact_partition.hpp"
#include "potts/mcmc.hpp"
#include "potts/parallel.hpp"

namespace potts {

SepConfig::SepConfig(int k, double kappa_cap) : kappa_eff_(LandscapeParams(k, 1.0, 1.0, kappa_cap).kappa_eff()) {}

double SepConfig::sep1_threshold(const ModelParams& params) {
    return 2.0 * params.n() * std::exp(-params.beta()) * std::log(static_cast<double>(params.k())) / params.k();
}

Sep1Result sep1_check(const SimpleGraph& g, const ColorAssignment& sigma, const ModelParams& params) {
    if (sigma.n() != g.n() || g.n() != params.n()) throw ContractViolation("graph, assignment and params disagree on n");
    if (sigma.k() != params.k()) throw ContractViolation("assignment uses a different k");
    Sep1Result r{true, SepConfig::sep1_threshold(params), std::vector<std::int64_t>(params.k(), 0)};
    for (auto [u, v] : g.edges())
        if (sigma[u] == sigma[v]) ++r.class_edges[sigma[u]];
    for (auto e : r.class_edges)
        if (static_cast<double>(e) > r.threshold) r.pass = false;
    return r;
}

std::vector<ColorAssignment> sigma_set_filter(const SimpleGraph& g, const ModelParams& params,
                                              const std::vector<ColorAssignment>& candidates) {
    std::vector<ColorAssignment> out;
    for (const auto& tau : candidates)
        if (tau.is_balanced() && sep1_check(g, tau, params).pass) out.push_back(tau);
    return out;
}

namespace {

void require_in_sigma_set(const SimpleGraph& g, const ColorAssignment& sigma, const ModelParams& params) {
    if (!sigma.is_balanced()) throw ContractViolation("SEP2 needs a balanced sigma");
    if (!sep1_check(g, sigma, params).pass) throw ContractViolation("SEP2 needs sigma to satisfy SEP1");
}

// Appends band entries of rho(sigma, tau); returns whether there were none.
bool scan_overlap(const ColorAssignment& sigma, const ColorAssignment& tau, double kappa,
                  std::vector<Sep2Violation>& out) {
    const int k = sigma.k();
    const auto counts = overlap_counts(sigma, tau);
    bool clean = true;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            const double rho = static_cast<double>(k) * counts[i * k + j] / sigma.n();
            if (rho > 0.51 && rho < 1 - kappa) {
                out.push_back({tau, i, j, rho});
                clean = false;
            }
        }
    return clean;
}

}  // namespace

Sep2Result sep2_check(const SimpleGraph& g, const ColorAssignment& sigma, const ModelParams& params,
                      const std::vector<ColorAssignment>& witnesses, const SepConfig& config) {
    require_in_sigma_set(g, sigma, params);
    Sep2Result r{true, false, 0, {}};
    for (const auto& tau : witnesses) {
        if (tau.n() != sigma.n() || tau.k() != sigma.k()) throw ContractViolation("witness shape differs from sigma");
        if (!tau.is_balanced() || !sep1_check(g, tau, params).pass) continue;
        ++r.witnesses_checked;
        if (!scan_overlap(sigma, tau, config.kappa_eff(), r.violations)) r.pass = false;
    }
    return r;
}

Sep2Result sep2_check_exhaustive(const SimpleGraph& g, const ColorAssignment& sigma, const ModelParams& params,
                                 const SepConfig& config) {
    require_in_sigma_set(g, sigma, params);
    const int n = g.n();
    const int k = params.k();
    if (std::pow(static_cast<double>(k), n) > kExhaustiveSep2Guard)
        throw CapacityError("exhaustive SEP2 limited to k^n <= 2e7");
    const auto states = static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(k), n)));
    Sep2Result r{true, true, 0, {}};
    for (std::int64_t idx = 0; idx < states; ++idx) {
        const auto tau = assignment_from_index(idx, n, k);
        if (!tau.is_balanced() || !sep1_check(g, tau, params).pass) continue;
        ++r.witnesses_checked;
        if (!scan_overlap(sigma, tau, config.kappa_eff(), r.violations)) r.pass = false;
    }
    return r;
}

bool in_planted_regime(const ModelParams& params) {
    const double k = params.k();
    const double d_lo = 2 * (k - 1) * std::log(k - 1);
    const double d_hi = (2 * k - 1) * std::log(k) - 2;
    return params.d() >= d_lo && params.d() <= d_hi && params.beta() >= std::log(k);
}

namespace {

std::vector<ColorAssignment> sample_witnesses(const SimpleGraph& g, const ColorAssignment& sigma_hat,
                                              const ModelParams& params, const SeparabilityOptions& opt,
                                              SeededStream& rng) {
    std::vector<ColorAssignment> out;
    const std::int64_t every =
        std::max<std::int64_t>(1, opt.witness_sweeps / std::max(1, opt.witnesses_per_chain)) * g.n();
    for (int c = 0; c < opt.witness_chains; ++c) {
        // half the chains start at the planted coloring, half at random
        ChainState s(g, c % 2 == 0 ? sigma_hat : sample_uniform_assignment(g.n(), params.k(), rng));
        for (int w = 0; w < opt.witnesses_per_chain; ++w) {
            for (std::int64_t t = 0; t < every; ++t) glauber_step(s, g, params.beta(), rng);
            out.push_back(s.assignment());
        }
    }
    return out;
}

}  // namespace

SeparabilityReport empirical_separability_rate(const ModelParams& params, const SeparabilityOptions& opt) {
    if (opt.samples < 1) throw ParameterError("separability rate needs at least one sample");
    const SepConfig config(params.k(), opt.kappa_cap);
    struct Outcome {
        bool sep1 = false;
        bool sep2 = false;
        double mono_per_vertex = 0;
    };
    std::vector<Outcome> outcomes(opt.samples);
    parallel_for(static_cast<std::size_t>(opt.samples), opt.threads, [&](std::size_t i) {
        SeededStream rng(opt.seed, i);
        const auto draw = sample_planted_balanced(params, rng, opt.max_tries);
        const auto& g = draw.sample.graph;
        const auto& sigma = draw.sample.sigma_hat;
        Outcome& o = outcomes[i];
        o.mono_per_vertex = static_cast<double>(hamiltonian(g, sigma)) / params.n();
        o.sep1 = sep1_check(g, sigma, params).pass;
        if (!o.sep1) return;
        const auto r = opt.exhaustive ? sep2_check_exhaustive(g, sigma, params, config)
                                      : sep2_check(g, sigma, params, sample_witnesses(g, sigma, params, opt, rng), config);
        o.sep2 = r.pass;
    });
    SeparabilityReport rep{};
    rep.samples = opt.samples;
    RunningStats mono;
    for (const auto& o : outcomes) {
        rep.sep1_passes += o.sep1;
        rep.sep2_passes += o.sep2;
        mono.add(o.mono_per_vertex);
    }
    rep.sep1_rate = static_cast<double>(rep.sep1_passes) / opt.samples;
    rep.sep2_rate = static_cast<double>(rep.sep2_passes) / opt.samples;
    rep.sep1_interval = wilson_interval(rep.sep1_passes, opt.samples);
    rep.sep2_interval = wilson_interval(rep.sep2_passes, opt.samples);
    rep.sep2_exhaustive = opt.exhaustive;
    rep.mean_mono_per_vertex = mono.mean();
    rep.predicted_mono_per_vertex = params.d() * std::exp(-params.beta()) / (2.0 * params.k());
    if (!in_planted_regime(params))
        rep.warning = "parameters outside d in [2(k-1)ln(k-1), (2k-1)ln k - 2], beta >= ln k";
    return rep;
}

}  // namespace potts
