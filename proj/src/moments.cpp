#include "potts/moments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "potts/compositions.hpp"
#include "potts/ensembles.hpp"
#include "potts/errors.hpp"
#include "potts/exact_partition.hpp"
#include "potts/landscape.hpp"
#include "potts/numeric.hpp"
#include "potts/parallel.hpp"

namespace potts {

double annealed_free_energy(int k, double d, double beta) {
    if (k < 2 || !(d > 0) || !(beta >= 0)) throw ParameterError("annealed free energy needs k >= 2, d > 0, beta >= 0");
    return std::log(static_cast<double>(k)) + d / 2 * std::log1p(-c_beta(beta) / k);
}

double annealed_free_energy(const ModelParams& params) {
    return annealed_free_energy(params.k(), params.d(), params.beta());
}

double log_first_moment_forb(std::int64_t forb, int n, std::int64_t m, double beta) {
    const std::int64_t pairs = choose2(n);
    if (m > pairs) throw ParameterError("m exceeds C(n,2)");
    if (forb < 0 || forb > pairs) throw ContractViolation("forb outside [0, C(n,2)]");
    if (beta == 0) return 0.0;  // the summands are a probability distribution
    // hypergeometric: m1 of the m edges land on the F monochromatic pairs
    const double log_norm = log_binomial(static_cast<double>(pairs), static_cast<double>(m));
    LogSumExp acc;
    const std::int64_t lo = std::max<std::int64_t>(0, m - (pairs - forb));
    const std::int64_t hi = std::min(m, forb);
    for (std::int64_t m1 = lo; m1 <= hi; ++m1)
        acc.add(-beta * static_cast<double>(m1) + log_binomial(static_cast<double>(forb), static_cast<double>(m1)) +
                log_binomial(static_cast<double>(pairs - forb), static_cast<double>(m - m1)) - log_norm);
    return acc.value();
}

double exact_first_moment_sigma(const ColorAssignment& sigma, const ModelParams& params) {
    if (sigma.n() != params.n()) throw ContractViolation("assignment length differs from n");
    return log_first_moment_forb(forb(sigma), params.n(), params.m(), params.beta());
}

namespace {

constexpr double kCompositionGuard = 1e8;

double log_reference(const ModelParams& params) {
    return params.n() * std::log(static_cast<double>(params.k())) +
           static_cast<double>(params.m()) * std::log1p(-params.c_beta() / params.k());
}

}  // namespace

MomentReport exact_first_moment_total(const ModelParams& params, bool restrict_balanced) {
    const int n = params.n();
    const int k = params.k();
    if (params.m() > choose2(n)) throw ParameterError("m exceeds C(n,2)");
    if (composition_count(n, k) > kCompositionGuard) throw CapacityError("too many class-size profiles");
    // group ln(#assignments) by Forb value, then one hypergeometric sum per value
    std::map<std::int64_t, LogSumExp> by_forb;
    for_each_composition(n, k, [&](std::span<const int> sizes) {
        if (restrict_balanced && !is_balanced_profile(sizes, n)) return;
        by_forb[forb_profile(sizes)].add(log_multinomial(sizes));
    });
    LogSumExp total;
    for (const auto& [f, count] : by_forb)
        total.add(count.value() + log_first_moment_forb(f, n, params.m(), params.beta()));
    MomentReport r;
    r.exact_value = total.value();
    r.log_reference = log_reference(params);
    return r;
}

void add_mc_first_moment(MomentReport& report, const ModelParams& params, bool restrict_balanced, int samples,
                         std::uint64_t seed, int threads) {
    if (samples < 1) throw ParameterError("Monte Carlo needs at least one sample");
    std::vector<double> z(samples);
    parallel_for(static_cast<std::size_t>(samples), threads, [&](std::size_t i) {
        SeededStream rng(seed, i);
        const auto g = sample_gnm(params, rng);
        const auto v = restrict_balanced ? z_balanced(g, params.k(), params.beta())
                                         : z_enumerate(g, params.k(), params.beta());
        z[i] = std::exp(v.log_z);
    });
    CompensatedSum<double> sum;
    for (double x : z) sum.add(x);
    const double mean = sum.value() / samples;
    CompensatedSum<double> sq;
    for (double x : z) sq.add((x - mean) * (x - mean));
    report.mc_estimate = mean;
    report.n_samples = samples;
    report.mc_std_error = samples > 1 ? std::sqrt(sq.value() / (samples - 1) / samples) : 0.0;
}

// ---------------------------------------------------------------------------

PairClassCounts pair_class_counts(const std::vector<int>& counts, int k) {
    if (counts.size() != static_cast<std::size_t>(k) * k) throw ContractViolation("overlap counts are not k*k");
    std::vector<int> rows(k, 0), cols(k, 0);
    std::int64_t both = 0;
    int n = 0;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            const int c = counts[static_cast<std::size_t>(i) * k + j];
            both += choose2(c);
            rows[i] += c;
            cols[j] += c;
            n += c;
        }
    return {both, forb_profile(rows) - both, forb_profile(cols) - both, choose2(n)};
}

PairClassCounts pair_class_counts(const ColorAssignment& sigma, const ColorAssignment& tau) {
    return pair_class_counts(overlap_counts(sigma, tau), sigma.k());
}

double log_pair_moment(const PairClassCounts& pc, std::int64_t m, double beta) {
    const std::int64_t rest = pc.total - pc.a - pc.b - pc.c;
    if (rest < 0) throw ContractViolation("pair class counts exceed C(n,2)");
    if (m > pc.total) throw ParameterError("m exceeds C(n,2)");
    const double work = static_cast<double>(std::min(pc.a, m) + 1) * static_cast<double>(std::min(pc.b, m) + 1) *
                        static_cast<double>(std::min(pc.c, m) + 1);
    if (work > kPairCompositionGuard) throw CapacityError("pair moment composition count exceeds its guard");
    if (beta == 0) return 0.0;
    const double log_norm = log_binomial(static_cast<double>(pc.total), static_cast<double>(m));
    LogSumExp acc;
    for (std::int64_t ma = 0; ma <= std::min(pc.a, m); ++ma) {
        const double la = log_binomial(static_cast<double>(pc.a), static_cast<double>(ma));
        for (std::int64_t mb = 0; mb <= std::min(pc.b, m - ma); ++mb) {
            const double lb = log_binomial(static_cast<double>(pc.b), static_cast<double>(mb));
            for (std::int64_t mc = 0; mc <= std::min(pc.c, m - ma - mb); ++mc) {
                const std::int64_t md = m - ma - mb - mc;
                if (md > rest) continue;
                acc.add(-beta * static_cast<double>(2 * ma + mb + mc) + la + lb +
                        log_binomial(static_cast<double>(pc.c), static_cast<double>(mc)) +
                        log_binomial(static_cast<double>(rest), static_cast<double>(md)) - log_norm);
            }
        }
    }
    return acc.value();
}

double exact_pair_moment(const ColorAssignment& sigma, const ColorAssignment& tau, const ModelParams& params) {
    if (sigma.n() != params.n() || sigma.k() != params.k()) throw ContractViolation("assignment does not match params");
    return log_pair_moment(pair_class_counts(sigma, tau), params.m(), params.beta());
}

// ---------------------------------------------------------------------------

const OverlapGroup& SecondMomentReport::dominant() const {
    return *std::max_element(groups.begin(), groups.end(),
                             [](const OverlapGroup& a, const OverlapGroup& b) { return a.log_value < b.log_value; });
}

SecondMomentReport second_moment_by_overlap(const ModelParams& params) {
    const int n = params.n();
    const int k = params.k();
    const int cells = k * k;
    if (composition_count(n, cells) > kOverlapMatrixGuard)
        throw CapacityError("too many overlap matrices to enumerate");
    const LandscapeParams lp(k, params.d(), params.beta());
    std::map<PairClassCounts, double> pair_cache;
    SecondMomentReport report{};
    LogSumExp total;
    std::vector<int> rows(k), cols(k);
    for_each_composition(n, cells, [&](std::span<const int> counts) {
        std::fill(rows.begin(), rows.end(), 0);
        std::fill(cols.begin(), cols.end(), 0);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                rows[i] += counts[i * k + j];
                cols[j] += counts[i * k + j];
            }
        if (!is_balanced_profile(rows, n) || !is_balanced_profile(cols, n)) return;
        std::vector<int> key(counts.begin(), counts.end());
        const auto pc = pair_class_counts(key, k);
        auto it = pair_cache.find(pc);
        if (it == pair_cache.end()) it = pair_cache.emplace(pc, log_pair_moment(pc, params.m(), params.beta())).first;
        const double log_pairs = log_multinomial(counts);
        Matrix rho(k);
        for (int t = 0; t < cells; ++t) rho.data()[t] = static_cast<double>(k) * counts[t] / n;
        OverlapGroup g{std::move(key), log_pairs, log_pairs + it->second, f_eval(rho, lp)};
        total.add(g.log_value);
        report.groups.push_back(std::move(g));
    });
    report.log_total = total.value();
    return report;
}

namespace {

std::vector<ColorAssignment> balanced_assignments(int n, int k) {
    const auto states = static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(k), n)));
    std::vector<ColorAssignment> out;
    for (std::int64_t idx = 0; idx < states; ++idx) {
        auto sigma = assignment_from_index(idx, n, k);
        if (sigma.is_balanced()) out.push_back(std::move(sigma));
    }
    return out;
}

}  // namespace

std::map<std::vector<int>, std::pair<double, std::int64_t>> balanced_pairs_grouped(const ModelParams& params) {
    const int n = params.n();
    const int k = params.k();
    if (std::pow(static_cast<double>(k), 2.0 * n) > kBalancedPairGuard)
        throw CapacityError("k^(2n) exceeds the balanced pair guard");
    const auto sigmas = balanced_assignments(n, k);
    std::map<PairClassCounts, double> pair_cache;
    std::map<std::vector<int>, std::pair<LogSumExp, std::int64_t>> acc;
    for (const auto& s : sigmas)
        for (const auto& t : sigmas) {
            // classify every pair of K_n directly rather than through the overlap counts
            PairClassCounts pc{0, 0, 0, choose2(n)};
            for (int u = 0; u < n; ++u)
                for (int v = u + 1; v < n; ++v) {
                    const bool ms = s[u] == s[v];
                    const bool mt = t[u] == t[v];
                    pc.a += ms && mt;
                    pc.b += ms && !mt;
                    pc.c += !ms && mt;
                }
            auto it = pair_cache.find(pc);
            if (it == pair_cache.end())
                it = pair_cache.emplace(pc, log_pair_moment(pc, params.m(), params.beta())).first;
            auto& slot = acc[overlap_counts(s, t)];
            slot.first.add(it->second);
            ++slot.second;
        }
    std::map<std::vector<int>, std::pair<double, std::int64_t>> out;
    for (auto& [key, v] : acc) out.emplace(key, std::make_pair(v.first.value(), v.second));
    return out;
}

double balanced_pair_sum_direct(const ModelParams& params) {
    LogSumExp total;
    for (const auto& [key, v] : balanced_pairs_grouped(params)) total.add(v.first);
    return total.value();
}

}  // namespace potts
