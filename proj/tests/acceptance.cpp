// Acceptance run: one PASS/FAIL line per criterion. `--only N` runs one.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "potts/ensembles.hpp"
#include "potts/exact_partition.hpp"
#include "potts/landscape.hpp"
#include "potts/mcmc.hpp"
#include "potts/model.hpp"
#include "potts/moments.hpp"
#include "potts/numeric.hpp"
#include "potts/parallel.hpp"
#include "potts/separability.hpp"

using namespace potts;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::vector<double> dirichlet(int k, std::mt19937_64& eng) {
    std::gamma_distribution<double> g(1.0, 1.0);
    std::vector<double> p(k);
    double s = 0;
    for (auto& x : p) s += (x = g(eng) + 1e-300);
    for (auto& x : p) x /= s;
    return p;
}

Matrix random_row_stochastic(int k, std::mt19937_64& eng) {
    Matrix m(k);
    for (int i = 0; i < k; ++i) {
        const auto p = dirichlet(k, eng);
        for (int j = 0; j < k; ++j) m(i, j) = p[j];
    }
    return m;
}

Outcome oracle_equivalence() {
    SeededStream rng(101, 0);
    const int ks[] = {2, 3, 4};
    double worst = 0;
    for (int t = 0; t < 100; ++t) {
        const int n = 2 + static_cast<int>(rng.below(7));
        const auto m = static_cast<std::int64_t>(rng.below(std::min<std::int64_t>(14, choose2(n)) + 1));
        const int k = ks[rng.below(3)];
        const double betas[] = {0.0, 0.5, std::log(k), 3.0};
        const double beta = betas[t % 4];
        const auto g = sample_gnm(n, m, rng);
        const double a = z_enumerate(g, k, beta).log_z;
        const double b = z_fk(g, k, beta).log_z;
        worst = std::max(worst, std::abs(std::expm1(a - b)));
    }
    return {worst < 1e-9, fmt("max relative difference %.3g over 100 instances", worst)};
}

Outcome first_moment_mc() {
    const ModelParams p(3, 10, 3.0, std::log(3.0));
    auto report = exact_first_moment_total(p, false);
    add_mc_first_moment(report, p, false, 2000, 202, default_thread_count());
    const double exact = std::exp(report.exact_value);
    const double z = std::abs(report.mc_estimate - exact) / report.mc_std_error;
    return {z <= 3, fmt("exact E[Z] %.6g, MC mean %.6g +- %.3g (%.2f standard errors)", exact, report.mc_estimate,
                        report.mc_std_error, z)};
}

Outcome second_moment_regrouping() {
    const ModelParams p(3, 6, 2.0, 1.0);
    const double grouped = second_moment_by_overlap(p).log_total;
    const double direct = balanced_pair_sum_direct(p);
    const double rel = std::abs(std::expm1(grouped - direct));
    return {rel < 1e-10, fmt("ln grouped %.15g, ln direct %.15g, relative difference %.3g", grouped, direct, rel)};
}

Outcome free_energy_trend() {
    FreeEnergyOptions opt;
    opt.threads = default_thread_count();
    const auto rows = free_energy_experiment(3, 2.0, 1.0, {8, 10, 12, 14}, 200, 404, opt);
    bool gap_ok = rows.back().gap() < 0.08;
    bool std_ok = true;
    std::string detail;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        detail += fmt("n=%d gap %.4f std %.4f; ", rows[i].n, rows[i].gap(), rows[i].std);
        if (i > 0) {
            gap_ok = gap_ok && rows[i].gap() <= rows[i - 1].gap();
            std_ok = std_ok && rows[i].std < rows[i - 1].std;
        }
    }
    detail += fmt("gap trend %s, std trend %s", gap_ok ? "ok" : "broken", std_ok ? "ok" : "broken");
    return {gap_ok && std_ok, detail};
}

Outcome gradient_check() {
    std::mt19937_64 eng(505);
    std::uniform_real_distribution<double> unit(0, 1);
    double worst = 0;
    for (int k : {3, 5, 10})
        for (int t = 0; t < 100; ++t) {
            auto rho = random_row_stochastic(k, eng);
            for (auto& x : rho.data()) x = 0.9 * x + 0.1 / k;
            const LandscapeParams p(k, 2 * k * std::log(k) * (0.01 + 0.99 * unit(eng)), 5 * (0.01 + 0.99 * unit(eng)));
            const auto g = grad_f(rho, p);
            const auto as_f = [&](const std::vector<double>& x) { return f_eval(Matrix(k, x), p); };
            for (std::size_t i = 0; i < rho.data().size(); ++i) {
                const double fd = oracle::central_difference(as_f, rho.data(), i, 1e-6);
                worst = std::max(worst, std::abs(g.data()[i] - fd) / std::max(1.0, std::abs(fd)));
            }
        }
    return {worst < 1e-5, fmt("max relative error %.3g over 300 matrices", worst)};
}

Outcome easy_region() {
    bool ok = true;
    std::string detail;
    for (int k = 3; k <= 6; ++k)
        for (double beta : {0.5, std::log(k)}) {
            const LandscapeParams p(k, 0.9 * 2 * (k - 1) * std::log(k - 1), beta);
            AscentOptions opt;
            opt.threads = default_thread_count();
            const auto r = maximize_f(p, Domain::D, opt);
            const auto bar = make_rho_bar(k);
            const double gap = std::abs(r.f_value - f_eval(bar.entries(), p));
            const double dist = distance_modulo_permutation(r.maximizer.entries(), bar.entries());
            const bool good = gap < 1e-7 && dist < 1e-4;
            ok = ok && good;
            detail += fmt("k=%d beta=%.3f gap %.2g dist %.2g, %zu/%d starts at f*%s; ", k, beta, gap, dist,
                          r.near_optimal.size(), r.starts_run, good ? "" : " (!)");
        }
    return {ok, detail};
}

Outcome separable_region() {
    bool ok = true;
    std::string detail;
    for (int k : {20, 50})
        for (double beta : {std::log(k), 2 * std::log(k)}) {
            const double d = d_star(k);
            const LandscapeParams p(k, d, beta, 0.25);
            AscentOptions opt;
            opt.threads = default_thread_count();
            const auto r = maximize_f(p, Domain::DSep, opt);
            const double gap = std::abs(r.f_value - f_eval(make_rho_bar(k).entries(), p));
            double min_margin = INFINITY, stable_margin = 0;
            int negative = 0;
            for (const auto& e : verify_barmax(k, d, beta)) {
                if (e.s == -1) stable_margin = e.margin();
                else if (e.s != 0) {
                    min_margin = std::min(min_margin, e.margin());
                    negative += e.margin() <= 0;
                }
            }
            const bool good = gap < 1e-7 && min_margin > 0 && stable_margin > 0;
            ok = ok && good;
            detail += fmt("k=%d beta=%.3f gap %.2g, rho_s margins min %.3g (%d of %d nonpositive), rho_stable margin "
                          "%.3g%s; ",
                          k, beta, gap, min_margin, negative, k, stable_margin, good ? "" : " (!)");
        }
    return {ok, detail};
}

Outcome monotonicity() {
    std::mt19937_64 eng(808);
    std::uniform_real_distribution<double> unit(0, 1);
    int violations = 0;
    double worst_beta = -INFINITY, worst_d = -INFINITY;
    for (int k : {5, 10})
        for (int t = 0; t < 1000; ++t) {
            const auto rho = random_row_stochastic(k, eng);
            const double beta = 5 * (1 - unit(eng));
            const double d = 2 * k * std::log(k) * (1 - unit(eng));
            const LandscapeParams p(k, d, beta);
            const double db = monotonicity_check_beta(rho, p);
            const double dd = monotonicity_check_d(rho, p);
            worst_beta = std::max(worst_beta, db);
            worst_d = std::max(worst_d, dd);
            violations += (db >= 0) + (dd >= 0);
        }
    return {violations == 0,
            fmt("%d violations; largest df/dbeta %.3g, largest df/dd %.3g", violations, worst_beta, worst_d)};
}

Outcome planted_identities() {
    double worst_ratio = 0, worst_mean = 0;
    for (int k : {2, 3, 5, 10})
        for (int n : {100, 1000, 10000})
            for (double d : {1.0, 5.0, 10.0})
                for (double beta : {0.0, 0.5, 2.0, 5.0}) {
                    const ModelParams p(k, n, d, beta);
                    const auto pr = planted_probabilities(p);
                    worst_ratio = std::max(worst_ratio, std::abs(pr.p1 / pr.p2 / std::exp(-beta) - 1));
                    worst_mean = std::max(worst_mean, std::abs((pr.p1 / k + (1 - 1.0 / k) * pr.p2) / (d / n) - 1));
                }
    const double tol = 8 * std::numeric_limits<double>::epsilon();

    const ModelParams p(5, 500, 10.0, 2.0);
    const SeededStream root(909, 0);
    std::vector<double> counts(500);
    parallel_for(counts.size(), default_thread_count(), [&](std::size_t i) {
        auto rng = root.child(i);
        counts[i] = static_cast<double>(sample_planted(p, rng).graph.edge_count());
    });
    RunningStats stats;
    for (double c : counts) stats.add(c);
    const double z = std::abs(stats.mean() - static_cast<double>(p.m())) / stats.std_error();
    const bool ok = worst_ratio <= tol && worst_mean <= tol && z <= 3;
    return {ok, fmt("ratio error %.3g, mean-degree error %.3g (tolerance %.3g); mean edges %.2f vs m = %lld, "
                    "%.2f standard errors (per-sample sd %.2f)",
                    worst_ratio, worst_mean, tol, stats.mean(), static_cast<long long>(p.m()), z, stats.stddev())};
}

double total_variation(const std::vector<double>& counts, double total, const std::vector<double>& mu) {
    double tv = 0;
    for (std::size_t x = 0; x < mu.size(); ++x) tv += std::abs(counts[x] / total - mu[x]);
    return tv / 2;
}

Outcome mcmc_correctness() {
    const int steps = 1000000;
    SeededStream rng(1010, 0);
    double worst_tv = 0, worst_floor = 0;
    for (int t = 0; t < 3; ++t) {
        const auto g = sample_gnm(6, edge_count(3.0, 6), rng);
        const auto mu = gibbs_exact(g, 3, 1.0);
        ChainState s(g, sample_uniform_assignment(6, 3, rng));
        for (int i = 0; i < 600; ++i) glauber_step(s, g, 1.0, rng);
        std::vector<double> counts(mu.size(), 0);
        for (int i = 0; i < steps; ++i) {
            glauber_step(s, g, 1.0, rng);
            counts[assignment_index(s.assignment())] += 1;
        }
        worst_tv = std::max(worst_tv, total_variation(counts, steps, mu));

        // Same number of independent exact draws: the sampling-noise floor.
        std::vector<double> cdf(mu.size());
        std::partial_sum(mu.begin(), mu.end(), cdf.begin());
        std::vector<double> iid(mu.size(), 0);
        for (int i = 0; i < steps; ++i) {
            const auto it = std::upper_bound(cdf.begin(), cdf.end(), rng.uniform() * cdf.back());
            iid[std::min<std::size_t>(it - cdf.begin(), mu.size() - 1)] += 1;
        }
        worst_floor = std::max(worst_floor, total_variation(iid, steps, mu));
    }

    double worst_balance = 0;
    for (int n = 2; n <= 4; ++n)
        for (int k : {2, 3})
            for (double beta : {0.0, 1.0, 3.0})
                for (Kernel kernel : {Kernel::Glauber, Kernel::Metropolis}) {
                    const auto g = sample_gnm(n, static_cast<std::int64_t>(rng.below(choose2(n) + 1)), rng);
                    const auto mu = gibbs_exact(g, k, beta);
                    const auto tm = transition_matrix(g, k, beta, kernel);
                    const std::size_t states = mu.size();
                    for (std::size_t x = 0; x < states; ++x)
                        for (std::size_t y = 0; y < states; ++y)
                            worst_balance = std::max(
                                worst_balance, std::abs(mu[x] * tm[x * states + y] - mu[y] * tm[y * states + x]));
                }

    const auto g = sample_gnm(10, edge_count(3.0, 10), rng);
    const double exact = z_enumerate(g, 3, 2.0).log_z;
    const auto ti = thermo_integrate_lnZ(g, 3, TISchedule::uniform(2.0, kDefaultGridPoints, 20000, 2000), rng);
    const double ti_rel = std::abs(ti.log_z - exact) / std::abs(exact);

    const bool ok = worst_tv < 0.01 && worst_balance < 1e-12 && ti_rel < 0.005;
    return {ok, fmt("Glauber TV %.4f (limit 0.01; %d-draw i.i.d. TV %.4f); detailed balance %.3g; "
                    "TI ln Z %.6f vs %.6f (relative %.3g)",
                    worst_tv, steps, worst_floor, worst_balance, ti.log_z, exact, ti_rel)};
}

Outcome separability_surrogate() {
    const int k = 10;
    const ModelParams p(k, 2000, 2 * (k - 1) * std::log(k - 1), 2 * std::log(k));
    SeparabilityOptions opt;
    opt.samples = 200;
    opt.seed = 1111;
    opt.threads = default_thread_count();
    const auto r = empirical_separability_rate(p, opt);
    return {r.sep1_rate >= 0.99,
            fmt("SEP1 rate %.3f [%.3f, %.3f], threshold %.2f edges per class, mono per vertex %.4f (predicted %.4f); "
                "SEP2 rate (witness upper bound) %.3f",
                r.sep1_rate, r.sep1_interval.lo, r.sep1_interval.hi, SepConfig::sep1_threshold(p),
                r.mean_mono_per_vertex, r.predicted_mono_per_vertex, r.sep2_rate)};
}

Outcome entropy_property() {
    std::mt19937_64 eng(1212);
    int violations = 0;
    for (int t = 0; t < 10000; ++t) {
        const int k = 2 + static_cast<int>(eng() % 19);
        const auto p = dirichlet(k, eng);
        std::vector<int> order(k);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), eng);
        order.resize(1 + eng() % (k - 1));
        violations += !entropy_bound_check(p, order);
    }
    return {violations == 0, fmt("%d violations over 10000 pairs", violations)};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    int only = 0;
    app.add_option("--only", only, "run a single criterion (1-12)")->check(CLI::Range(1, 12));
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria = {
        {1, "partition oracle equivalence", oracle_equivalence},
        {2, "first moment exact vs Monte Carlo", first_moment_mc},
        {3, "second moment overlap regrouping", second_moment_regrouping},
        {4, "free energy finite-size trend", free_energy_trend},
        {5, "landscape gradient", gradient_check},
        {6, "landscape maximum, easy region", easy_region},
        {7, "landscape maximum over separable matrices", separable_region},
        {8, "monotonicity in beta and d", monotonicity},
        {9, "planted model identities", planted_identities},
        {10, "MCMC correctness", mcmc_correctness},
        {11, "SEP1 pass rate", separability_surrogate},
        {12, "entropy bound", entropy_property},
    };

    bool all = true;
    for (const auto& c : criteria) {
        if (only != 0 && c.id != only) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %d (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                    secs);
        std::fflush(stdout);
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
