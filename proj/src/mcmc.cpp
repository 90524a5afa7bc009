#include "potts/mcmc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "potts/ensembles.hpp"
#include "potts/errors.hpp"
#include "potts/exact_partition.hpp"
#include "potts/moments.hpp"
#include "potts/numeric.hpp"
#include "potts/parallel.hpp"

namespace potts {

const char* to_string(Kernel k) { return k == Kernel::Glauber ? "glauber" : "metropolis"; }

Kernel parse_kernel(const std::string& s) {
    if (s == "glauber") return Kernel::Glauber;
    if (s == "metropolis") return Kernel::Metropolis;
    throw ParameterError("unknown kernel '" + s + "'");
}

ChainState::ChainState(const SimpleGraph& g, const ColorAssignment& start)
    : k_(start.k()), colors_(start.colors()), mono_edges_(0) {
    if (start.n() != g.n()) throw ContractViolation("assignment length differs from graph order");
    mono_edges_ = hamiltonian(g, start);
}

void ChainState::recolor(const SimpleGraph& g, int v, int c) {
    const int old = colors_[v];
    if (old == c) return;
    for (int w : g.neighbors(v)) mono_edges_ += (colors_[w] == c) - (colors_[w] == old);
    colors_[v] = c;
}

void ChainState::audit(const SimpleGraph& g) const {
    const auto h = hamiltonian(g, assignment());
    if (h != mono_edges_)
        throw ContractViolation("incremental energy " + std::to_string(mono_edges_) + " != recomputed " +
                                std::to_string(h));
}

namespace {

std::vector<int> neighbor_color_counts(const ChainState& s, const SimpleGraph& g, int v) {
    std::vector<int> counts(s.k(), 0);
    for (int w : g.neighbors(v)) ++counts[s.color(w)];
    return counts;
}

// exp(-beta * (count - min)) so that beta = inf keeps the least-conflicting colors
std::vector<double> heat_bath(const std::vector<int>& counts, double beta) {
    const int lowest = *std::min_element(counts.begin(), counts.end());
    std::vector<double> w(counts.size());
    double total = 0;
    for (std::size_t c = 0; c < counts.size(); ++c) {
        const int excess = counts[c] - lowest;
        w[c] = excess == 0 ? 1.0 : std::exp(-beta * excess);
        total += w[c];
    }
    for (auto& x : w) x /= total;
    return w;
}

double acceptance(int delta, double beta) {
    if (delta <= 0) return 1.0;
    return std::exp(-beta * delta);
}

}  // namespace

std::vector<double> conditional_distribution(const ChainState& s, const SimpleGraph& g, int v, double beta) {
    return heat_bath(neighbor_color_counts(s, g, v), beta);
}

void glauber_step(ChainState& s, const SimpleGraph& g, double beta, SeededStream& rng) {
    const int v = static_cast<int>(rng.below(static_cast<std::uint64_t>(s.n())));
    const auto p = conditional_distribution(s, g, v, beta);
    double u = rng.uniform();
    int c = 0;
    while (c + 1 < s.k() && u >= p[c]) {
        u -= p[c];
        ++c;
    }
    s.recolor(g, v, c);
    s.count_step();
}

void metropolis_step(ChainState& s, const SimpleGraph& g, double beta, SeededStream& rng) {
    const int v = static_cast<int>(rng.below(static_cast<std::uint64_t>(s.n())));
    const int c = static_cast<int>(rng.below(static_cast<std::uint64_t>(s.k())));
    const auto counts = neighbor_color_counts(s, g, v);
    if (rng.uniform() < acceptance(counts[c] - counts[s.color(v)], beta)) s.recolor(g, v, c);
    s.count_step();
}

void chain_step(Kernel kernel, ChainState& s, const SimpleGraph& g, double beta, SeededStream& rng) {
    if (kernel == Kernel::Glauber)
        glauber_step(s, g, beta, rng);
    else
        metropolis_step(s, g, beta, rng);
}

std::vector<double> transition_matrix(const SimpleGraph& g, int k, double beta, Kernel kernel) {
    const int n = g.n();
    const double states_d = std::pow(static_cast<double>(k), n);
    if (states_d > kTransitionGuard) throw CapacityError("transition matrix limited to 4096 states");
    const auto states = static_cast<std::int64_t>(std::llround(states_d));
    std::vector<double> t(static_cast<std::size_t>(states * states), 0.0);
    std::vector<std::int64_t> place(n, 1);
    for (int v = 1; v < n; ++v) place[v] = place[v - 1] * k;
    for (std::int64_t x = 0; x < states; ++x) {
        const ChainState s(g, assignment_from_index(x, n, k));
        double* row = t.data() + x * states;
        for (int v = 0; v < n; ++v) {
            const int own = s.color(v);
            const auto counts = neighbor_color_counts(s, g, v);
            if (kernel == Kernel::Glauber) {
                const auto p = heat_bath(counts, beta);
                for (int c = 0; c < k; ++c) row[x + (c - own) * place[v]] += p[c] / n;
            } else {
                for (int c = 0; c < k; ++c) {
                    const double a = acceptance(counts[c] - counts[own], beta) / (static_cast<double>(n) * k);
                    row[x + (c - own) * place[v]] += a;
                    row[x] += 1.0 / (static_cast<double>(n) * k) - a;
                }
            }
        }
    }
    return t;
}

EnergyBudget default_energy_budget(int n, std::int64_t measure_sweeps) {
    return {100 * static_cast<std::int64_t>(n), measure_sweeps, 20};
}

MeanEstimate estimate_mean_energy(ChainState& s, const SimpleGraph& g, double beta, const EnergyBudget& budget,
                                  SeededStream& rng, Kernel kernel) {
    if (budget.batches < 2) throw ParameterError("batch means need at least two batches");
    if (budget.burn_in_sweeps < 0) throw ParameterError("negative burn-in");
    const std::int64_t n = s.n();
    const std::int64_t steps = budget.measure_sweeps * n;
    if (steps < budget.batches) throw ParameterError("measurement budget smaller than the batch count");
    for (std::int64_t t = 0; t < budget.burn_in_sweeps * n; ++t) chain_step(kernel, s, g, beta, rng);
    RunningStats batches;
    CompensatedSum<double> total;
    std::int64_t done = 0;
    for (int b = 0; b < budget.batches; ++b) {
        const std::int64_t end = steps * (b + 1) / budget.batches;
        CompensatedSum<double> batch;
        const std::int64_t len = end - done;
        for (; done < end; ++done) {
            chain_step(kernel, s, g, beta, rng);
            batch.add(static_cast<double>(s.mono_edges()));
        }
        total.add(batch.value());
        batches.add(batch.value() / static_cast<double>(len));
    }
    return {total.value() / static_cast<double>(steps), batches.std_error(), steps};
}

MeanEstimate estimate_mean_energy(const SimpleGraph& g, int k, double beta, const EnergyBudget& budget,
                                  SeededStream& rng, Kernel kernel) {
    ChainState s(g, sample_uniform_assignment(g.n(), k, rng));
    return estimate_mean_energy(s, g, beta, budget, rng, kernel);
}

// ---------------------------------------------------------------------------

TISchedule::TISchedule(std::vector<double> beta_grid, std::int64_t sweeps_per_point, std::int64_t burn_in)
    : grid_(std::move(beta_grid)), sweeps_(sweeps_per_point), burn_in_(burn_in) {
    if (grid_.empty() || grid_.front() != 0.0) throw ParameterError("beta grid must start at 0");
    for (std::size_t i = 1; i < grid_.size(); ++i)
        if (!(grid_[i] > grid_[i - 1]) || !std::isfinite(grid_[i]))
            throw ParameterError("beta grid must be finite and strictly increasing");
    if (sweeps_ < 1 || burn_in_ < 0) throw ParameterError("schedule needs sweeps >= 1 and burn-in >= 0");
}

TISchedule TISchedule::uniform(double beta, int points, std::int64_t sweeps_per_point, std::int64_t burn_in) {
    if (!(beta >= 0) || !std::isfinite(beta)) throw ParameterError("target beta must be finite and >= 0");
    if (beta == 0) return TISchedule({0.0}, sweeps_per_point, burn_in);
    if (points < 2) throw ParameterError("a nonzero target needs at least two grid points");
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i) grid[i] = beta * i / (points - 1);
    grid.back() = beta;
    return TISchedule(std::move(grid), sweeps_per_point, burn_in);
}

namespace {

// Integral over [a, b] of the quadratic through (x0, x1, x2), as weights on
// the three ordinates: Simpson applied to the interpolant.
std::array<double, 3> quadratic_panel(double x0, double x1, double x2, double a, double b) {
    auto lagrange = [&](double x) {
        return std::array<double, 3>{(x - x1) * (x - x2) / ((x0 - x1) * (x0 - x2)),
                                     (x - x0) * (x - x2) / ((x1 - x0) * (x1 - x2)),
                                     (x - x0) * (x - x1) / ((x2 - x0) * (x2 - x1))};
    };
    const auto la = lagrange(a);
    const auto lm = lagrange((a + b) / 2);
    const auto lb = lagrange(b);
    std::array<double, 3> w{};
    for (int i = 0; i < 3; ++i) w[i] = (b - a) / 6 * (la[i] + 4 * lm[i] + lb[i]);
    return w;
}

double weighted_sum(const std::vector<double>& w, const std::vector<double>& f) {
    CompensatedSum<double> acc;
    for (std::size_t i = 0; i < w.size(); ++i) acc.add(w[i] * f[i]);
    return acc.value();
}

std::vector<double> trapezoid_weights(const std::vector<double>& x) {
    std::vector<double> w(x.size(), 0.0);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        w[i] += (x[i + 1] - x[i]) / 2;
        w[i + 1] += (x[i + 1] - x[i]) / 2;
    }
    return w;
}

template <typename T>
std::vector<T> every_other(const std::vector<T>& v) {
    std::vector<T> out;
    for (std::size_t i = 0; i < v.size(); i += 2) out.push_back(v[i]);
    return out;
}

// Richardson estimate when the grid halves cleanly, else Simpson vs trapezoid.
double quadrature_error(const std::vector<double>& x, const std::vector<double>& f) {
    if (x.size() < 3) return 0.0;
    const double fine = weighted_sum(simpson_weights(x), f);
    if ((x.size() - 1) % 4 == 0) {
        const auto xc = every_other(x);
        const double coarse = weighted_sum(simpson_weights(xc), every_other(f));
        return std::abs(fine - coarse) / 15;
    }
    return std::abs(fine - weighted_sum(trapezoid_weights(x), f));
}

TIResult assemble(const SimpleGraph& g, int k, const std::vector<double>& grid, std::vector<double> energy,
                  std::vector<double> error) {
    TIResult r;
    r.beta_grid = grid;
    const double base = g.n() * std::log(static_cast<double>(k));
    if (grid.size() == 1) {
        r.log_z = base;
        r.statistical_error = 0;
        r.quadrature_error = 0;
    } else {
        const auto w = simpson_weights(grid);
        r.log_z = base - weighted_sum(w, energy);
        double var = 0;
        for (std::size_t i = 0; i < w.size(); ++i) var += w[i] * w[i] * error[i] * error[i];
        r.statistical_error = std::sqrt(var);
        r.quadrature_error = quadrature_error(grid, energy);
    }
    r.mean_energy = std::move(energy);
    r.energy_error = std::move(error);
    return r;
}

}  // namespace

std::vector<double> simpson_weights(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<double> w(n, 0.0);
    if (n < 2) return w;
    if (n == 2) return trapezoid_weights(x);
    std::size_t i = 0;
    for (; i + 2 < n; i += 2) {
        const auto p = quadratic_panel(x[i], x[i + 1], x[i + 2], x[i], x[i + 2]);
        for (int j = 0; j < 3; ++j) w[i + j] += p[j];
    }
    if (i + 1 < n) {
        const auto p = quadratic_panel(x[n - 3], x[n - 2], x[n - 1], x[n - 2], x[n - 1]);
        for (int j = 0; j < 3; ++j) w[n - 3 + j] += p[j];
    }
    return w;
}

TIResult thermo_integrate_lnZ(const SimpleGraph& g, int k, const TISchedule& schedule, SeededStream& rng,
                              Kernel kernel) {
    const auto& grid = schedule.beta_grid();
    std::vector<double> energy(grid.size()), error(grid.size());
    ChainState s(g, sample_uniform_assignment(g.n(), k, rng));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] == 0.0) {
            // every edge is monochromatic with probability 1/k
            energy[i] = static_cast<double>(g.edge_count()) / k;
            error[i] = 0;
            continue;
        }
        const auto est =
            estimate_mean_energy(s, g, grid[i], {schedule.burn_in(), schedule.sweeps_per_point(), 20}, rng, kernel);
        energy[i] = est.mean;
        error[i] = est.std_error;
    }
    return assemble(g, k, grid, std::move(energy), std::move(error));
}

TIResult thermo_integrate_exact(const SimpleGraph& g, int k, const TISchedule& schedule) {
    const auto& grid = schedule.beta_grid();
    const auto hist = energy_histogram(g, k);
    std::vector<double> energy(grid.size()), error(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) energy[i] = mean_energy_from_histogram(hist, grid[i]);
    return assemble(g, k, grid, std::move(energy), std::move(error));
}

// ---------------------------------------------------------------------------

std::vector<FreeEnergyRow> free_energy_experiment(int k, double d, double beta, const std::vector<int>& n_grid,
                                                  int replicas, std::uint64_t seed, const FreeEnergyOptions& opt) {
    if (replicas < 1) throw ParameterError("need at least one replica");
    const double formula = annealed_free_energy(k, d, beta);
    std::vector<FreeEnergyRow> rows;
    for (int n : n_grid) {
        const ModelParams params(k, n, d, beta);
        if (opt.method == FreeEnergyMethod::Exact && std::pow(static_cast<double>(k), n) > kEnumerationGuard)
            throw CapacityError("exact free energy needs k^n <= 1e8; use thermodynamic integration");
        std::vector<double> per_vertex(replicas);
        const SeededStream base(seed, static_cast<std::uint64_t>(n));
        parallel_for(static_cast<std::size_t>(replicas), opt.threads, [&](std::size_t r) {
            if (beta == 0) {
                per_vertex[r] = std::log(static_cast<double>(k));
                return;
            }
            auto rng = base.child(r);
            const auto g = sample_gnm(params, rng);
            double log_z;
            if (opt.method == FreeEnergyMethod::Exact) {
                log_z = z_enumerate(g, k, beta).log_z;
            } else {
                const auto sched =
                    TISchedule::uniform(beta, opt.grid_points, opt.sweeps_per_point, opt.sweeps_per_point / 10);
                log_z = thermo_integrate_lnZ(g, k, sched, rng).log_z;
            }
            per_vertex[r] = log_z / n;
        });
        RunningStats stats;
        for (double x : per_vertex) stats.add(x);
        rows.push_back({n, stats.mean(), stats.stddev(), formula, replicas});
    }
    return rows;
}

}  // namespace potts
