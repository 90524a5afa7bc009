#include "potts/exact_partition.hpp"

#include <cmath>
#include <numeric>

#include "potts/errors.hpp"
#include "potts/numeric.hpp"
#include "potts/parallel.hpp"

namespace potts {

const char* to_string(PartitionMethod m) {
    return m == PartitionMethod::Enumeration ? "enumeration" : "fk-expansion";
}

namespace {

double state_count(int n, int k) { return std::pow(static_cast<double>(k), n); }

void require_enumerable(int n, int k, double guard) {
    if (state_count(n, k) > guard)
        throw CapacityError("k^n = " + std::to_string(k) + "^" + std::to_string(n) + " exceeds the enumeration guard");
}

// Enumerates assignments whose top `fixed` vertices carry the digits of
// `prefix`, walking the low vertices with an odometer and maintaining H and
// the class sizes incrementally.
void histogram_block(const SimpleGraph& g, int k, bool balanced_only, int free_vertices, std::int64_t prefix,
                     std::vector<std::uint64_t>& counts) {
    const int n = g.n();
    std::vector<int> color(n, 0);
    std::vector<int> sizes(k, 0);
    for (int v = free_vertices; v < n; ++v) {
        color[v] = static_cast<int>(prefix % k);
        prefix /= k;
    }
    for (int v = 0; v < n; ++v) ++sizes[color[v]];
    std::int64_t h = 0;
    for (auto [u, v] : g.edges()) h += color[u] == color[v];

    auto recolor = [&](int v, int c) {
        for (int w : g.neighbors(v)) h += (color[w] == c) - (color[w] == color[v]);
        --sizes[color[v]];
        ++sizes[c];
        color[v] = c;
    };

    while (true) {
        if (!balanced_only || is_balanced_profile(sizes, n)) ++counts[static_cast<std::size_t>(h)];
        int v = 0;
        while (v < free_vertices && color[v] == k - 1) {
            recolor(v, 0);
            ++v;
        }
        if (v == free_vertices) break;
        recolor(v, color[v] + 1);
    }
}

}  // namespace

std::vector<std::uint64_t> energy_histogram(const SimpleGraph& g, int k, bool balanced_only, int threads) {
    const int n = g.n();
    if (k < 1) throw ParameterError("k must be positive");
    require_enumerable(n, k, kEnumerationGuard);
    const std::size_t bins = g.edge_count() + 1;
    // split on the top vertices so that each block has at least ~k^8 states
    const int fixed = std::max(0, std::min(n, n - 8));
    const int top = std::min(fixed, 3);
    const int free_vertices = n - top;
    const auto blocks = static_cast<std::size_t>(std::llround(state_count(top, k)));
    std::vector<std::vector<std::uint64_t>> partial(blocks, std::vector<std::uint64_t>(bins, 0));
    parallel_for(blocks, threads, [&](std::size_t b) {
        histogram_block(g, k, balanced_only, free_vertices, static_cast<std::int64_t>(b), partial[b]);
    });
    std::vector<std::uint64_t> counts(bins, 0);
    for (const auto& p : partial)
        for (std::size_t h = 0; h < bins; ++h) counts[h] += p[h];
    return counts;
}

double log_partition_from_histogram(const std::vector<std::uint64_t>& counts, double beta) {
    LogSumExp acc;
    for (std::size_t h = 0; h < counts.size(); ++h)
        if (counts[h] > 0) acc.add(std::log(static_cast<double>(counts[h])) - beta * static_cast<double>(h));
    return acc.value();
}

double mean_energy_from_histogram(const std::vector<std::uint64_t>& counts, double beta) {
    const double log_z = log_partition_from_histogram(counts, beta);
    CompensatedSum<long double> acc;
    for (std::size_t h = 1; h < counts.size(); ++h)
        if (counts[h] > 0)
            acc.add(static_cast<long double>(h) *
                    std::exp(static_cast<long double>(std::log(static_cast<double>(counts[h])) -
                                                      beta * static_cast<double>(h) - log_z)));
    return static_cast<double>(acc.value());
}

PartitionValue z_enumerate(const SimpleGraph& g, int k, double beta, int threads) {
    return {log_partition_from_histogram(energy_histogram(g, k, false, threads), beta), PartitionMethod::Enumeration};
}

PartitionValue z_balanced(const SimpleGraph& g, int k, double beta, int threads) {
    return {log_partition_from_histogram(energy_histogram(g, k, true, threads), beta), PartitionMethod::Enumeration};
}

double exact_mean_energy(const SimpleGraph& g, int k, double beta, int threads) {
    return mean_energy_from_histogram(energy_histogram(g, k, false, threads), beta);
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    int components;
    explicit UnionFind(int n) : parent(n), components(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent[a] = b;
            --components;
        }
    }
};

}  // namespace

PartitionValue z_fk(const SimpleGraph& g, int k, double beta) {
    const int m = static_cast<int>(g.edge_count());
    if (m > kFkEdgeGuard) throw CapacityError("FK expansion limited to 26 edges, got " + std::to_string(m));
    const int n = g.n();
    // counts[a][c]: subsets with |A| = a and c(A) = c components
    std::vector<std::vector<std::uint64_t>> counts(m + 1, std::vector<std::uint64_t>(n + 1, 0));
    const std::uint64_t subsets = std::uint64_t{1} << m;
    std::uint64_t gray = 0;
    int size = 0;
    for (std::uint64_t step = 0; step < subsets; ++step) {
        if (step > 0) {
            // toggle the edge at the lowest set bit of step
            const int bit = __builtin_ctzll(step);
            gray ^= std::uint64_t{1} << bit;
            size += (gray >> bit & 1) ? 1 : -1;
        }
        UnionFind uf(n);
        for (int e = 0; e < m; ++e)
            if (gray >> e & 1) uf.unite(g.edges()[e].first, g.edges()[e].second);
        ++counts[size][uf.components];
    }
    // (e^-beta - 1)^a alternates in sign; keep the two halves apart
    const long double v = std::expm1(-static_cast<long double>(beta));
    CompensatedSum<long double> positive;
    CompensatedSum<long double> negative;
    for (int a = 0; a <= m; ++a) {
        const long double weight = std::pow(std::abs(v), static_cast<long double>(a));
        for (int c = 0; c <= n; ++c) {
            if (counts[a][c] == 0) continue;
            const long double term =
                static_cast<long double>(counts[a][c]) * weight * std::pow(static_cast<long double>(k), c);
            if (a % 2 == 0 || v == 0)
                positive.add(term);
            else
                negative.add(term);
        }
    }
    const long double z = positive.value() - negative.value();
    if (!(z > 0)) throw NumericError("FK expansion lost all precision", static_cast<double>(z));
    return {static_cast<double>(std::log(z)), PartitionMethod::FkExpansion};
}

std::int64_t assignment_index(const ColorAssignment& sigma) {
    std::int64_t idx = 0;
    for (int v = sigma.n() - 1; v >= 0; --v) idx = idx * sigma.k() + sigma[v];
    return idx;
}

ColorAssignment assignment_from_index(std::int64_t index, int n, int k) {
    std::vector<int> colors(n);
    for (int v = 0; v < n; ++v) {
        colors[v] = static_cast<int>(index % k);
        index /= k;
    }
    return ColorAssignment(k, std::move(colors));
}

std::vector<double> gibbs_exact(const SimpleGraph& g, int k, double beta) {
    const int n = g.n();
    require_enumerable(n, k, kGibbsGuard);
    const auto states = static_cast<std::int64_t>(std::llround(state_count(n, k)));
    std::vector<double> log_w(static_cast<std::size_t>(states));
    for (std::int64_t idx = 0; idx < states; ++idx)
        log_w[idx] = -beta * static_cast<double>(hamiltonian(g, assignment_from_index(idx, n, k)));
    const double log_z = log_sum_exp(log_w);
    for (auto& w : log_w) w = std::exp(w - log_z);
    return log_w;
}

}  // namespace potts
