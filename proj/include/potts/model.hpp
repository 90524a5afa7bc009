#pragma once

// Core domain types of the Potts antiferromagnet on random graphs: model
// parameters, simple graphs, color assignments, k x k stochastic matrices
// and the scalar entropy helpers shared by every other module.
//
// Vertices and colors are 0-based in memory and in every file format.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace potts {

/// (k, n, d, beta) with the derived edge count m = ceil(d n / 2) and
/// c_beta = 1 - exp(-beta).
class ModelParams {
public:
    ModelParams(int k, int n, double d, double beta);

    int k() const { return k_; }
    int n() const { return n_; }
    double d() const { return d_; }
    double beta() const { return beta_; }
    std::int64_t m() const;
    double c_beta() const;

    ModelParams with_n(int n) const { return {k_, n, d_, beta_}; }
    ModelParams with_beta(double beta) const { return {k_, n_, d_, beta}; }

private:
    int k_;
    int n_;
    double d_;
    double beta_;
};

/// ceil(d n / 2), robust to the representation error of d (2.2 * 10 / 2 is 11).
std::int64_t edge_count(double d, int n);

/// 1 - exp(-beta); beta may be +inf (c = 1).
double c_beta(double beta);

using Edge = std::pair<int, int>;

/// Simple undirected graph on vertices 0..n-1. Edges are stored with
/// u < v, sorted, without duplicates or loops.
class SimpleGraph {
public:
    SimpleGraph() = default;
    /// Validates and canonicalises; throws ContractViolation on loops,
    /// duplicate pairs or out-of-range endpoints.
    SimpleGraph(int n, std::vector<Edge> edges);

    static SimpleGraph complete(int n);
    static SimpleGraph empty(int n) { return SimpleGraph(n, {}); }

    int n() const { return n_; }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<int>& neighbors(int v) const { return adjacency_[v]; }
    bool has_edge(int u, int v) const;

    /// Copy of this graph with one extra edge.
    SimpleGraph with_edge(int u, int v) const;

private:
    int n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> adjacency_;
};

/// Map [n] -> [k] with cached class sizes.
class ColorAssignment {
public:
    ColorAssignment() = default;
    ColorAssignment(int k, std::vector<int> colors);

    int k() const { return k_; }
    int n() const { return static_cast<int>(colors_.size()); }
    int operator[](int v) const { return colors_[v]; }
    const std::vector<int>& colors() const { return colors_; }
    const std::vector<int>& class_sizes() const { return class_sizes_; }

    /// | |class i| - n/k | <= sqrt(n) for every color, ties included.
    bool is_balanced() const;

    /// Relabels colors: new color of v is perm[old color].
    ColorAssignment permuted(std::span<const int> perm) const;

    friend bool operator==(const ColorAssignment&, const ColorAssignment&) = default;

private:
    int k_ = 0;
    std::vector<int> colors_;
    std::vector<int> class_sizes_;
};

/// Balancedness straight from a class-size profile.
bool is_balanced_profile(std::span<const int> class_sizes, int n);

enum class MatrixKind { RowStochastic, DoublyStochastic, OverlapEmpirical };

const char* to_string(MatrixKind kind);

/// Dense square matrix, row-major. Used for overlap matrices, optimizer
/// iterates and gradients.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(int k, double fill = 0.0) : k_(k), data_(static_cast<std::size_t>(k) * k, fill) {}
    Matrix(int k, std::vector<double> data);

    int k() const { return k_; }
    double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * k_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * k_ + j]; }
    std::span<double> row(int i) { return {data_.data() + static_cast<std::size_t>(i) * k_, static_cast<std::size_t>(k_)}; }
    std::span<const double> row(int i) const {
        return {data_.data() + static_cast<std::size_t>(i) * k_, static_cast<std::size_t>(k_)};
    }
    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    double row_sum(int i) const;
    double col_sum(int j) const;
    double total() const;
    double frobenius_sq() const;
    Matrix transposed() const;

    static Matrix identity(int k);

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    int k_ = 0;
    std::vector<double> data_;
};

double max_abs_diff(const Matrix& a, const Matrix& b);

/// A k x k nonnegative matrix tagged with the polytope it belongs to.
/// Construction validates the kind's invariant at the given tolerance.
class StochasticMatrix {
public:
    static constexpr double kDefaultTolerance = 1e-12;

    StochasticMatrix(Matrix entries, MatrixKind kind, double tolerance = kDefaultTolerance);

    int k() const { return entries_.k(); }
    MatrixKind kind() const { return kind_; }
    const Matrix& entries() const { return entries_; }
    double operator()(int i, int j) const { return entries_(i, j); }

private:
    Matrix entries_;
    MatrixKind kind_;
};

/// Whether `m` satisfies the invariant of `kind` within `tolerance`.
bool satisfies_kind(const Matrix& m, MatrixKind kind, double tolerance);

// ---- formulas -------------------------------------------------------------

/// Number of monochromatic edges of G under sigma.
std::int64_t hamiltonian(const SimpleGraph& g, const ColorAssignment& sigma);

/// Monochromatic pairs of K_n: sum_i C(|class i|, 2).
std::int64_t forb(const ColorAssignment& sigma);
std::int64_t forb_profile(std::span<const int> class_sizes);

/// rho_ij = (k/n) |sigma^-1(i) ∩ tau^-1(j)|.
StochasticMatrix overlap_matrix(const ColorAssignment& sigma, const ColorAssignment& tau);

/// Integer overlap counts |sigma^-1(i) ∩ tau^-1(j)|, row-major.
std::vector<int> overlap_counts(const ColorAssignment& sigma, const ColorAssignment& tau);

/// Shannon entropy in nats of a probability vector (sum 1 within 1e-12).
double entropy_vec(std::span<const double> p);

/// -sum rho_ij ln rho_ij over a nonnegative matrix (no normalisation check).
double entropy_matrix(const Matrix& rho);

/// h(z) = -z ln z - (1-z) ln(1-z).
double binary_entropy(double z);

/// H(p) <= h(q) + q ln|I| + (1-q) ln(k-|I|), q = sum_{i in I} p_i, with
/// 1e-12 slack. Requires q in (0,1).
bool entropy_bound_check(std::span<const double> p, std::span<const int> subset);

// ---- file formats ---------------------------------------------------------

/// "n <count>" header followed by one "u v" pair per line. '#' starts a comment.
SimpleGraph read_graph(std::istream& in);
void write_graph(std::ostream& out, const SimpleGraph& g);
SimpleGraph load_graph(const std::string& path);
void save_graph(const std::string& path, const SimpleGraph& g);

/// Whitespace-separated color list; k is given by the caller.
ColorAssignment read_assignment(std::istream& in, int k);
void write_assignment(std::ostream& out, const ColorAssignment& sigma);

/// CSV with k rows of k comma-separated entries.
Matrix read_matrix_csv(std::istream& in);
void write_matrix_csv(std::ostream& out, const Matrix& m);

}  // namespace potts
