#include "potts/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "potts/errors.hpp"
#include "potts/numeric.hpp"

namespace potts {

ModelParams::ModelParams(int k, int n, double d, double beta) : k_(k), n_(n), d_(d), beta_(beta) {
    if (k < 2) throw ParameterError("k must be at least 2");
    if (n < 1) throw ParameterError("n must be at least 1");
    if (!(d > 0) || !std::isfinite(d)) throw ParameterError("d must be positive and finite");
    if (!(beta >= 0)) throw ParameterError("beta must be nonnegative");
}

std::int64_t ModelParams::m() const { return edge_count(d_, n_); }

double ModelParams::c_beta() const { return potts::c_beta(beta_); }

std::int64_t edge_count(double d, int n) {
    const double half = d * n / 2.0;
    return static_cast<std::int64_t>(std::ceil(half - 1e-9 * std::max(1.0, half)));
}

double c_beta(double beta) {
    if (std::isinf(beta)) return 1.0;
    return -std::expm1(-beta);
}

// ---------------------------------------------------------------------------

SimpleGraph::SimpleGraph(int n, std::vector<Edge> edges) : n_(n) {
    if (n < 0) throw ContractViolation("negative vertex count");
    for (auto& [u, v] : edges) {
        if (u < 0 || v < 0 || u >= n || v >= n) throw ContractViolation("edge endpoint out of range");
        if (u == v) throw ContractViolation("self-loop " + std::to_string(u));
        if (u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
        throw ContractViolation("duplicate edge");
    edges_ = std::move(edges);
    adjacency_.assign(n, {});
    for (auto [u, v] : edges_) {
        adjacency_[u].push_back(v);
        adjacency_[v].push_back(u);
    }
}

SimpleGraph SimpleGraph::complete(int n) {
    std::vector<Edge> e;
    e.reserve(static_cast<std::size_t>(choose2(n)));
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) e.emplace_back(u, v);
    return SimpleGraph(n, std::move(e));
}

bool SimpleGraph::has_edge(int u, int v) const {
    if (u > v) std::swap(u, v);
    return std::binary_search(edges_.begin(), edges_.end(), Edge{u, v});
}

SimpleGraph SimpleGraph::with_edge(int u, int v) const {
    auto e = edges_;
    e.emplace_back(u, v);
    return SimpleGraph(n_, std::move(e));
}

// ---------------------------------------------------------------------------

ColorAssignment::ColorAssignment(int k, std::vector<int> colors)
    : k_(k), colors_(std::move(colors)), class_sizes_(k, 0) {
    if (k < 1) throw ContractViolation("color count must be positive");
    for (int c : colors_) {
        if (c < 0 || c >= k) throw ContractViolation("color " + std::to_string(c) + " outside [0,k)");
        ++class_sizes_[c];
    }
}

bool is_balanced_profile(std::span<const int> class_sizes, int n) {
    const double target = static_cast<double>(n) / class_sizes.size();
    const double slack = std::sqrt(static_cast<double>(n));
    return std::all_of(class_sizes.begin(), class_sizes.end(),
                       [&](int s) { return std::abs(s - target) <= slack; });
}

bool ColorAssignment::is_balanced() const { return is_balanced_profile(class_sizes_, n()); }

ColorAssignment ColorAssignment::permuted(std::span<const int> perm) const {
    if (static_cast<int>(perm.size()) != k_) throw ContractViolation("permutation size != k");
    std::vector<int> out(colors_.size());
    for (std::size_t v = 0; v < colors_.size(); ++v) out[v] = perm[colors_[v]];
    return ColorAssignment(k_, std::move(out));
}

// ---------------------------------------------------------------------------

const char* to_string(MatrixKind kind) {
    switch (kind) {
        case MatrixKind::RowStochastic: return "row-stochastic";
        case MatrixKind::DoublyStochastic: return "doubly-stochastic";
        case MatrixKind::OverlapEmpirical: return "overlap-empirical";
    }
    return "?";
}

Matrix::Matrix(int k, std::vector<double> data) : k_(k), data_(std::move(data)) {
    if (data_.size() != static_cast<std::size_t>(k) * k) throw ContractViolation("matrix data is not k*k");
}

double Matrix::row_sum(int i) const {
    auto r = row(i);
    return std::accumulate(r.begin(), r.end(), 0.0);
}

double Matrix::col_sum(int j) const {
    double s = 0;
    for (int i = 0; i < k_; ++i) s += (*this)(i, j);
    return s;
}

double Matrix::total() const { return std::accumulate(data_.begin(), data_.end(), 0.0); }

double Matrix::frobenius_sq() const {
    double s = 0;
    for (double x : data_) s += x * x;
    return s;
}

Matrix Matrix::transposed() const {
    Matrix t(k_);
    for (int i = 0; i < k_; ++i)
        for (int j = 0; j < k_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix Matrix::identity(int k) {
    Matrix m(k);
    for (int i = 0; i < k; ++i) m(i, i) = 1.0;
    return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.k() != b.k()) throw ContractViolation("matrix dimension mismatch");
    double best = 0;
    for (std::size_t t = 0; t < a.data().size(); ++t) best = std::max(best, std::abs(a.data()[t] - b.data()[t]));
    return best;
}

bool satisfies_kind(const Matrix& m, MatrixKind kind, double tolerance) {
    const int k = m.k();
    if (std::any_of(m.data().begin(), m.data().end(), [](double x) { return !(x >= 0); })) return false;
    switch (kind) {
        case MatrixKind::RowStochastic:
            for (int i = 0; i < k; ++i)
                if (std::abs(m.row_sum(i) - 1.0) > tolerance) return false;
            return true;
        case MatrixKind::DoublyStochastic:
            for (int i = 0; i < k; ++i)
                if (std::abs(m.row_sum(i) - 1.0) > tolerance || std::abs(m.col_sum(i) - 1.0) > tolerance)
                    return false;
            return true;
        case MatrixKind::OverlapEmpirical:
            // total mass k; the lattice condition is checked where n is known
            return std::abs(m.total() - k) <= tolerance * k;
    }
    return false;
}

StochasticMatrix::StochasticMatrix(Matrix entries, MatrixKind kind, double tolerance)
    : entries_(std::move(entries)), kind_(kind) {
    if (!satisfies_kind(entries_, kind_, tolerance))
        throw ContractViolation(std::string("matrix violates the ") + to_string(kind) + " invariant");
}

// ---------------------------------------------------------------------------

std::int64_t hamiltonian(const SimpleGraph& g, const ColorAssignment& sigma) {
    if (g.n() != sigma.n()) throw ContractViolation("graph and assignment sizes differ");
    std::int64_t h = 0;
    for (auto [u, v] : g.edges()) h += sigma[u] == sigma[v];
    return h;
}

std::int64_t forb_profile(std::span<const int> class_sizes) {
    std::int64_t f = 0;
    for (int s : class_sizes) f += choose2(s);
    return f;
}

std::int64_t forb(const ColorAssignment& sigma) { return forb_profile(sigma.class_sizes()); }

std::vector<int> overlap_counts(const ColorAssignment& sigma, const ColorAssignment& tau) {
    if (sigma.n() != tau.n() || sigma.k() != tau.k()) throw ContractViolation("overlap of mismatched assignments");
    const int k = sigma.k();
    std::vector<int> counts(static_cast<std::size_t>(k) * k, 0);
    for (int v = 0; v < sigma.n(); ++v) ++counts[static_cast<std::size_t>(sigma[v]) * k + tau[v]];
    return counts;
}

StochasticMatrix overlap_matrix(const ColorAssignment& sigma, const ColorAssignment& tau) {
    const auto counts = overlap_counts(sigma, tau);
    const int k = sigma.k();
    const double scale = static_cast<double>(k) / sigma.n();
    Matrix m(k);
    for (std::size_t t = 0; t < counts.size(); ++t) m.data()[t] = counts[t] * scale;
    return StochasticMatrix(std::move(m), MatrixKind::OverlapEmpirical, 1e-12);
}

double entropy_vec(std::span<const double> p) {
    CompensatedSum<double> total;
    for (double x : p) {
        if (!(x >= 0)) throw ContractViolation("negative probability");
        total.add(x);
    }
    if (std::abs(total.value() - 1.0) > 1e-12) throw ContractViolation("probability vector does not sum to 1");
    CompensatedSum<double> h;
    for (double x : p) h.add(-xlogx(x));
    return h.value();
}

double entropy_matrix(const Matrix& rho) {
    CompensatedSum<double> h;
    for (double x : rho.data()) {
        if (!(x >= 0)) throw ContractViolation("negative matrix entry");
        h.add(-xlogx(x));
    }
    return h.value();
}

double binary_entropy(double z) {
    if (!(z >= 0 && z <= 1)) throw ContractViolation("binary entropy argument outside [0,1]");
    return -xlogx(z) - xlogx(1 - z);
}

bool entropy_bound_check(std::span<const double> p, std::span<const int> subset) {
    const int k = static_cast<int>(p.size());
    std::vector<char> in(k, 0);
    for (int i : subset) {
        if (i < 0 || i >= k) throw ContractViolation("subset index out of range");
        in[i] = 1;
    }
    const int size = static_cast<int>(std::count(in.begin(), in.end(), 1));
    double q = 0;
    for (int i = 0; i < k; ++i)
        if (in[i]) q += p[i];
    if (!(q > 0 && q < 1)) throw ContractViolation("entropy bound needs q in (0,1)");
    const double bound = binary_entropy(q) + q * std::log(size) + (1 - q) * std::log(k - size);
    return entropy_vec(p) <= bound + 1e-12;
}

// ---------------------------------------------------------------------------

namespace {

std::string strip_comment(const std::string& line) {
    const auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

}  // namespace

SimpleGraph read_graph(std::istream& in) {
    std::string line;
    int n = -1;
    std::vector<Edge> edges;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(strip_comment(line));
        std::string first;
        if (!(ls >> first)) continue;
        if (n < 0) {
            if (first != "n" || !(ls >> n) || n < 0)
                throw IoError("graph file: expected header 'n <count>' on line " + std::to_string(lineno));
            continue;
        }
        int u = 0, v = 0;
        try {
            u = std::stoi(first);
        } catch (const std::exception&) {
            throw IoError("graph file: bad vertex on line " + std::to_string(lineno));
        }
        if (!(ls >> v)) throw IoError("graph file: expected 'u v' on line " + std::to_string(lineno));
        edges.emplace_back(u, v);
    }
    if (n < 0) throw IoError("graph file: missing header");
    return SimpleGraph(n, std::move(edges));
}

void write_graph(std::ostream& out, const SimpleGraph& g) {
    out << "n " << g.n() << '\n';
    for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

SimpleGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open graph file " + path);
    return read_graph(in);
}

void save_graph(const std::string& path, const SimpleGraph& g) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write graph file " + path);
    write_graph(out, g);
}

ColorAssignment read_assignment(std::istream& in, int k) {
    std::vector<int> colors;
    int c = 0;
    while (in >> c) colors.push_back(c);
    if (!in.eof()) throw IoError("assignment file: non-integer token");
    return ColorAssignment(k, std::move(colors));
}

void write_assignment(std::ostream& out, const ColorAssignment& sigma) {
    for (int v = 0; v < sigma.n(); ++v) out << (v ? " " : "") << sigma[v];
    out << '\n';
}

Matrix read_matrix_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw IoError("matrix csv: bad cell '" + cell + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    const int k = static_cast<int>(rows.size());
    Matrix m(k);
    for (int i = 0; i < k; ++i) {
        if (static_cast<int>(rows[i].size()) != k) throw IoError("matrix csv: row length differs from row count");
        for (int j = 0; j < k; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
    const auto old = out.precision(17);
    for (int i = 0; i < m.k(); ++i) {
        for (int j = 0; j < m.k(); ++j) out << (j ? "," : "") << m(i, j);
        out << '\n';
    }
    out.precision(old);
}

}  // namespace potts
