#include "potts/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "potts/numeric.hpp"
#include "potts/parallel.hpp"
#include "potts/rng.hpp"

namespace potts {

namespace {

constexpr double kLogFloor = 1e-12;
constexpr double kStableThreshold = 0.51;

double energy_log_argument(double frob_sq, int k, double c) {
    // 1 - 2c/k + q c^2/k^2, kept in log1p form
    const double kk = k;
    return -2.0 * c / kk + frob_sq * c * c / (kk * kk);
}

}  // namespace

LandscapeParams::LandscapeParams(int k, double d, double beta, double kappa_cap)
    : k_(k), d_(d), beta_(beta), kappa_cap_(kappa_cap) {
    if (k < 2) throw ParameterError("k must be at least 2");
    if (!(d > 0) || !std::isfinite(d)) throw ParameterError("d must be positive and finite");
    if (!(beta >= 0)) throw ParameterError("beta must be nonnegative");
    if (!(kappa_cap > 0 && kappa_cap < 0.49)) throw ParameterError("kappa cap must lie in (0, 0.49)");
}

double LandscapeParams::c_beta() const { return potts::c_beta(beta_); }

double LandscapeParams::kappa_eff() const {
    const double lk = std::log(static_cast<double>(k_));
    return std::min(std::pow(lk, 20.0) / k_, kappa_cap_);
}

double d_star(int k) {
    const double kk = k;
    return (2 * kk - 1) * std::log(kk) - 2 - 1 / std::sqrt(kk);
}

// ---------------------------------------------------------------------------

double entropy_term(const Matrix& rho) {
    CompensatedSum<double> s;
    for (double x : rho.data()) {
        if (!(x >= 0)) throw ContractViolation("landscape evaluated at a negative entry");
        s.add(xlogx(x));
    }
    return std::log(static_cast<double>(rho.k())) - s.value() / rho.k();
}

double energy_eval(const Matrix& rho, const LandscapeParams& p) {
    if (rho.k() != p.k()) throw ContractViolation("matrix dimension differs from k");
    return p.d() / 2 * std::log1p(energy_log_argument(rho.frobenius_sq(), p.k(), p.c_beta()));
}

double f_eval(const Matrix& rho, const LandscapeParams& p) { return entropy_term(rho) + energy_eval(rho, p); }

Matrix grad_entropy(const Matrix& rho) {
    Matrix g(rho.k());
    const double inv_k = 1.0 / rho.k();
    for (std::size_t t = 0; t < rho.data().size(); ++t)
        g.data()[t] = inv_k * (-1.0 - std::log(std::max(rho.data()[t], kLogFloor)));
    return g;
}

Matrix grad_energy(const Matrix& rho, const LandscapeParams& p) {
    const int k = p.k();
    const double c = p.c_beta();
    const double den = 1.0 + energy_log_argument(rho.frobenius_sq(), k, c);
    const double scale = p.d() * c * c / (static_cast<double>(k) * k * den);
    Matrix g(k);
    for (std::size_t t = 0; t < rho.data().size(); ++t) g.data()[t] = scale * rho.data()[t];
    return g;
}

Matrix grad_f(const Matrix& rho, const LandscapeParams& p) {
    Matrix g = grad_entropy(rho);
    const Matrix e = grad_energy(rho, p);
    for (std::size_t t = 0; t < g.data().size(); ++t) g.data()[t] += e.data()[t];
    return g;
}

// ---------------------------------------------------------------------------

StochasticMatrix make_rho_bar(int k) {
    if (k < 2) throw ParameterError("k must be at least 2");
    return StochasticMatrix(Matrix(k, 1.0 / k), MatrixKind::DoublyStochastic);
}

StochasticMatrix make_rho_s(int k, int s) {
    if (k < 2) throw ParameterError("k must be at least 2");
    if (s < 0 || s > k) throw ParameterError("s must lie in [0, k]");
    Matrix m(k, 1.0 / k);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < k; ++j) m(i, j) = i == j ? 1.0 : 0.0;
    const auto kind = (s == 0 || s == k) ? MatrixKind::DoublyStochastic : MatrixKind::RowStochastic;
    return StochasticMatrix(std::move(m), kind);
}

StochasticMatrix make_rho_stable(int k) {
    if (k < 2) throw ParameterError("k must be at least 2");
    const double kk = k;
    Matrix m(k, 1.0 / (kk * kk));
    for (int i = 0; i < k; ++i) m(i, i) += 1.0 - 1.0 / kk;
    return StochasticMatrix(std::move(m), MatrixKind::DoublyStochastic);
}

// ---------------------------------------------------------------------------

double xi_eval(double eps, int k) {
    if (!(eps > 0 && eps < k / 2.0)) throw ContractViolation("xi needs eps in (0, k/2)");
    const double kk = k;
    return std::pow(kk, 2 * eps / kk) * (1 / eps - 1 / kk);
}

double xi_min_location(int k) {
    if (k < 9) throw ParameterError("xi minimum location needs k >= 9");
    const double kk = k;
    return kk / 2 * (1 - std::sqrt(1 - 2 / std::log(kk)));
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kSurgeryTolerance = 1e-10;

void check_row(const StochasticMatrix& rho, int i) {
    if (i < 0 || i >= rho.k()) throw ContractViolation("row index out of range");
}

}  // namespace

StochasticMatrix smooth_rows(const StochasticMatrix& rho, int i, const std::vector<int>& columns) {
    check_row(rho, i);
    if (columns.empty()) throw ContractViolation("smoothing needs a nonempty column set");
    std::vector<int> cols = columns;
    std::sort(cols.begin(), cols.end());
    if (std::adjacent_find(cols.begin(), cols.end()) != cols.end()) throw ContractViolation("repeated column in J");
    if (cols.front() < 0 || cols.back() >= rho.k()) throw ContractViolation("column index out of range");
    Matrix m = rho.entries();
    double mass = 0;
    for (int j : cols) mass += m(i, j);
    for (int j : cols) m(i, j) = mass / cols.size();
    return StochasticMatrix(std::move(m), MatrixKind::RowStochastic, kSurgeryTolerance);
}

StochasticMatrix flatten_row(const StochasticMatrix& rho, int i) {
    check_row(rho, i);
    Matrix m = rho.entries();
    for (auto& x : m.row(i)) x = 1.0 / rho.k();
    return StochasticMatrix(std::move(m), MatrixKind::RowStochastic, kSurgeryTolerance);
}

StochasticMatrix stabilize_row(const StochasticMatrix& rho, int i, double alpha) {
    check_row(rho, i);
    if (!(alpha >= 0 && alpha <= 1)) throw ContractViolation("alpha must lie in [0, 1]");
    const int k = rho.k();
    Matrix m = rho.entries();
    for (int j = 0; j < k; ++j) m(i, j) = j == i ? 1 - alpha : alpha / (k - 1);
    return StochasticMatrix(std::move(m), MatrixKind::RowStochastic, kSurgeryTolerance);
}

// ---------------------------------------------------------------------------

void project_simplex(std::span<double> v) {
    std::vector<double> u(v.begin(), v.end());
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumulative = 0;
    double theta = 0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        cumulative += u[j];
        const double t = (cumulative - 1) / static_cast<double>(j + 1);
        if (u[j] - t > 0) theta = t;
    }
    for (auto& x : v) x = std::max(x - theta, 0.0);
}

StochasticMatrix project_row_stochastic(const Matrix& m) {
    Matrix out = m;
    for (int i = 0; i < out.k(); ++i) project_simplex(out.row(i));
    return StochasticMatrix(std::move(out), MatrixKind::RowStochastic, 1e-12);
}

namespace {

// Orthogonal projection onto {X : X 1 = 1, X^T 1 = 1}.
void project_margins(Matrix& x) {
    const int k = x.k();
    std::vector<double> r(k), c(k);
    double total = 0;
    for (int i = 0; i < k; ++i) {
        r[i] = x.row_sum(i) - 1;
        total += r[i] + 1;
    }
    for (int j = 0; j < k; ++j) c[j] = x.col_sum(j) - 1;
    const double s = (total - k) / (static_cast<double>(k) * k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) x(i, j) -= (r[i] + c[j]) / k - s;
}

double margin_violation(const Matrix& x) {
    double worst = 0;
    for (int i = 0; i < x.k(); ++i)
        worst = std::max({worst, std::abs(x.row_sum(i) - 1), std::abs(x.col_sum(i) - 1)});
    return worst;
}

bool within_box(const Matrix& x, const Matrix& lo, const Matrix& hi) {
    for (std::size_t t = 0; t < x.data().size(); ++t)
        if (x.data()[t] < lo.data()[t] || x.data()[t] > hi.data()[t]) return false;
    return true;
}

}  // namespace

Matrix project_margins_box(const Matrix& m, const Matrix& lo, const Matrix& hi, const DykstraOptions& opt) {
    Matrix x = m;
    project_margins(x);
    if (within_box(x, lo, hi)) return x;
    // Dykstra: the affine set needs no correction term, the box does
    Matrix correction(m.k(), 0.0);
    Matrix y = x;
    double residual = std::numeric_limits<double>::infinity();
    for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
        for (std::size_t t = 0; t < x.data().size(); ++t) {
            const double z = y.data()[t] + correction.data()[t];
            const double clipped = std::clamp(z, lo.data()[t], hi.data()[t]);
            correction.data()[t] = z - clipped;
            x.data()[t] = clipped;
        }
        residual = margin_violation(x);
        if (residual <= opt.tolerance) return x;
        y = x;
        project_margins(y);
    }
    throw NumericError("Dykstra projection did not converge", residual);
}

StochasticMatrix project_doubly_stochastic(const Matrix& m, const DykstraOptions& opt) {
    const Matrix lo(m.k(), 0.0);
    const Matrix hi(m.k(), 1.0);
    return StochasticMatrix(project_margins_box(m, lo, hi, opt), MatrixKind::DoublyStochastic,
                            std::max(10 * opt.tolerance, 1e-12));
}

// ---------------------------------------------------------------------------

int stability_index(const Matrix& rho) {
    return static_cast<int>(
        std::count_if(rho.data().begin(), rho.data().end(), [](double x) { return x > kStableThreshold; }));
}

bool is_separable_matrix(const Matrix& rho, double kappa_eff) {
    return std::none_of(rho.data().begin(), rho.data().end(),
                        [&](double x) { return x > kStableThreshold && x < 1 - kappa_eff; });
}

Matrix canonical_form(const Matrix& rho) {
    const int k = rho.k();
    Matrix cur = rho;
    for (int round = 0; round < 2 * k + 2; ++round) {
        const Matrix before = cur;
        // rows in descending lexicographic order
        std::vector<int> order(k);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return std::lexicographical_compare(cur.row(b).begin(), cur.row(b).end(), cur.row(a).begin(),
                                                cur.row(a).end());
        });
        Matrix rows(k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) rows(i, j) = cur(order[i], j);
        // then columns, via the transpose
        Matrix t = rows.transposed();
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return std::lexicographical_compare(t.row(b).begin(), t.row(b).end(), t.row(a).begin(), t.row(a).end());
        });
        Matrix cols(k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) cols(j, i) = t(order[i], j);
        cur = cols;
        if (cur == before) break;
    }
    return cur;
}

double distance_modulo_permutation(const Matrix& a, const Matrix& b) {
    return max_abs_diff(canonical_form(a), canonical_form(b));
}

// ---------------------------------------------------------------------------

const char* to_string(Domain d) {
    switch (d) {
        case Domain::S: return "s";
        case Domain::D: return "d";
        case Domain::DSep: return "dsep";
    }
    return "?";
}

Domain parse_domain(const std::string& s) {
    if (s == "s" || s == "S") return Domain::S;
    if (s == "d" || s == "D") return Domain::D;
    if (s == "dsep" || s == "D_sep") return Domain::DSep;
    throw ParameterError("unknown domain '" + s + "' (expected s, d or dsep)");
}

namespace {

// Feasible set used by the ascent: S, D, or one convex piece of D_sep
// (a fixed pattern of "high" entries in [1 - kappa, 1], all others in [0, 0.51]).
class FeasibleSet {
public:
    FeasibleSet(Domain domain, int k) : domain_(domain), lo_(k, 0.0), hi_(k, 1.0) {}

    static FeasibleSet for_start(Domain domain, const Matrix& start, double kappa) {
        FeasibleSet set(domain, start.k());
        if (domain == Domain::DSep) {
            const Matrix in_d = project_doubly_stochastic(start).entries();
            for (std::size_t t = 0; t < in_d.data().size(); ++t) {
                const double x = in_d.data()[t];
                // entries inside the band go to the nearer endpoint
                const bool high = x > kStableThreshold && (x - kStableThreshold) > ((1 - kappa) - x);
                const bool already_high = x >= 1 - kappa;
                if (high || already_high) {
                    set.lo_.data()[t] = 1 - kappa;
                } else {
                    set.hi_.data()[t] = kStableThreshold;
                }
            }
        }
        return set;
    }

    Matrix project(const Matrix& m) const {
        if (domain_ == Domain::S) return project_row_stochastic(m).entries();
        // tighter than the public default: near a maximiser the Armijo gains
        // fall below the f-noise a 1e-10 projection would introduce
        return project_margins_box(m, lo_, hi_, {1e-13, 100000});
    }

private:
    Domain domain_;
    Matrix lo_;
    Matrix hi_;
};

double frobenius_distance(const Matrix& a, const Matrix& b) {
    double s = 0;
    for (std::size_t t = 0; t < a.data().size(); ++t) {
        const double diff = a.data()[t] - b.data()[t];
        s += diff * diff;
    }
    return std::sqrt(s);
}

double inner(const Matrix& g, const Matrix& y, const Matrix& x) {
    double s = 0;
    for (std::size_t t = 0; t < g.data().size(); ++t) s += g.data()[t] * (y.data()[t] - x.data()[t]);
    return s;
}

Matrix step(const Matrix& x, const Matrix& g, double t) {
    Matrix y = x;
    for (std::size_t i = 0; i < y.data().size(); ++i) y.data()[i] += t * g.data()[i];
    return y;
}

}  // namespace

TerminalPoint ascend_from(const Matrix& start, const std::string& label, const LandscapeParams& p, Domain domain,
                          const AscentOptions& opt, std::vector<TracePoint>* trace) {
    if (start.k() != p.k()) throw ContractViolation("start matrix has the wrong dimension");
    const FeasibleSet set = FeasibleSet::for_start(domain, start, p.kappa_eff());
    Matrix x = set.project(start);
    double fx = f_eval(x, p);
    double pg_norm = std::numeric_limits<double>::infinity();
    int it = 0;
    bool converged = false;
    for (; it <= opt.max_iterations; ++it) {
        const Matrix g = grad_f(x, p);
        Matrix full = set.project(step(x, g, 1.0));
        pg_norm = frobenius_distance(full, x);
        if (trace) trace->push_back({it, fx, pg_norm});
        if (pg_norm < opt.pg_tolerance) {
            converged = true;
            break;
        }
        if (it == opt.max_iterations) break;
        double t = opt.initial_step;
        bool accepted = false;
        while (t > 1e-20) {
            Matrix y = t == 1.0 ? std::move(full) : set.project(step(x, g, t));
            const double fy = f_eval(y, p);
            // the slack absorbs rounding in f once gains shrink to ~pg^2
            const double slack = 64 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(fx));
            if (fy >= fx + opt.armijo * inner(g, y, x) - slack) {
                x = std::move(y);
                fx = fy;
                accepted = true;
                break;
            }
            t *= opt.shrink;
        }
        if (!accepted) break;  // stalled at machine precision
    }
    return {label, std::move(x), fx, pg_norm, it, converged};
}

LandscapeResult maximize_f(const LandscapeParams& p, Domain domain, const AscentOptions& opt) {
    const int k = p.k();
    std::vector<std::pair<std::string, Matrix>> starts;
    starts.emplace_back("rho_bar", make_rho_bar(k).entries());
    for (int s = 1; s <= k; ++s) starts.emplace_back("rho_s=" + std::to_string(s), make_rho_s(k, s).entries());
    starts.emplace_back("rho_stable", make_rho_stable(k).entries());
    SeededStream rng(opt.seed, 0x1a4d5ca9eULL);
    for (int r = 0; r < opt.random_starts; ++r) {
        Matrix m(k);
        std::exponential_distribution<double> expo(1.0);
        for (int i = 0; i < k; ++i) {
            // uniform point of the simplex via normalised exponentials
            double total = 0;
            for (auto& x : m.row(i)) total += (x = expo(rng.engine()));
            for (auto& x : m.row(i)) x /= total;
        }
        starts.emplace_back("random#" + std::to_string(r), std::move(m));
    }

    std::vector<std::optional<TerminalPoint>> terminals(starts.size());
    std::vector<std::vector<TracePoint>> traces(starts.size());
    parallel_for(starts.size(), opt.threads, [&](std::size_t i) {
        try {
            terminals[i] = ascend_from(starts[i].second, starts[i].first, p, domain, opt,
                                       opt.record_trace ? &traces[i] : nullptr);
        } catch (const NumericError&) {
            // infeasible D_sep pattern or a projection that failed; skip this start
        }
    });

    double best_f = -std::numeric_limits<double>::infinity();
    int converged_count = 0;
    int ran = 0;
    for (const auto& t : terminals) {
        if (!t) continue;
        ++ran;
        converged_count += t->converged;
        best_f = std::max(best_f, t->f_value);
    }
    if (ran == 0) throw NumericError("no start could be projected onto the domain", 0.0);

    std::vector<TerminalPoint> near;
    std::size_t winner = 0;
    std::optional<Matrix> winner_form;
    for (std::size_t i = 0; i < terminals.size(); ++i) {
        if (!terminals[i] || terminals[i]->f_value < best_f - opt.tie_tolerance) continue;
        near.push_back(*terminals[i]);
        Matrix form = canonical_form(terminals[i]->point);
        if (!winner_form || std::lexicographical_compare(form.data().begin(), form.data().end(),
                                                         winner_form->data().begin(), winner_form->data().end())) {
            winner_form = std::move(form);
            winner = i;
        }
    }
    const TerminalPoint& w = *terminals[winner];
    const auto kind = domain == Domain::S ? MatrixKind::RowStochastic : MatrixKind::DoublyStochastic;
    StochasticMatrix maximizer(*winner_form, kind, 1e-8);
    LandscapeResult result{maximizer,
                           f_eval(maximizer.entries(), p),
                           w.pg_norm,
                           stability_index(maximizer.entries()),
                           w.start_label,
                           w.iterations,
                           w.converged,
                           std::move(near),
                           opt.record_trace ? traces[winner] : std::vector<TracePoint>{},
                           ran,
                           converged_count};
    if (converged_count == 0)
        throw OptimizationFailure("no start reached the projected-gradient tolerance", std::move(result));
    return result;
}

// ---------------------------------------------------------------------------

double monotonicity_check_beta(const Matrix& rho, const LandscapeParams& p) {
    const double k = p.k();
    const double c = p.c_beta();
    const double q = rho.frobenius_sq();
    const double den = 1.0 + energy_log_argument(q, p.k(), c);
    const double e = std::isinf(p.beta()) ? 0.0 : std::exp(-p.beta());
    return -p.d() / 2 * e * (2 / k - q * 2 * c / (k * k)) / den;
}

double monotonicity_check_d(const Matrix& rho, const LandscapeParams& p) {
    return 0.5 * std::log1p(energy_log_argument(rho.frobenius_sq(), p.k(), p.c_beta()));
}

SignComparison gradient_difference_sign(const Matrix& rho, int i, int j, int l, const LandscapeParams& p) {
    if (!(rho(i, j) > 0 && rho(i, l) > 0)) throw ContractViolation("sign comparison needs positive entries");
    const Matrix g = grad_f(rho, p);
    const double diff = g(i, j) - g(i, l);
    const double k = p.k();
    const double c = p.c_beta();
    const double delta = rho(i, l) - rho(i, j);
    const double predicted =
        1 + delta / rho(i, j) - std::exp(p.d() * c * c * delta / (k - 2 * c + c * c * rho.frobenius_sq() / k));
    auto sign = [](double x) { return (x > 0) - (x < 0); };
    return {sign(diff), sign(predicted)};
}

std::vector<BarmaxEntry> verify_barmax(int k, double d, double beta) {
    if (k < 3) throw ParameterError("barmax verification needs k >= 3");
    const LandscapeParams p(k, d, beta);
    const double kk = k;
    const double lk = std::log(kk);
    const double c = p.c_beta();
    const double f_bar = f_eval(make_rho_bar(k).entries(), p);
    std::vector<BarmaxEntry> out;
    for (int s = 0; s <= k; ++s) {
        // entropy gap (s/k) ln k against the energy gap from ||rho_s||^2 = (k-s)/k + s
        const double energy_gap =
            d / 2 * std::log1p((s - s / kk) * c * c / (kk * kk) / ((1 - c / kk) * (1 - c / kk)));
        out.push_back({s, f_bar, f_eval(make_rho_s(k, s).entries(), p), s / kk * lk - energy_gap});
    }
    {
        const double top = 1 - 1 / kk + 1 / (kk * kk);
        const double h_stable = lk - top * std::log(top) + (kk - 1) / (kk * kk) * std::log(kk * kk);
        const double q_stable = kk * (kk - 1) / std::pow(kk, 4) + kk * top * top;
        const double e_stable = d / 2 * std::log1p(energy_log_argument(q_stable, k, c));
        const double e_bar = d * std::log1p(-c / kk);
        const double closed = (2 * lk - h_stable) - (e_stable - e_bar);
        out.push_back({-1, f_bar, f_eval(make_rho_stable(k).entries(), p), closed});
    }
    return out;
}

}  // namespace potts
