#pragma once

// The overlap landscape f_{d,beta}(rho) = H(rho/k) + E(rho) over k x k
// stochastic matrices: evaluation, gradients, the special matrices rho_bar,
// rho_s and rho_stable, the row surgeries used to locate maximisers, and
// multistart projected-gradient ascent over S, D and separable D.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "potts/errors.hpp"
#include "potts/model.hpp"

namespace potts {

class LandscapeParams {
public:
    static constexpr double kDefaultKappaCap = 0.25;

    LandscapeParams(int k, double d, double beta, double kappa_cap = kDefaultKappaCap);

    int k() const { return k_; }
    double d() const { return d_; }
    double beta() const { return beta_; }
    double c_beta() const;
    double kappa_cap() const { return kappa_cap_; }
    /// min(ln^20 k / k, kappa_cap): width of the forbidden band (0.51, 1 - kappa).
    double kappa_eff() const;

    LandscapeParams with_beta(double beta) const { return {k_, d_, beta, kappa_cap_}; }
    LandscapeParams with_d(double d) const { return {k_, d, beta_, kappa_cap_}; }

private:
    int k_;
    double d_;
    double beta_;
    double kappa_cap_;
};

/// (2k - 1) ln k - 2 - k^{-1/2}.
double d_star(int k);

// ---- evaluation -----------------------------------------------------------

/// Entropy term H(rho/k), written as ln k - (1/k) sum rho_ij ln rho_ij,
/// which equals the matrix entropy whenever the entries sum to k.
double entropy_term(const Matrix& rho);

/// (d/2) ln[1 - (2/k) c + (||rho||^2 / k^2) c^2].
double energy_eval(const Matrix& rho, const LandscapeParams& p);

double f_eval(const Matrix& rho, const LandscapeParams& p);

/// Analytic gradient; entries below 1e-12 are clamped inside the logarithm.
Matrix grad_f(const Matrix& rho, const LandscapeParams& p);
Matrix grad_entropy(const Matrix& rho);
Matrix grad_energy(const Matrix& rho, const LandscapeParams& p);

// ---- special matrices -----------------------------------------------------

StochasticMatrix make_rho_bar(int k);
/// First s rows equal to the identity, the rest uniform. Row-stochastic;
/// doubly stochastic only for s in {0, k}.
StochasticMatrix make_rho_s(int k, int s);
/// (1 - 1/k) I + (1/k^2) J.
StochasticMatrix make_rho_stable(int k);

// ---- xi -------------------------------------------------------------------

/// k^{2 eps / k} (1/eps - 1/k) for eps in (0, k/2).
double xi_eval(double eps, int k);
/// (k/2)(1 - sqrt(1 - 2 / ln k)); requires k >= 9.
double xi_min_location(int k);

// ---- row surgeries --------------------------------------------------------

/// Row i averaged over the columns in J.
StochasticMatrix smooth_rows(const StochasticMatrix& rho, int i, const std::vector<int>& columns);
/// Row i replaced by the uniform row 1/k.
StochasticMatrix flatten_row(const StochasticMatrix& rho, int i);
/// Row i replaced by (1 - alpha) on the diagonal and alpha/(k-1) elsewhere.
StochasticMatrix stabilize_row(const StochasticMatrix& rho, int i, double alpha);

// ---- projections ----------------------------------------------------------

/// Euclidean projection of a vector onto the probability simplex.
void project_simplex(std::span<double> v);

/// Row-wise simplex projection.
StochasticMatrix project_row_stochastic(const Matrix& m);

struct DykstraOptions {
    double tolerance = 1e-10;
    int max_sweeps = 100000;
};

/// Euclidean projection onto {rows and columns sum to 1, lo <= x <= hi}
/// by Dykstra's algorithm between the affine margin constraints and the box.
/// Throws NumericError with the residual on non-convergence.
Matrix project_margins_box(const Matrix& m, const Matrix& lo, const Matrix& hi, const DykstraOptions& opt = {});

StochasticMatrix project_doubly_stochastic(const Matrix& m, const DykstraOptions& opt = {});

// ---- structure ------------------------------------------------------------

/// Number of entries above 0.51.
int stability_index(const Matrix& rho);
/// No entry in the open band (0.51, 1 - kappa_eff).
bool is_separable_matrix(const Matrix& rho, double kappa_eff);

/// Greedy canonical form modulo row and column permutations (alternating
/// lexicographic sorts until stable).
Matrix canonical_form(const Matrix& rho);
/// max-abs distance between canonical forms; an upper bound on the distance
/// modulo permutations, exact whenever either argument is permutation-invariant.
double distance_modulo_permutation(const Matrix& a, const Matrix& b);

// ---- optimisation ---------------------------------------------------------

enum class Domain { S, D, DSep };

const char* to_string(Domain d);
Domain parse_domain(const std::string& s);

struct AscentOptions {
    int random_starts = 20;
    std::uint64_t seed = 1;
    double pg_tolerance = 1e-8;
    int max_iterations = 10000;
    double armijo = 1e-4;
    double shrink = 0.5;
    double initial_step = 1.0;
    double tie_tolerance = 1e-9;
    bool record_trace = false;
    int threads = 1;
};

struct TracePoint {
    int iteration;
    double f;
    double pg_norm;
};

struct TerminalPoint {
    std::string start_label;
    Matrix point;
    double f_value;
    double pg_norm;
    int iterations;
    bool converged;
};

struct LandscapeResult {
    StochasticMatrix maximizer;
    double f_value;
    double pg_norm;
    int stability;
    std::string start_label;
    int iterations;
    bool converged;
    std::vector<TerminalPoint> near_optimal;  ///< terminal points within tie_tolerance of f*
    std::vector<TracePoint> trace;            ///< trace of the winning start when requested
    int starts_run;
    int starts_converged;
};

/// Thrown when no start reaches the projected-gradient tolerance; carries
/// the best terminal point found.
class OptimizationFailure : public Error {
public:
    OptimizationFailure(const std::string& what, LandscapeResult best) : Error(what), best_(std::move(best)) {}
    const LandscapeResult& best_effort() const { return best_; }

private:
    LandscapeResult best_;
};

/// Projected-gradient ascent from a single start (already feasible or not;
/// it is projected first). Exposed for tests and tracing.
TerminalPoint ascend_from(const Matrix& start, const std::string& label, const LandscapeParams& p, Domain domain,
                          const AscentOptions& opt, std::vector<TracePoint>* trace = nullptr);

/// Multistart ascent from rho_bar, rho_1..rho_k, rho_stable and random
/// points; returns the best terminal point.
LandscapeResult maximize_f(const LandscapeParams& p, Domain domain, const AscentOptions& opt = {});

// ---- analytic checks ------------------------------------------------------

/// d f / d beta at fixed rho.
double monotonicity_check_beta(const Matrix& rho, const LandscapeParams& p);
/// d f / d d at fixed rho (beta may be +inf).
double monotonicity_check_d(const Matrix& rho, const LandscapeParams& p);

/// Sign of d f/d rho_ij - d f/d rho_il, and the closed-form sign predicted by
/// the exponential comparison 1 + delta/rho_ij - exp(d c^2 delta / (k - 2c + c^2 ||rho||^2/k)).
struct SignComparison {
    int gradient_sign;
    int predicted_sign;
};
SignComparison gradient_difference_sign(const Matrix& rho, int i, int j, int l, const LandscapeParams& p);

struct BarmaxEntry {
    int s;  ///< 0..k, or -1 for rho_stable
    double f_bar;
    double f_candidate;
    /// The same margin from the closed forms of H and ||rho||^2 for these
    /// matrices (entropy gap minus energy gap), without building a matrix.
    double closed_form_margin;
    double margin() const { return f_bar - f_candidate; }
};

/// f(rho_bar) - f(rho_s) for s = 0..k and f(rho_bar) - f(rho_stable).
std::vector<BarmaxEntry> verify_barmax(int k, double d, double beta);

}  // namespace potts
