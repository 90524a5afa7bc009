#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>

#include "potts/ensembles.hpp"
#include "potts/errors.hpp"
#include "potts/exact_partition.hpp"
#include "potts/harness.hpp"
#include "potts/landscape.hpp"
#include "potts/mcmc.hpp"
#include "potts/moments.hpp"
#include "potts/separability.hpp"

namespace potts {

namespace {

bool near(double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

SimpleGraph triangle() { return SimpleGraph(3, {{0, 1}, {1, 2}, {0, 2}}); }
SimpleGraph one_edge() { return SimpleGraph(2, {{0, 1}}); }

template <typename F>
bool throws(F&& f) {
    try {
        f();
    } catch (const Error&) {
        return true;
    }
    return false;
}

}  // namespace

bool run_selftest(std::ostream& out) {
    const double ln3 = std::log(3.0);
    const std::vector<std::pair<const char*, std::function<bool()>>> checks = {
        {"hamiltonian: triangle all one color", [] { return hamiltonian(triangle(), ColorAssignment(3, {0, 0, 0})) == 3; }},
        {"hamiltonian: triangle properly colored", [] { return hamiltonian(triangle(), ColorAssignment(3, {0, 1, 2})) == 0; }},
        {"hamiltonian: path with one clash",
         [] { return hamiltonian(SimpleGraph(3, {{0, 1}, {1, 2}}), ColorAssignment(2, {0, 0, 1})) == 1; }},
        {"forb: two pairs", [] { return forb(ColorAssignment(2, {0, 0, 1, 1})) == 2; }},
        {"forb: balanced n=6 k=3", [] { return forb(ColorAssignment(3, {0, 0, 1, 1, 2, 2})) == 3; }},
        {"overlap: swapped colors",
         [] {
             const auto r = overlap_matrix(ColorAssignment(2, {0, 0, 1, 1}), ColorAssignment(2, {1, 1, 0, 0}));
             return r(0, 0) == 0 && r(0, 1) == 1 && r(1, 0) == 1 && r(1, 1) == 0;
         }},
        {"overlap: orthogonal split is uniform",
         [] {
             const auto r = overlap_matrix(ColorAssignment(2, {0, 0, 1, 1}), ColorAssignment(2, {0, 1, 0, 1}));
             return r(0, 0) == 0.5 && r(0, 1) == 0.5 && r(1, 0) == 0.5 && r(1, 1) == 0.5;
         }},
        {"entropy: uniform", [] { const std::vector<double> p(5, 0.2); return near(entropy_vec(p), std::log(5.0)); }},
        {"entropy: point mass", [] { const std::vector<double> p{1, 0, 0}; return entropy_vec(p) == 0; }},
        {"binary entropy: symmetric", [] { return near(binary_entropy(0.3), binary_entropy(0.7)) && binary_entropy(0) == 0; }},
        {"Z: empty graph on two vertices", [] { return near(z_enumerate(SimpleGraph::empty(2), 3, 1.0).log_z, std::log(9.0)); }},
        {"Z: single edge at beta = ln 3", [ln3] { return near(z_enumerate(one_edge(), 3, ln3).log_z, std::log(7.0)); }},
        {"Z: triangle with two colors",
         [] {
             const double b = 0.7;
             return near(z_enumerate(triangle(), 2, b).log_z, std::log(2 * std::exp(-3 * b) + 6 * std::exp(-b)));
         }},
        {"Z: FK single edge", [ln3] { return near(z_fk(one_edge(), 3, ln3).log_z, std::log(7.0), 1e-12); }},
        {"Gibbs: uniform at beta = 0",
         [] {
             const auto mu = gibbs_exact(triangle(), 3, 0.0);
             for (double x : mu)
                 if (!near(x, 1.0 / 27)) return false;
             return true;
         }},
        {"sample_gnm: n=4 m=6 is K4", [] {
             SeededStream rng(5, 0);
             return sample_gnm(4, 6, rng).edges() == SimpleGraph::complete(4).edges();
         }},
        {"planted: p1/p2 = exp(-beta)",
         [] {
             const auto pp = planted_probabilities(ModelParams(3, 300, 6.0, 2.0));
             return near(pp.p1 / pp.p2, std::exp(-2.0));
         }},
        {"annealed: beta = 0 gives ln k", [] { return annealed_free_energy(4, 3.0, 0.0) == std::log(4.0); }},
        {"first moment: beta = 0 gives 0",
         [] { return exact_first_moment_sigma(ColorAssignment(2, {0, 0, 1}), ModelParams(2, 3, 4.0 / 3, 0.0)) == 0; }},
        {"first moment: n=2 m=1",
         [] {
             const double b = 0.9;
             return near(exact_first_moment_total(ModelParams(3, 2, 1.0, b), false).exact_value,
                         std::log(3 * (2 + std::exp(-b))));
         }},
        {"f: rho_bar closed form",
         [] {
             const LandscapeParams p(3, 2.0, std::log(3.0));
             return near(f_eval(make_rho_bar(3).entries(), p), 2 * std::log(7.0 / 3));
         }},
        {"rho_0 equals rho_bar", [] { return make_rho_s(4, 0).entries() == make_rho_bar(4).entries(); }},
        {"rho_k equals identity", [] { return make_rho_s(4, 4).entries() == Matrix::identity(4); }},
        {"stability: rho_bar 0, identity k",
         [] { return stability_index(make_rho_bar(5).entries()) == 0 && stability_index(Matrix::identity(5)) == 5; }},
        {"separable: 0.7 sits in the band",
         [] {
             Matrix m(2, 0.3);
             m(0, 0) = 0.7;
             return !is_separable_matrix(m, 0.25);
         }},
        {"projection: all-ones goes to rho_bar",
         [] { return max_abs_diff(project_doubly_stochastic(Matrix(4, 1.0)).entries(), make_rho_bar(4).entries()) < 1e-12; }},
        {"barmax: s = 0 margin is zero", [] { return verify_barmax(5, 10.0, 1.0).front().margin() == 0; }},
        {"SEP1: proper coloring passes",
         [] { return sep1_check(triangle(), ColorAssignment(3, {0, 1, 2}), ModelParams(3, 3, 2.0, 1.0)).pass; }},
        {"SEP filter: empty input", [] { return sigma_set_filter(triangle(), ModelParams(3, 3, 2.0, 1.0), {}).empty(); }},
        {"TI: target 0 gives n ln k",
         [] {
             SeededStream rng(1, 0);
             return thermo_integrate_lnZ(triangle(), 3, TISchedule::uniform(0.0, 33, 10, 0), rng).log_z == 3 * std::log(3.0);
         }},
        {"Glauber: isolated vertex conditional is uniform",
         [] {
             const auto g = SimpleGraph::empty(3);
             const ChainState s(g, ColorAssignment(3, {0, 0, 0}));
             for (double x : conditional_distribution(s, g, 1, 5.0))
                 if (!near(x, 1.0 / 3)) return false;
             return true;
         }},
        {"errors: separability with zero samples",
         [] { return throws([] { empirical_separability_rate(ModelParams(3, 30, 2.0, 1.0), {.samples = 0}); }); }},
    };
    int failed = 0;
    for (const auto& [name, check] : checks) {
        bool ok = false;
        try {
            ok = check();
        } catch (const std::exception&) {
            ok = false;
        }
        failed += !ok;
        out << (ok ? "PASS " : "FAIL ") << name << '\n';
    }
    out << (checks.size() - failed) << "/" << checks.size() << " checks passed\n";
    return failed == 0;
}

}  // namespace potts
