#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "potts/errors.hpp"
#include "potts/landscape.hpp"

using namespace potts;

namespace {

std::vector<double> dirichlet(int k, double alpha, std::mt19937_64& eng) {
    std::gamma_distribution<double> g(alpha, 1.0);
    std::vector<double> p(k);
    double s = 0;
    for (auto& x : p) s += (x = g(eng) + 1e-300);
    for (auto& x : p) x /= s;
    return p;
}

Matrix random_row_stochastic(int k, std::mt19937_64& eng, double alpha = 1.0) {
    Matrix m(k);
    for (int i = 0; i < k; ++i) {
        const auto p = dirichlet(k, alpha, eng);
        for (int j = 0; j < k; ++j) m(i, j) = p[j];
    }
    return m;
}

/// Random doubly stochastic matrix as a convex combination of permutation matrices.
Matrix random_doubly_stochastic(int k, std::mt19937_64& eng, int terms = 6) {
    Matrix m(k);
    const auto w = dirichlet(terms, 1.0, eng);
    std::vector<int> perm(k);
    for (int t = 0; t < terms; ++t) {
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), eng);
        for (int i = 0; i < k; ++i) m(i, perm[i]) += w[t];
    }
    return m;
}

double frob(const Matrix& m) { return m.frobenius_sq(); }

double distance(const Matrix& a, const Matrix& b) {
    double s = 0;
    for (std::size_t t = 0; t < a.data().size(); ++t) s += (a.data()[t] - b.data()[t]) * (a.data()[t] - b.data()[t]);
    return std::sqrt(s);
}

/// Simplex projection by bisection on the threshold.
std::vector<double> simplex_oracle(std::vector<double> v) {
    double lo = *std::min_element(v.begin(), v.end()) - 1, hi = *std::max_element(v.begin(), v.end());
    for (int it = 0; it < 200; ++it) {
        const double mid = (lo + hi) / 2;
        double s = 0;
        for (double x : v) s += std::max(x - mid, 0.0);
        (s > 1 ? lo : hi) = mid;
    }
    for (auto& x : v) x = std::max(x - lo, 0.0);
    return v;
}

Matrix permute(const Matrix& m, const std::vector<int>& rows, const std::vector<int>& cols) {
    Matrix out(m.k());
    for (int i = 0; i < m.k(); ++i)
        for (int j = 0; j < m.k(); ++j) out(rows[i], cols[j]) = m(i, j);
    return out;
}

}  // namespace

TEST_CASE("params and kappa") {
    const LandscapeParams p(10, 5.0, 1.0);
    CHECK(p.kappa_eff() == 0.25);
    CHECK(LandscapeParams(10, 5.0, 1.0, 0.1).kappa_eff() == 0.1);
    for (int k : {2, 3, 10, 100, 1000}) {
        const LandscapeParams q(k, 1.0, 1.0);
        CHECK(q.kappa_eff() == std::min(std::pow(std::log(k), 20) / k, 0.25));
        CHECK(1 - q.kappa_eff() > 0.51);
    }
    CHECK(d_star(20) == doctest::Approx(39 * std::log(20.0) - 2 - 1 / std::sqrt(20.0)).epsilon(1e-15));
    CHECK_THROWS_AS(LandscapeParams(1, 1.0, 1.0), ParameterError);
}

TEST_CASE("f at the uniform matrix") {
    for (int k : {2, 3, 7, 20})
        for (double d : {0.5, 4.0})
            for (double beta : {0.0, 0.4, std::log(k), 9.0}) {
                const LandscapeParams p(k, d, beta);
                const auto bar = make_rho_bar(k).entries();
                const double c = p.c_beta();
                CHECK(f_eval(bar, p) == doctest::Approx(2 * std::log(k) + d * std::log(1 - c / k)).epsilon(1e-13));
                CHECK(energy_eval(bar, p) == doctest::Approx(d * std::log(1 - c / k)).epsilon(1e-13));
            }
    CHECK(f_eval(make_rho_bar(3).entries(), LandscapeParams(3, 2.0, std::log(3.0))) ==
          doctest::Approx(2 * std::log(7.0 / 3)).epsilon(1e-14));
    CHECK(2 * std::log(7.0 / 3) == doctest::Approx(1.69460).epsilon(1e-5));
}

TEST_CASE("f agrees with its definition and reduces to entropy at beta = 0") {
    std::mt19937_64 eng(1);
    for (int t = 0; t < 200; ++t) {
        const int k = 2 + t % 9;
        const auto rho = t % 2 ? random_row_stochastic(k, eng) : random_doubly_stochastic(k, eng);
        const double d = 0.1 + t * 0.05, beta = 0.01 * t;
        const LandscapeParams p(k, d, beta);
        CHECK(f_eval(rho, p) == doctest::Approx(oracle::landscape_f(rho.data(), k, d, beta)).epsilon(1e-12));
        Matrix scaled = rho;
        for (auto& x : scaled.data()) x /= k;
        CHECK(f_eval(rho, p.with_beta(0.0)) == doctest::Approx(entropy_matrix(scaled)).epsilon(1e-13));
        CHECK(energy_eval(rho, p.with_beta(0.0)) == 0.0);
    }
}

TEST_CASE("Frobenius norms of the special matrices") {
    for (int k : {3, 5, 12}) {
        CHECK(frob(Matrix::identity(k)) == doctest::Approx(k));
        CHECK(frob(make_rho_bar(k).entries()) == doctest::Approx(1.0).epsilon(1e-14));
        const double kk = k;
        CHECK(frob(make_rho_stable(k).entries()) ==
              doctest::Approx(k * (k - 1) / std::pow(kk, 4) + k * std::pow(1 - 1 / kk + 1 / (kk * kk), 2)).epsilon(1e-13));
        for (int s = 0; s <= k; ++s)
            CHECK(frob(make_rho_s(k, s).entries()) == doctest::Approx((k - s) / kk + s).epsilon(1e-13));
    }
}

TEST_CASE("gradient at the uniform matrix") {
    for (int k : {3, 6}) {
        const double d = 2.5, beta = 0.9;
        const LandscapeParams p(k, d, beta);
        const double c = p.c_beta();
        const auto bar = make_rho_bar(k).entries();
        const auto gh = grad_entropy(bar);
        const auto ge = grad_energy(bar, p);
        const auto g = grad_f(bar, p);
        for (int t = 0; t < k * k; ++t) {
            CHECK(gh.data()[t] == doctest::Approx((std::log(k) - 1) / k).epsilon(1e-13));
            CHECK(ge.data()[t] == doctest::Approx(d * c * c / std::pow(k, 3) / std::pow(1 - c / k, 2)).epsilon(1e-13));
            CHECK(g.data()[t] == doctest::Approx(gh.data()[t] + ge.data()[t]).epsilon(1e-14));
        }
    }
}

TEST_CASE("gradient matches central differences of f") {
    std::mt19937_64 eng(2);
    double worst = 0;
    for (int k : {3, 5, 10})
        for (int t = 0; t < 100; ++t) {
            auto rho = random_row_stochastic(k, eng);
            for (auto& x : rho.data()) x = 0.9 * x + 0.1 / k;  // interior
            const LandscapeParams p(k, 0.5 + 0.1 * t, 0.05 * t);
            const auto g = grad_f(rho, p);
            const auto as_f = [&](const std::vector<double>& x) { return f_eval(Matrix(k, x), p); };
            for (std::size_t i = 0; i < rho.data().size(); ++i) {
                const double fd = oracle::central_difference(as_f, rho.data(), i, 1e-6);
                worst = std::max(worst, std::abs(g.data()[i] - fd) / std::max(1.0, std::abs(fd)));
            }
        }
    CHECK(worst < 1e-5);
}

TEST_CASE("special matrices") {
    for (int k : {2, 3, 8}) {
        CHECK(make_rho_s(k, 0).entries() == make_rho_bar(k).entries());
        CHECK(make_rho_s(k, k).entries() == Matrix::identity(k));
        const auto st = make_rho_stable(k).entries();
        for (int i = 0; i < k; ++i) {
            CHECK(st.row_sum(i) == doctest::Approx(1.0).epsilon(1e-15));
            CHECK(st.col_sum(i) == doctest::Approx(1.0).epsilon(1e-15));
        }
        CHECK(satisfies_kind(make_rho_bar(k).entries(), MatrixKind::DoublyStochastic, 1e-14));
        CHECK(satisfies_kind(make_rho_stable(k).entries(), MatrixKind::DoublyStochastic, 1e-14));
        for (int s = 0; s <= k; ++s) CHECK(satisfies_kind(make_rho_s(k, s).entries(), MatrixKind::RowStochastic, 1e-14));
    }
    CHECK_FALSE(satisfies_kind(make_rho_s(4, 2).entries(), MatrixKind::DoublyStochastic, 1e-6));
    CHECK_THROWS_AS(make_rho_s(4, 5), Error);
    CHECK_THROWS_AS(make_rho_s(4, -1), Error);
    for (int k : {3, 5, 9}) {
        CHECK(stability_index(make_rho_bar(k).entries()) == 0);
        CHECK(stability_index(make_rho_stable(k).entries()) == k);
        for (int s = 0; s <= k; ++s) CHECK(stability_index(make_rho_s(k, s).entries()) == s);
    }
}

TEST_CASE("stability and separability") {
    CHECK(is_separable_matrix(make_rho_bar(4).entries(), 0.25));
    CHECK(is_separable_matrix(Matrix::identity(4), 0.25));
    Matrix m(2, 0.3);
    m(0, 0) = 0.7;
    CHECK_FALSE(is_separable_matrix(m, 0.25));
    m(0, 0) = 0.75;
    CHECK(is_separable_matrix(m, 0.25));
    m(0, 0) = 0.51;
    CHECK(is_separable_matrix(m, 0.25));
    CHECK(stability_index(m) == 0);
}

TEST_CASE("xi") {
    CHECK(xi_min_location(10) == doctest::Approx(5 * (1 - std::sqrt(1 - 2 / std::log(10.0)))).epsilon(1e-15));
    CHECK(xi_min_location(10) == doctest::Approx(3.1876).epsilon(1e-4));
    CHECK(xi_eval(1.0, 10) == doctest::Approx(std::pow(10.0, 0.2) * 0.9).epsilon(1e-15));
    CHECK(xi_eval(1.0, 10) == doctest::Approx(1.4264).epsilon(1e-4));
    for (int k : {10, 50, 200}) {
        const double mu = xi_min_location(k);
        const int steps = 2000;
        double prev = xi_eval(mu / steps, k);
        for (int i = 2; i < steps; ++i) {
            const double cur = xi_eval(mu * i / steps, k);
            CHECK(cur < prev);
            prev = cur;
        }
        const double right = k / 2.0 - mu;
        prev = xi_eval(mu + right / steps, k);
        for (int i = 2; i < steps; ++i) {
            const double cur = xi_eval(mu + right * i / steps, k);
            CHECK(cur > prev);
            prev = cur;
        }
    }
    CHECK_THROWS_AS(xi_eval(0.0, 10), ContractViolation);
    CHECK_THROWS_AS(xi_eval(5.0, 10), ContractViolation);
    CHECK_THROWS_AS(xi_min_location(8), ParameterError);
}

TEST_CASE("row surgeries") {
    std::mt19937_64 eng(3);
    const int k = 5;
    const StochasticMatrix rho(random_row_stochastic(k, eng), MatrixKind::RowStochastic);
    std::vector<int> all(k);
    std::iota(all.begin(), all.end(), 0);
    const auto smoothed = smooth_rows(rho, 2, all);
    for (int j = 0; j < k; ++j) CHECK(smoothed(2, j) == doctest::Approx(1.0 / k).epsilon(1e-15));
    for (int j = 0; j < k; ++j) CHECK(smoothed(1, j) == rho(1, j));
    const auto twice = smooth_rows(smoothed, 2, {0, 3});
    CHECK(max_abs_diff(twice.entries(), smoothed.entries()) < 1e-16);
    const auto partial = smooth_rows(rho, 0, {1, 4});
    CHECK(partial(0, 1) == doctest::Approx((rho(0, 1) + rho(0, 4)) / 2).epsilon(1e-15));
    CHECK(partial.entries().row_sum(0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(smooth_rows(rho, 0, {}), ContractViolation);

    CHECK(flatten_row(make_rho_bar(k), 3).entries() == make_rho_bar(k).entries());
    const auto st = stabilize_row(rho, 1, 1.0 / k);
    CHECK(st(1, 1) == doctest::Approx(1 - 1.0 / k).epsilon(1e-15));
    CHECK(st(1, 0) == doctest::Approx(1.0 / k / (k - 1)).epsilon(1e-15));
    CHECK(st.entries().row_sum(1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(stabilize_row(rho, 1, 1.5), ContractViolation);
}

TEST_CASE("flattening a spread-out row does not decrease f") {
    // rows with every entry at most 0.49, at the top of the second-moment window
    for (int k : {20, 50}) {
        const double d = (2 * k - 1) * std::log(k) - 2;
        for (double beta : {std::log(k), 2 * std::log(k)}) {
            const LandscapeParams p(k, d, beta);
            std::mt19937_64 eng(k * 31 + static_cast<int>(beta));
            int checked = 0, violations = 0;
            for (int t = 0; t < 200; ++t) {
                Matrix m = t % 2 ? make_rho_bar(k).entries() : random_doubly_stochastic(k, eng);
                const int i = static_cast<int>(eng() % k);
                const auto row = dirichlet(k, std::vector<double>{0.05, 0.3, 1.0, 5.0}[t % 4], eng);
                if (*std::max_element(row.begin(), row.end()) > 0.49) continue;
                for (int j = 0; j < k; ++j) m(i, j) = row[j];
                const StochasticMatrix rho(m, MatrixKind::RowStochastic);
                ++checked;
                violations += f_eval(flatten_row(rho, i).entries(), p) < f_eval(m, p) - 1e-12;
            }
            CHECK(checked > 50);
            CHECK(violations == 0);
        }
    }
}

TEST_CASE("smoothing under the small-entry hypotheses does not decrease f at k = 200") {
    const int k = 200;
    const double lnk = std::log(k), lnlnk = std::log(lnk);
    const double lambda = 3 * lnlnk / lnk;
    const double cap = lambda / 2 - lnlnk / lnk;
    const double min_size = std::pow(k, lambda);
    const LandscapeParams p(k, (2 * k - 1) * lnk - 2, lnk);
    std::mt19937_64 eng(200);
    int checked = 0, violations = 0;
    for (int t = 0; t < 60; ++t) {
        Matrix m = t % 3 ? random_row_stochastic(k, eng, 0.5) : make_rho_bar(k).entries();
        const int i = static_cast<int>(eng() % k);
        const auto row = dirichlet(k, std::vector<double>{0.02, 0.1, 1.0}[t % 3], eng);
        for (int j = 0; j < k; ++j) m(i, j) = row[j];
        std::vector<int> J;
        for (int j = 0; j < k; ++j)
            if (row[j] < cap) J.push_back(j);
        if (J.size() < min_size) continue;
        const StochasticMatrix rho(m, MatrixKind::RowStochastic);
        ++checked;
        violations += f_eval(smooth_rows(rho, i, J).entries(), p) < f_eval(m, p) - 1e-12;
    }
    CHECK(checked >= 30);
    CHECK(violations == 0);
}

TEST_CASE("simplex projection matches a bisection oracle") {
    std::mt19937_64 eng(4);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int t = 0; t < 300; ++t) {
        std::vector<double> v(1 + t % 12);
        for (auto& x : v) x = g(eng);
        const auto expected = simplex_oracle(v);
        project_simplex(v);
        for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == doctest::Approx(expected[i]).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("projections onto S and D") {
    std::mt19937_64 eng(5);
    for (int k : {2, 4, 7}) {
        const auto inside = random_doubly_stochastic(k, eng);
        CHECK(max_abs_diff(project_doubly_stochastic(inside).entries(), inside) < 1e-9);
        CHECK(max_abs_diff(project_row_stochastic(inside).entries(), inside) < 1e-14);
        CHECK(max_abs_diff(project_doubly_stochastic(Matrix(k, 1.0)).entries(), make_rho_bar(k).entries()) < 1e-12);
        std::normal_distribution<double> g(0.0, 0.02);
        const auto bar = make_rho_bar(k).entries();
        for (int t = 0; t < 50; ++t) {
            Matrix x = bar;
            for (auto& e : x.data()) e += g(eng);
            const auto px = project_doubly_stochastic(x).entries();
            CHECK(distance(px, bar) <= distance(x, bar) + 1e-9);
            CHECK(satisfies_kind(px, MatrixKind::DoublyStochastic, 1e-9));
            Matrix y = x;
            for (auto& e : y.data()) e += g(eng);
            CHECK(distance(px, project_doubly_stochastic(y).entries()) <= distance(x, y) + 1e-9);
        }
    }
}

TEST_CASE("box-constrained margin projection") {
    std::mt19937_64 eng(6);
    const int k = 4;
    Matrix lo(k, 0.0), hi(k, 1.0);
    hi(0, 0) = 0.2;
    lo(1, 1) = 0.6;
    std::normal_distribution<double> g(0.25, 0.3);
    for (int t = 0; t < 30; ++t) {
        Matrix x(k);
        for (auto& e : x.data()) e = g(eng);
        const auto p = project_margins_box(x, lo, hi);
        for (int i = 0; i < k; ++i) {
            CHECK(p.row_sum(i) == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(p.col_sum(i) == doctest::Approx(1.0).epsilon(1e-9));
        }
        for (std::size_t e = 0; e < p.data().size(); ++e) {
            CHECK(p.data()[e] >= lo.data()[e] - 1e-9);
            CHECK(p.data()[e] <= hi.data()[e] + 1e-9);
        }
    }
    Matrix impossible_lo(k, 0.0);
    for (int j = 0; j < k; ++j) impossible_lo(0, j) = 0.5;
    CHECK_THROWS_AS(project_margins_box(Matrix(k, 0.25), impossible_lo, hi, {1e-10, 500}), NumericError);
}

TEST_CASE("Frobenius norm of doubly stochastic matrices lies in [1, k]") {
    std::mt19937_64 eng(7);
    for (int t = 0; t < 300; ++t) {
        const int k = 2 + t % 9;
        Matrix x(k);
        std::uniform_real_distribution<double> u(-1, 2);
        for (auto& e : x.data()) e = u(eng);
        const auto ds = t % 2 ? project_doubly_stochastic(x).entries() : random_doubly_stochastic(k, eng);
        CHECK(frob(ds) >= 1 - 1e-9);
        CHECK(frob(ds) <= k + 1e-9);
    }
}

TEST_CASE("f is invariant under row and column permutations") {
    std::mt19937_64 eng(8);
    const LandscapeParams p(6, 4.0, 1.3);
    for (int t = 0; t < 50; ++t) {
        const auto rho = random_row_stochastic(6, eng);
        std::vector<int> r(6), c(6);
        std::iota(r.begin(), r.end(), 0);
        std::iota(c.begin(), c.end(), 0);
        std::shuffle(r.begin(), r.end(), eng);
        std::shuffle(c.begin(), c.end(), eng);
        const auto q = permute(rho, r, c);
        CHECK(f_eval(q, p) == doctest::Approx(f_eval(rho, p)).epsilon(1e-13));
        const auto s3 = make_rho_s(6, 3).entries();
        CHECK(distance_modulo_permutation(permute(s3, r, c), s3) == 0.0);
        CHECK(canonical_form(permute(s3, r, c)) == canonical_form(s3));
    }
}

TEST_CASE("maximising over S below the condensation region finds the uniform matrix") {
    const LandscapeParams p(3, 2.0, 1.0);
    const auto r = maximize_f(p, Domain::S);
    const double f_bar = f_eval(make_rho_bar(3).entries(), p);
    CHECK(r.converged);
    CHECK(r.f_value == doctest::Approx(f_bar).epsilon(1e-10));
    CHECK(max_abs_diff(r.maximizer.entries(), make_rho_bar(3).entries()) < 1e-4);
    CHECK(f_eval(r.maximizer.entries(), p) == doctest::Approx(r.f_value).epsilon(1e-12));
    CHECK(r.pg_norm <= 1e-8);
    CHECK(r.starts_run == 3 + 2 + 20);
}

TEST_CASE("maximising over D never falls below the uniform matrix") {
    for (auto [k, d, beta] : std::vector<std::tuple<int, double, double>>{{3, 6.0, 3.0}, {4, 9.0, 2.0}, {5, 3.0, 0.5}}) {
        const LandscapeParams p(k, d, beta);
        AscentOptions opt;
        opt.random_starts = 8;
        const auto r = maximize_f(p, Domain::D, opt);
        CHECK(r.f_value >= f_eval(make_rho_bar(k).entries(), p) - 1e-12);
        CHECK(satisfies_kind(r.maximizer.entries(), MatrixKind::DoublyStochastic, 1e-9));
        CHECK(frob(r.maximizer.entries()) >= 1 - 1e-9);
        CHECK(frob(r.maximizer.entries()) <= k + 1e-9);
        for (const auto& tp : r.near_optimal) CHECK(tp.f_value >= r.f_value - opt.tie_tolerance);
    }
}

TEST_CASE("separable domain keeps iterates out of the band") {
    const LandscapeParams p(5, 12.0, std::log(5.0));
    AscentOptions opt;
    opt.random_starts = 6;
    const auto r = maximize_f(p, Domain::DSep, opt);
    CHECK(is_separable_matrix(r.maximizer.entries(), p.kappa_eff()));
    for (const auto& tp : r.near_optimal) CHECK(is_separable_matrix(tp.point, p.kappa_eff() - 1e-9));
}

TEST_CASE("ascent trace is monotone") {
    const LandscapeParams p(4, 5.0, 1.0);
    std::vector<TracePoint> trace;
    std::mt19937_64 eng(9);
    const auto start = random_row_stochastic(4, eng);
    const auto tp = ascend_from(start, "random", p, Domain::S, {}, &trace);
    REQUIRE(trace.size() >= 2);
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i].f >= trace[i - 1].f - 1e-12);
    CHECK(tp.f_value == doctest::Approx(trace.back().f).epsilon(1e-14));
}

TEST_CASE("monotonicity in beta and d") {
    std::mt19937_64 eng(10);
    std::uniform_real_distribution<double> u(0, 1);
    for (int k : {5, 10}) {
        int violations = 0;
        for (int t = 0; t < 1000; ++t) {
            const auto rho = random_row_stochastic(k, eng, t % 2 ? 0.1 : 1.0);
            const double beta = 5 * (1 - u(eng));
            const double d = 2 * k * std::log(k) * (1 - u(eng));
            const LandscapeParams p(k, d, beta);
            violations += !(monotonicity_check_beta(rho, p) < 0);
            violations += !(monotonicity_check_d(rho, p) < 0);
        }
        CHECK(violations == 0);
    }
    const LandscapeParams p(4, 3.0, 0.8);
    const double c = p.c_beta(), k = 4;
    CHECK(monotonicity_check_beta(make_rho_bar(4).entries(), p) ==
          doctest::Approx(-(3.0 / 2) * std::exp(-0.8) * (2 / k - 2 * c / (k * k)) / std::pow(1 - c / k, 2)).epsilon(1e-13));
    const LandscapeParams inf(4, 3.0, std::numeric_limits<double>::infinity());
    const auto id = Matrix::identity(4);
    CHECK(monotonicity_check_d(id, inf) == doctest::Approx(0.5 * std::log(1 - 2 / k + 4 / (k * k))).epsilon(1e-14));
}

TEST_CASE("monotonicity derivatives match finite differences") {
    std::mt19937_64 eng(11);
    for (int t = 0; t < 100; ++t) {
        const int k = 3 + t % 6;
        const auto rho = random_row_stochastic(k, eng);
        const LandscapeParams p(k, 1.0 + t * 0.1, 0.2 + t * 0.03);
        const double h = 1e-6;
        const double fd_beta = (f_eval(rho, p.with_beta(p.beta() + h)) - f_eval(rho, p.with_beta(p.beta() - h))) / (2 * h);
        const double fd_d = (f_eval(rho, p.with_d(p.d() + h)) - f_eval(rho, p.with_d(p.d() - h))) / (2 * h);
        CHECK(monotonicity_check_beta(rho, p) == doctest::Approx(fd_beta).epsilon(1e-6));
        CHECK(monotonicity_check_d(rho, p) == doctest::Approx(fd_d).epsilon(1e-6));
    }
}

TEST_CASE("the uniform matrix minimises the beta derivative over S") {
    std::mt19937_64 eng(12);
    for (int t = 0; t < 300; ++t) {
        const int k = 3 + t % 8;
        const LandscapeParams p(k, 0.5 + 0.05 * t, 0.1 + 0.01 * t);
        const double at_bar = monotonicity_check_beta(make_rho_bar(k).entries(), p);
        CHECK(at_bar <= monotonicity_check_beta(random_row_stochastic(k, eng, 0.3), p) + 1e-14);
    }
}

TEST_CASE("gradient difference sign follows the exponential comparison") {
    std::mt19937_64 eng(13);
    int compared = 0, mismatched = 0;
    for (int t = 0; t < 500; ++t) {
        const int k = 3 + t % 10;
        auto rho = random_row_stochastic(k, eng);
        for (auto& x : rho.data()) x = 0.95 * x + 0.05 / k;
        const LandscapeParams p(k, 0.5 + 0.02 * t, 0.05 + 0.01 * t);
        const int i = static_cast<int>(eng() % k), j = static_cast<int>(eng() % k);
        int l = static_cast<int>(eng() % k);
        if (l == j) l = (l + 1) % k;
        const auto s = gradient_difference_sign(rho, i, j, l, p);
        const auto g = grad_f(rho, p);
        if (std::abs(g(i, j) - g(i, l)) < 1e-10) continue;
        ++compared;
        mismatched += s.gradient_sign != s.predicted_sign;
    }
    CHECK(compared > 400);
    CHECK(mismatched == 0);
}

TEST_CASE("uniform matrix beats the row-identity candidates") {
    for (int k : {10, 20, 50, 100}) {
        const double d = (2 * k - 1) * std::log(k) - 2;
        const auto rows = verify_barmax(k, d, std::log(k));
        REQUIRE(rows.size() == static_cast<std::size_t>(k + 2));
        for (const auto& r : rows) {
            CHECK(r.margin() == doctest::Approx(r.closed_form_margin).epsilon(1e-9).scale(1.0));
            if (r.s == 0)
                CHECK(r.margin() == 0.0);
            else
                CHECK(r.margin() > 0);
        }
        for (const auto& r : verify_barmax(k, d, std::log(k) / 2))
            if (r.s >= 1 && r.s < k) CHECK(r.margin() > 0);
    }
    CHECK_THROWS_AS(verify_barmax(2, 1.0, 1.0), ParameterError);
}
