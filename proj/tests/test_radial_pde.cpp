#include "doctest.h"

#include <random>

#include "wolffkit/radial_pde.hpp"

using namespace wolffkit;

namespace {

const Point kO{0, 0, 0};

RadialMeasure dirac(double m = 1.0) { return RadialMeasure(kO, {0.0}, {m}); }

RadialMeasure dilate(const RadialMeasure& mu, double L, double mass_factor) {
    auto r = mu.radii();
    auto c = mu.cumulative();
    for (double& x : r) x *= L;
    for (double& x : c) x *= mass_factor;
    return RadialMeasure(mu.center(), r, c);
}

RadialProblem bench(double mass) {
    RadialProblem pr;
    pr.mu = mollified_dirac_radial(kO, mass, 0.1);
    return pr;
}

}  // namespace

TEST_CASE("linear solve reproduces the fundamental solution") {
    const auto s = solve_linear_radial(dirac(), 2.0, 3, 100.0);
    int checked = 0;
    for (std::size_t i = 0; i < s.r_nodes.size(); ++i) {
        const double r = s.r_nodes[i];
        if (r < 0.1 || r > 1.0) continue;
        const double exact = (1.0 / r - 1.0 / 100.0) / (4.0 * M_PI);
        CHECK(std::abs(s.u[i] / exact - 1.0) <= 1e-10);
        CHECK(s.du[i] == doctest::Approx(-1.0 / (4.0 * M_PI * r * r)).epsilon(1e-13));
        ++checked;
    }
    CHECK(checked > 30);
    CHECK(s.u.back() == 0.0);
    CHECK(s.r_nodes.back() == 100.0);

    // p = 3/2: u(r) = (r^{-3} - R^{-3}) / (3 sigma^2).
    const auto t = solve_linear_radial(dirac(), 1.5, 3, 2.0);
    const double sigma = 4.0 * M_PI;
    for (std::size_t i = 0; i < t.r_nodes.size(); ++i) {
        const double r = t.r_nodes[i];
        if (r < 0.05) continue;
        CHECK(t.u[i] == doctest::Approx((std::pow(r, -3) - 0.125) / (3.0 * sigma * sigma)).epsilon(1e-10));
    }
}

TEST_CASE("linear solve: zero data, homogeneity, boundary value") {
    const auto z = solve_linear_radial(RadialMeasure(kO, {0.5}, {0.0}), 2.0, 3, 1.0);
    for (double v : z.u) CHECK(v == 0.0);
    for (double v : z.du) CHECK(v == 0.0);

    const auto mu = mollified_dirac_radial(kO, 1.0, 0.2);
    for (double p : {1.6, 2.0, 2.5}) {
        const auto a = solve_linear_radial(mu, p, 3, 1.0);
        const auto b = solve_linear_radial(dilate(mu, 1.0, 5.0), p, 3, 1.0);
        REQUIRE(a.r_nodes == b.r_nodes);
        const double f = std::pow(5.0, 1.0 / (p - 1.0));
        for (std::size_t i = 0; i < a.u.size(); ++i) {
            CHECK(b.u[i] == doctest::Approx(f * a.u[i]).epsilon(1e-12));
            CHECK(b.du[i] == doctest::Approx(f * a.du[i]).epsilon(1e-12));
        }
        CHECK(a.u.back() == 0.0);
    }
    CHECK_THROWS_AS(solve_linear_radial(mu, 1.0, 3, 1.0), ParameterError);
    CHECK_THROWS_AS(solve_linear_radial(mu, 2.0, 2, 1.0), ParameterError);
}

TEST_CASE("linear solution is a difference of truncated Wolff potentials") {
    // u(r) = sigma^{-1/(p-1)} (W^{R}_{1,p}[mu](0) - W^{r}_{1,p}[mu](0)); for a
    // Dirac at the center the second term vanishes off the origin.
    for (double p : {1.5, 2.0, 2.7}) {
        const double e = 1.0 / (p - 1.0);
        const double c = std::pow(unit_sphere_area(3), -e);
        const auto s = solve_linear_radial(dirac(), p, 3, 3.0);
        const Measure atom = AtomicMeasure::dirac(kO);
        for (std::size_t i = 0; i < s.r_nodes.size(); i += 7) {
            const double x[3] = {s.r_nodes[i], 0.0, 0.0};
            const double w = wolff(atom, PotentialSpec::wolff(3, 1.0, p, 3.0), x);
            CHECK(s.u[i] == doctest::Approx(c * w).epsilon(1e-12));
        }

        const auto mu = mollified_dirac_radial(kO, 1.0, 0.3);
        const auto m = solve_linear_radial(mu, p, 3, 1.0);
        const Measure mm = mu;
        const double top = wolff(mm, PotentialSpec::wolff(3, 1.0, p, 1.0), kO);
        for (std::size_t i = 0; i < m.r_nodes.size(); i += 11) {
            const double inner = wolff(mm, PotentialSpec::wolff(3, 1.0, p, m.r_nodes[i]), kO);
            CHECK(m.u[i] == doctest::Approx(c * (top - inner)).epsilon(1e-9));
        }
    }
}

TEST_CASE("comparison principle on random radial pairs") {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int pair = 0; pair < 50; ++pair) {
        const int k = 2 + static_cast<int>(U(rng) * 10);
        std::vector<double> radii(k), c1(k), c2(k);
        double r = 0.0, m1 = 0.0, m2 = 0.0;
        for (int j = 0; j < k; ++j) {
            r += 0.05 + 0.1 * U(rng);
            m1 += U(rng);
            m2 = std::max(m2 + U(rng), m1);
            radii[j] = r;
            c1[j] = m1;
            c2[j] = m2;
        }
        const double p = 1.5 + 1.4 * U(rng);
        const RadialMeasure a(kO, radii, c1), b(kO, radii, c2);
        const double R = r + 0.5;
        const auto sa = solve_linear_radial(a, p, 3, R);
        const auto sb = solve_linear_radial(b, p, 3, R);
        REQUIRE(sa.r_nodes == sb.r_nodes);
        bool ok = true;
        for (std::size_t i = 0; i < sa.u.size(); ++i) ok = ok && sa.u[i] <= sb.u[i];
        CHECK(ok);
    }
}

TEST_CASE("problem hypotheses") {
    auto pr = bench(1e-3);
    CHECK_NOTHROW(pr.validate());
    pr.p = 1.4;  // (3N-2)/(2N-1) for N = 3
    CHECK_THROWS_AS(pr.validate(), ParameterError);
    pr = bench(1e-3);
    pr.p = 3.0;
    CHECK_THROWS_AS(pr.validate(), ParameterError);
    pr = bench(1e-3);
    pr.q2 = 1.5;
    CHECK_THROWS_AS(pr.validate(), ParameterError);
    pr = bench(1e-3);
    pr.q1 = 0.1;
    pr.q2 = 0.5;
    CHECK_THROWS_AS(pr.validate(), ParameterError);
    pr = bench(1e-3);
    pr.R_dom = 0.1;
    CHECK_THROWS_AS(pr.validate(), ParameterError);
    pr = bench(1e-3);
    pr.mu = dirac(1e-3);
    CHECK_THROWS_AS(picard_solve(pr), ParameterError);
}

TEST_CASE("Picard iteration: zero data, small data, large data") {
    RadialProblem zero = bench(0.0);
    const auto z = picard_solve(zero);
    CHECK(z.status == SystemStatus::converged);
    CHECK(z.picard_iters == 1);
    CHECK(z.in_tube);
    for (double v : z.u) CHECK(v == 0.0);
    CHECK(verify_pointwise_bounds(z, zero.mu, 2.0, 3).vacuous);

    const auto pr = bench(1e-3);
    const auto s = picard_solve(pr);
    CHECK(s.status == SystemStatus::converged);
    CHECK(s.in_tube);
    CHECK(s.monotone);
    CHECK(s.residual <= 1e-8);
    CHECK(s.u.back() == 0.0);
    for (double v : s.u) CHECK(v >= 0.0);
    const auto lin = solve_linear_radial(pr.mu, 2.0, 3, 1.0);
    for (std::size_t i = 0; i < s.u.size(); ++i) CHECK(s.u[i] >= lin.u[i]);

    const auto b = verify_pointwise_bounds(s, pr.mu, 2.0, 3);
    CHECK_FALSE(b.vacuous);
    CHECK(std::isfinite(b.C_up));
    CHECK(std::isfinite(b.C_low));
    CHECK(std::isfinite(b.C_grad));
    CHECK(b.C_up > 0.0);
    CHECK(b.C_low > 0.0);
    CHECK(b.C_grad > 0.0);

    const auto big = picard_solve(bench(1e3));
    CHECK(big.status == SystemStatus::diverged);
    CHECK_FALSE(big.in_tube);
    CHECK_THROWS_AS(verify_pointwise_bounds(big, bench(1e3).mu, 2.0, 3), ParameterError);
}

TEST_CASE("Newtonian case: fitted constants") {
    const auto mu = mollified_dirac_radial(kO, 1.0, 0.1);
    auto s = solve_linear_radial(mu, 2.0, 3, 1.0);
    const auto b = verify_pointwise_bounds(s, mu, 2.0, 3);
    const double c = 1.0 / (4.0 * M_PI);
    CHECK(b.C_up >= 0.9 * c);
    CHECK(b.C_up <= 1.1 * c);
    CHECK(std::isfinite(b.C_low));
    // At a common node u <= C_up W^{4}, u >= W^{d/4} / C_low.
    const Measure m = mu;
    const double x[3] = {0.0, 0.0, 0.0};
    const double ratio = wolff(m, PotentialSpec::wolff(3, 1.0, 2.0, 0.25), x) / wolff(m, PotentialSpec::wolff(3, 1.0, 2.0, 4.0), x);
    CHECK(b.C_up * b.C_low >= ratio);
    // |u'| = m / (4 pi r^2), I_1 ~ m / (2 r^2) away from the support.
    CHECK(b.C_grad == doctest::Approx(2.0 * c).epsilon(0.05));
}

TEST_CASE("fitted constants are scale invariant") {
    // Linear: doubling the data.
    for (double p : {1.7, 2.0, 2.5}) {
        const auto mu = mollified_dirac_radial(kO, 1.0, 0.1);
        const auto mu2 = dilate(mu, 1.0, 2.0);
        const auto a = verify_pointwise_bounds(solve_linear_radial(mu, p, 3, 1.0), mu, p, 3);
        const auto b = verify_pointwise_bounds(solve_linear_radial(mu2, p, 3, 1.0), mu2, p, 3);
        CHECK(b.C_up == doctest::Approx(a.C_up).epsilon(1e-9));
        CHECK(b.C_low == doctest::Approx(a.C_low).epsilon(1e-9));
        CHECK(b.C_grad == doctest::Approx(a.C_grad).epsilon(1e-9));
    }
    // Nonlinear: u_L(x) = L^a u(x / L) with a = (p - q2) / (p - 1 - q1 - q2)
    // solves the dilated problem with mass factor L^{a(p-1) - p + N}.
    auto pr = bench(1e-3);
    pr.q1 = 1.2;
    pr.q2 = 0.7;
    const double L = 2.0;
    const double a = (pr.p - pr.q2) / (pr.p - 1.0 - pr.q1 - pr.q2);
    auto pl = pr;
    pl.mu = dilate(pr.mu, L, std::pow(L, a * (pr.p - 1.0) - pr.p + pr.N));
    pl.R_dom = L * pr.R_dom;
    const auto s = picard_solve(pr);
    const auto t = picard_solve(pl);
    REQUIRE(s.status == SystemStatus::converged);
    REQUIRE(t.status == SystemStatus::converged);
    REQUIRE(s.u.size() == t.u.size());
    for (std::size_t i = 0; i < s.u.size(); ++i) CHECK(t.u[i] == doctest::Approx(std::pow(L, a) * s.u[i]).epsilon(1e-9));
    const auto bs = verify_pointwise_bounds(s, pr.mu, pr.p, pr.N);
    const auto bt = verify_pointwise_bounds(t, pl.mu, pl.p, pl.N);
    CHECK(bt.C_up == doctest::Approx(bs.C_up).epsilon(1e-9));
    CHECK(bt.C_low == doctest::Approx(bs.C_low).epsilon(1e-9));
    CHECK(bt.C_grad == doctest::Approx(bs.C_grad).epsilon(1e-9));
}
