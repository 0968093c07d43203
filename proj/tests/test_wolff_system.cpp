#include "doctest.h"

#include "wolffkit/wolff_system.hpp"

using namespace wolffkit;

namespace {

Measure bump(double mass = 1.0) { return mollified_dirac_radial({0, 0, 0}, mass, 0.1); }

SystemConfig bench(double eps) {
    SystemConfig cfg;
    cfg.epsilon = eps;
    return cfg;
}

}  // namespace

TEST_CASE("zero measure is a fixed point") {
    const Measure zero = RadialMeasure({0, 0, 0}, {1.0}, {0.0});
    const auto sol = solve_system(zero, bench(1e-3));
    CHECK(sol.status == SystemStatus::converged);
    CHECK(sol.iterations == 1);
    CHECK(sol.U.sup() == 0.0);
    CHECK(sol.V.sup() == 0.0);
    CHECK(verify_solution(sol, zero, bench(1e-3)).residual == 0.0);
    CHECK_THROWS_AS(epsilon_threshold(zero, bench(1e-3), 1e-4, 1e2), ParameterError);
}

TEST_CASE("mollified Dirac benchmark converges inside the tube") {
    const auto mu = bump();
    const auto cfg = bench(1e-3);
    const auto sol = solve_system(mu, cfg);
    CHECK(sol.status == SystemStatus::converged);
    CHECK(sol.iterations <= 200);
    CHECK(sol.residual <= 3.0 * cfg.tol);
    CHECK(sol.monotone);
    CHECK(sol.max_tube_ratio <= 2.0 * 1.01);
    CHECK(sol.max_tube_ratio >= 1.0);

    // Recompute the tube bound independently.
    const auto w = evaluate_on(mu, PotentialSpec::wolff(3, 1.0, 2.0), sol.U.samples);
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(sol.U.values[i] <= 2.02 * cfg.epsilon * w.values[i]);
    for (std::size_t k = 1; k < sol.trace.size(); ++k) CHECK(sol.trace[k].sup_u >= sol.trace[k - 1].sup_u);

    const auto res = verify_solution(sol, mu, cfg);
    CHECK(res.pass);
    CHECK(res.residual <= 5e-2);

    auto bad = sol;
    for (auto& v : bad.U.values) v *= 1.5;
    CHECK(verify_solution(bad, mu, cfg).residual > 0.2);
}

TEST_CASE("large epsilon escapes the tube") {
    const auto sol = solve_system(bump(), bench(1e3));
    CHECK(sol.status == SystemStatus::diverged);
    CHECK(sol.monotone);
    CHECK_THROWS_AS(verify_solution(sol, bump(), bench(1e3)), ParameterError);
}

TEST_CASE("solver preconditions") {
    CHECK_THROWS_AS(solve_system(AtomicMeasure::dirac({0, 0, 0}), bench(1e-3)), ParameterError);
    auto cfg = bench(1e-3);
    cfg.grid = RadialGrid::graded({0, 0, 0}, 0.3, 40, 1e-4);
    CHECK_THROWS_AS(solve_system(bump(), cfg), ParameterError);
    cfg = bench(1e-3);
    cfg.blowup_factor = 2.0;
    CHECK_THROWS_AS(solve_system(bump(), cfg), ParameterError);
    cfg = bench(-1.0);
    CHECK_THROWS_AS(solve_system(bump(), cfg), ParameterError);
}

TEST_CASE("one step commutes with the mass scaling") {
    // eps W[lambda mu] = eps lambda^{1/(p-1)} W[mu]: the discrete map only sees
    // eps * lambda^{1/(p-1)}.
    for (double p : {2.0, 1.7}) {
        auto cfg = bench(2e-3);
        cfg.params.p = p;
        cfg.params.q1 = 0.9;
        cfg.params.q2 = 0.6;
        cfg.max_iter = 1;
        const double lambda = 3.0;
        const auto a = solve_system(bump(lambda), cfg);
        cfg.epsilon *= std::pow(lambda, 1.0 / (p - 1.0));
        const auto b = solve_system(bump(1.0), cfg);
        for (std::size_t i = 0; i < a.U.size(); ++i) {
            CHECK(a.U.values[i] == doctest::Approx(b.U.values[i]).epsilon(1e-12));
            CHECK(a.V.values[i] == doctest::Approx(b.V.values[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("threshold scales with the mass") {
    const auto cfg = bench(1e-3);
    const auto t1 = epsilon_threshold(bump(1.0), cfg, 1e-4, 1e2);
    const auto t2 = epsilon_threshold(bump(2.0), cfg, 1e-4, 1e2);
    CHECK(t1.eps_lo < t1.eps_hi);
    CHECK(t1.eps_hi / t1.eps_lo <= 1.05);
    CHECK(t1.spot_check);
    const double ratio = std::sqrt(t2.eps_lo * t2.eps_hi / (t1.eps_lo * t1.eps_hi));
    CHECK(std::abs(ratio / std::pow(2.0, -1.0 / (cfg.params.p - 1.0)) - 1.0) < 0.1);
    CHECK_THROWS_AS(epsilon_threshold(bump(), cfg, 1.0, 10.0), ParameterError);
}

TEST_CASE("single form and Cartesian grids") {
    auto cfg = bench(1e-3);
    cfg.params.q1 = 2.0;
    cfg.params.q2 = 0.0;
    const auto s = solve_system(bump(), cfg);
    CHECK(s.status == SystemStatus::converged);
    CHECK(s.U.values == s.V.values);

    const auto g = CartesianGrid::cube({0, 0, 0}, 0.4, 4);
    const Measure cube = GridDensity(g, std::vector<double>(g.size(), 1.0));
    auto cc = bench(1e-3);
    cc.cartesian_n = 8;
    const auto sol = solve_system(cube, cc);
    CHECK(sol.status == SystemStatus::converged);
    CHECK(sol.monotone);
    CHECK(sol.max_tube_ratio <= 2.02);
    CHECK(std::holds_alternative<CartesianGrid>(sol.U.samples));
    const auto res = verify_solution(sol, cube, cc);
    CHECK(std::isfinite(res.residual));
}

TEST_CASE("field interpolation") {
    const auto coarse = CartesianGrid::cube({0, 0, 0}, 1.0, 4);
    Field f{coarse, std::vector<double>(coarse.size())};
    auto lin = [](const Point& x) { return 1.0 + 2.0 * x[0] - x[1] + 0.5 * x[2]; };
    for (std::size_t i = 0; i < coarse.size(); ++i) f.values[i] = lin(coarse.center(i));
    const auto fine = coarse.refined(2);
    const auto out = interpolate(f, fine);
    for (std::size_t i = 0; i < fine.size(); ++i) {
        const auto x = fine.center(i);
        if (std::abs(x[0]) < 0.75 && std::abs(x[1]) < 0.75 && std::abs(x[2]) < 0.75)
            CHECK(out.values[i] == doctest::Approx(lin(x)).epsilon(1e-12));
    }

    const auto rg = RadialGrid::graded({0, 0, 0}, 2.0, 20, 0.01);
    Field r{rg, rg.nodes()};
    const auto rr = interpolate(r, rg.refined(2));
    const auto fine_nodes = rg.refined(2).nodes();
    for (std::size_t i = 0; i < fine_nodes.size(); ++i)
        if (fine_nodes[i] > rg.node(0) && fine_nodes[i] < rg.node(rg.size() - 1))
            CHECK(rr.values[i] == doctest::Approx(fine_nodes[i]).epsilon(1e-12));
    CHECK_THROWS_AS(interpolate(r, fine), ParameterError);
}
