#include "doctest.h"

#include <random>

#include "wolffkit/potential.hpp"

using namespace wolffkit;

namespace {

// int_d^R r^{-c-1} dr, written out as the antiderivative difference.
double dirac_oracle(double d, double R, double c) {
    const double upper = std::isfinite(R) ? std::pow(R, -c) : 0.0;
    return (std::pow(d, -c) - upper) / c;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

AtomicMeasure random_atomic(std::mt19937_64& rng, int dim, int count) {
    std::uniform_real_distribution<double> pos(-1.0, 1.0), w(0.01, 2.0);
    std::vector<Point> pts;
    std::vector<double> wt;
    for (int i = 0; i < count; ++i) {
        Point p(dim);
        for (auto& v : p) v = pos(rng);
        pts.push_back(p);
        wt.push_back(w(rng));
    }
    return AtomicMeasure(dim, pts, wt);
}

RadialMeasure random_radial(std::mt19937_64& rng, const Point& c) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> r, m;
    double rr = 0.0, mm = 0.0;
    for (int k = 0; k < 8; ++k) {
        rr += 0.05 + 0.3 * u(rng);
        mm += u(rng);
        r.push_back(rr);
        m.push_back(mm);
    }
    return RadialMeasure(c, r, m);
}

}  // namespace

TEST_CASE("Dirac closed forms at sample points") {
    const Measure d = AtomicMeasure::dirac({0, 0, 0});
    CHECK(wolff(d, PotentialSpec::wolff(3, 1, 2), Point{2, 0, 0}) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(riesz(d, PotentialSpec::riesz(3, 1), Point{1, 0, 0}) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(riesz(d, PotentialSpec::riesz(3, 2), Point{0, 0.25, 0}) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(ell(d, 2, 1, kInf, Point{1, 0, 0}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(frac_maximal(d, 1, kInf, Point{2, 0, 0}) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(std::isinf(wolff(d, PotentialSpec::wolff(3, 1, 2), Point{0, 0, 0})));

    const Measure zero = AtomicMeasure::empty(3);
    CHECK(wolff(zero, PotentialSpec::wolff(3, 1, 2), Point{1, 0, 0}) == 0.0);
    CHECK(riesz(zero, PotentialSpec::riesz(3, 1), Point{1, 0, 0}) == 0.0);
    CHECK(ell(zero, 1, 2, 3.0, Point{1, 0, 0}) == 0.0);
    CHECK(frac_maximal(zero, 1, kInf, Point{1, 0, 0}) == 0.0);
}

TEST_CASE("parameter invariants") {
    const Measure d = AtomicMeasure::dirac({0, 0, 0});
    CHECK_THROWS_AS(wolff(d, PotentialSpec::wolff(3, 1, 3), Point{1, 0, 0}), ParameterError);
    CHECK_THROWS_AS(wolff(d, PotentialSpec::wolff(3, 1, 1), Point{1, 0, 0}), ParameterError);
    CHECK_THROWS_AS(riesz(d, PotentialSpec::riesz(3, 3), Point{1, 0, 0}), ParameterError);
    CHECK_THROWS_AS(ell(d, 1, 0, kInf, Point{1, 0, 0}), ParameterError);
    CHECK_THROWS_AS(frac_maximal(d, 3, kInf, Point{1, 0, 0}), ParameterError);
    CHECK_THROWS_AS(wolff(d, PotentialSpec::riesz(3, 1), Point{1, 0, 0}), ParameterError);
    QuadratureConfig q;
    q.nodes_per_decade = 4;
    CHECK_THROWS_AS(evaluate_quadrature(d, PotentialSpec::riesz(3, 1), Point{1, 0, 0}, q), ParameterError);
}

TEST_CASE("random Dirac closed forms, exact and quadrature paths") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_exact = 0.0, worst_quad = 0.0, worst_grid = 0.0;
    for (int t = 0; t < 100; ++t) {
        const int N = 3;
        const double p = 1.2 + 1.5 * u(rng);
        const double alpha = (0.1 + 0.8 * u(rng)) * N / p;
        const Point x{0.2 + u(rng), u(rng) - 0.5, u(rng)};
        const double d = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        const double R = (t % 3 == 0) ? kInf : d * (1.5 + 8.0 * u(rng));
        const Measure dirac = AtomicMeasure::dirac({0, 0, 0});
        const auto spec = (t % 2) ? PotentialSpec::wolff(N, alpha, p, R) : PotentialSpec::riesz(N, alpha * p, R);
        const double c = (N - spec.order()) * spec.power();
        const double oracle = dirac_oracle(d, R, c);
        worst_exact = std::max(worst_exact, rel(evaluate(dirac, spec, x), oracle));
        worst_quad = std::max(worst_quad, rel(evaluate_quadrature(dirac, spec, x), oracle));

        // One tiny grid cell carrying unit mass; its finite width costs O(c h / d).
        const double h = 1e-5 * d;
        const Measure cell = GridDensity(CartesianGrid({-0.5 * h, -0.5 * h, -0.5 * h}, {h, h, h}, {1, 1, 1}),
                                         {1.0 / (h * h * h)});
        worst_grid = std::max(worst_grid, rel(evaluate(cell, spec, x), oracle));
    }
    CHECK(worst_exact <= 1e-12);
    CHECK(worst_quad <= 1e-3);
    CHECK(worst_grid <= 1e-3);
}

TEST_CASE("ell identity on exact paths") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        const double alpha = 0.2 + 2.5 * u(rng);
        const double s = 0.3 + 3.0 * u(rng);
        const double R = (t % 2) ? kInf : 0.5 + 3.0 * u(rng);
        const Point x{u(rng), u(rng), u(rng)};
        const Measure mu = random_atomic(rng, 3, 6);
        const double lhs = ell(mu, alpha, s, R, x);
        const double rhs = wolff(mu, PotentialSpec::wolff(3, alpha * s / (s + 1), (s + 1) / s, R), x);
        CHECK(rel(lhs, rhs) <= 1e-12);

        const Measure rad = random_radial(rng, x);
        CHECK(rel(ell(rad, alpha, s, R, x), wolff(rad, PotentialSpec::wolff(3, alpha * s / (s + 1), (s + 1) / s, R),
                                                  x)) <= 1e-12);
    }
}

TEST_CASE("homogeneity and linearity") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 30; ++t) {
        const Measure mu = random_atomic(rng, 3, 5);
        const double lambda = 0.1 + 10.0 * u(rng);
        const Point x{u(rng), u(rng), u(rng)};
        const double p = 1.3 + u(rng);
        const auto w = PotentialSpec::wolff(3, 1.0, p, kInf);
        CHECK(rel(wolff(scaled(mu, lambda), w, x), std::pow(lambda, 1 / (p - 1)) * wolff(mu, w, x)) <= 1e-12);
        const auto r = PotentialSpec::riesz(3, 1.5, 2.0);
        CHECK(rel(riesz(scaled(mu, lambda), r, x), lambda * riesz(mu, r, x)) <= 1e-12);
    }
    const Measure mu = random_atomic(rng, 3, 5);
    const Point x{0.3, 0.3, 0.3};
    const auto w3 = PotentialSpec::wolff(3, 0.5, 3.0);
    CHECK(rel(wolff(scaled(mu, 8.0), w3, x), std::sqrt(8.0) * wolff(mu, w3, x)) <= 1e-12);
}

TEST_CASE("monotone in R and in mu") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 20; ++t) {
        const auto mu = random_atomic(rng, 3, 6);
        const Point x{u(rng), u(rng), u(rng)};
        auto bigger_w = mu.weights();
        for (auto& v : bigger_w) v += u(rng);
        const Measure big = AtomicMeasure(3, mu.points(), bigger_w);
        double prev_w = 0.0, prev_m = 0.0;
        for (double R : {0.1, 0.3, 0.7, 1.5, 4.0, kInf}) {
            const auto spec = PotentialSpec::wolff(3, 1.0, 1.7, R);
            const double v = wolff(mu, spec, x);
            CHECK(v >= prev_w);
            CHECK(wolff(big, spec, x) >= v);
            prev_w = v;
            const double m = frac_maximal(mu, 1.0, R, x);
            CHECK(m >= prev_m);
            prev_m = m;
        }
    }
}

TEST_CASE("radial measures: center exact path vs quadrature and off-center") {
    std::mt19937_64 rng(17);
    const Point c{0, 0, 0};
    for (int t = 0; t < 10; ++t) {
        const Measure mu = random_radial(rng, c);
        for (const auto& spec : {PotentialSpec::wolff(3, 1.0, 2.5), PotentialSpec::riesz(3, 2.0, 1.0),
                                 PotentialSpec::ell(3, 1.0, 0.7)}) {
            const double exact = evaluate(mu, spec, c);
            CHECK(rel(evaluate_quadrature(mu, spec, c), exact) <= 1e-3);
        }
        // Riesz beta = 2 in N = 3 is Newtonian: outside the support the
        // potential equals the total mass over the distance.
        const Point far{4.0, 0, 0};
        CHECK(rel(riesz(mu, PotentialSpec::riesz(3, 2.0), far), total_mass(mu) / 4.0) <= 1e-4);
    }
}

TEST_CASE("frac_maximal on radial measures") {
    // uniform unit-density ball of radius 1 in N = 3: m(t) = omega t^3 for t <= 1
    const Measure mu = RadialMeasure({0, 0, 0}, {1.0}, {unit_ball_volume(3)});
    const double omega = unit_ball_volume(3);
    // alpha = 1: m / t^2 = omega t increases to t = 1 then decays
    CHECK(frac_maximal(mu, 1.0, kInf, Point{0, 0, 0}) == doctest::Approx(omega).epsilon(1e-14));
    CHECK(frac_maximal(mu, 1.0, 0.5, Point{0, 0, 0}) == doctest::Approx(omega * 0.5).epsilon(1e-14));
    // alpha = 0: the density bound omega
    CHECK(frac_maximal(mu, 0.0, kInf, Point{0, 0, 0}) == doctest::Approx(omega).epsilon(1e-14));
}

TEST_CASE("potential_of_field") {
    const auto g = CartesianGrid::cube({0, 0, 0}, 1.0, 8);
    const Field zero{g, std::vector<double>(g.size(), 0.0)};
    const auto z = potential_of_field(zero, PotentialSpec::riesz(3, 2.0), g);
    CHECK(z.sup() == 0.0);

    // chi_{B_1} on a radial grid, I_2 at the center: 1-D radial oracle
    // int_0^1 omega r dr + omega int_1^inf r^{-2} dr = 3 omega / 2.
    std::vector<double> edges{0.0};
    for (int k = 1; k <= 40; ++k) edges.push_back(0.05 * k);
    const RadialGrid rg({0, 0, 0}, edges);
    std::vector<double> chi(rg.size());
    for (std::size_t i = 0; i < rg.size(); ++i) chi[i] = rg.node(i) < 1.0 ? 1.0 : 0.0;
    const Field f{rg, chi};
    const SampleSet at = ScatteredPoints{3, {{0, 0, 0}}};
    const double v = potential_of_field(f, PotentialSpec::riesz(3, 2.0), at).values[0];
    CHECK(rel(v, 1.5 * unit_ball_volume(3)) <= 1e-3);

    // Cartesian lattice path vs direct Newtonian summation with equal-volume cells.
    const auto cg = CartesianGrid::cube({0, 0, 0}, 1.0, 10);
    std::vector<double> dens(cg.size());
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& d : dens) d = u(rng);
    const Field cf{cg, dens};
    const auto pot = potential_of_field(cf, PotentialSpec::riesz(3, 2.0), cg);
    const double a = std::pow(cg.cell_volume() / unit_ball_volume(3), 1.0 / 3.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < cg.size(); i += 37) {
        const auto xi = cg.center(i);
        double s = 0.0;
        for (std::size_t k = 0; k < cg.size(); ++k) {
            const double mass = dens[k] * cg.cell_volume();
            s += k == i ? 1.5 * mass / a : mass / distance(xi, cg.center(k));
        }
        worst = std::max(worst, rel(pot.values[i], s));
    }
    CHECK(worst <= 1e-3);

    // Off-lattice points use the sorted-distance path; same model.
    const SampleSet off = ScatteredPoints{3, {{0.013, -0.27, 0.31}}};
    const double vo = potential_of_field(cf, PotentialSpec::riesz(3, 2.0), off).values[0];
    double so = 0.0;
    for (std::size_t k = 0; k < cg.size(); ++k) {
        const double r = distance(Point{0.013, -0.27, 0.31}, cg.center(k));
        const double mass = dens[k] * cg.cell_volume();
        // inside an equal-volume ball: M (3a^2 - r^2) / (2 a^3)
        so += r >= a ? mass / r : mass * (3 * a * a - r * r) / (2 * a * a * a);
    }
    CHECK(rel(vo, so) <= 1e-3);

    // homogeneity of the field potential
    std::vector<double> scaled_dens(dens);
    for (auto& d : scaled_dens) d *= 5.0;
    const auto w = PotentialSpec::wolff(3, 1.0, 1.6);
    const auto p1 = potential_of_field(cf, w, cg);
    const auto p5 = potential_of_field(Field{cg, scaled_dens}, w, cg);
    for (std::size_t i = 0; i < cg.size(); i += 41)
        CHECK(rel(p5.values[i], std::pow(5.0, 1 / 0.6) * p1.values[i]) <= 1e-9);
}

TEST_CASE("power_product") {
    const SampleSet s = ScatteredPoints{1, {{0.0}, {1.0}}};
    const Field U{s, {4.0, 1.0}}, V{s, {9.0, 1.0}};
    const auto P = power_product(U, V, 0.5, 0.5);
    CHECK(P.values[0] == doctest::Approx(6.0));
    CHECK(P.values[1] == 1.0);
    CHECK(power_product(U, V, 1.0, 0.0).values == U.values);
    const Field W{ScatteredPoints{1, {{0.0}}}, {1.0}};
    CHECK_THROWS_AS(power_product(U, W, 1, 1), ParameterError);
}

TEST_CASE("dyadic comparison for 1 < p <= 2") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        const Measure mu = random_atomic(rng, 3, 10);
        const double p = 1.05 + 0.95 * u(rng);
        const Point x{u(rng), u(rng), u(rng)};
        double lhs = 0.0, sum = 0.0;
        for (int n = -10; n <= 4; ++n) {
            const double an = ball_mass(mu, x, std::ldexp(1.0, n)) / std::pow(2.0, n * (3 - p));
            lhs += std::pow(an, 1 / (p - 1));
            sum += an;
        }
        CHECK(lhs <= std::pow(sum, 1 / (p - 1)) * (1 + 1e-12));
    }
}

TEST_CASE("weak-type bound for L_{alpha,s}") {
    // Level-set volume of L_{alpha,s}[omega] times lambda^{N/(s(N-alpha))}
    // over three decades of lambda; volume by Halton sampling of a box.
    const int N = 3;
    const double alpha = 1.0, s = 1.5;
    const Measure mu = AtomicMeasure(3, {{0, 0, 0}, {0.4, 0.1, 0}, {-0.2, 0.3, 0.1}}, {1.0, 0.5, 0.25});
    const double L = 3.0;
    std::vector<double> values;
    const int samples = 40000;
    for (int i = 0; i < samples; ++i) {
        auto h = halton(i, 3);
        Point y(3);
        for (int d = 0; d < 3; ++d) y[d] = -L + 2 * L * h[d];
        values.push_back(ell(mu, alpha, s, kInf, y));
    }
    std::vector<double> scaled_vol;
    for (double lambda = 1.0; lambda <= 1000.0; lambda *= 2.0) {
        std::size_t count = 0;
        for (double v : values)
            if (v > lambda) ++count;
        const double vol = std::pow(2 * L, 3) * count / samples;
        if (count >= 20) scaled_vol.push_back(vol * std::pow(lambda, N / (s * (N - alpha))));
    }
    REQUIRE(scaled_vol.size() >= 5);
    auto sorted = scaled_vol;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    CHECK(sorted.back() <= 10 * median);
}

TEST_CASE("local embedding ratio is bounded and refinement-stable") {
    // int_{B_r(x)} (W^r[mu])^gamma dy / (r^N (mu(B_2r)/r^{N-alpha p})^{gamma/(p-1)})
    const int N = 3;
    const double alpha = 1.0, p = 2.0;
    const double gamma = 0.8 * N * (p - 1) / (N - alpha * p);
    std::mt19937_64 rng(31);
    const Measure mu = random_atomic(rng, 3, 4);
    auto ratio = [&](const Point& x, double r, int n) {
        const auto g = CartesianGrid::cube(x, r, n);
        const auto W = evaluate_on(mu, PotentialSpec::wolff(N, alpha, p, r), g);
        double lhs = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (distance(g.center(i), x) <= r) lhs += std::pow(W.values[i], gamma) * g.cell_volume();
        const double rhs = std::pow(r, N) * std::pow(ball_mass(mu, x, 2 * r) / std::pow(r, N - alpha * p), gamma / (p - 1));
        return lhs / rhs;
    };
    for (const auto& [x, r] : std::vector<std::pair<Point, double>>{{{0, 0, 0}, 0.8}, {{0.2, 0.1, -0.3}, 0.5}}) {
        const double coarse = ratio(x, r, 20), fine = ratio(x, r, 40);
        CHECK(std::isfinite(fine));
        CHECK(std::abs(fine / coarse - 1.0) < 0.2);
    }
}
