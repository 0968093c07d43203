#include "doctest.h"

#include <boost/math/special_functions/bessel.hpp>

#include "wolffkit/capacity.hpp"

using namespace wolffkit;

namespace {

// G_alpha through the modified Bessel function of the second kind.
double bessel_oracle(int N, double alpha, double r) {
    const double nu = 0.5 * (N - alpha);
    const double c = 1.0 / (std::pow(4.0 * std::numbers::pi, 0.5 * N) * std::tgamma(0.5 * alpha));
    return c * 2.0 * std::pow(0.5 * r, -nu) * boost::math::cyl_bessel_k(nu, r);
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

CapacityOptions coarse() {
    CapacityOptions o;
    o.grid = 6;
    return o;
}

void check_bounds(const CapacityEstimate& e) {
    CHECK(e.feasible);
    CHECK(e.lower > 0.0);
    CHECK(e.lower <= e.upper);
    CHECK(e.gap == doctest::Approx(e.upper - e.lower));
}

}  // namespace

TEST_CASE("bessel kernel matches the K_nu closed form") {
    for (int N : {1, 2, 3, 4}) {
        for (double alpha : {0.5, 1.0, 2.0, 3.5}) {
            for (double r : {1e-3, 0.05, 0.7, 3.0, 12.0, 40.0}) {
                if (2.0 * N == alpha) continue;
                INFO("N=" << N << " alpha=" << alpha << " r=" << r);
                CHECK(rel(bessel_kernel(N, alpha, r), bessel_oracle(N, alpha, r)) < 1e-8);
            }
        }
    }
}

TEST_CASE("bessel kernel has unit integral") {
    for (int N : {2, 3}) {
        for (double alpha : {0.5, 1.0, 2.5}) {
            // |S^{N-1}| int G(r) r^N d(log r) by trapezoid in log r.
            const double a = std::log(1e-9), b = std::log(80.0);
            const int n = 6000;
            const double h = (b - a) / n;
            double s = 0.0;
            for (int k = 0; k <= n; ++k) {
                const double r = std::exp(a + k * h);
                s += (k == 0 || k == n ? 0.5 : 1.0) * bessel_kernel(N, alpha, r) * std::pow(r, N);
            }
            s *= h * unit_sphere_area(N);
            if (alpha < N) s += unit_sphere_area(N) * bessel_small_r_constant(N, alpha) * std::pow(1e-9, alpha) / alpha;
            INFO("N=" << N << " alpha=" << alpha);
            CHECK(std::abs(s - 1.0) < 1e-3);
        }
    }
}

TEST_CASE("bessel kernel decay and small-r power law") {
    const int N = 3;
    for (double alpha : {0.5, 1.0, 2.0}) {
        CHECK(bessel_kernel(N, alpha, 8.0) / bessel_kernel(N, alpha, 4.0) < std::exp(-1.0));
        CHECK(bessel_kernel(N, alpha, 8.0) * std::exp(4.0) < bessel_kernel(N, alpha, 4.0) * std::exp(2.0));
        const double q1 = bessel_kernel(N, alpha, 0.01) / std::pow(0.01, alpha - N);
        const double q2 = bessel_kernel(N, alpha, 0.02) / std::pow(0.02, alpha - N);
        CHECK(rel(q1, q2) < 0.2);
        CHECK(rel(q1, bessel_small_r_constant(N, alpha)) < 0.05);
    }
    CHECK(std::isinf(bessel_kernel(3, 1.0, 0.0)));
    CHECK(bessel_kernel(3, 4.0, 0.0) == doctest::Approx(bessel_oracle(3, 4.0, 1e-6)).epsilon(1e-6));
    CHECK_THROWS_AS(bessel_kernel(3, 0.0, 1.0), ParameterError);
}

TEST_CASE("riesz capacity of balls scales by dilation") {
    const auto o = coarse();
    for (double p : {1.5, 2.0}) {
        const double alpha = 1.0;
        const auto c1 = riesz_capacity(CompactSet::ball({0, 0, 0}, 0.5), alpha, p, o);
        const auto c2 = riesz_capacity(CompactSet::ball({0.3, -1, 2}, 1.0), alpha, p, o);
        check_bounds(c1);
        check_bounds(c2);
        CHECK(rel(c2.upper / c1.upper, std::pow(2.0, 3.0 - alpha * p)) < 0.1);
        CHECK(c1.gap <= 2.5e-3 * c1.upper);
    }
}

TEST_CASE("riesz capacity parameter checks") {
    const auto K = CompactSet::ball({0, 0, 0}, 1.0);
    CHECK_THROWS_AS(riesz_capacity(K, 1.5, 2.0), ParameterError);
    CHECK_THROWS_AS(riesz_capacity(K, 1.0, 1.0), ParameterError);
    CHECK_THROWS_AS(riesz_capacity(CompactSet::balls({}), 1.0, 2.0), ParameterError);
    CHECK_THROWS_AS(riesz_capacity(CompactSet::ball({0, 0, 0}, -1.0), 1.0, 2.0), ParameterError);
    CapacityOptions bad;
    bad.grid = 1;
    CHECK_THROWS_AS(riesz_capacity(K, 1.0, 2.0, bad), ParameterError);
}

TEST_CASE("far-apart balls are nearly additive and subadditive") {
    const auto o = coarse();
    const Ball a{{0, 0, 0}, 0.5}, b{{50, 0, 0}, 0.5};
    const auto ca = riesz_capacity(CompactSet::balls({a}), 1.0, 2.0, o);
    const auto cb = riesz_capacity(CompactSet::balls({b}), 1.0, 2.0, o);
    const auto cab = riesz_capacity(CompactSet::balls({a, b}), 1.0, 2.0, o);
    check_bounds(cab);
    CHECK(rel(cab.upper, ca.upper + cb.upper) < 0.15);
    CHECK(cab.upper <= (ca.upper + cb.upper) * (1.0 + 2e-3));

    const Ball c{{0.8, 0, 0}, 0.5};
    const auto cc = riesz_capacity(CompactSet::balls({c}), 1.0, 2.0, o);
    const auto cac = riesz_capacity(CompactSet::balls({a, c}), 1.0, 2.0, o);
    CHECK(cac.upper <= (ca.upper + cc.upper) * (1.0 + 2e-3));
    CHECK(cac.upper >= ca.upper);
}

TEST_CASE("capacity is monotone under inclusion") {
    const auto o = coarse();
    for (auto kind : {KernelKind::riesz, KernelKind::bessel}) {
        const auto small = capacity(kind, CompactSet::ball({0, 0, 0}, 0.5), 1.0, 2.0, o);
        const auto big = capacity(kind, CompactSet::ball({0, 0, 0}, 1.0), 1.0, 2.0, o);
        check_bounds(small);
        check_bounds(big);
        CHECK(small.upper <= big.upper * (1.0 + 2e-3));
    }
    // A cube mask sits between its inscribed and circumscribed balls.
    const auto grid = CartesianGrid::cube({0, 0, 0}, 0.5, 4);
    const CompactSet cube{GridMask{grid, std::vector<char>(grid.size(), 1)}};
    CHECK(cube.contains(std::vector<double>{0.49, -0.49, 0.0}));
    CHECK_FALSE(cube.contains(std::vector<double>{0.51, 0.0, 0.0}));
    const auto inner = riesz_capacity(CompactSet::ball({0, 0, 0}, 0.5), 1.0, 2.0, o);
    const auto mid = riesz_capacity(cube, 1.0, 2.0, o);
    const auto outer = riesz_capacity(CompactSet::ball({0, 0, 0}, 0.5 * std::sqrt(3.0)), 1.0, 2.0, o);
    check_bounds(mid);
    CHECK(inner.upper < mid.upper);
    CHECK(mid.upper < outer.upper);
}

TEST_CASE("refining the grid does not raise the upper bound") {
    const auto K = CompactSet::ball({0, 0, 0}, 1.0);
    CapacityOptions o = coarse();
    const auto c6 = riesz_capacity(K, 1.0, 2.0, o);
    o.grid = 10;
    const auto c10 = riesz_capacity(K, 1.0, 2.0, o);
    CHECK(c10.upper <= c6.upper * (1.0 + 2e-3));
    CHECK(rel(c10.upper, c6.upper) < 0.05);
}

TEST_CASE("bessel and riesz capacities agree on small balls") {
    const int N = 3;
    const double alpha = 1.0, p = 2.0, r = 0.05;
    const auto o = coarse();
    const auto cb = bessel_capacity(CompactSet::ball({0, 0, 0}, r), alpha, p, o);
    const auto cr = riesz_capacity(CompactSet::ball({0, 0, 0}, r), alpha, p, o);
    check_bounds(cb);
    // Capacity scales as c^{-p} in the kernel constant; compare against the
    // Riesz kernel with the Bessel small-r constant.
    const double scale = std::pow(bessel_small_r_constant(N, alpha) * (N - alpha), -p);
    const double ratio = cb.upper / (cr.upper * scale);
    CHECK(ratio > 1.0 / 3.0);
    CHECK(ratio < 3.0);
}

TEST_CASE("ball capacity reference") {
    const double u = ball_capacity_reference(3, 1.0, 2.0, 1.0);
    CHECK(ball_capacity_reference(3, 1.0, 2.0, 1.0) == u);
    CHECK(ball_capacity_reference(3, 1.0, 2.0, 2.0) / u == doctest::Approx(2.0).epsilon(1e-14));
    const auto fresh = riesz_capacity(CompactSet::ball({1, 1, 1}, 0.3), 1.0, 2.0);
    CHECK(rel(ball_capacity_reference(3, 1.0, 2.0, 0.3), fresh.upper) < 0.1);
    CHECK_THROWS_AS(ball_capacity_reference(3, 2.0, 2.0, 1.0), ParameterError);
}
