#include "wolffkit/common.hpp"

#include <algorithm>
#include <map>
#include <mutex>

#include <boost/math/special_functions/beta.hpp>

namespace wolffkit {

double unit_sphere_area(int dim) {
    const double half = 0.5 * dim;
    return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double unit_ball_volume(int dim) { return unit_sphere_area(dim) / dim; }

double distance_squared(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double distance(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(distance_squared(a, b));
}

double ball_cap_volume(int dim, double r, double h) {
    if (h <= 0.0) return 0.0;
    if (h >= 2.0 * r) return unit_ball_volume(dim) * std::pow(r, dim);
    switch (dim) {
        case 1:
            return h;
        case 2: {
            const double c = std::clamp((r - h) / r, -1.0, 1.0);
            return r * r * std::acos(c) - (r - h) * std::sqrt(std::max(0.0, 2.0 * r * h - h * h));
        }
        case 3:
            return std::numbers::pi * h * h * (3.0 * r - h) / 3.0;
        default:
            break;
    }
    const double full = unit_ball_volume(dim) * std::pow(r, dim);
    if (h > r) return full - ball_cap_volume(dim, r, 2.0 * r - h);
    const double x = std::clamp((2.0 * r * h - h * h) / (r * r), 0.0, 1.0);
    return 0.5 * full * boost::math::ibeta(0.5 * (dim + 1), 0.5, x);
}

double ball_intersection_volume(int dim, double r, double rho, double sep) {
    if (r <= 0.0 || rho <= 0.0) return 0.0;
    if (sep >= r + rho) return 0.0;
    if (sep + r <= rho) return unit_ball_volume(dim) * std::pow(r, dim);
    if (sep + rho <= r) return unit_ball_volume(dim) * std::pow(rho, dim);
    // Radical plane at distance d1 from the center of B_r.
    const double d1 = (sep * sep + r * r - rho * rho) / (2.0 * sep);
    const double h1 = r - d1;
    const double h2 = rho - (sep - d1);
    if (dim == 3) {
        // Lens volume, closed form.
        const double pi = std::numbers::pi;
        return pi * (h1 * h1 * (3.0 * r - h1) + h2 * h2 * (3.0 * rho - h2)) / 3.0;
    }
    return ball_cap_volume(dim, r, h1) + ball_cap_volume(dim, rho, h2);
}

std::vector<double> log_nodes(double a, double b, int per_decade) {
    std::vector<double> out;
    if (!(b > a) || !(a > 0.0)) {
        out.push_back(b);
        return out;
    }
    const double decades = std::log10(b / a);
    const int n = std::max(1, static_cast<int>(std::ceil(decades * per_decade)));
    out.reserve(n + 1);
    const double step = decades / n;
    for (int k = 0; k < n; ++k) out.push_back(a * std::pow(10.0, k * step));
    out.push_back(b);
    return out;
}

namespace {

GaussRule make_gauss(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, make_gauss(order)).first;
    return it->second;
}

std::vector<double> halton(std::size_t index, int dim) {
    static constexpr int kBases[] = {2, 3, 5, 7, 11, 13, 17, 19};
    std::vector<double> out(dim);
    for (int d = 0; d < dim; ++d) {
        const int base = kBases[d % 8];
        double f = 1.0, r = 0.0;
        std::size_t i = index + 1;
        while (i > 0) {
            f /= base;
            r += f * static_cast<double>(i % base);
            i /= base;
        }
        out[d] = r;
    }
    return out;
}

}  // namespace wolffkit
