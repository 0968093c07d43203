#include "wolffkit/capacity.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <tuple>

#include "wolffkit/parallel.hpp"

namespace wolffkit {

CompactSet CompactSet::ball(Point center, double radius) { return CompactSet{std::vector<Ball>{{std::move(center), radius}}}; }

CompactSet CompactSet::balls(std::vector<Ball> b) { return CompactSet{std::move(b)}; }

int CompactSet::dim() const {
    if (const auto* b = std::get_if<std::vector<Ball>>(&shape)) return b->empty() ? 0 : static_cast<int>(b->front().center.size());
    return std::get<GridMask>(shape).grid.dim();
}

void CompactSet::validate() const {
    if (const auto* b = std::get_if<std::vector<Ball>>(&shape)) {
        if (b->empty()) throw ParameterError("compact set: no balls");
        for (const auto& ball : *b) {
            if (static_cast<int>(ball.center.size()) != dim()) throw ParameterError("compact set: mixed dimensions");
            if (!(ball.radius > 0.0) || !std::isfinite(ball.radius))
                throw ParameterError("compact set: ball radius must be positive");
        }
        return;
    }
    const auto& m = std::get<GridMask>(shape);
    if (m.mask.size() != m.grid.size()) throw ParameterError("compact set: mask size does not match grid");
    if (std::none_of(m.mask.begin(), m.mask.end(), [](char c) { return c != 0; }))
        throw ParameterError("compact set: empty mask");
}

bool CompactSet::contains(std::span<const double> x) const {
    if (const auto* b = std::get_if<std::vector<Ball>>(&shape)) {
        return std::any_of(b->begin(), b->end(), [&](const Ball& ball) { return distance(ball.center, x) <= ball.radius; });
    }
    const auto& m = std::get<GridMask>(shape);
    std::vector<int> idx(m.grid.dim());
    for (int d = 0; d < m.grid.dim(); ++d) {
        const double t = (x[d] - m.grid.origin()[d]) / m.grid.spacing()[d];
        if (t < 0.0 || t > m.grid.shape()[d]) return false;
        idx[d] = std::min(static_cast<int>(t), m.grid.shape()[d] - 1);
    }
    return m.mask[m.grid.flatten(idx)] != 0;
}

double CompactSet::box_distance(std::span<const double> lo, std::span<const double> hi) const {
    auto box_point = [&](std::span<const double> c) {
        double s = 0.0;
        for (std::size_t d = 0; d < c.size(); ++d) {
            const double e = std::max({lo[d] - c[d], 0.0, c[d] - hi[d]});
            s += e * e;
        }
        return std::sqrt(s);
    };
    double best = kInf;
    if (const auto* b = std::get_if<std::vector<Ball>>(&shape)) {
        for (const auto& ball : *b) best = std::min(best, std::max(0.0, box_point(ball.center) - ball.radius));
        return best;
    }
    const auto& m = std::get<GridMask>(shape);
    const int n = m.grid.dim();
    std::vector<double> c(n);
    for (std::size_t i = 0; i < m.mask.size(); ++i) {
        if (!m.mask[i]) continue;
        m.grid.center(i, c.data());
        double s = 0.0;
        for (int d = 0; d < n; ++d) {
            const double hh = 0.5 * m.grid.spacing()[d];
            const double e = std::max({lo[d] - (c[d] + hh), 0.0, (c[d] - hh) - hi[d]});
            s += e * e;
        }
        best = std::min(best, std::sqrt(s));
        if (best == 0.0) break;
    }
    return best;
}

std::pair<Point, Point> CompactSet::bounds() const {
    const int n = dim();
    Point lo(n, kInf), hi(n, -kInf);
    if (const auto* b = std::get_if<std::vector<Ball>>(&shape)) {
        for (const auto& ball : *b)
            for (int d = 0; d < n; ++d) {
                lo[d] = std::min(lo[d], ball.center[d] - ball.radius);
                hi[d] = std::max(hi[d], ball.center[d] + ball.radius);
            }
        return {lo, hi};
    }
    const auto& m = std::get<GridMask>(shape);
    std::vector<double> c(n);
    for (std::size_t i = 0; i < m.mask.size(); ++i) {
        if (!m.mask[i]) continue;
        m.grid.center(i, c.data());
        for (int d = 0; d < n; ++d) {
            lo[d] = std::min(lo[d], c[d] - 0.5 * m.grid.spacing()[d]);
            hi[d] = std::max(hi[d], c[d] + 0.5 * m.grid.spacing()[d]);
        }
    }
    return {lo, hi};
}

double CompactSet::feature_size() const {
    if (const auto* b = std::get_if<std::vector<Ball>>(&shape)) {
        double s = kInf;
        for (const auto& ball : *b) s = std::min(s, 2.0 * ball.radius);
        return s;
    }
    const auto [lo, hi] = bounds();
    double s = 0.0;
    for (std::size_t d = 0; d < lo.size(); ++d) s = std::max(s, hi[d] - lo[d]);
    return s;
}

// ---------------------------------------------------------------------------

double riesz_kernel(int N, double alpha, double r) {
    if (r == 0.0) return kInf;
    return std::pow(r, alpha - N) / (N - alpha);
}

double bessel_kernel(int N, double alpha, double r) {
    if (!(alpha > 0.0)) throw ParameterError("bessel kernel: alpha must be > 0");
    if (r < 0.0) throw ParameterError("bessel kernel: r must be >= 0");
    const double c = 1.0 / (std::pow(4.0 * std::numbers::pi, 0.5 * N) * std::tgamma(0.5 * alpha));
    const double nu = 0.5 * (alpha - N);
    if (r == 0.0) return nu > 0.0 ? c * std::tgamma(nu) : kInf;
    // G = c int exp(nu u - e^u - b e^{-u}) du, u = log t.
    const double b = 0.25 * r * r;
    const double w = nu >= 0.0 ? 0.5 * (nu + std::sqrt(nu * nu + 4.0 * b)) : 2.0 * b / (std::sqrt(nu * nu + 4.0 * b) - nu);
    const double u0 = std::log(w);
    auto g = [&](double u) { return nu * u - std::exp(u) - b * std::exp(-u); };
    const double g0 = g(u0);
    const double sigma = 1.0 / std::sqrt(w + b / w);
    double lo = u0, hi = u0;
    while (g(lo) > g0 - 60.0) lo -= sigma;
    while (g(hi) > g0 - 60.0) hi += sigma;
    auto trap = [&](int n) {
        const double h = (hi - lo) / n;
        double s = 0.5 * (std::exp(g(lo) - g0) + std::exp(g(hi) - g0));
        for (int k = 1; k < n; ++k) s += std::exp(g(lo + k * h) - g0);
        return s * h;
    };
    int n = std::max(16, static_cast<int>(4.0 * (hi - lo) / sigma));
    double prev = trap(n);
    for (int it = 0; it < 12; ++it) {
        n *= 2;
        const double cur = trap(n);
        const bool done = std::abs(cur - prev) <= 1e-12 * std::abs(cur);
        prev = cur;
        if (done) break;
    }
    return c * std::exp(g0) * prev;
}

double bessel_small_r_constant(int N, double alpha) {
    if (!(alpha > 0.0) || !(alpha < N)) throw ParameterError("bessel small-r constant: requires 0 < alpha < N");
    return std::tgamma(0.5 * (N - alpha)) /
           (std::pow(2.0, alpha) * std::pow(std::numbers::pi, 0.5 * N) * std::tgamma(0.5 * alpha));
}

namespace {

struct Kernel {
    std::function<double(double)> value;
    // Average of the kernel over a ball of radius a, seen from its center.
    std::function<double(double)> ball_average;
};

Kernel make_riesz(int N, double alpha) {
    return {[=](double r) { return std::pow(r, alpha - N) / (N - alpha); },
            [=](double a) { return N * std::pow(a, alpha - N) / (alpha * (N - alpha)); }};
}

// Log-log cubic table of G_alpha on [r_lo, r_hi].
class BesselTable {
public:
    BesselTable(int N, double alpha, double r_lo, double r_hi) : N_(N), alpha_(alpha) {
        lo_ = std::log(r_lo);
        const double top = std::log(std::min(r_hi, 600.0));
        const int n = std::max(8, static_cast<int>(std::ceil((top - lo_) / step_)));
        step_ = (top - lo_) / n;
        logg_.resize(n + 1);
        parallel_for(logg_.size(), [&](std::size_t k) {
            logg_[k] = std::log(bessel_kernel(N, alpha, std::exp(lo_ + k * step_)));
        });
        hi_ = top;
    }

    double operator()(double r) const {
        const double t = std::log(r);
        if (t >= hi_) return r > 600.0 ? 0.0 : bessel_kernel(N_, alpha_, r);
        if (t <= lo_) return bessel_kernel(N_, alpha_, r);
        const double s = (t - lo_) / step_;
        const auto k = std::min(static_cast<std::size_t>(s), logg_.size() - 2);
        const double f = s - k;
        // Catmull-Rom on interior intervals, linear at the ends.
        if (k == 0 || k + 2 >= logg_.size()) return std::exp(logg_[k] + f * (logg_[k + 1] - logg_[k]));
        const double p0 = logg_[k - 1], p1 = logg_[k], p2 = logg_[k + 1], p3 = logg_[k + 2];
        const double v = p1 + 0.5 * f * (p2 - p0 + f * (2 * p0 - 5 * p1 + 4 * p2 - p3 + f * (3 * (p1 - p2) + p3 - p0)));
        return std::exp(v);
    }

private:
    int N_;
    double alpha_;
    double lo_ = 0.0, hi_ = 0.0;
    double step_ = std::log(10.0) / 200.0;
    std::vector<double> logg_;
};

Kernel make_bessel(int N, double alpha, double r_lo, double r_hi) {
    auto table = std::make_shared<BesselTable>(N, alpha, r_lo, r_hi);
    Kernel k;
    k.value = [table](double r) { return (*table)(r); };
    k.ball_average = [table, N, alpha](double a) {
        // (1/|B_a|) int_{B_a} G = (N/alpha) int_0^1 G(a u^{1/alpha}) u^{N/alpha - 1} du
        const auto& rule = gauss_legendre(24);
        double s = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double u = 0.5 * (rule.nodes[q] + 1.0);
            s += 0.5 * rule.weights[q] * (*table)(a * std::pow(u, 1.0 / alpha)) * std::pow(u, N / alpha - 1.0);
        }
        return s * N / alpha;
    };
    return k;
}

struct Cell {
    Point center;
    double size;
};

// Octree over the padded root cube: cells near K are split down to h.
std::vector<Cell> build_sources(const CompactSet& K, const Point& root_center, double root_size, double h) {
    const int n = K.dim();
    std::vector<Cell> leaves, stack{{root_center, root_size}};
    std::vector<double> lo(n), hi(n);
    while (!stack.empty()) {
        Cell c = std::move(stack.back());
        stack.pop_back();
        for (int d = 0; d < n; ++d) {
            lo[d] = c.center[d] - 0.5 * c.size;
            hi[d] = c.center[d] + 0.5 * c.size;
        }
        const bool split = c.size > h * (1.0 + 1e-9) && K.box_distance(lo, hi) < 2.0 * c.size;
        if (!split) {
            leaves.push_back(std::move(c));
            continue;
        }
        for (int child = 0; child < (1 << n); ++child) {
            Cell k{c.center, 0.5 * c.size};
            for (int d = 0; d < n; ++d) k.center[d] += ((child >> d) & 1 ? 0.25 : -0.25) * c.size;
            stack.push_back(std::move(k));
        }
    }
    // Deterministic order independent of stack traversal.
    std::sort(leaves.begin(), leaves.end(), [](const Cell& a, const Cell& b) {
        return std::tie(a.center, a.size) < std::tie(b.center, b.size);
    });
    return leaves;
}

std::vector<Point> constraint_samples(const CompactSet& K, const std::vector<Cell>& cells, double h) {
    std::vector<Point> out;
    const auto* balls = std::get_if<std::vector<Ball>>(&K.shape);
    for (const auto& c : cells) {
        if (c.size > h * (1.0 + 1e-9)) continue;
        if (K.contains(c.center)) out.push_back(c.center);
        if (!balls) continue;
        const double half_diag = 0.5 * c.size * std::sqrt(static_cast<double>(c.center.size()));
        for (const auto& b : *balls) {
            const double d = distance(c.center, b.center);
            if (d == 0.0 || std::abs(d - b.radius) > half_diag) continue;
            Point p(b.center);
            for (std::size_t k = 0; k < p.size(); ++k) p[k] += b.radius * (c.center[k] - b.center[k]) / d;
            out.push_back(std::move(p));
        }
    }
    return out;
}

// int_cell k(|x - y|) dy with recursive splitting near x.
double cell_integral(const Kernel& k, std::span<const double> x, const Point& c, double size, int depth) {
    const int n = static_cast<int>(c.size());
    const double vol = std::pow(size, n);
    const double d = distance(x, c);
    const double diag = size * std::sqrt(static_cast<double>(n));
    if (d >= 2.5 * diag) return vol * k.value(d);
    if (depth >= 3) {
        const double a = std::pow(vol / unit_ball_volume(n), 1.0 / n);
        return d > a ? vol * k.value(d) : vol * k.ball_average(a);
    }
    double s = 0.0;
    Point sub(c);
    for (int child = 0; child < (1 << n); ++child) {
        for (int dd = 0; dd < n; ++dd) sub[dd] = c[dd] + ((child >> dd) & 1 ? 0.25 : -0.25) * size;
        s += cell_integral(k, x, sub, 0.5 * size, depth + 1);
    }
    return s;
}

CapacityEstimate solve(const CompactSet& K, double p, const Kernel& kernel, const std::vector<Cell>& cells,
                       const std::vector<Point>& samples, const CapacityOptions& opt, std::string method) {
    const std::size_t S = samples.size(), M = cells.size();
    if (S == 0) throw NumericalError("capacity: no constraint samples inside K (grid too coarse)");
    (void)K;
    std::vector<double> A(S * M);
    std::vector<double> vol(M);
    for (std::size_t j = 0; j < M; ++j) vol[j] = std::pow(cells[j].size, static_cast<double>(cells[j].center.size()));
    parallel_for(S, [&](std::size_t i) {
        for (std::size_t j = 0; j < M; ++j) A[i * M + j] = cell_integral(kernel, samples[i], cells[j].center, cells[j].size, 0);
    });

    const double pp = p / (p - 1.0);
    std::vector<double> nu(S, 1.0), phi(M), g(M), Ag(S);
    CapacityEstimate est;
    est.method = std::move(method);
    est.samples = S;
    est.sources = M;
    est.lower = 0.0;
    est.upper = kInf;

    auto evaluate = [&](double& lower, double& upper, double& Q, double& total) {
        std::fill(phi.begin(), phi.end(), 0.0);
        for (std::size_t i = 0; i < S; ++i) {
            if (nu[i] == 0.0) continue;
            const double* row = &A[i * M];
            for (std::size_t j = 0; j < M; ++j) phi[j] += nu[i] * row[j];
        }
        Q = 0.0;
        for (std::size_t j = 0; j < M; ++j) {
            phi[j] /= vol[j];
            g[j] = std::pow(phi[j], 1.0 / (p - 1.0));
            Q += vol[j] * std::pow(phi[j], pp);
        }
        parallel_for(S, [&](std::size_t i) {
            const double* row = &A[i * M];
            double s = 0.0;
            for (std::size_t j = 0; j < M; ++j) s += row[j] * g[j];
            Ag[i] = s;
        });
        total = std::accumulate(nu.begin(), nu.end(), 0.0);
        lower = std::pow(total, p) / std::pow(Q, p - 1.0);
        const double m = *std::min_element(Ag.begin(), Ag.end());
        upper = m > 0.0 ? Q / std::pow(m, p) : kInf;
    };

    // Projected gradient ascent on the dual with Barzilai-Borwein steps,
    // started from the best multiple of the uniform measure.
    double lower, upper, Q, total;
    evaluate(lower, upper, Q, total);
    const double t = std::pow(total / Q, p - 1.0);
    for (auto& v : nu) v *= t;
    std::vector<double> grad(S), prev_nu(S), prev_grad(S);
    double tau = 0.0;
    for (int it = 0; it < opt.max_iter; ++it) {
        evaluate(lower, upper, Q, total);
        est.iterations = it + 1;
        est.lower = std::max(est.lower, lower);
        est.upper = std::min(est.upper, upper);
        if (std::isfinite(est.upper) && est.upper - est.lower <= opt.tol * est.upper) break;
        for (std::size_t i = 0; i < S; ++i) grad[i] = 1.0 - Ag[i];
        if (it == 0) {
            double gn = 0.0;
            for (double x : grad) gn = std::max(gn, std::abs(x));
            tau = 0.1 * (*std::max_element(nu.begin(), nu.end())) / gn;
        } else {
            double ss = 0.0, sy = 0.0;
            for (std::size_t i = 0; i < S; ++i) {
                const double s = nu[i] - prev_nu[i], y = prev_grad[i] - grad[i];
                ss += s * s;
                sy += s * y;
            }
            if (sy > 0.0) tau = ss / sy;
        }
        prev_nu = nu;
        prev_grad = grad;
        for (std::size_t i = 0; i < S; ++i) nu[i] = std::max(0.0, nu[i] + tau * grad[i]);
    }
    est.feasible = std::isfinite(est.upper);
    est.gap = est.feasible ? est.upper - est.lower : kInf;
    return est;
}

void check_exponents(double alpha, double p) {
    if (!(p > 1.0) || !std::isfinite(p)) throw ParameterError("capacity: p must be > 1");
    if (!(alpha > 0.0)) throw ParameterError("capacity: alpha must be > 0");
}

CapacityEstimate run(KernelKind kind, const CompactSet& K, double alpha, double p, const CapacityOptions& opt) {
    K.validate();
    check_exponents(alpha, p);
    const int N = K.dim();
    if (kind == KernelKind::riesz && !(alpha * p < N)) throw ParameterError("riesz capacity: requires alpha * p < N");
    if (opt.grid < 2 || opt.max_iter < 1 || !(opt.tol > 0.0)) throw ParameterError("capacity: bad solver options");

    const auto [lo, hi] = K.bounds();
    Point mid(N);
    double extent = 0.0;
    for (int d = 0; d < N; ++d) {
        mid[d] = 0.5 * (lo[d] + hi[d]);
        extent = std::max(extent, hi[d] - lo[d]);
    }
    const double h_target = K.feature_size() / opt.grid;
    int levels = opt.pad_levels;
    if (levels <= 0) {
        if (kind == KernelKind::riesz) {
            // Truncation error of the optimal density decays like 2^{-L (N - alpha p)/(p - 1)}.
            levels = static_cast<int>(std::ceil(std::log2(100.0) * (p - 1.0) / (N - alpha * p)));
            levels = std::clamp(levels, 4, 24);
        } else {
            levels = 3;
        }
    }
    // Root size: extent * 2^levels, then rounded so leaves are h_target * 2^k.
    double root = extent * std::ldexp(1.0, levels);
    if (kind == KernelKind::bessel) root = std::max(root, extent + 60.0);
    const int depth = static_cast<int>(std::ceil(std::log2(root / h_target)));
    root = h_target * std::ldexp(1.0, depth);

    const auto cells = build_sources(K, mid, root, h_target);
    const auto samples = constraint_samples(K, cells, h_target);
    if (kind == KernelKind::riesz)
        return solve(K, p, make_riesz(N, alpha), cells, samples, opt, "dual-pg/riesz");
    const double r_lo = h_target * std::ldexp(1.0, -6);
    const double r_hi = root * std::sqrt(static_cast<double>(N)) * 2.0;
    return solve(K, p, make_bessel(N, alpha, r_lo, r_hi), cells, samples, opt, "dual-pg/bessel");
}

}  // namespace

CapacityEstimate riesz_capacity(const CompactSet& K, double alpha, double p, const CapacityOptions& opt) {
    return run(KernelKind::riesz, K, alpha, p, opt);
}

CapacityEstimate bessel_capacity(const CompactSet& K, double alpha, double p, const CapacityOptions& opt) {
    return run(KernelKind::bessel, K, alpha, p, opt);
}

CapacityEstimate capacity(KernelKind kind, const CompactSet& K, double alpha, double p, const CapacityOptions& opt) {
    return run(kind, K, alpha, p, opt);
}

double ball_capacity_reference(int N, double alpha, double p, double r) {
    if (!(alpha * p > 0.0) || !(alpha * p < N)) throw ParameterError("ball capacity: requires 0 < alpha p < N");
    if (!(r > 0.0)) throw ParameterError("ball capacity: radius must be positive");
    static std::mutex mu;
    static std::map<std::tuple<int, double, double>, double> cache;
    double unit;
    {
        std::lock_guard lock(mu);
        const auto key = std::make_tuple(N, alpha, p);
        auto it = cache.find(key);
        if (it == cache.end()) {
            const auto est = riesz_capacity(CompactSet::ball(Point(N, 0.0), 1.0), alpha, p);
            it = cache.emplace(key, est.upper).first;
        }
        unit = it->second;
    }
    return std::pow(r, N - alpha * p) * unit;
}

}  // namespace wolffkit
