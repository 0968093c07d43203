#include "wolffkit/radial_pde.hpp"

#include <algorithm>

namespace wolffkit {

void RadialProblem::validate() const {
    if (N < 2) throw ParameterError("pde: N must be >= 2");
    const double lo = (3.0 * N - 2.0) / (2.0 * N - 1.0);
    if (!(p > lo) || !(p < N)) throw ParameterError("pde: need (3N-2)/(2N-1) < p < N");
    if (!(q1 > 0.0)) throw ParameterError("pde: q1 must be positive");
    if (!(q2 > 0.0) || !(q2 < N * (p - 1.0) / (N - 1.0))) throw ParameterError("pde: need 0 < q2 < N(p-1)/(N-1)");
    if (!(q1 + q2 > p - 1.0)) throw ParameterError("pde: need q1 + q2 > p - 1");
    if (!(R_dom > 0.0) || !std::isfinite(R_dom)) throw ParameterError("pde: R_dom must be positive and finite");
    if (mu.dim() != N) throw ParameterError("pde: measure dimension differs from N");
    if (mu.total_mass() > 0.0 && !(mu.outer_radius() < R_dom))
        throw ParameterError("pde: supp mu must stay away from the boundary");
}

std::vector<double> radial_nodes(const RadialMeasure& mu, double R_dom, const RadialNodes& opt) {
    if (!(R_dom > 0.0) || !std::isfinite(R_dom)) throw ParameterError("pde: R_dom must be positive and finite");
    if (opt.per_decade < 1 || !(opt.r_min_factor > 0.0) || !(opt.r_min_factor < 1.0))
        throw ParameterError("pde: bad node options");
    const double rho = mu.total_mass() > 0.0 ? mu.outer_radius() : 0.0;
    const double r_min = opt.r_min_factor * (rho > 0.0 ? std::min(rho, R_dom) : R_dom);
    const int n = static_cast<int>(std::ceil(std::log10(R_dom / r_min) * opt.per_decade));
    std::vector<double> nodes;
    nodes.reserve(n + mu.radii().size() + 1);
    for (int k = 0; k < n; ++k) nodes.push_back(R_dom * std::pow(r_min / R_dom, static_cast<double>(n - k) / n));
    for (double b : mu.radii())
        if (b > 0.0 && b < R_dom) nodes.push_back(b);
    nodes.push_back(R_dom);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
}

namespace {

void check_nu(const RadialMeasure& nu, double p, int N, double R_dom) {
    if (N < 1) throw ParameterError("pde: N must be >= 1");
    if (!(p > 1.0)) throw ParameterError("pde: p must exceed 1");
    if (nu.dim() != N) throw ParameterError("pde: measure dimension differs from N");
    if (!(R_dom > 0.0) || !std::isfinite(R_dom)) throw ParameterError("pde: R_dom must be positive and finite");
}

/// Solution of the linear problem from cumulative masses M at the nodes.
void integrate_flux(const std::vector<double>& r, const std::vector<double>& M, double p, int N,
                    std::vector<double>& u, std::vector<double>& du) {
    const double e = 1.0 / (p - 1.0);
    const double sigma = unit_sphere_area(N);
    const std::size_t n = r.size();
    auto slope = [&](double m, double s) {
        const double f = m / (sigma * std::pow(s, N - 1));
        return f == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(f), e), f);
    };
    u.assign(n, 0.0);
    du.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) du[i] = -slope(M[i], r[i]);
    const auto& g = gauss_legendre(20);
    for (std::size_t i = n - 1; i-- > 0;) {
        const double lo = r[i], hi = r[i + 1];
        const double lo_n = std::pow(lo, N), span_n = std::pow(hi, N) - lo_n;
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        double acc = 0.0;
        for (std::size_t k = 0; k < g.nodes.size(); ++k) {
            const double s = mid + half * g.nodes[k];
            const double t = (std::pow(s, N) - lo_n) / span_n;
            acc += g.weights[k] * slope((1.0 - t) * M[i] + t * M[i + 1], s);
        }
        u[i] = u[i + 1] + half * acc;
    }
    u[n - 1] = 0.0;
}

std::vector<double> node_masses(const RadialMeasure& nu, const std::vector<double>& r) {
    std::vector<double> M(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) M[i] = nu.mass_within(r[i]);
    return M;
}

std::vector<double> merge_nodes(const RadialMeasure& nu, double R_dom, std::vector<double> nodes) {
    for (double x : nodes)
        if (!(x > 0.0) || !(x <= R_dom)) throw ParameterError("pde: nodes must lie in (0, R_dom]");
    for (double b : nu.radii())
        if (b > 0.0 && b < R_dom) nodes.push_back(b);
    nodes.push_back(R_dom);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
}

double sup_abs(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

std::vector<double> on_axis(const RadialMeasure& mu, const PotentialSpec& spec, const std::vector<double>& r,
                            const QuadratureConfig& quad) {
    ScatteredPoints pts{mu.dim(), {}};
    pts.points.reserve(r.size());
    for (double x : r) {
        Point q = mu.center();
        q[0] += x;
        pts.points.push_back(std::move(q));
    }
    return evaluate_on(Measure{mu}, spec, SampleSet{std::move(pts)}, quad).values;
}

}  // namespace

RadialSolution solve_linear_radial(const RadialMeasure& nu, double p, int N, double R_dom, std::vector<double> nodes) {
    check_nu(nu, p, N, R_dom);
    RadialSolution sol;
    sol.r_nodes = merge_nodes(nu, R_dom, std::move(nodes));
    integrate_flux(sol.r_nodes, node_masses(nu, sol.r_nodes), p, N, sol.u, sol.du);
    return sol;
}

RadialSolution solve_linear_radial(const RadialMeasure& nu, double p, int N, double R_dom, const RadialNodes& opt) {
    check_nu(nu, p, N, R_dom);
    return solve_linear_radial(nu, p, N, R_dom, radial_nodes(nu, R_dom, opt));
}

std::pair<std::vector<double>, std::vector<double>> tube_envelopes(const RadialProblem& prob,
                                                                   const std::vector<double>& nodes,
                                                                   const QuadratureConfig& quad) {
    const double trunc = 4.0 * prob.R_dom;
    const double e = 1.0 / (prob.p - 1.0);
    if (prob.p > 2.0)
        return {on_axis(prob.mu, PotentialSpec::wolff(prob.N, 1.0, prob.p, trunc), nodes, quad),
                on_axis(prob.mu, PotentialSpec::wolff(prob.N, 1.0 / prob.p, prob.p, trunc), nodes, quad)};
    auto eu = on_axis(prob.mu, PotentialSpec::riesz(prob.N, prob.p, trunc), nodes, quad);
    auto ed = on_axis(prob.mu, PotentialSpec::riesz(prob.N, 1.0, trunc), nodes, quad);
    for (double& x : eu) x = std::pow(x, e);
    for (double& x : ed) x = std::pow(x, e);
    return {std::move(eu), std::move(ed)};
}

RadialSolution picard_solve(const RadialProblem& prob, const PicardOptions& opt) {
    prob.validate();
    if (prob.mu.atom_mass() > 0.0) throw ParameterError("pde: atom at the origin (|u'| is unbounded there); mollify first");
    if (!(opt.lambda > 0.0)) throw ParameterError("pde: lambda must be positive");
    if (opt.max_iter < 1 || !(opt.tol > 0.0)) throw ParameterError("pde: bad iteration options");

    const auto r = radial_nodes(prob.mu, prob.R_dom, opt.nodes);
    const std::size_t n = r.size();
    const auto M0 = node_masses(prob.mu, r);
    const auto [eu, ed] = tube_envelopes(prob, r, opt.quad);
    const double omega = unit_ball_volume(prob.N);

    auto tube = [&](const std::vector<double>& u, const std::vector<double>& du) {
        double t = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (eu[i] > 0.0) t = std::max(t, std::abs(u[i]) / (opt.lambda * eu[i]));
            else if (u[i] != 0.0) t = kInf;
            if (ed[i] > 0.0) t = std::max(t, std::abs(du[i]) / (opt.lambda * ed[i]));
            else if (du[i] != 0.0) t = kInf;
        }
        return t;
    };

    RadialSolution sol;
    sol.r_nodes = r;
    integrate_flux(r, M0, prob.p, prob.N, sol.u, sol.du);
    sol.max_tube_ratio = tube(sol.u, sol.du);
    sol.in_tube = sol.max_tube_ratio <= 1.0;
    sol.status = SystemStatus::maxiter;
    if (!sol.in_tube) {
        sol.status = SystemStatus::diverged;
        return sol;
    }

    std::vector<double> g(n), M(n), u, du;
    for (int k = 1; k <= opt.max_iter; ++k) {
        for (std::size_t i = 0; i < n; ++i)
            g[i] = std::copysign(std::pow(std::abs(sol.u[i]), prob.q1), sol.u[i]) * std::pow(std::abs(sol.du[i]), prob.q2);
        double G = g[0] * omega * std::pow(r[0], prob.N);
        M[0] = M0[0] + G;
        for (std::size_t i = 1; i < n; ++i) {
            G += 0.5 * (g[i - 1] + g[i]) * omega * (std::pow(r[i], prob.N) - std::pow(r[i - 1], prob.N));
            M[i] = M0[i] + G;
        }
        integrate_flux(r, M, prob.p, prob.N, u, du);

        const double s = sup_abs(u);
        double d = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            d = std::max(d, std::abs(u[i] - sol.u[i]));
            if (u[i] < sol.u[i] - 1e-12 * s) sol.monotone = false;
        }
        sol.residual = s > 0.0 ? d / s : (d > 0.0 ? kInf : 0.0);
        const double t = tube(u, du);
        sol.max_tube_ratio = std::max(sol.max_tube_ratio, t);
        sol.u = std::move(u);
        sol.du = std::move(du);
        sol.picard_iters = k;
        const bool finite = std::all_of(sol.u.begin(), sol.u.end(), [](double x) { return std::isfinite(x); });
        if (!finite || t > 1.0) {
            sol.in_tube = false;
            sol.status = SystemStatus::diverged;
            break;
        }
        if (sol.residual <= opt.tol) {
            sol.status = SystemStatus::converged;
            break;
        }
    }
    return sol;
}

BoundsReport verify_pointwise_bounds(const RadialSolution& sol, const RadialMeasure& mu, double p, int N,
                                     const QuadratureConfig& quad) {
    if (sol.status != SystemStatus::converged) throw ParameterError("bounds: solution did not converge");
    if (sol.r_nodes.empty() || sol.u.size() != sol.r_nodes.size() || sol.du.size() != sol.r_nodes.size())
        throw ParameterError("bounds: malformed solution");
    check_nu(mu, p, N, sol.r_nodes.back());
    for (double x : sol.u)
        if (x < 0.0) throw ParameterError("bounds: solution must be nonnegative");

    BoundsReport rep;
    rep.in_tube = sol.in_tube;
    const auto& r = sol.r_nodes;
    const std::size_t n = r.size();
    const double R_dom = r.back();
    rep.delta = 0.5 * R_dom;
    if (sup_abs(sol.u) == 0.0 || mu.total_mass() == 0.0) {
        rep.vacuous = true;
        rep.warnings.push_back("zero solution or zero data: every ratio is over an empty set");
        return rep;
    }

    const double trunc = 4.0 * R_dom;
    const auto w_up = on_axis(mu, PotentialSpec::wolff(N, 1.0, p, trunc), r, quad);
    auto i1 = on_axis(mu, PotentialSpec::riesz(N, 1.0, trunc), r, quad);
    for (double& x : i1) x = std::pow(x, 1.0 / (p - 1.0));
    std::vector<double> w_low(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i)
        w_low[i] = on_axis(mu, PotentialSpec::wolff(N, 1.0, p, 0.25 * (R_dom - r[i])), {r[i]}, quad)[0];

    auto fit = [](const std::vector<double>& num, const std::vector<double>& den, std::size_t count) {
        double top = 0.0;
        for (std::size_t i = 0; i < count; ++i) top = std::max(top, den[i]);
        double c = 0.0;
        for (std::size_t i = 0; i < count; ++i)
            if (den[i] > 1e-12 * top) c = std::max(c, num[i] / den[i]);
        return c;
    };
    std::vector<double> grad(n);
    for (std::size_t i = 0; i < n; ++i) grad[i] = std::abs(sol.du[i]);
    const auto inner = static_cast<std::size_t>(std::upper_bound(r.begin(), r.end(), R_dom - rep.delta) - r.begin());

    rep.C_up = fit(sol.u, w_up, n);
    rep.C_low = fit(w_low, sol.u, n);
    rep.C_grad = fit(grad, i1, inner);
    if (!std::isfinite(rep.C_up) || !std::isfinite(rep.C_low) || !std::isfinite(rep.C_grad))
        rep.warnings.push_back("a fitted constant is not finite");
    return rep;
}

}  // namespace wolffkit
