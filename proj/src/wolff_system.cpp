#include "wolffkit/wolff_system.hpp"

#include <algorithm>

namespace wolffkit {

void SystemConfig::validate() const {
    params.validate();
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ParameterError("system: epsilon must be positive");
    if (!(tol > 0.0)) throw ParameterError("system: tol must be positive");
    if (max_iter < 1) throw ParameterError("system: max_iter must be >= 1");
    if (!(blowup_factor > 2.0)) throw ParameterError("system: blowup_factor must exceed 2");
    if (radial_n < 2 || cartesian_n < 2) throw ParameterError("system: grid sizes must be >= 2");
    quad.validate();
}

std::string to_string(SystemStatus s) {
    switch (s) {
        case SystemStatus::converged: return "converged";
        case SystemStatus::diverged: return "diverged";
        case SystemStatus::maxiter: return "maxiter";
    }
    return "?";
}

SampleSet default_system_grid(const Measure& mu, const SystemConfig& cfg) {
    const auto [c, rho] = support_ball(mu);
    const double diam = rho > 0.0 ? 2.0 * rho : 1.0;
    if (std::holds_alternative<RadialMeasure>(mu))
        return RadialGrid::graded(c, 8.0 * diam, cfg.radial_n, 1e-3 * 0.5 * diam);
    return CartesianGrid::cube(c, 0.5 * diam + 2.0 * diam, cfg.cartesian_n);
}

namespace {

void check_margin(const Measure& mu, const SampleSet& grid) {
    if (total_mass(mu) == 0.0) return;
    const auto [c, rho] = support_ball(mu);
    const double need = 5.0 * rho;  // support radius plus two diameters
    if (const auto* r = std::get_if<RadialGrid>(&grid)) {
        if (r->outer_radius() < distance(c, r->center()) + need)
            throw ParameterError("system: radial grid must extend 2 support diameters beyond the support");
        return;
    }
    if (const auto* g = std::get_if<CartesianGrid>(&grid)) {
        const auto lo = g->lower(), hi = g->upper();
        for (int d = 0; d < g->dim(); ++d)
            if (c[d] - need < lo[d] - 1e-12 || c[d] + need > hi[d] + 1e-12)
                throw ParameterError("system: grid must extend 2 support diameters beyond the support");
        return;
    }
    throw ParameterError("system: grid must be radial or Cartesian");
}

std::vector<PotentialSpec> system_specs(const ParamSet& ps) {
    std::vector<PotentialSpec> specs{PotentialSpec::wolff(ps.N, ps.alpha, ps.p, ps.R)};
    if (!ps.single()) specs.push_back(PotentialSpec::wolff(ps.N, ps.beta, ps.p, ps.R));
    return specs;
}

std::vector<double> source_density(const ParamSet& ps, const std::vector<double>& u, const std::vector<double>& v) {
    std::vector<double> f(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        f[i] = std::pow(u[i], ps.q1);
        if (!ps.single()) f[i] *= std::pow(v[i], ps.q2);
    }
    return f;
}

double sup_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, x);
    return s;
}

double relative_change(const std::vector<double>& a, const std::vector<double>& b) {
    const double s = sup_of(b);
    if (s == 0.0) return sup_of(a) == 0.0 ? 0.0 : kInf;
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d / s;
}

double tube_ratio(const std::vector<double>& u, const std::vector<double>& base) {
    double r = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (base[i] > 0.0) r = std::max(r, u[i] / base[i]);
    return r;
}

bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

SystemSolution solve_system(const Measure& mu, const SystemConfig& cfg) {
    cfg.validate();
    if (measure_dim(mu) != cfg.params.N) throw ParameterError("system: measure dimension differs from N");
    if (has_atoms(mu)) throw ParameterError("system: measure has atoms (potentials are infinite there); mollify first");
    const SampleSet grid = cfg.grid ? *cfg.grid : default_system_grid(mu, cfg);
    check_margin(mu, grid);
    const auto& ps = cfg.params;
    const auto specs = system_specs(ps);
    const auto base = evaluate_on(mu, specs, grid, cfg.quad);
    const std::size_t n = sample_count(grid);

    std::vector<double> fu(n), fv(n);
    for (std::size_t i = 0; i < n; ++i) {
        fu[i] = cfg.epsilon * base[0].values[i];
        fv[i] = ps.single() ? fu[i] : cfg.epsilon * base[1].values[i];
    }
    const double limit_u = cfg.blowup_factor * sup_of(fu);
    const double limit_v = cfg.blowup_factor * sup_of(fv);

    SystemSolution sol;
    std::vector<double> u = fu, v = fv;
    const FieldPotentialOperator op(grid, grid, cfg.quad);
    sol.status = SystemStatus::maxiter;
    for (int m = 1; m <= cfg.max_iter; ++m) {
        const auto w = op.apply(source_density(ps, u, v), specs);
        std::vector<double> un(n), vn(n);
        for (std::size_t i = 0; i < n; ++i) {
            un[i] = w[0][i] + fu[i];
            vn[i] = ps.single() ? un[i] : w[1][i] + fv[i];
        }
        for (std::size_t i = 0; i < n && sol.monotone; ++i)
            if (un[i] < u[i] * (1.0 - 1e-12) || vn[i] < v[i] * (1.0 - 1e-12)) sol.monotone = false;
        IterationRecord rec;
        rec.iteration = m;
        rec.sup_u = sup_of(un);
        rec.sup_v = sup_of(vn);
        rec.change = std::max(relative_change(u, un), relative_change(v, vn));
        rec.tube_u = tube_ratio(un, fu);
        rec.tube_v = tube_ratio(vn, fv);
        sol.max_tube_ratio = std::max({sol.max_tube_ratio, rec.tube_u, rec.tube_v});
        sol.trace.push_back(rec);
        sol.iterations = m;
        sol.residual = rec.change;
        u = std::move(un);
        v = std::move(vn);
        if (!all_finite(u) || !all_finite(v) || rec.sup_u > limit_u || rec.sup_v > limit_v) {
            sol.status = SystemStatus::diverged;
            break;
        }
        if (rec.change <= cfg.tol) {
            sol.status = SystemStatus::converged;
            break;
        }
    }
    sol.U = Field{grid, std::move(u)};
    sol.V = Field{grid, std::move(v)};
    return sol;
}

ThresholdResult epsilon_threshold(const Measure& mu, const SystemConfig& cfg, double lo, double hi, double rel_width) {
    if (!(lo > 0.0) || !(hi > lo)) throw ParameterError("threshold: need 0 < lo < hi");
    if (!(rel_width > 0.0)) throw ParameterError("threshold: rel_width must be positive");
    ThresholdResult res;
    auto converges = [&](double eps) {
        SystemConfig c = cfg;
        c.epsilon = eps;
        ++res.solves;
        return solve_system(mu, c).status == SystemStatus::converged;
    };
    if (!converges(lo) || converges(hi)) throw ParameterError("threshold: invalid bracket (need convergence at lo only)");
    while (hi / lo > 1.0 + rel_width) {
        const double mid = std::sqrt(lo * hi);
        if (converges(mid)) lo = mid;
        else hi = mid;
    }
    res.eps_lo = lo;
    res.eps_hi = hi;
    res.spot_check = converges(0.5 * lo);
    return res;
}

Field interpolate(const Field& f, const SampleSet& to) {
    if (const auto* a = std::get_if<RadialGrid>(&f.samples)) {
        const auto* b = std::get_if<RadialGrid>(&to);
        if (!b || b->center() != a->center()) throw ParameterError("interpolate: radial grids must share a center");
        const auto x = a->nodes();
        Field out{to, std::vector<double>(b->size())};
        for (std::size_t i = 0; i < b->size(); ++i) {
            const double r = b->node(i);
            const auto k = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), r) - x.begin());
            if (k == 0) out.values[i] = f.values.front();
            else if (k == x.size()) out.values[i] = f.values.back();
            else {
                const double t = (r - x[k - 1]) / (x[k] - x[k - 1]);
                out.values[i] = (1.0 - t) * f.values[k - 1] + t * f.values[k];
            }
        }
        return out;
    }
    const auto* a = std::get_if<CartesianGrid>(&f.samples);
    const auto* b = std::get_if<CartesianGrid>(&to);
    if (!a || !b || a->dim() != b->dim()) throw ParameterError("interpolate: grids must both be Cartesian or radial");
    const int n = a->dim();
    Field out{to, std::vector<double>(b->size())};
    std::vector<double> x(n);
    std::vector<int> i0(n), idx(n);
    std::vector<double> t(n);
    for (std::size_t i = 0; i < b->size(); ++i) {
        b->center(i, x.data());
        for (int d = 0; d < n; ++d) {
            const double s = (x[d] - a->origin()[d]) / a->spacing()[d] - 0.5;
            const int hi = a->shape()[d] - 1;
            const double sc = std::clamp(s, 0.0, static_cast<double>(hi));
            i0[d] = std::min(static_cast<int>(sc), std::max(hi - 1, 0));
            t[d] = hi == 0 ? 0.0 : sc - i0[d];
        }
        double v = 0.0;
        for (int corner = 0; corner < (1 << n); ++corner) {
            double w = 1.0;
            for (int d = 0; d < n; ++d) {
                const bool up = (corner >> d) & 1;
                idx[d] = std::min(i0[d] + (up ? 1 : 0), a->shape()[d] - 1);
                w *= up ? t[d] : 1.0 - t[d];
            }
            if (w != 0.0) v += w * f.values[a->flatten(idx)];
        }
        out.values[i] = v;
    }
    return out;
}

ResidualReport verify_solution(const SystemSolution& sol, const Measure& mu, const SystemConfig& cfg, double threshold) {
    if (sol.status != SystemStatus::converged) throw ParameterError("verify: solution did not converge");
    const auto& ps = cfg.params;
    SampleSet fine;
    if (const auto* r = std::get_if<RadialGrid>(&sol.U.samples)) fine = r->refined(2);
    else if (const auto* g = std::get_if<CartesianGrid>(&sol.U.samples)) fine = g->refined(2);
    else throw ParameterError("verify: solution must live on a grid");
    const auto u = interpolate(sol.U, fine);
    const auto v = interpolate(sol.V, fine);
    const auto specs = system_specs(ps);
    const FieldPotentialOperator op(fine, fine, cfg.quad);
    const auto w = op.apply(source_density(ps, u.values, v.values), specs);
    const auto base = evaluate_on(mu, specs, fine, cfg.quad);
    auto residual = [&](const std::vector<double>& x, const std::vector<double>& pot, const std::vector<double>& b) {
        const double s = sup_of(x);
        double d = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - (pot[i] + cfg.epsilon * b[i])));
        return s > 0.0 ? d / s : (d > 0.0 ? kInf : 0.0);
    };
    ResidualReport rep;
    rep.residual_u = residual(u.values, w[0], base[0].values);
    rep.residual_v = ps.single() ? rep.residual_u : residual(v.values, w[1], base[1].values);
    rep.residual = std::max(rep.residual_u, rep.residual_v);
    rep.pass = rep.residual <= threshold;
    return rep;
}

}  // namespace wolffkit
