#include "wolffkit/criteria.hpp"

#include <algorithm>
#include <numeric>

namespace wolffkit {

void ParamSet::validate() const {
    if (N < 1) throw ParameterError("params: N must be >= 1");
    if (!(p > 1.0) || !std::isfinite(p)) throw ParameterError("params: p must be > 1");
    if (!(q1 > 0.0) || !std::isfinite(q1)) throw ParameterError("params: q1 must be > 0");
    if (!(q2 >= 0.0) || !std::isfinite(q2)) throw ParameterError("params: q2 must be >= 0");
    if (!(alpha > 0.0)) throw ParameterError("params: alpha must be > 0");
    if (!(R > 0.0)) throw ParameterError("params: R must be positive (or inf)");
    if (!(alpha * p < N)) throw ParameterError("params: requires alpha * p < N");
    if (single()) {
        if (!(q1 > p - 1.0)) throw ParameterError("params: single form requires q > p - 1");
        return;
    }
    if (!(beta > 0.0) || !(alpha > beta)) throw ParameterError("params: requires alpha > beta > 0");
    if (!(q1 + q2 > p - 1.0)) throw ParameterError("params: requires q1 + q2 > p - 1");
    if (!(q2 < N * (p - 1.0) / (N - beta * p))) throw ParameterError("params: requires q2 < N(p-1)/(N - beta p)");
    if (!(maximal_order() < N)) throw ParameterError("params: requires (alpha p q1 + beta p q2)/(q1 + q2) < N");
}

double ParamSet::maximal_order() const { return (alpha * p * q1 + beta * p * q2) / (q1 + q2); }

double ParamSet::wolff_order() const { return (alpha * q1 + beta * q2) / (q1 + q2); }

double ParamSet::capacity_exponent() const { return (q1 + q2) / (q1 + q2 - p + 1.0); }

double growth_exponent(const ParamSet& params) {
    if (!(params.p > 1.0) || !(params.q1 > 0.0) || !(params.q2 >= 0.0))
        throw ParameterError("growth exponent: requires p > 1, q1 > 0, q2 >= 0");
    if (!(params.q1 + params.q2 - params.p + 1.0 > 0.0)) throw ParameterError("growth exponent: requires q1 + q2 > p - 1");
    const double b = params.single() ? 0.0 : params.beta;
    return params.N - (params.alpha * params.p * params.q1 + b * params.p * params.q2) / (params.q1 + params.q2 - params.p + 1.0);
}

std::string to_string(Condition c) {
    switch (c) {
        case Condition::growth: return "growth";
        case Condition::cap_lipschitz: return "cap_lipschitz";
        case Condition::ball_testing_product: return "ball_testing_product";
        case Condition::ball_testing_single: return "ball_testing_single";
        case Condition::pointwise_iterated: return "pointwise_iterated";
        case Condition::product_comparability: return "product_comparability";
    }
    return "?";
}

std::string to_string(Verdict v) { return v == Verdict::finite ? "finite" : "blowup_suspected"; }

std::vector<Point> BallSampler::centers(const Measure& mu, const ParamSet& params) const {
    const int N = measure_dim(mu);
    const auto [c, rho] = support_ball(mu);
    std::vector<Point> out;
    if (const auto* a = std::get_if<AtomicMeasure>(&mu)) {
        std::vector<std::size_t> idx(a->size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](auto i, auto j) { return a->weights()[i] > a->weights()[j]; });
        for (std::size_t k = 0; k < idx.size() && static_cast<int>(out.size()) < mass_points; ++k)
            if (a->weights()[idx[k]] > 0.0) out.push_back(a->points()[idx[k]]);
    } else if (const auto* r = std::get_if<RadialMeasure>(&mu)) {
        if (mass_points > 0) out.push_back(r->center());
    } else if (mass_points > 0) {
        const auto& g = std::get<GridDensity>(mu);
        const auto it = std::max_element(g.density().begin(), g.density().end());
        out.push_back(g.grid().center(static_cast<std::size_t>(it - g.density().begin())));
    }
    double hw = rho > 0.0 ? rho : 1.0;
    if (std::isfinite(params.R)) hw = std::min(hw, 0.5 * params.R);
    for (int k = 0; k < scattered; ++k) {
        const auto h = halton(seed * 7919 + static_cast<std::uint64_t>(k) + 1, N);
        Point x(c);
        for (int d = 0; d < N; ++d) x[d] += hw * (2.0 * h[d] - 1.0);
        out.push_back(std::move(x));
    }
    return out;
}

std::vector<double> BallSampler::radii_for(const Measure& mu) const {
    double top = t_max;
    if (!(top > 0.0)) {
        top = support_diameter(mu);
        if (!(top > 0.0)) top = 1.0;
    }
    std::vector<double> out;
    for (int k = 0; k < radii; ++k) out.push_back(radii == 1 ? top : top * std::pow(10.0, -decades * k / (radii - 1)));
    return out;
}

double homogeneity_degree(Condition c, const ParamSet& params, PotentialKind kind) {
    const double q = params.q1 + params.q2, p = params.p;
    switch (c) {
        case Condition::growth:
        case Condition::cap_lipschitz: return 1.0;
        case Condition::ball_testing_product:
        case Condition::ball_testing_single: return q / (p - 1.0) - 1.0;
        case Condition::pointwise_iterated:
            return kind == PotentialKind::riesz ? (q - p + 1.0) / (p - 1.0) : (q - p + 1.0) / ((p - 1.0) * (p - 1.0));
        case Condition::product_comparability: return 0.0;
    }
    return 0.0;
}

namespace {

// Least-squares slope of log g against log(1/t).
double scale_slope(const std::vector<std::pair<double, double>>& tg) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& [t, g] : tg)
        if (g > 0.0 && std::isfinite(g)) pts.emplace_back(-std::log(t), std::log(g));
    if (pts.size() < 2) return 0.0;
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= pts.size();
    my /= pts.size();
    double sxy = 0.0, sxx = 0.0;
    for (const auto& [x, y] : pts) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

double slope_threshold(double exponent) { return std::min(0.1, 0.5 * exponent); }

void record(ConditionReport& rep, const Point& x, double t, double ratio) {
    rep.per_sample.push_back({x, t, ratio});
    ++rep.samples;
    if (rep.samples == 1 || ratio > rep.best_constant) {
        rep.best_constant = ratio;
        rep.witness = {x, t};
    }
}

// Per-radius maxima over centers of the recorded samples.
std::vector<std::pair<double, double>> scale_maxima(const ConditionReport& rep) {
    std::map<double, double> by_t;
    for (const auto& s : rep.per_sample) {
        auto [it, fresh] = by_t.emplace(s.scale, s.ratio);
        if (!fresh) it->second = std::max(it->second, s.ratio);
    }
    return {by_t.begin(), by_t.end()};
}

// Slope over the finer half of the sampled scales.
void apply_slope_test(ConditionReport& rep, double exponent) {
    auto tg = scale_maxima(rep);
    tg.resize(std::min(tg.size(), std::max<std::size_t>(2, (tg.size() + 1) / 2)));
    const double slope = scale_slope(tg);
    rep.extra["slope"] = slope;
    rep.extra["slope_threshold"] = slope_threshold(exponent);
    if (slope > slope_threshold(exponent)) rep.verdict = Verdict::blowup_suspected;
}

ConditionReport vacuous(Condition c) {
    ConditionReport rep;
    rep.condition = c;
    rep.vacuous = true;
    return rep;
}

}  // namespace

ConditionReport check_growth(const Measure& mu, const ParamSet& params, const BallSampler& sampler) {
    params.validate();
    const double kappa = growth_exponent(params);
    if (!(kappa > 0.0)) throw ParameterError("growth check: requires a positive growth exponent");
    if (total_mass(mu) == 0.0) return vacuous(Condition::growth);
    ConditionReport rep;
    rep.condition = Condition::growth;
    rep.extra["exponent"] = kappa;
    const auto radii = sampler.radii_for(mu);
    for (const auto& x : sampler.centers(mu, params))
        for (double t : radii) record(rep, x, t, ball_mass(mu, x, t) / std::pow(t, kappa));
    apply_slope_test(rep, kappa);
    return rep;
}

ConditionReport check_ball_testing(const Measure& mu, const ParamSet& params, const BallSampler& sampler,
                                   const BallTestOptions& opt) {
    params.validate();
    if (opt.n < 2 || opt.n % 2 != 0) throw ParameterError("ball testing: n must be even and >= 2");
    if (!(opt.half_width_factor >= 1.0)) throw ParameterError("ball testing: half_width_factor must be >= 1");
    const Condition cond = params.single() ? Condition::ball_testing_single : Condition::ball_testing_product;
    if (total_mass(mu) == 0.0) return vacuous(cond);
    const int N = params.N;
    std::vector<PotentialSpec> specs{PotentialSpec::wolff(N, params.alpha, params.p, params.R)};
    if (!params.single()) specs.push_back(PotentialSpec::wolff(N, params.beta, params.p, params.R));

    auto integral = [&](const Measure& nu, const Point& x, double t, int n) {
        const auto grid = CartesianGrid::cube(x, opt.half_width_factor * t, n);
        const auto f = evaluate_on(nu, specs, grid);
        const double w = grid.cell_volume();
        double s = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            double v = std::pow(f[0].values[i], params.q1);
            if (!params.single()) v *= std::pow(f[1].values[i], params.q2);
            s += w * v;
        }
        return s;
    };

    ConditionReport rep;
    rep.condition = cond;
    struct Ball {
        Point x;
        double t, mass, value;
    };
    std::vector<Ball> balls;
    for (const auto& x : sampler.centers(mu, params)) {
        for (double t : sampler.radii_for(mu)) {
            const double m = ball_mass(mu, x, t);
            if (!(m > 0.0)) continue;
            const double v = integral(restrict_to_ball(mu, x, t, std::max(2, opt.n / 2)), x, t, opt.n);
            balls.push_back({x, t, m, v});
            record(rep, x, t, v / m);
        }
    }
    if (balls.empty()) {
        rep.vacuous = true;
        return rep;
    }
    if (!std::isfinite(rep.best_constant)) rep.verdict = Verdict::blowup_suspected;

    std::vector<std::size_t> order(balls.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](auto i, auto j) { return balls[i].value / balls[i].mass > balls[j].value / balls[j].mass; });
    double worst_growth = 1.0, worst_drop = 1.0;
    for (int k = 0; k < std::min<int>(opt.refine_top, static_cast<int>(order.size())); ++k) {
        const auto& b = balls[order[k]];
        const double fine = integral(restrict_to_ball(mu, b.x, b.t, opt.n), b.x, b.t, 2 * opt.n);
        const double change = fine / b.value;
        worst_growth = std::max(worst_growth, change);
        worst_drop = std::min(worst_drop, change);
        if (k == 0) rep.extra["refinement_ratio"] = change;
    }
    rep.extra["max_refinement_growth"] = worst_growth;
    rep.extra["max_refinement_drop"] = worst_drop;
    if (worst_growth > 1.2) {
        rep.verdict = Verdict::blowup_suspected;
        rep.warnings.push_back("integral grows by more than 20% under grid refinement");
    }
    if (worst_drop < 1.0 / 1.2) {
        rep.unreliable = true;
        rep.warnings.push_back("integral drops by more than 20% under grid refinement");
    }
    return rep;
}

namespace {

struct Domain {
    SampleSet grid;
    Point center;
    double scale = 1.0;  // support radius, or 1 for a point
    double eval_radius = 0.0;
};

Domain make_domain(const Measure& mu, const ParamSet& params, const GridOptions& opt, int refine) {
    const auto [c, rho] = support_ball(mu);
    Domain d;
    d.center = c;
    d.scale = rho > 0.0 ? rho : 1.0;
    d.eval_radius = opt.eval_factor * d.scale;
    if (std::isfinite(params.R)) d.eval_radius = std::min(d.eval_radius, rho + 0.5 * params.R);
    if (std::holds_alternative<RadialMeasure>(mu)) {
        const double r_max = std::isfinite(params.R) ? rho + params.R : opt.domain_factor * d.scale;
        d.grid = RadialGrid::graded(c, r_max, opt.radial_n * refine, 1e-3 * d.scale);
    } else {
        const double hw = std::isfinite(params.R) ? rho + params.R : std::max(opt.eval_factor, 2.0) * d.scale;
        d.grid = CartesianGrid::cube(c, hw, opt.cartesian_n * refine);
    }
    return d;
}

struct PointwiseRun {
    double best = 0.0;
    Point witness;
    std::vector<SampleRatio> samples;
};

PointwiseRun pointwise_once(const Measure& mu, const ParamSet& params, Eta eta, PotentialKind kind,
                            const GridOptions& opt, int refine) {
    const auto dom = make_domain(mu, params, opt, refine);
    const int N = params.N;
    const double p = params.p, R = params.R;
    const double outer_order = eta == Eta::alpha ? params.alpha : params.beta;
    std::vector<PotentialSpec> inner;
    PotentialSpec outer;
    double e1, e2;
    if (kind == PotentialKind::riesz) {
        inner = {PotentialSpec::riesz(N, p, R), PotentialSpec::riesz(N, 1.0, R)};
        outer = PotentialSpec::riesz(N, outer_order, R);
        e1 = params.q1 / (p - 1.0);
        e2 = params.q2 / (p - 1.0);
    } else {
        inner = {PotentialSpec::wolff(N, params.alpha, p, R), PotentialSpec::wolff(N, params.beta, p, R)};
        outer = PotentialSpec::wolff(N, outer_order, p, R);
        e1 = params.q1;
        e2 = params.q2;
    }
    if (params.single()) inner.pop_back();
    const auto f = evaluate_on(mu, inner, dom.grid);
    Field F = f[0];
    for (std::size_t i = 0; i < F.size(); ++i) {
        F.values[i] = std::pow(f[0].values[i], e1);
        if (!params.single()) F.values[i] *= std::pow(f[1].values[i], e2);
    }
    const auto lhs = potential_of_field(F, outer, dom.grid);
    const auto rhs = evaluate_on(mu, outer, dom.grid);
    const double floor = 1e-12 * rhs.sup();
    const auto pts = sample_points(dom.grid);
    PointwiseRun run;
    bool first = true;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (distance(pts[i], dom.center) > dom.eval_radius) continue;
        if (!(rhs.values[i] > floor) || !std::isfinite(rhs.values[i])) continue;
        const double r = lhs.values[i] / rhs.values[i];
        run.samples.push_back({pts[i], 0.0, r});
        if (first || r > run.best) {
            run.best = r;
            run.witness = pts[i];
            first = false;
        }
    }
    return run;
}

}  // namespace

ConditionReport check_pointwise_iterated(const Measure& mu, const ParamSet& params, Eta eta, PotentialKind kind,
                                         const GridOptions& opt) {
    params.validate();
    if (kind != PotentialKind::wolff && kind != PotentialKind::riesz)
        throw ParameterError("pointwise check: kind must be wolff or riesz");
    if (eta == Eta::beta && !params.single() && !(params.beta > 0.0)) throw ParameterError("pointwise check: beta unset");
    if (total_mass(mu) == 0.0) return vacuous(Condition::pointwise_iterated);
    ConditionReport rep;
    rep.condition = Condition::pointwise_iterated;
    const auto run = pointwise_once(mu, params, eta, kind, opt, 1);
    if (run.samples.empty()) {
        rep.vacuous = true;
        return rep;
    }
    rep.best_constant = run.best;
    rep.witness = {run.witness, 0.0};
    rep.samples = run.samples.size();
    rep.per_sample = run.samples;
    if (!std::isfinite(run.best)) rep.verdict = Verdict::blowup_suspected;
    if (opt.refine) {
        const auto fine = pointwise_once(mu, params, eta, kind, opt, 2);
        const double change = fine.best / run.best;
        rep.extra["refined_best_constant"] = fine.best;
        rep.extra["refinement_ratio"] = change;
        if (!(std::abs(change - 1.0) <= 0.2)) {
            rep.unreliable = true;
            rep.warnings.push_back("best constant changes by more than 20% under grid refinement");
        }
    }
    return rep;
}

ConditionReport check_capacity_lipschitz(const Measure& mu, const ParamSet& params, const BallSampler& sampler,
                                         const CapacityCheckOptions& opt) {
    params.validate();
    const int N = params.N;
    const double a = params.single() ? params.alpha * params.p : params.maximal_order();
    const double s = params.capacity_exponent();
    const double kappa = N - a * s;
    if (opt.kernel == KernelKind::riesz && !(kappa > 0.0))
        throw ParameterError("capacity check: Riesz capacity needs a positive growth exponent");
    if (total_mass(mu) == 0.0) return vacuous(Condition::cap_lipschitz);

    ConditionReport rep;
    rep.condition = Condition::cap_lipschitz;
    rep.extra["order"] = a;
    rep.extra["exponent"] = s;
    const Point origin(N, 0.0);
    std::map<double, double> lower_by_t;
    double unit_lower = -1.0;
    auto ball_lower = [&](double t) {
        if (opt.kernel == KernelKind::riesz) {
            if (unit_lower < 0.0) unit_lower = riesz_capacity(CompactSet::ball(origin, 1.0), a, s, opt.capacity).lower;
            return unit_lower * std::pow(t, kappa);
        }
        auto it = lower_by_t.find(t);
        if (it == lower_by_t.end())
            it = lower_by_t.emplace(t, bessel_capacity(CompactSet::ball(origin, t), a, s, opt.capacity).lower).first;
        return it->second;
    };

    const auto centers = sampler.centers(mu, params);
    const auto radii = sampler.radii_for(mu);
    bool skipped = false;
    for (const auto& x : centers) {
        for (double t : radii) {
            const double lower = ball_lower(t);
            if (!(lower > 0.0)) {
                skipped = true;
                continue;
            }
            record(rep, x, t, ball_mass(mu, x, t) / lower);
        }
    }
    apply_slope_test(rep, kappa > 0.0 ? kappa : 0.2);

    int added = 0;
    for (std::size_t i = 0; i < centers.size() && added < opt.pairs; ++i) {
        for (std::size_t j = i + 1; j < centers.size() && added < opt.pairs; ++j) {
            const double sep = distance(centers[i], centers[j]);
            if (!(sep > 0.0)) continue;
            const double t = std::min(0.25 * sep, radii.front());
            const auto K = CompactSet::balls({{centers[i], t}, {centers[j], t}});
            const double lower = capacity(opt.kernel, K, a, s, opt.capacity).lower;
            ++added;
            if (!(lower > 0.0)) {
                skipped = true;
                continue;
            }
            Point mid(centers[i]);
            for (int d = 0; d < N; ++d) mid[d] = 0.5 * (centers[i][d] + centers[j][d]);
            record(rep, mid, t, (ball_mass(mu, centers[i], t) + ball_mass(mu, centers[j], t)) / lower);
        }
    }
    if (skipped) rep.warnings.push_back("capacity lower bound 0 for some compacts; skipped");
    return rep;
}

namespace {

struct ProductRun {
    double i1 = 0.0, i2 = 0.0, i3 = 0.0, c_fit = kInf;
};

ProductRun product_once(const Measure& mu, const ParamSet& params, const GridOptions& opt, int refine) {
    const auto dom = make_domain(mu, params, opt, refine);
    const int N = params.N;
    const double p = params.p, R = params.R, q = params.q1 + params.q2;
    std::vector<PotentialSpec> specs{PotentialSpec::frac_maximal(N, params.maximal_order(), R),
                                     PotentialSpec::wolff(N, params.wolff_order(), p, R),
                                     PotentialSpec::wolff(N, params.alpha, p, R)};
    if (!params.single()) specs.push_back(PotentialSpec::wolff(N, params.beta, p, R));
    const auto f = evaluate_on(mu, specs, dom.grid);
    const auto w = sample_weights(dom.grid);
    ProductRun run;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double a = std::pow(f[0].values[i], q / (p - 1.0));
        const double b = std::pow(f[1].values[i], q);
        double c = std::pow(f[2].values[i], params.q1);
        if (!params.single()) c *= std::pow(f[3].values[i], params.q2);
        run.i1 += w[i] * a;
        run.i2 += w[i] * b;
        run.i3 += w[i] * c;
        if (a > 0.0) run.c_fit = std::min(run.c_fit, c / a);
    }
    return run;
}

}  // namespace

ConditionReport check_product_comparability(const Measure& mu, const ParamSet& params, const GridOptions& opt) {
    params.validate();
    ConditionReport rep;
    rep.condition = Condition::product_comparability;
    for (const char* k : {"maximal_integral", "wolff_integral", "product_integral"}) rep.extra[k] = 0.0;
    if (total_mass(mu) == 0.0) {
        rep.vacuous = true;
        return rep;
    }
    const auto run = product_once(mu, params, opt, 1);
    rep.extra["maximal_integral"] = run.i1;
    rep.extra["wolff_integral"] = run.i2;
    rep.extra["product_integral"] = run.i3;
    rep.extra["c_fit"] = run.c_fit;
    if (!std::isfinite(run.i1) || !std::isfinite(run.i2) || !std::isfinite(run.i3) || !(run.i1 > 0.0)) {
        rep.verdict = Verdict::blowup_suspected;
        rep.warnings.push_back("an integral is not finite and positive on the grid");
        return rep;
    }
    const double r31 = run.i3 / run.i1, r21 = run.i2 / run.i1, r32 = run.i3 / run.i2;
    rep.extra["product_over_maximal"] = r31;
    rep.extra["wolff_over_maximal"] = r21;
    rep.extra["product_over_wolff"] = r32;
    rep.samples = 3;
    rep.best_constant = std::max({r31, 1.0 / r31, r21, 1.0 / r21, r32, 1.0 / r32});
    rep.witness = {support_ball(mu).first, 0.0};
    if (opt.refine) {
        const auto fine = product_once(mu, params, opt, 2);
        double worst = 0.0;
        const double coarse[3] = {r31, r21, r32};
        const double refined[3] = {fine.i3 / fine.i1, fine.i2 / fine.i1, fine.i3 / fine.i2};
        for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(refined[k] / coarse[k] - 1.0));
        rep.extra["max_refinement_change"] = worst;
        if (!(worst <= 0.2)) {
            rep.unreliable = true;
            rep.warnings.push_back("ratios change by more than 20% under grid refinement");
        }
    }
    return rep;
}

}  // namespace wolffkit
