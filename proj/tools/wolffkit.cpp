// wolffkit command-line driver: potentials, capacities, condition checks,
// the Wolff system and the radial PDE bench, all file based.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "wolffkit/capacity.hpp"
#include "wolffkit/criteria.hpp"
#include "wolffkit/io.hpp"
#include "wolffkit/parallel.hpp"
#include "wolffkit/potential.hpp"
#include "wolffkit/radial_pde.hpp"
#include "wolffkit/wolff_system.hpp"

namespace fs = std::filesystem;
using namespace wolffkit;

namespace {

constexpr int kOk = 0, kConfig = 1, kParameter = 2, kNumerical = 3;

double parse_real(const std::string& s, const std::string& name) {
    if (s == "inf" || s == "+inf") return kInf;
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw ConfigError("--" + name + ": '" + s + "' is not a number");
    return v;
}

std::vector<Point> parse_points(const std::string& s) {
    std::vector<Point> out;
    std::stringstream groups(s);
    std::string g;
    while (std::getline(groups, g, ';')) {
        Point x;
        std::stringstream coords(g);
        std::string c;
        while (std::getline(coords, c, ',')) x.push_back(parse_real(c, "at"));
        if (!x.empty()) out.push_back(std::move(x));
    }
    if (out.empty()) throw ConfigError("--at: no coordinates given");
    return out;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void emit(const fs::path& out, const std::string& name, const std::string& text) { write_text(out / name, text); }

SampleSet profile_samples(const Measure& mu, int n) {
    const auto [c, rho] = support_ball(mu);
    const double diam = rho > 0.0 ? 2.0 * rho : 1.0;
    if (std::holds_alternative<RadialMeasure>(mu)) return RadialGrid::graded(c, 4.0 * diam, n, 1e-3 * diam);
    return CartesianGrid::cube(c, 2.0 * diam, std::max(2, n / 8));
}

struct Common {
    std::string out = ".";
    std::uint64_t seed = 0;
    bool svg = false;
};

int cmd_potential(const Common& g, const std::string& measure_path, const std::string& kind, double alpha,
                  std::optional<double> p, int N, const std::string& R, double s, const std::string& at, int n) {
    const Measure mu = measure_from_json(read_json(measure_path));
    const PotentialKind k = parse_potential_kind(kind);
    const double Rv = parse_real(R, "R");
    PotentialSpec spec;
    switch (k) {
        case PotentialKind::wolff:
            if (!p) throw ConfigError("--p is required for kind wolff");
            spec = PotentialSpec::wolff(N, alpha, *p, Rv);
            break;
        case PotentialKind::riesz: spec = PotentialSpec::riesz(N, alpha, Rv); break;
        case PotentialKind::ell: spec = PotentialSpec::ell(N, alpha, s, Rv); break;
        case PotentialKind::frac_maximal: spec = PotentialSpec::frac_maximal(N, alpha, Rv); break;
    }
    spec.validate();
    if (measure_dim(mu) != N) throw ParameterError("--N differs from the measure dimension");
    if (!at.empty()) {
        for (const auto& x : parse_points(at)) {
            if (static_cast<int>(x.size()) != N) throw ConfigError("--at: point dimension differs from --N");
            std::cout << format_double(evaluate(mu, spec, x)) << "\n";
        }
        return kOk;
    }
    const auto f = evaluate_on(mu, spec, profile_samples(mu, n));
    emit(g.out, "potential.csv", field_csv(f, to_string(k)));
    if (g.svg) {
        if (const auto* r = std::get_if<RadialGrid>(&f.samples))
            emit(g.out, "potential.svg",
                 svg_plot(to_string(k) + " potential", "r", "value", {{to_string(k), r->nodes(), f.values, false}}, true, true));
    }
    std::cout << "wrote " << (fs::path(g.out) / "potential.csv").string() << "\n";
    return kOk;
}

int cmd_capacity(const Common& g, const std::string& kind, double alpha, double p, const std::string& set_path,
                 CapacityOptions opt) {
    KernelKind kk;
    if (kind == "riesz") kk = KernelKind::riesz;
    else if (kind == "bessel") kk = KernelKind::bessel;
    else throw ConfigError("--kind: expected riesz or bessel");
    const CompactSet K = compact_set_from_json(read_json(set_path));
    const auto est = capacity(kk, K, alpha, p, opt);
    Json j;
    j["lower"] = json_number(est.lower);
    j["upper"] = json_number(est.upper);
    j["gap"] = json_number(est.gap);
    j["iterations"] = est.iterations;
    j["method"] = est.method;
    j["feasible"] = est.feasible;
    j["samples"] = est.samples;
    j["sources"] = est.sources;
    emit(g.out, "capacity.json", dump(j));
    std::cout << dump(j);
    return est.feasible ? kOk : kNumerical;
}

int cmd_check(const Common& g, const std::string& condition, const std::string& measure_path,
              const std::string& params_path, const std::string& eta, const std::string& pot, const std::string& kernel,
              int grid) {
    const Measure mu = measure_from_json(read_json(measure_path));
    const ParamSet ps = read_params(params_path);
    BallSampler sampler;
    sampler.seed = g.seed;
    ConditionReport rep;
    if (condition == "growth") rep = check_growth(mu, ps, sampler);
    else if (condition == "ball") rep = check_ball_testing(mu, ps, sampler);
    else if (condition == "pointwise") {
        if (eta != "alpha" && eta != "beta") throw ConfigError("--eta: expected alpha or beta");
        GridOptions go;
        if (grid > 0) go.radial_n = go.cartesian_n = grid;
        rep = check_pointwise_iterated(mu, ps, eta == "alpha" ? Eta::alpha : Eta::beta, parse_potential_kind(pot), go);
    } else if (condition == "capacity") {
        CapacityCheckOptions co;
        if (kernel == "bessel") co.kernel = KernelKind::bessel;
        else if (kernel != "riesz") throw ConfigError("--kernel: expected riesz or bessel");
        if (grid > 0) co.capacity.grid = grid;
        rep = check_capacity_lipschitz(mu, ps, sampler, co);
    } else if (condition == "product") {
        GridOptions go;
        if (grid > 0) go.radial_n = go.cartesian_n = grid;
        rep = check_product_comparability(mu, ps, go);
    } else {
        throw ConfigError("--condition: expected growth, ball, pointwise, capacity or product");
    }
    const Json j = report_to_json(rep);
    emit(g.out, "report.json", dump(j));
    emit(g.out, "samples.csv", per_sample_csv(rep));
    if (g.svg) {
        PlotSeries s{"ratio", {}, {}, true};
        for (const auto& r : rep.per_sample) {
            s.x.push_back(r.scale);
            s.y.push_back(r.ratio);
        }
        emit(g.out, "samples.svg", svg_plot(to_string(rep.condition) + " ratios", "scale", "ratio", {s}, true, true));
    }
    std::cout << dump(j);
    return rep.flagged() ? kNumerical : kOk;
}

Json trace_json(const SystemSolution& sol) {
    Json j;
    j["status"] = to_string(sol.status);
    j["iterations"] = sol.iterations;
    j["residual"] = json_number(sol.residual);
    j["monotone"] = sol.monotone;
    j["max_tube_ratio"] = json_number(sol.max_tube_ratio);
    Json rows = Json::array();
    for (const auto& r : sol.trace)
        rows.push_back({{"iteration", r.iteration},
                        {"sup_u", json_number(r.sup_u)},
                        {"sup_v", json_number(r.sup_v)},
                        {"change", json_number(r.change)},
                        {"tube_u", json_number(r.tube_u)},
                        {"tube_v", json_number(r.tube_v)}});
    j["trace"] = rows;
    return j;
}

int cmd_solve_system(const Common& g, const std::string& measure_path, const std::string& params_path, double eps,
                     int grid, int max_iter, double tol, bool verify, const std::string& threshold) {
    const Measure mu = measure_from_json(read_json(measure_path));
    SystemConfig cfg;
    cfg.params = read_params(params_path);
    cfg.epsilon = eps;
    cfg.max_iter = max_iter;
    cfg.tol = tol;
    if (grid > 0) cfg.radial_n = cfg.cartesian_n = grid;
    const auto sol = solve_system(mu, cfg);
    emit(g.out, "U.csv", field_csv(sol.U, "U"));
    emit(g.out, "V.csv", field_csv(sol.V, "V"));
    Json trace = trace_json(sol);
    if (verify && sol.status == SystemStatus::converged) {
        const auto rep = verify_solution(sol, mu, cfg);
        trace["verify"] = {{"residual_u", json_number(rep.residual_u)},
                           {"residual_v", json_number(rep.residual_v)},
                           {"residual", json_number(rep.residual)},
                           {"pass", rep.pass}};
    }
    if (!threshold.empty()) {
        const auto b = parse_points(threshold).front();
        if (b.size() != 2) throw ConfigError("--threshold: expected lo,hi");
        const auto t = epsilon_threshold(mu, cfg, b[0], b[1]);
        trace["threshold"] = {{"eps_lo", json_number(t.eps_lo)},
                              {"eps_hi", json_number(t.eps_hi)},
                              {"solves", t.solves},
                              {"spot_check", t.spot_check}};
    }
    emit(g.out, "trace.json", dump(trace));
    if (g.svg) {
        if (const auto* r = std::get_if<RadialGrid>(&sol.U.samples))
            emit(g.out, "profiles.svg",
                 svg_plot("system solution", "r", "value",
                          {{"U", r->nodes(), sol.U.values, false}, {"V", r->nodes(), sol.V.values, false}}, true, true));
    }
    std::cout << "status " << to_string(sol.status) << " after " << sol.iterations << " iterations\n";
    return sol.status == SystemStatus::converged ? kOk : kNumerical;
}

int cmd_pde(const Common& g, int N, double p, double q1, double q2, const std::string& measure_path, double R_dom,
            double lambda, bool linear) {
    const Measure m = measure_from_json(read_json(measure_path));
    const auto* mu = std::get_if<RadialMeasure>(&m);
    if (!mu) throw ConfigError("--measure: the radial bench needs a radial or mollified_dirac measure");
    RadialSolution sol;
    if (linear) {
        if (!(mu->total_mass() == 0.0 || mu->outer_radius() < R_dom)) throw ParameterError("supp mu must lie inside the ball");
        sol = solve_linear_radial(*mu, p, N, R_dom);
    } else {
        RadialProblem prob{N, p, q1, q2, *mu, R_dom};
        PicardOptions opt;
        opt.lambda = lambda;
        sol = picard_solve(prob, opt);
    }
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < sol.r_nodes.size(); ++i) rows.push_back({sol.r_nodes[i], sol.u[i], sol.du[i]});
    emit(g.out, "solution.csv", csv({"r", "u", "du"}, rows));
    Json j;
    j["status"] = to_string(sol.status);
    j["picard_iters"] = sol.picard_iters;
    j["in_tube"] = sol.in_tube;
    j["monotone"] = sol.monotone;
    j["max_tube_ratio"] = json_number(sol.max_tube_ratio);
    if (sol.status == SystemStatus::converged && mu->atom_mass() == 0.0) {
        const auto b = verify_pointwise_bounds(sol, *mu, p, N);
        j["C_up"] = json_number(b.C_up);
        j["C_low"] = json_number(b.C_low);
        j["C_grad"] = json_number(b.C_grad);
        j["delta"] = json_number(b.delta);
        j["vacuous"] = b.vacuous;
        j["warnings"] = b.warnings;
    }
    emit(g.out, "bounds.json", dump(j));
    if (g.svg)
        emit(g.out, "solution.svg", svg_plot("radial solution", "r", "u", {{"u", sol.r_nodes, sol.u, false}}, true, true));
    std::cout << dump(j);
    return sol.status == SystemStatus::converged ? kOk : kNumerical;
}

int cmd_report(const Common& g, const std::string& measure_path, const std::string& params_path) {
    const Measure mu = measure_from_json(read_json(measure_path));
    const ParamSet ps = read_params(params_path);
    ps.validate();
    BallSampler sampler;
    sampler.seed = g.seed;
    const auto [c, rho] = support_ball(mu);
    Json j;
    j["measure"] = {{"dim", measure_dim(mu)},
                    {"total_mass", json_number(total_mass(mu))},
                    {"has_atoms", has_atoms(mu)},
                    {"support_center", c},
                    {"support_radius", json_number(rho)}};
    j["params"] = {{"N", ps.N},
                   {"p", json_number(ps.p)},
                   {"q1", json_number(ps.q1)},
                   {"q2", json_number(ps.q2)},
                   {"alpha", json_number(ps.alpha)},
                   {"beta", json_number(ps.beta)},
                   {"R", json_number(ps.R)}};
    j["exponents"] = {{"growth", json_number(growth_exponent(ps))},
                      {"maximal_order", json_number(ps.maximal_order())},
                      {"wolff_order", json_number(ps.wolff_order())},
                      {"capacity_exponent", json_number(ps.capacity_exponent())}};
    bool flagged = false;
    std::vector<ConditionReport> done;
    auto run = [&](const char* key, auto&& check) {
        try {
            done.push_back(check());
            j[key] = report_to_json(done.back());
            flagged = flagged || done.back().flagged();
        } catch (const ParameterError& e) {
            j[key] = {{"skipped", e.what()}};
        }
    };
    run("growth", [&] { return check_growth(mu, ps, sampler); });
    run("ball_testing", [&] { return check_ball_testing(mu, ps, sampler); });
    j["flagged"] = flagged;
    emit(g.out, "report.json", dump(j));
    if (g.svg) {
        std::vector<PlotSeries> series;
        for (const auto& rep : done) {
            PlotSeries s{to_string(rep.condition), {}, {}, true};
            for (const auto& r : rep.per_sample) s.x.push_back(r.scale), s.y.push_back(r.ratio);
            series.push_back(std::move(s));
        }
        emit(g.out, "report.svg", svg_plot("sampled ratios", "scale", "ratio", series, true, true));
    }
    std::cout << dump(j);
    return flagged ? kNumerical : kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wolffkit: nonlinear potentials, capacities and Wolff systems"};
    app.require_subcommand(1);
    app.fallthrough();
    Common g;
    int threads = 0;
    app.add_option("--threads", threads, "worker cap (default: WOLFFKIT_THREADS or hardware)");
    app.add_option("--seed", g.seed, "seed for sampled balls");
    app.add_option("--out", g.out, "output directory");
    app.add_flag("--svg", g.svg, "also write SVG plots");

    std::string measure, params, kind = "wolff", R = "inf", at, set, condition, eta = "alpha", pot = "wolff",
                kernel = "riesz", threshold;
    double alpha = 1.0, s = 1.0, eps = 1e-3, tol = 1e-8, R_dom = 1.0, lambda = 10.0, q1 = 1.0, q2 = 1.0;
    std::optional<double> p;
    int N = 3, n = 160, grid = 0, max_iter = 200;
    bool verify = false, linear = false;
    CapacityOptions copt;

    auto* pot_cmd = app.add_subcommand("potential", "evaluate a potential of a measure");
    pot_cmd->add_option("--measure", measure, "measure JSON")->required();
    pot_cmd->add_option("--kind", kind, "wolff|riesz|ell|frac_maximal");
    pot_cmd->add_option("--alpha", alpha, "order (beta for riesz)");
    pot_cmd->add_option("--p", p, "exponent p (wolff)");
    pot_cmd->add_option("--N", N, "dimension");
    pot_cmd->add_option("--R", R, "truncation radius or inf");
    pot_cmd->add_option("--s", s, "power (ell)");
    pot_cmd->add_option("--at", at, "points 'x,y,z;x,y,z'; omitted: write potential.csv");
    pot_cmd->add_option("--n", n, "profile samples when --at is omitted");

    auto* cap_cmd = app.add_subcommand("capacity", "estimate a Riesz or Bessel capacity");
    cap_cmd->add_option("--kind", kind, "riesz|bessel")->required();
    cap_cmd->add_option("--alpha", alpha, "kernel order")->required();
    cap_cmd->add_option("--p", p, "exponent")->required();
    cap_cmd->add_option("--set", set, "compact set JSON")->required();
    cap_cmd->add_option("--grid", copt.grid, "leaf cells across the smallest component");
    cap_cmd->add_option("--max-iter", copt.max_iter, "solver iterations");
    cap_cmd->add_option("--tol", copt.tol, "relative duality gap");

    auto* chk_cmd = app.add_subcommand("check", "test an admissibility condition on sampled balls");
    chk_cmd->add_option("--condition", condition, "growth|ball|pointwise|capacity|product")->required();
    chk_cmd->add_option("--measure", measure, "measure JSON")->required();
    chk_cmd->add_option("--params", params, "key = value parameter file")->required();
    chk_cmd->add_option("--eta", eta, "outer order for pointwise: alpha|beta");
    chk_cmd->add_option("--potential", pot, "pointwise variant: wolff|riesz");
    chk_cmd->add_option("--kernel", kernel, "capacity kernel: riesz|bessel");
    chk_cmd->add_option("--grid", grid, "grid size override");

    auto* sys_cmd = app.add_subcommand("solve-system", "monotone iteration for the Wolff system");
    sys_cmd->add_option("--measure", measure, "measure JSON")->required();
    sys_cmd->add_option("--params", params, "key = value parameter file")->required();
    sys_cmd->add_option("--epsilon", eps, "data scale");
    sys_cmd->add_option("--grid", grid, "radial shells or cells per axis");
    sys_cmd->add_option("--max-iter", max_iter, "iteration cap");
    sys_cmd->add_option("--tol", tol, "relative sup change");
    sys_cmd->add_flag("--verify", verify, "residual on the refined grid");
    sys_cmd->add_option("--threshold", threshold, "bisection bracket 'lo,hi' for the epsilon threshold");

    auto* pde_cmd = app.add_subcommand("pde", "radial quasilinear bench");
    pde_cmd->add_option("--N", N, "dimension");
    pde_cmd->add_option("--p", p, "exponent")->required();
    pde_cmd->add_option("--q1", q1, "exponent of u");
    pde_cmd->add_option("--q2", q2, "exponent of |u'|");
    pde_cmd->add_option("--measure", measure, "radial measure JSON")->required();
    pde_cmd->add_option("--Rdom", R_dom, "domain radius");
    pde_cmd->add_option("--lambda", lambda, "tube factor");
    pde_cmd->add_flag("--linear", linear, "solve the problem without the nonlinear term");

    auto* rep_cmd = app.add_subcommand("report", "measure summary with growth and ball-testing checks");
    rep_cmd->add_option("--measure", measure, "measure JSON")->required();
    rep_cmd->add_option("--params", params, "key = value parameter file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfig;
    }

    try {
        if (threads < 0) throw ConfigError("--threads must be >= 0");
        set_thread_count(threads);
        if (*pot_cmd) return cmd_potential(g, measure, kind, alpha, p, N, R, s, at, n);
        if (*cap_cmd) return cmd_capacity(g, kind, alpha, *p, set, copt);
        if (*chk_cmd) return cmd_check(g, condition, measure, params, eta, pot, kernel, grid);
        if (*sys_cmd) return cmd_solve_system(g, measure, params, eps, grid, max_iter, tol, verify, threshold);
        if (*pde_cmd) return cmd_pde(g, N, *p, q1, q2, measure, R_dom, lambda, linear);
        if (*rep_cmd) return cmd_report(g, measure, params);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const ParameterError& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return kParameter;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kNumerical;
    }
    return kConfig;
}
