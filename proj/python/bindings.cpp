#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wolffkit/capacity.hpp"
#include "wolffkit/criteria.hpp"
#include "wolffkit/io.hpp"
#include "wolffkit/potential.hpp"
#include "wolffkit/radial_pde.hpp"
#include "wolffkit/wolff_system.hpp"

namespace py = pybind11;
using namespace wolffkit;

namespace {

Measure measure_of(const std::string& text) { return measure_from_json(Json::parse(text)); }

std::vector<double> potential(const std::string& measure, const std::string& kind, double alpha, double p, double R,
                              double s, const std::vector<Point>& points) {
    const Measure mu = measure_of(measure);
    PotentialSpec spec;
    spec.N = measure_dim(mu);
    spec.kind = parse_potential_kind(kind);
    spec.alpha = alpha;
    spec.p = p;
    spec.R = R;
    spec.s = s;
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& x : points) out.push_back(evaluate(mu, spec, x));
    return out;
}

py::dict capacity_of(const std::string& set, const std::string& kernel, double alpha, double p, int grid, int max_iter,
                     double tol) {
    CapacityOptions opt;
    opt.grid = grid;
    opt.max_iter = max_iter;
    opt.tol = tol;
    if (kernel != "riesz" && kernel != "bessel") throw ConfigError("kernel must be riesz or bessel");
    const auto est = capacity(kernel == "riesz" ? KernelKind::riesz : KernelKind::bessel,
                              compact_set_from_json(Json::parse(set)), alpha, p, opt);
    py::dict d;
    d["lower"] = est.lower;
    d["upper"] = est.upper;
    d["gap"] = est.gap;
    d["iterations"] = est.iterations;
    d["feasible"] = est.feasible;
    return d;
}

std::string check(const std::string& condition, const std::string& measure, const std::string& params,
                  std::uint64_t seed) {
    const Measure mu = measure_of(measure);
    const ParamSet ps = params_from_text(params);
    BallSampler sampler;
    sampler.seed = seed;
    ConditionReport rep;
    if (condition == "growth")
        rep = check_growth(mu, ps, sampler);
    else if (condition == "ball")
        rep = check_ball_testing(mu, ps, sampler);
    else if (condition == "pointwise")
        rep = check_pointwise_iterated(mu, ps);
    else if (condition == "capacity")
        rep = check_capacity_lipschitz(mu, ps, sampler);
    else if (condition == "product")
        rep = check_product_comparability(mu, ps);
    else
        throw ConfigError("unknown condition '" + condition + "'");
    return report_to_json(rep).dump();
}

py::dict solve(const std::string& measure, const std::string& params, double epsilon, int max_iter, double tol) {
    SystemConfig cfg;
    cfg.params = params_from_text(params);
    cfg.epsilon = epsilon;
    cfg.max_iter = max_iter;
    cfg.tol = tol;
    const auto sol = solve_system(measure_of(measure), cfg);
    py::dict d;
    d["status"] = to_string(sol.status);
    d["iterations"] = sol.iterations;
    d["residual"] = sol.residual;
    d["monotone"] = sol.monotone;
    d["max_tube_ratio"] = sol.max_tube_ratio;
    d["U"] = sol.U.values;
    d["V"] = sol.V.values;
    return d;
}

py::dict pde(const std::string& measure, int N, double p, double q1, double q2, double R_dom, bool linear) {
    const Measure m = measure_of(measure);
    const auto* radial = std::get_if<RadialMeasure>(&m);
    if (!radial) throw ConfigError("pde needs a radial measure");
    RadialSolution sol;
    if (linear) {
        sol = solve_linear_radial(*radial, p, N, R_dom);
    } else {
        RadialProblem pr;
        pr.N = N;
        pr.p = p;
        pr.q1 = q1;
        pr.q2 = q2;
        pr.mu = *radial;
        pr.R_dom = R_dom;
        sol = picard_solve(pr);
    }
    py::dict d;
    d["status"] = to_string(sol.status);
    d["in_tube"] = sol.in_tube;
    d["r"] = sol.r_nodes;
    d["u"] = sol.u;
    d["du"] = sol.du;
    if (sol.status == SystemStatus::converged) {
        const auto b = verify_pointwise_bounds(sol, *radial, p, N);
        d["C_up"] = b.C_up;
        d["C_low"] = b.C_low;
        d["C_grad"] = b.C_grad;
    }
    return d;
}

}  // namespace

PYBIND11_MODULE(_wolffkit, m) {
    m.doc() = "wolffkit core";
    py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    m.def("potential", &potential, py::arg("measure"), py::arg("kind"), py::arg("alpha"), py::arg("p"), py::arg("R"),
          py::arg("s"), py::arg("points"));
    m.def("capacity", &capacity_of, py::arg("set"), py::arg("kernel"), py::arg("alpha"), py::arg("p"), py::arg("grid"),
          py::arg("max_iter"), py::arg("tol"));
    m.def("check", &check, py::arg("condition"), py::arg("measure"), py::arg("params"), py::arg("seed"));
    m.def("solve_system", &solve, py::arg("measure"), py::arg("params"), py::arg("epsilon"), py::arg("max_iter"),
          py::arg("tol"));
    m.def("pde", &pde, py::arg("measure"), py::arg("N"), py::arg("p"), py::arg("q1"), py::arg("q2"), py::arg("R_dom"),
          py::arg("linear"));
    m.def("growth_exponent", [](const std::string& params) { return growth_exponent(params_from_text(params)); },
          py::arg("params"));
}
