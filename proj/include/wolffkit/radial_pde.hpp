#pragma once

#include <string>
#include <vector>

#include "wolffkit/potential.hpp"
#include "wolffkit/wolff_system.hpp"

namespace wolffkit {

/// -div(|u'|^{p-2} u') = |u|^{q1-1} u |u'|^{q2} + mu on B_{R_dom}, u = 0 on the sphere.
struct RadialProblem {
    int N = 3;
    double p = 2.0;
    double q1 = 1.0;
    double q2 = 1.0;
    RadialMeasure mu;
    double R_dom = 1.0;

    /// (3N-2)/(2N-1) < p < N, q1 + q2 > p - 1, 0 < q2 < N(p-1)/(N-1), supp mu inside the ball.
    void validate() const;
};

struct RadialNodes {
    int per_decade = 40;
    /// Innermost node as a fraction of min(R_dom, support radius).
    double r_min_factor = 1e-4;
};

/// Geometric nodes from the innermost radius to R_dom, merged with the
/// breakpoints of mu inside the ball. The last node is R_dom.
std::vector<double> radial_nodes(const RadialMeasure& mu, double R_dom, const RadialNodes& opt = {});

struct RadialSolution {
    std::vector<double> r_nodes;
    std::vector<double> u;
    std::vector<double> du;
    int picard_iters = 0;
    bool in_tube = true;
    SystemStatus status = SystemStatus::converged;
    double residual = 0.0;
    bool monotone = true;
    /// Largest of |u|/(Lambda E_u) and |u'|/(Lambda E_du) over nodes and iterates.
    double max_tube_ratio = 0.0;
};

/// m(r) = nu(B_r) is interpolated linearly in r^N between nodes; then
/// |u'|^{p-2} u' = -m / (sigma r^{N-1}) and u(r) = int_r^{R_dom} |u'| ds with a
/// 20-point Gauss-Legendre rule per interval.
RadialSolution solve_linear_radial(const RadialMeasure& nu, double p, int N, double R_dom,
                                   const RadialNodes& opt = {});

/// Same, on given nodes (merged with the breakpoints of nu and R_dom).
RadialSolution solve_linear_radial(const RadialMeasure& nu, double p, int N, double R_dom,
                                   std::vector<double> nodes);

struct PicardOptions {
    double lambda = 10.0;
    int max_iter = 200;
    double tol = 1e-8;
    RadialNodes nodes;
    QuadratureConfig quad;
};

/// Envelopes of the invariant set on the given nodes, without the factor Lambda:
/// p <= 2: (I_p^{2R}[mu])^{1/(p-1)}, (I_1^{2R}[mu])^{1/(p-1)}; p > 2: W_{1,p}^{2R}, W_{1/p,p}^{2R}.
/// R is the domain diameter.
std::pair<std::vector<double>, std::vector<double>> tube_envelopes(const RadialProblem& prob,
                                                                   const std::vector<double>& nodes,
                                                                   const QuadratureConfig& quad = {});

/// u_0 = L[mu], u_{k+1} = L[g(u_k) + mu] with g = |u|^{q1-1} u |u'|^{q2} taken
/// piecewise constant (trapezoid average) between nodes.
RadialSolution picard_solve(const RadialProblem& prob, const PicardOptions& opt = {});

struct BoundsReport {
    double C_up = 0.0;
    double C_low = 0.0;
    double C_grad = 0.0;
    /// Shells used for C_grad satisfy r <= R_dom - delta.
    double delta = 0.0;
    bool vacuous = false;
    bool in_tube = true;
    std::vector<std::string> warnings;
};

/// C_up = sup u / W^{2R}_{1,p}[mu], C_low = sup W^{d/4}_{1,p}[mu] / u with d the
/// distance to the boundary, C_grad = sup |u'| / (I^{2R}_1[mu])^{1/(p-1)} over
/// r <= R_dom / 2. R = 2 R_dom.
BoundsReport verify_pointwise_bounds(const RadialSolution& sol, const RadialMeasure& mu, double p, int N,
                                     const QuadratureConfig& quad = {});

}  // namespace wolffkit
