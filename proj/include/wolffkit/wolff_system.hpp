#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wolffkit/criteria.hpp"

namespace wolffkit {

/// U = W_alpha[U^{q1} V^{q2}] + eps W_alpha[mu],  V = W_beta[U^{q1} V^{q2}] + eps W_beta[mu].
/// In the single form (q2 = 0) only the U equation is solved and V mirrors U.
struct SystemConfig {
    ParamSet params;
    double epsilon = 1e-3;
    /// Unset: a graded radial grid for radial measures, a Cartesian cube otherwise.
    std::optional<SampleSet> grid;
    int radial_n = 160;
    int cartesian_n = 16;
    double tol = 1e-8;
    int max_iter = 200;
    double blowup_factor = 10.0;
    QuadratureConfig quad;

    void validate() const;
};

enum class SystemStatus { converged, diverged, maxiter };
std::string to_string(SystemStatus s);

struct IterationRecord {
    int iteration = 0;
    double sup_u = 0.0;
    double sup_v = 0.0;
    /// Relative sup change from the previous iterate.
    double change = 0.0;
    /// max U_m / (eps W_alpha[mu]) and max V_m / (eps W_beta[mu]).
    double tube_u = 0.0;
    double tube_v = 0.0;
};

struct SystemSolution {
    Field U;
    Field V;
    int iterations = 0;
    double residual = 0.0;
    SystemStatus status = SystemStatus::maxiter;
    /// U_{m+1} >= U_m and V_{m+1} >= V_m held at every step.
    bool monotone = true;
    /// Largest tube ratio seen over all iterates.
    double max_tube_ratio = 0.0;
    std::vector<IterationRecord> trace;
};

/// Sample set used when cfg.grid is unset: radius / half-width 8 support
/// diameters around the support center.
SampleSet default_system_grid(const Measure& mu, const SystemConfig& cfg);

/// Monotone iteration from U_0 = eps W_alpha[mu], V_0 = eps W_beta[mu].
SystemSolution solve_system(const Measure& mu, const SystemConfig& cfg);

struct ThresholdResult {
    double eps_lo = 0.0;  // converged
    double eps_hi = 0.0;  // not converged
    int solves = 0;
    /// A solve at eps_lo / 2 also converged.
    bool spot_check = true;
};

/// Bisection in log eps until eps_hi / eps_lo <= 1 + rel_width.
ThresholdResult epsilon_threshold(const Measure& mu, const SystemConfig& cfg, double lo, double hi,
                                  double rel_width = 0.05);

struct ResidualReport {
    double residual_u = 0.0;
    double residual_v = 0.0;
    double residual = 0.0;
    bool pass = false;
};

/// Interpolates U, V to the 2x refined grid, recomputes both right-hand sides
/// there and reports sup |U - RHS| / sup U (and the same for V).
ResidualReport verify_solution(const SystemSolution& sol, const Measure& mu, const SystemConfig& cfg,
                               double threshold = 5e-2);

/// Piecewise-linear transfer of a grid field to another grid of the same kind.
Field interpolate(const Field& f, const SampleSet& to);

}  // namespace wolffkit
