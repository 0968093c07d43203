#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wolffkit/capacity.hpp"
#include "wolffkit/measure.hpp"
#include "wolffkit/potential.hpp"

namespace wolffkit {

/// Exponents of the coupled problem. q2 = 0 selects the single-potential
/// form with q = q1 (beta is then unused).
struct ParamSet {
    int N = 3;
    double p = 2.0;
    double q1 = 1.0;
    double q2 = 1.0;
    double alpha = 1.0;
    double beta = 0.5;
    double R = kInf;

    bool single() const { return q2 == 0.0; }
    /// Throws ParameterError naming the violated hypothesis.
    void validate() const;
    /// (alpha p q1 + beta p q2) / (q1 + q2).
    double maximal_order() const;
    /// (alpha q1 + beta q2) / (q1 + q2).
    double wolff_order() const;
    /// (q1 + q2) / (q1 + q2 - p + 1).
    double capacity_exponent() const;
};

/// N - (alpha p q1 + beta p q2) / (q1 + q2 - p + 1).
double growth_exponent(const ParamSet& params);

enum class Condition { growth, cap_lipschitz, ball_testing_product, ball_testing_single, pointwise_iterated, product_comparability };
enum class Verdict { finite, blowup_suspected };

std::string to_string(Condition c);
std::string to_string(Verdict v);

struct Witness {
    Point location;
    double scale = 0.0;
};

struct SampleRatio {
    Point location;
    double scale = 0.0;
    double ratio = 0.0;
};

struct ConditionReport {
    Condition condition = Condition::growth;
    double best_constant = 0.0;
    Witness witness;
    std::size_t samples = 0;
    Verdict verdict = Verdict::finite;
    /// Refinement study failed (result depends on the discretization).
    bool unreliable = false;
    /// No admissible sample (e.g. zero measure).
    bool vacuous = false;
    std::vector<std::string> warnings;
    std::vector<SampleRatio> per_sample;
    /// Named auxiliary numbers (slopes, integrals, refinement ratios).
    std::map<std::string, double> extra;

    bool flagged() const { return verdict == Verdict::blowup_suspected || unreliable; }
};

/// Deterministic family of test balls: mass concentration points plus
/// Halton-scattered centers, radii log-spaced over `decades` below t_max.
struct BallSampler {
    std::uint64_t seed = 0;
    int scattered = 6;
    int mass_points = 4;
    int radii = 7;
    double decades = 3.0;
    /// Largest radius; 0 means the support diameter (1 for a single point).
    double t_max = 0.0;

    std::vector<Point> centers(const Measure& mu, const ParamSet& params) const;
    std::vector<double> radii_for(const Measure& mu) const;
};

/// Degree d with ratio(lambda mu) = lambda^d ratio(mu).
double homogeneity_degree(Condition c, const ParamSet& params, PotentialKind kind = PotentialKind::wolff);

/// sup mu(B_t(x)) / t^{growth exponent} over the sampled balls.
ConditionReport check_growth(const Measure& mu, const ParamSet& params, const BallSampler& sampler = {});

struct BallTestOptions {
    /// Cells per axis of the evaluation cube (even, so no node sits at the center).
    int n = 16;
    /// The cube around B_t(x) has half-width factor * t.
    double half_width_factor = 2.0;
    /// Number of top-ratio balls re-integrated on the 2x refined cube.
    int refine_top = 2;
};

/// sup over balls of int (W_alpha[chi_B mu])^{q1} (W_beta[chi_B mu])^{q2} dy / mu(B),
/// the integral taken over the evaluation cube.
ConditionReport check_ball_testing(const Measure& mu, const ParamSet& params, const BallSampler& sampler = {},
                                   const BallTestOptions& opt = {});

enum class Eta { alpha, beta };

struct GridOptions {
    /// Radial shells (radial measures) or cells per axis (otherwise).
    int radial_n = 160;
    int cartesian_n = 16;
    /// Whole-space runs cut the inner integrals at domain_factor * support radius.
    double domain_factor = 20.0;
    /// Ratios are taken at points within eval_factor * support radius of the support center.
    double eval_factor = 2.0;
    bool refine = true;
};

/// sup_x W_eta[(W_alpha mu)^{q1} (W_beta mu)^{q2}](x) / W_eta[mu](x), or with
/// kind = riesz: I_eta[(I_p mu)^{q1/(p-1)} (I_1 mu)^{q2/(p-1)}] / I_eta[mu].
ConditionReport check_pointwise_iterated(const Measure& mu, const ParamSet& params, Eta eta = Eta::alpha,
                                         PotentialKind kind = PotentialKind::wolff, const GridOptions& opt = {});

struct CapacityCheckOptions {
    KernelKind kernel = KernelKind::riesz;
    CapacityOptions capacity{6, 600, 2e-3, 0};
    /// Number of two-ball unions added to the sample.
    int pairs = 2;
};

/// sup over sampled compacts of mu(K) / (lower bound of Cap(K)).
ConditionReport check_capacity_lipschitz(const Measure& mu, const ParamSet& params, const BallSampler& sampler = {},
                                         const CapacityCheckOptions& opt = {});

/// The three integrals of maximal, Wolff and product potentials and their ratios.
ConditionReport check_product_comparability(const Measure& mu, const ParamSet& params, const GridOptions& opt = {});

}  // namespace wolffkit
