#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "wolffkit/grid.hpp"
#include "wolffkit/measure.hpp"

namespace wolffkit {

enum class PotentialKind { wolff, riesz, ell, frac_maximal };

PotentialKind parse_potential_kind(const std::string& name);
std::string to_string(PotentialKind kind);

/// Parameters of one potential operator.
///
///   wolff        W^R_{alpha,p}[mu](x) = int_0^R (mu(B_r(x)) / r^{N - alpha p})^{1/(p-1)} dr/r
///   riesz        I^R_alpha[mu](x)     = int_0^R  mu(B_r(x)) / r^{N - alpha}          dr/r
///   ell          L^R_{alpha,s}[mu](x) = int_0^R (mu(B_r(x)) / r^{N - alpha})^s       dr/r
///   frac_maximal M^R_alpha[mu](x)     = sup_{0<t<R} mu(B_t(x)) / t^{N - alpha}
struct PotentialSpec {
    int N = 3;
    double alpha = 1.0;
    double p = 2.0;
    double R = kInf;
    PotentialKind kind = PotentialKind::wolff;
    double s = 1.0;  // ell only

    static PotentialSpec wolff(int N, double alpha, double p, double R = kInf);
    static PotentialSpec riesz(int N, double beta, double R = kInf);
    static PotentialSpec ell(int N, double alpha, double s, double R = kInf);
    static PotentialSpec frac_maximal(int N, double alpha, double R = kInf);

    /// Throws ParameterError when the kind's parameter invariants fail.
    void validate() const;

    /// Every integral kind is int_0^R (m(r) / r^{N - order})^{power} dr/r.
    double order() const;
    double power() const;
};

struct QuadratureConfig {
    int nodes_per_decade = 64;
    /// Smallest node, as a fraction of the support diameter of the measure.
    double r_min_factor = 1e-4;
    int max_nodes = 20000;
    /// Panels whose trapezoid error proxy exceeds refine_tol * integral are bisected.
    double refine_tol = 2e-4;
    int max_refine_depth = 30;

    void validate() const;
};

double wolff(const Measure& mu, const PotentialSpec& spec, std::span<const double> x,
             const QuadratureConfig& quad = {});
double riesz(const Measure& mu, const PotentialSpec& spec, std::span<const double> x,
             const QuadratureConfig& quad = {});
double ell(const Measure& mu, double alpha, double s, double R, std::span<const double> x,
           const QuadratureConfig& quad = {});
double frac_maximal(const Measure& mu, double alpha, double R, std::span<const double> x,
                    const QuadratureConfig& quad = {});

/// Dispatch on spec.kind.
double evaluate(const Measure& mu, const PotentialSpec& spec, std::span<const double> x,
                const QuadratureConfig& quad = {});

/// Force the log-node quadrature path (for any representation); used to
/// cross-check the exact paths.
double evaluate_quadrature(const Measure& mu, const PotentialSpec& spec, std::span<const double> x,
                           const QuadratureConfig& quad = {});

/// Several potentials of one measure on a sample set; ball-mass profiles are
/// shared between the specs.
std::vector<Field> evaluate_on(const Measure& mu, std::span<const PotentialSpec> specs, const SampleSet& at,
                               const QuadratureConfig& quad = {});
Field evaluate_on(const Measure& mu, const PotentialSpec& spec, const SampleSet& at,
                  const QuadratureConfig& quad = {});

/// Interpret a grid field as the density f dx.
Measure field_as_measure(const Field& f);

/// Potential of the density f dx evaluated on `at`.
Field potential_of_field(const Field& f, const PotentialSpec& spec, const SampleSet& at,
                         const QuadratureConfig& quad = {});

/// Precomputed map from a density on a fixed grid to potentials on a fixed
/// evaluation set. Reused across fixed-point iterations.
class FieldPotentialOperator {
public:
    FieldPotentialOperator(SampleSet source, SampleSet eval, QuadratureConfig quad = {});
    ~FieldPotentialOperator();
    FieldPotentialOperator(FieldPotentialOperator&&) noexcept;
    FieldPotentialOperator& operator=(FieldPotentialOperator&&) noexcept;

    const SampleSet& source() const;
    const SampleSet& eval() const;

    /// One output vector per spec, each of size sample_count(eval).
    std::vector<std::vector<double>> apply(std::span<const double> density, std::span<const PotentialSpec> specs) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

namespace detail {

/// int_0^R (m(r) / r^{N-a})^e dr/r for a right-continuous step profile.
double step_power_integral(std::span<const std::pair<double, double>> profile, int N, double a, double e, double R);
double step_maximal(std::span<const std::pair<double, double>> profile, int N, double a, double R);

/// Same integrals from samples of m at increasing nodes; m is constant
/// (= m.back()) beyond nodes.back(). `refine` evaluates m at new radii.
double node_power_integral(std::span<const double> nodes, std::span<const double> m, int N, double a, double e,
                           double R, const std::function<double(double)>& refine, const QuadratureConfig& quad);
double node_maximal(std::span<const double> nodes, std::span<const double> m, int N, double a, double R);

}  // namespace detail

}  // namespace wolffkit
