#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wolffkit {

/// A coordinate in R^N. N is a runtime quantity (2..6 in practice).
using Point = std::vector<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Violation of a documented parameter invariant (alpha*p >= N, p <= 1, ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed input document or configuration file.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical precondition failed (under-resolved grid, atoms fed to a
/// solver that needs densities, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Surface area of the unit sphere S^{N-1}.
double unit_sphere_area(int dim);

/// Volume of the unit ball in R^N.
double unit_ball_volume(int dim);

double distance(std::span<const double> a, std::span<const double> b);
double distance_squared(std::span<const double> a, std::span<const double> b);

/// Volume of B_r(0) ∩ B_rho(z) with |z| = sep, in R^N.
/// Closed form for N = 1, 2, 3; regularized incomplete beta otherwise.
double ball_intersection_volume(int dim, double r, double rho, double sep);

/// Volume of the spherical cap of height h in a ball of radius r (0 <= h <= 2r).
double ball_cap_volume(int dim, double r, double h);

/// Log-spaced nodes a * 10^{k/per_decade} covering [a, b]; the last node is b.
std::vector<double> log_nodes(double a, double b, int per_decade);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

/// Halton point in [0,1)^dim for the given index (bases 2,3,5,7,11,13).
std::vector<double> halton(std::size_t index, int dim);

inline bool is_finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace wolffkit
