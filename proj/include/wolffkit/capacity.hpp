#pragma once

#include <string>
#include <variant>
#include <vector>

#include "wolffkit/grid.hpp"

namespace wolffkit {

struct Ball {
    Point center;
    double radius = 0.0;
};

/// Union of closed cells of `grid` with mask[i] != 0.
struct GridMask {
    CartesianGrid grid;
    std::vector<char> mask;
};

/// A compact set: a finite union of closed balls or a grid mask.
struct CompactSet {
    std::variant<std::vector<Ball>, GridMask> shape;

    static CompactSet ball(Point center, double radius);
    static CompactSet balls(std::vector<Ball> b);

    int dim() const;
    /// Throws ParameterError when empty, degenerate or of mixed dimension.
    void validate() const;
    bool contains(std::span<const double> x) const;
    /// Distance from the box [lo, hi] to the set (0 if they meet).
    double box_distance(std::span<const double> lo, std::span<const double> hi) const;
    /// Smallest component scale: min ball diameter, or the mask spacing times
    /// the mask extent in cells.
    double feature_size() const;
    /// Axis-aligned bounding box.
    std::pair<Point, Point> bounds() const;
};

enum class KernelKind { riesz, bessel };

struct CapacityOptions {
    /// Leaf cells across the smallest component of K.
    int grid = 8;
    int max_iter = 600;
    /// Stop when (upper - lower) / upper falls below this.
    double tol = 2e-3;
    /// Source domain is the bounding cube enlarged 2^pad_levels times;
    /// 0 picks a level from the kernel's decay.
    int pad_levels = 0;
};

struct CapacityEstimate {
    double lower = 0.0;
    double upper = 0.0;
    double gap = 0.0;
    int iterations = 0;
    std::string method;
    /// False if no feasible density was found (upper is then infinite).
    bool feasible = true;
    std::size_t samples = 0;
    std::size_t sources = 0;
};

/// Riesz potential kernel k(r) = r^{alpha-N} / (N - alpha), the kernel of
/// I_alpha[f](x) = int_0^inf (int_{B_r(x)} f) / r^{N-alpha} dr/r.
double riesz_kernel(int N, double alpha, double r);

/// Bessel kernel G_alpha(r) in R^N, normalized to unit integral. Infinite at
/// r = 0 when alpha <= N.
double bessel_kernel(int N, double alpha, double r);

/// Leading small-r constant of G_alpha: G_alpha(r) ~ c r^{alpha-N} (alpha < N).
double bessel_small_r_constant(int N, double alpha);

CapacityEstimate riesz_capacity(const CompactSet& K, double alpha, double p, const CapacityOptions& opt = {});
CapacityEstimate bessel_capacity(const CompactSet& K, double alpha, double p, const CapacityOptions& opt = {});
CapacityEstimate capacity(KernelKind kind, const CompactSet& K, double alpha, double p,
                          const CapacityOptions& opt = {});

/// r^{N - alpha p} times the (cached) upper bound for the unit ball.
double ball_capacity_reference(int N, double alpha, double p, double r);

}  // namespace wolffkit
