#pragma once

#include <utility>
#include <variant>
#include <vector>

#include "wolffkit/common.hpp"
#include "wolffkit/grid.hpp"

namespace wolffkit {

/// Finite sum of weighted Dirac masses.
class AtomicMeasure {
public:
    AtomicMeasure() = default;
    AtomicMeasure(int dim, std::vector<Point> points, std::vector<double> weights);
    static AtomicMeasure dirac(const Point& at, double mass = 1.0);
    static AtomicMeasure empty(int dim) { return AtomicMeasure(dim, {}, {}); }

    int dim() const { return dim_; }
    std::size_t size() const { return points_.size(); }
    const std::vector<Point>& points() const { return points_; }
    const std::vector<double>& weights() const { return weights_; }

private:
    int dim_ = 0;
    std::vector<Point> points_;
    std::vector<double> weights_;
};

/// Rotationally symmetric measure around `center`, described by its
/// cumulative mass m(r) = mu(B_r(center)) at increasing breakpoints.
///
/// Between consecutive breakpoints the mass is spread with uniform density
/// over the annulus, so m is affine in r^N there. A breakpoint at r = 0
/// carries an atom at the center. If the first breakpoint is positive, its
/// mass fills the inner ball uniformly.
class RadialMeasure {
public:
    RadialMeasure() = default;
    RadialMeasure(Point center, std::vector<double> radii, std::vector<double> cumulative);

    int dim() const { return static_cast<int>(center_.size()); }
    const Point& center() const { return center_; }
    const std::vector<double>& radii() const { return radii_; }
    const std::vector<double>& cumulative() const { return cumulative_; }
    double total_mass() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
    double atom_mass() const { return (!radii_.empty() && radii_[0] == 0.0) ? cumulative_[0] : 0.0; }
    double outer_radius() const { return radii_.empty() ? 0.0 : radii_.back(); }

    /// m(r) for a ball centered at the symmetry center.
    double mass_within(double r) const;

    /// Piecewise representation m(r) = a + b r^N on [lo, hi]; the first
    /// segment starts at 0.
    struct Segment {
        double lo, hi, a, b;
    };
    std::vector<Segment> segments() const;

    /// Density value on the annulus containing r (0 beyond the support).
    double density_at(double r) const;

private:
    Point center_;
    std::vector<double> radii_;
    std::vector<double> cumulative_;
};

/// Piecewise-constant density on a Cartesian grid (mass per unit volume).
class GridDensity {
public:
    GridDensity() = default;
    GridDensity(CartesianGrid grid, std::vector<double> density);

    const CartesianGrid& grid() const { return grid_; }
    const std::vector<double>& density() const { return density_; }
    int dim() const { return grid_.dim(); }
    double cell_mass(std::size_t i) const { return density_[i] * grid_.cell_volume(); }

private:
    CartesianGrid grid_;
    std::vector<double> density_;
};

using Measure = std::variant<AtomicMeasure, RadialMeasure, GridDensity>;

/// |mu| is realized as pos + neg.
struct SignedMeasure {
    Measure pos;
    Measure neg;
    double total_variation() const;
    /// pos + neg as a single measure (same representation required).
    Measure abs() const;
};

int measure_dim(const Measure& mu);
double total_mass(const Measure& mu);
bool has_atoms(const Measure& mu);

/// mu(closed ball B_rho(x)).
double ball_mass(const Measure& mu, std::span<const double> x, double rho);

/// Center and radius of a ball containing supp mu.
std::pair<Point, double> support_ball(const Measure& mu);
double support_diameter(const Measure& mu);
/// Largest distance from x to a point of supp mu.
double farthest_support_distance(const Measure& mu, std::span<const double> x);

/// rho -> mu(B_rho(x)) as (breakpoint, cumulative mass) pairs.
/// Atomic measures: any x. Radial measures: x at the symmetry center, where
/// the pairs are the breakpoints of the affine-in-r^N description.
std::vector<std::pair<double, double>> distance_profile(const Measure& mu, std::span<const double> x);

/// chi_{B_t(center)} mu. A radial measure cut off-center is resampled on a
/// `cells`^N grid over the ball's bounding cube.
Measure restrict_to_ball(const Measure& mu, std::span<const double> center, double t, int cells = 32);

/// lambda * mu.
Measure scaled(const Measure& mu, double lambda);

/// Sum of two radial measures sharing a center; breakpoints are merged.
RadialMeasure add(const RadialMeasure& a, const RadialMeasure& b);

/// Fraction of grid cell `flat` lying inside the closed ball B_rho(x).
double cell_ball_fraction(const CartesianGrid& grid, std::size_t flat, std::span<const double> x, double rho);

/// Compactly supported bump c (1 - |x/h|^2)^4, normalized to unit mass.
double bump_value(int dim, double h, double r);
/// Mass of the normalized bump inside B_r.
double bump_cumulative(int dim, double h, double r);

/// phi_h * mu sampled on `grid`. Each source element's bump is deposited by
/// cell quadrature and renormalized, so total mass is preserved.
GridDensity mollify(const Measure& mu, double bandwidth, const CartesianGrid& grid);

/// phi_h * (mass delta_center) as a radial measure with `pieces` breakpoints.
RadialMeasure mollified_dirac_radial(const Point& center, double mass, double bandwidth, int pieces = 200);

/// Density sampled from a radial field (piecewise constant on annuli).
RadialMeasure radial_measure_from_density(const RadialGrid& grid, std::span<const double> density);

}  // namespace wolffkit
