#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "wolffkit/common.hpp"

namespace wolffkit {

/// Uniform Cartesian cell grid: `shape[d]` cells of width `spacing[d]`
/// starting at the lower corner `origin`. Cells are addressed row-major with
/// the last axis fastest.
class CartesianGrid {
public:
    CartesianGrid() = default;
    CartesianGrid(Point origin, std::vector<double> spacing, std::vector<int> shape);

    /// Cube [center - half_width, center + half_width]^N with n cells per axis.
    static CartesianGrid cube(const Point& center, double half_width, int n);

    int dim() const { return static_cast<int>(origin_.size()); }
    std::size_t size() const { return size_; }
    const Point& origin() const { return origin_; }
    const std::vector<double>& spacing() const { return spacing_; }
    const std::vector<int>& shape() const { return shape_; }
    double cell_volume() const { return cell_volume_; }
    bool isotropic() const;
    /// Largest spacing over all axes.
    double max_spacing() const;

    Point center(std::size_t flat) const;
    void center(std::size_t flat, double* out) const;
    std::vector<int> unflatten(std::size_t flat) const;
    std::size_t flatten(const std::vector<int>& idx) const;

    /// Same box, every axis subdivided by `factor`.
    CartesianGrid refined(int factor) const;

    Point lower() const { return origin_; }
    Point upper() const;

    bool operator==(const CartesianGrid& other) const = default;

private:
    Point origin_;
    std::vector<double> spacing_;
    std::vector<int> shape_;
    std::size_t size_ = 0;
    double cell_volume_ = 0.0;
};

/// Concentric annular cells [edges[i], edges[i+1]) around `center`, edges[0] = 0.
/// Sample i sits at the annulus midpoint radius along the first coordinate axis.
/// Integrals against this grid are exact for radially symmetric integrands
/// that are piecewise constant on the annuli.
class RadialGrid {
public:
    RadialGrid() = default;
    RadialGrid(Point center, std::vector<double> edges);

    /// `n` annuli: geometric edges from `r_first` to `r_max`, plus the inner disc.
    static RadialGrid graded(const Point& center, double r_max, int n, double r_first);

    int dim() const { return static_cast<int>(center_.size()); }
    std::size_t size() const { return edges_.size() - 1; }
    const Point& center() const { return center_; }
    const std::vector<double>& edges() const { return edges_; }
    double node(std::size_t i) const { return 0.5 * (edges_[i] + edges_[i + 1]); }
    std::vector<double> nodes() const;
    double shell_volume(std::size_t i) const;
    double outer_radius() const { return edges_.back(); }
    Point point(std::size_t i) const;

    /// Every annulus split into `factor` equal-width pieces.
    RadialGrid refined(int factor) const;

    bool operator==(const RadialGrid& other) const = default;

private:
    Point center_;
    std::vector<double> edges_;
};

struct ScatteredPoints {
    int dim = 0;
    std::vector<Point> points;
    bool operator==(const ScatteredPoints& other) const = default;
};

/// Where a Field lives.
using SampleSet = std::variant<ScatteredPoints, CartesianGrid, RadialGrid>;

int sample_dim(const SampleSet& s);
std::size_t sample_count(const SampleSet& s);
std::vector<Point> sample_points(const SampleSet& s);
/// Quadrature weight (cell volume) of each sample; throws for scattered points.
std::vector<double> sample_weights(const SampleSet& s);

/// A nonnegative scalar function sampled on a SampleSet.
struct Field {
    SampleSet samples;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double sup() const;
    /// Sum of value * cell weight (grid sample sets only).
    double integral() const;
};

/// Pointwise U^{q1} V^{q2}. Both fields must share the sample set.
Field power_product(const Field& u, const Field& v, double q1, double q2);

}  // namespace wolffkit
