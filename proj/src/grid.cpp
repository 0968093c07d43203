#include "wolffkit/grid.hpp"

#include <algorithm>
#include <numeric>

namespace wolffkit {

CartesianGrid::CartesianGrid(Point origin, std::vector<double> spacing, std::vector<int> shape)
    : origin_(std::move(origin)), spacing_(std::move(spacing)), shape_(std::move(shape)) {
    if (origin_.empty() || spacing_.size() != origin_.size() || shape_.size() != origin_.size())
        throw ParameterError("grid: origin, spacing and shape must have the same dimension");
    size_ = 1;
    cell_volume_ = 1.0;
    for (std::size_t d = 0; d < origin_.size(); ++d) {
        if (!(spacing_[d] > 0.0) || !std::isfinite(spacing_[d]))
            throw ParameterError("grid: spacing must be positive");
        if (shape_[d] < 1) throw ParameterError("grid: shape entries must be >= 1");
        size_ *= static_cast<std::size_t>(shape_[d]);
        cell_volume_ *= spacing_[d];
    }
}

CartesianGrid CartesianGrid::cube(const Point& center, double half_width, int n) {
    if (!(half_width > 0.0)) throw ParameterError("grid: half width must be positive");
    Point origin(center.size());
    for (std::size_t d = 0; d < center.size(); ++d) origin[d] = center[d] - half_width;
    return CartesianGrid(std::move(origin), std::vector<double>(center.size(), 2.0 * half_width / n),
                         std::vector<int>(center.size(), n));
}

bool CartesianGrid::isotropic() const {
    return std::all_of(spacing_.begin(), spacing_.end(), [&](double h) {
        return std::abs(h - spacing_[0]) <= 1e-12 * spacing_[0];
    });
}

double CartesianGrid::max_spacing() const { return *std::max_element(spacing_.begin(), spacing_.end()); }

void CartesianGrid::center(std::size_t flat, double* out) const {
    for (int d = dim() - 1; d >= 0; --d) {
        const auto n = static_cast<std::size_t>(shape_[d]);
        const auto i = flat % n;
        flat /= n;
        out[d] = origin_[d] + (static_cast<double>(i) + 0.5) * spacing_[d];
    }
}

Point CartesianGrid::center(std::size_t flat) const {
    Point p(dim());
    center(flat, p.data());
    return p;
}

std::vector<int> CartesianGrid::unflatten(std::size_t flat) const {
    std::vector<int> idx(dim());
    for (int d = dim() - 1; d >= 0; --d) {
        const auto n = static_cast<std::size_t>(shape_[d]);
        idx[d] = static_cast<int>(flat % n);
        flat /= n;
    }
    return idx;
}

std::size_t CartesianGrid::flatten(const std::vector<int>& idx) const {
    std::size_t flat = 0;
    for (int d = 0; d < dim(); ++d) flat = flat * shape_[d] + idx[d];
    return flat;
}

CartesianGrid CartesianGrid::refined(int factor) const {
    std::vector<double> h(spacing_);
    std::vector<int> n(shape_);
    for (std::size_t d = 0; d < h.size(); ++d) {
        h[d] /= factor;
        n[d] *= factor;
    }
    return CartesianGrid(origin_, std::move(h), std::move(n));
}

Point CartesianGrid::upper() const {
    Point u(origin_);
    for (std::size_t d = 0; d < u.size(); ++d) u[d] += spacing_[d] * shape_[d];
    return u;
}

RadialGrid::RadialGrid(Point center, std::vector<double> edges)
    : center_(std::move(center)), edges_(std::move(edges)) {
    if (center_.empty()) throw ParameterError("radial grid: empty center");
    if (edges_.size() < 2 || edges_.front() != 0.0)
        throw ParameterError("radial grid: need edges starting at 0");
    for (std::size_t i = 1; i < edges_.size(); ++i)
        if (!(edges_[i] > edges_[i - 1])) throw ParameterError("radial grid: edges must increase");
}

RadialGrid RadialGrid::graded(const Point& center, double r_max, int n, double r_first) {
    if (n < 2 || !(r_first > 0.0) || !(r_max > r_first))
        throw ParameterError("radial grid: need n >= 2 and 0 < r_first < r_max");
    std::vector<double> edges{0.0};
    const double ratio = std::pow(r_max / r_first, 1.0 / (n - 1));
    for (int i = 0; i < n; ++i) edges.push_back(r_first * std::pow(ratio, i));
    edges.back() = r_max;
    return RadialGrid(center, std::move(edges));
}

std::vector<double> RadialGrid::nodes() const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < size(); ++i) out[i] = node(i);
    return out;
}

double RadialGrid::shell_volume(std::size_t i) const {
    return unit_ball_volume(dim()) * (std::pow(edges_[i + 1], dim()) - std::pow(edges_[i], dim()));
}

Point RadialGrid::point(std::size_t i) const {
    Point p(center_);
    p[0] += node(i);
    return p;
}

RadialGrid RadialGrid::refined(int factor) const {
    std::vector<double> e{0.0};
    for (std::size_t i = 0; i + 1 < edges_.size(); ++i)
        for (int k = 1; k <= factor; ++k)
            e.push_back(edges_[i] + (edges_[i + 1] - edges_[i]) * k / factor);
    e.back() = edges_.back();
    return RadialGrid(center_, std::move(e));
}

int sample_dim(const SampleSet& s) {
    return std::visit([](const auto& v) -> int {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, ScatteredPoints>) return v.dim;
        else return v.dim();
    }, s);
}

std::size_t sample_count(const SampleSet& s) {
    return std::visit([](const auto& v) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, ScatteredPoints>) return v.points.size();
        else return v.size();
    }, s);
}

std::vector<Point> sample_points(const SampleSet& s) {
    std::vector<Point> out;
    if (const auto* sp = std::get_if<ScatteredPoints>(&s)) return sp->points;
    if (const auto* g = std::get_if<CartesianGrid>(&s)) {
        out.reserve(g->size());
        for (std::size_t i = 0; i < g->size(); ++i) out.push_back(g->center(i));
        return out;
    }
    const auto& r = std::get<RadialGrid>(s);
    out.reserve(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) out.push_back(r.point(i));
    return out;
}

std::vector<double> sample_weights(const SampleSet& s) {
    if (std::holds_alternative<ScatteredPoints>(s))
        throw ParameterError("scattered points carry no quadrature weights");
    if (const auto* g = std::get_if<CartesianGrid>(&s))
        return std::vector<double>(g->size(), g->cell_volume());
    const auto& r = std::get<RadialGrid>(s);
    std::vector<double> w(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) w[i] = r.shell_volume(i);
    return w;
}

double Field::sup() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, v);
    return m;
}

double Field::integral() const {
    const auto w = sample_weights(samples);
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) s += values[i] * w[i];
    return s;
}

Field power_product(const Field& u, const Field& v, double q1, double q2) {
    if (!(u.samples == v.samples) || u.values.size() != v.values.size())
        throw ParameterError("power_product: fields live on different sample sets");
    Field out{u.samples, std::vector<double>(u.values.size())};
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        const double a = q1 == 0.0 ? 1.0 : std::pow(u.values[i], q1);
        const double b = q2 == 0.0 ? 1.0 : std::pow(v.values[i], q2);
        out.values[i] = a * b;
    }
    return out;
}

}  // namespace wolffkit
