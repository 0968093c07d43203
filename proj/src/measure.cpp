#include "wolffkit/measure.hpp"

#include <algorithm>
#include <numeric>

namespace wolffkit {

namespace {

constexpr int kSubsamples = 4;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_dim(std::span<const double> x, int dim, const char* what) {
    if (static_cast<int>(x.size()) != dim)
        throw ParameterError(std::string(what) + ": point dimension does not match the measure");
}

// Index range [lo, hi) of cells on axis d whose slab meets [a, b].
std::pair<int, int> axis_range(const CartesianGrid& g, int d, double a, double b) {
    const double h = g.spacing()[d];
    const int lo = std::max(0, static_cast<int>(std::floor((a - g.origin()[d]) / h)));
    const int hi = std::min(g.shape()[d], static_cast<int>(std::floor((b - g.origin()[d]) / h)) + 1);
    return {lo, std::max(lo, hi)};
}

// Visit every flat index in the index box [lo, hi).
template <class F>
void for_each_in_box(const CartesianGrid& g, const std::vector<int>& lo, const std::vector<int>& hi, F&& f) {
    const int n = g.dim();
    for (int d = 0; d < n; ++d)
        if (lo[d] >= hi[d]) return;
    std::vector<int> idx(lo);
    while (true) {
        f(g.flatten(idx));
        int d = n - 1;
        while (d >= 0) {
            if (++idx[d] < hi[d]) break;
            idx[d] = lo[d];
            --d;
        }
        if (d < 0) break;
    }
}

double binom4(int j) {
    static constexpr double c[] = {1, 4, 6, 4, 1};
    return c[j];
}

double bump_moment(int dim, double t) {
    double s = 0.0;
    for (int j = 0; j <= 4; ++j)
        s += binom4(j) * ((j % 2) ? -1.0 : 1.0) * std::pow(t, 2 * j + dim) / (2 * j + dim);
    return s;
}

}  // namespace

AtomicMeasure::AtomicMeasure(int dim, std::vector<Point> points, std::vector<double> weights)
    : dim_(dim), points_(std::move(points)), weights_(std::move(weights)) {
    if (dim < 1) throw ParameterError("atomic measure: dimension must be >= 1");
    if (points_.size() != weights_.size()) throw ParameterError("atomic measure: points/weights size mismatch");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (static_cast<int>(points_[i].size()) != dim)
            throw ParameterError("atomic measure: point of wrong dimension");
        if (!is_finite_nonneg(weights_[i])) throw ParameterError("atomic measure: weights must be finite and >= 0");
    }
}

AtomicMeasure AtomicMeasure::dirac(const Point& at, double mass) {
    return AtomicMeasure(static_cast<int>(at.size()), {at}, {mass});
}

RadialMeasure::RadialMeasure(Point center, std::vector<double> radii, std::vector<double> cumulative)
    : center_(std::move(center)), radii_(std::move(radii)), cumulative_(std::move(cumulative)) {
    if (center_.empty()) throw ParameterError("radial measure: empty center");
    if (radii_.size() != cumulative_.size()) throw ParameterError("radial measure: radii/cumulative size mismatch");
    for (std::size_t i = 0; i < radii_.size(); ++i) {
        if (!(radii_[i] >= 0.0) || !std::isfinite(radii_[i])) throw ParameterError("radial measure: bad radius");
        if (!is_finite_nonneg(cumulative_[i])) throw ParameterError("radial measure: cumulative mass must be >= 0");
        if (i > 0 && !(radii_[i] > radii_[i - 1])) throw ParameterError("radial measure: radii must increase");
        if (i > 0 && cumulative_[i] < cumulative_[i - 1])
            throw ParameterError("radial measure: cumulative mass must be nondecreasing");
    }
}

double RadialMeasure::mass_within(double r) const {
    if (radii_.empty() || r < 0.0) return 0.0;
    const int n = dim();
    if (r < radii_[0]) return cumulative_[0] * std::pow(r / radii_[0], n);
    const auto it = std::upper_bound(radii_.begin(), radii_.end(), r);
    if (it == radii_.end()) return cumulative_.back();
    const std::size_t k = static_cast<std::size_t>(it - radii_.begin()) - 1;
    const double lo = std::pow(radii_[k], n), hi = std::pow(radii_[k + 1], n);
    return cumulative_[k] + (cumulative_[k + 1] - cumulative_[k]) * (std::pow(r, n) - lo) / (hi - lo);
}

std::vector<RadialMeasure::Segment> RadialMeasure::segments() const {
    std::vector<Segment> out;
    if (radii_.empty()) return out;
    const int n = dim();
    if (radii_[0] > 0.0) out.push_back({0.0, radii_[0], 0.0, cumulative_[0] / std::pow(radii_[0], n)});
    for (std::size_t k = 0; k + 1 < radii_.size(); ++k) {
        const double lo = std::pow(radii_[k], n), hi = std::pow(radii_[k + 1], n);
        const double b = (cumulative_[k + 1] - cumulative_[k]) / (hi - lo);
        out.push_back({radii_[k], radii_[k + 1], cumulative_[k] - b * lo, b});
    }
    return out;
}

double RadialMeasure::density_at(double r) const {
    for (const auto& s : segments())
        if (r >= s.lo && r < s.hi) return s.b / unit_ball_volume(dim());
    return 0.0;
}

GridDensity::GridDensity(CartesianGrid grid, std::vector<double> density)
    : grid_(std::move(grid)), density_(std::move(density)) {
    if (density_.size() != grid_.size()) throw ParameterError("grid density: value count does not match grid");
    for (double v : density_)
        if (!is_finite_nonneg(v)) throw ParameterError("grid density: densities must be finite and >= 0");
}

double SignedMeasure::total_variation() const { return total_mass(pos) + total_mass(neg); }

Measure SignedMeasure::abs() const {
    if (const auto* a = std::get_if<AtomicMeasure>(&pos)) {
        const auto* b = std::get_if<AtomicMeasure>(&neg);
        if (!b || b->dim() != a->dim()) throw ParameterError("signed measure: parts must share a representation");
        auto pts = a->points();
        auto w = a->weights();
        pts.insert(pts.end(), b->points().begin(), b->points().end());
        w.insert(w.end(), b->weights().begin(), b->weights().end());
        return AtomicMeasure(a->dim(), std::move(pts), std::move(w));
    }
    if (const auto* a = std::get_if<RadialMeasure>(&pos)) {
        const auto* b = std::get_if<RadialMeasure>(&neg);
        if (!b) throw ParameterError("signed measure: parts must share a representation");
        return add(*a, *b);
    }
    const auto& a = std::get<GridDensity>(pos);
    const auto* b = std::get_if<GridDensity>(&neg);
    if (!b || !(b->grid() == a.grid())) throw ParameterError("signed measure: parts must share a grid");
    std::vector<double> d(a.density());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += b->density()[i];
    return GridDensity(a.grid(), std::move(d));
}

int measure_dim(const Measure& mu) {
    return std::visit([](const auto& m) { return m.dim(); }, mu);
}

double total_mass(const Measure& mu) {
    return std::visit(overloaded{
                          [](const AtomicMeasure& m) {
                              return std::accumulate(m.weights().begin(), m.weights().end(), 0.0);
                          },
                          [](const RadialMeasure& m) { return m.total_mass(); },
                          [](const GridDensity& m) {
                              return std::accumulate(m.density().begin(), m.density().end(), 0.0) *
                                     m.grid().cell_volume();
                          },
                      },
                      mu);
}

bool has_atoms(const Measure& mu) {
    if (const auto* a = std::get_if<AtomicMeasure>(&mu))
        return std::any_of(a->weights().begin(), a->weights().end(), [](double w) { return w > 0.0; });
    if (const auto* r = std::get_if<RadialMeasure>(&mu)) return r->atom_mass() > 0.0;
    return false;
}

double cell_ball_fraction(const CartesianGrid& g, std::size_t flat, std::span<const double> x, double rho) {
    const int n = g.dim();
    std::vector<double> c(n);
    g.center(flat, c.data());
    double near2 = 0.0, far2 = 0.0;
    for (int d = 0; d < n; ++d) {
        const double hh = 0.5 * g.spacing()[d];
        const double off = std::abs(x[d] - c[d]);
        const double nd = std::max(0.0, off - hh);
        const double fd = off + hh;
        near2 += nd * nd;
        far2 += fd * fd;
    }
    const double r2 = rho * rho;
    if (far2 <= r2) return 1.0;
    if (near2 > r2) return 0.0;
    // Straddling cell: midpoint subsampling.
    std::vector<int> sub(n, 0);
    std::size_t inside = 0, total = 0;
    while (true) {
        double d2 = 0.0;
        for (int d = 0; d < n; ++d) {
            const double h = g.spacing()[d];
            const double y = c[d] - 0.5 * h + (sub[d] + 0.5) * h / kSubsamples;
            const double dd = y - x[d];
            d2 += dd * dd;
        }
        ++total;
        if (d2 <= r2) ++inside;
        int d = n - 1;
        while (d >= 0) {
            if (++sub[d] < kSubsamples) break;
            sub[d] = 0;
            --d;
        }
        if (d < 0) break;
    }
    return static_cast<double>(inside) / static_cast<double>(total);
}

double ball_mass(const Measure& mu, std::span<const double> x, double rho) {
    if (rho < 0.0) throw ParameterError("ball_mass: radius must be >= 0");
    check_dim(x, measure_dim(mu), "ball_mass");
    return std::visit(
        overloaded{
            [&](const AtomicMeasure& m) {
                // Same distances and summation order as distance_profile.
                std::vector<std::pair<double, double>> dw;
                for (std::size_t i = 0; i < m.size(); ++i) {
                    if (m.weights()[i] == 0.0) continue;
                    const double d = distance(m.points()[i], x);
                    if (d <= rho) dw.emplace_back(d, m.weights()[i]);
                }
                std::sort(dw.begin(), dw.end());
                double s = 0.0;
                for (const auto& p : dw) s += p.second;
                return s;
            },
            [&](const RadialMeasure& m) {
                const double a = distance(m.center(), x);
                if (a == 0.0) return m.mass_within(rho);
                const int n = m.dim();
                double s = 0.0;
                double start = a - rho;
                if (rho >= a) {
                    s = m.mass_within(rho - a);
                    start = rho - a;
                }
                const double stop = a + rho;
                const double omega = unit_ball_volume(n);
                for (const auto& seg : m.segments()) {
                    if (seg.hi <= start || seg.lo >= stop || seg.b == 0.0) continue;
                    const double lo = std::max(seg.lo, start), hi = std::min(seg.hi, stop);
                    const double v = ball_intersection_volume(n, hi, rho, a) - ball_intersection_volume(n, lo, rho, a);
                    s += seg.b / omega * v;
                }
                return std::min(s, m.total_mass());
            },
            [&](const GridDensity& m) {
                if (rho == 0.0) return 0.0;
                const auto& g = m.grid();
                std::vector<int> lo(g.dim()), hi(g.dim());
                for (int d = 0; d < g.dim(); ++d) std::tie(lo[d], hi[d]) = axis_range(g, d, x[d] - rho, x[d] + rho);
                double s = 0.0;
                for_each_in_box(g, lo, hi, [&](std::size_t flat) {
                    if (m.density()[flat] == 0.0) return;
                    s += m.density()[flat] * cell_ball_fraction(g, flat, x, rho);
                });
                return s * g.cell_volume();
            },
        },
        mu);
}

std::pair<Point, double> support_ball(const Measure& mu) {
    return std::visit(
        overloaded{
            [](const AtomicMeasure& m) -> std::pair<Point, double> {
                Point lo(m.dim(), kInf), hi(m.dim(), -kInf);
                bool any = false;
                for (std::size_t i = 0; i < m.size(); ++i) {
                    if (m.weights()[i] == 0.0) continue;
                    any = true;
                    for (int d = 0; d < m.dim(); ++d) {
                        lo[d] = std::min(lo[d], m.points()[i][d]);
                        hi[d] = std::max(hi[d], m.points()[i][d]);
                    }
                }
                if (!any) return {Point(m.dim(), 0.0), 0.0};
                Point c(m.dim());
                for (int d = 0; d < m.dim(); ++d) c[d] = 0.5 * (lo[d] + hi[d]);
                double r = 0.0;
                for (std::size_t i = 0; i < m.size(); ++i)
                    if (m.weights()[i] > 0.0) r = std::max(r, distance(c, m.points()[i]));
                return {c, r};
            },
            [](const RadialMeasure& m) -> std::pair<Point, double> {
                // Trailing flat segments carry no mass.
                double r = 0.0;
                const auto& rad = m.radii();
                const auto& cum = m.cumulative();
                for (std::size_t k = 0; k < rad.size(); ++k) {
                    if (cum[k] > (k == 0 ? 0.0 : cum[k - 1]) || (k == 0 && cum[0] > 0.0)) r = rad[k];
                }
                return {m.center(), r};
            },
            [](const GridDensity& m) -> std::pair<Point, double> {
                const auto& g = m.grid();
                Point lo(g.dim(), kInf), hi(g.dim(), -kInf);
                bool any = false;
                std::vector<double> c(g.dim());
                for (std::size_t i = 0; i < g.size(); ++i) {
                    if (m.density()[i] == 0.0) continue;
                    any = true;
                    g.center(i, c.data());
                    for (int d = 0; d < g.dim(); ++d) {
                        lo[d] = std::min(lo[d], c[d] - 0.5 * g.spacing()[d]);
                        hi[d] = std::max(hi[d], c[d] + 0.5 * g.spacing()[d]);
                    }
                }
                if (!any) return {Point(g.dim(), 0.0), 0.0};
                Point mid(g.dim());
                double r2 = 0.0;
                for (int d = 0; d < g.dim(); ++d) {
                    mid[d] = 0.5 * (lo[d] + hi[d]);
                    r2 += 0.25 * (hi[d] - lo[d]) * (hi[d] - lo[d]);
                }
                return {mid, std::sqrt(r2)};
            },
        },
        mu);
}

double support_diameter(const Measure& mu) { return 2.0 * support_ball(mu).second; }

double farthest_support_distance(const Measure& mu, std::span<const double> x) {
    if (const auto* a = std::get_if<AtomicMeasure>(&mu)) {
        double r = 0.0;
        for (std::size_t i = 0; i < a->size(); ++i)
            if (a->weights()[i] > 0.0) r = std::max(r, distance(a->points()[i], x));
        return r;
    }
    const auto [c, r] = support_ball(mu);
    return distance(c, x) + r;
}

std::vector<std::pair<double, double>> distance_profile(const Measure& mu, std::span<const double> x) {
    check_dim(x, measure_dim(mu), "distance_profile");
    std::vector<std::pair<double, double>> out;
    if (const auto* a = std::get_if<AtomicMeasure>(&mu)) {
        std::vector<std::pair<double, double>> dw;
        dw.reserve(a->size());
        for (std::size_t i = 0; i < a->size(); ++i)
            if (a->weights()[i] > 0.0) dw.emplace_back(distance(a->points()[i], x), a->weights()[i]);
        std::sort(dw.begin(), dw.end());
        double cum = 0.0;
        for (const auto& [d, w] : dw) {
            cum += w;
            if (!out.empty() && out.back().first == d) out.back().second = cum;
            else out.emplace_back(d, cum);
        }
        return out;
    }
    if (const auto* r = std::get_if<RadialMeasure>(&mu)) {
        if (distance(r->center(), x) != 0.0)
            throw ParameterError("distance_profile: radial measures only at their center");
        for (std::size_t k = 0; k < r->radii().size(); ++k) out.emplace_back(r->radii()[k], r->cumulative()[k]);
        return out;
    }
    throw ParameterError("distance_profile: unsupported for grid densities (use the quadrature path)");
}

namespace {

GridDensity radial_to_grid(const RadialMeasure& m, const CartesianGrid& g) {
    std::vector<double> dens(g.size(), 0.0);
    std::vector<double> c(g.dim());
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.center(i, c.data());
        dens[i] = m.density_at(distance(c, m.center()));
    }
    return GridDensity(g, std::move(dens));
}

}  // namespace

Measure restrict_to_ball(const Measure& mu, std::span<const double> center, double t, int cells) {
    if (!(t > 0.0)) throw ParameterError("restrict: radius must be positive");
    if (cells < 1) throw ParameterError("restrict: cells must be >= 1");
    check_dim(center, measure_dim(mu), "restrict");
    if (const auto* a = std::get_if<AtomicMeasure>(&mu)) {
        // Kept atoms ordered as in ball_mass so total_mass matches it exactly.
        std::vector<std::pair<std::pair<double, double>, std::size_t>> keep;
        for (std::size_t i = 0; i < a->size(); ++i) {
            const double d = distance(a->points()[i], center);
            if (d <= t && a->weights()[i] > 0.0) keep.push_back({{d, a->weights()[i]}, i});
        }
        std::sort(keep.begin(), keep.end());
        std::vector<Point> pts;
        std::vector<double> w;
        for (const auto& k : keep) {
            pts.push_back(a->points()[k.second]);
            w.push_back(a->weights()[k.second]);
        }
        return AtomicMeasure(a->dim(), std::move(pts), std::move(w));
    }
    if (const auto* r = std::get_if<RadialMeasure>(&mu)) {
        const double a = distance(r->center(), center);
        if (a == 0.0) {
            std::vector<double> rad, cum;
            for (std::size_t k = 0; k < r->radii().size() && r->radii()[k] < t; ++k) {
                rad.push_back(r->radii()[k]);
                cum.push_back(r->cumulative()[k]);
            }
            rad.push_back(t);
            cum.push_back(r->mass_within(t));
            return RadialMeasure(r->center(), std::move(rad), std::move(cum));
        }
        // Off-center: no longer radial. Resample on a grid around the ball and
        // renormalize to the exact ball mass.
        const double target = ball_mass(mu, center, t);
        const auto g = CartesianGrid::cube(Point(center.begin(), center.end()), t, cells);
        auto dens = radial_to_grid(*r, g).density();
        double s = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            dens[i] *= cell_ball_fraction(g, i, center, t);
            s += dens[i];
        }
        s *= g.cell_volume();
        if (s > 0.0)
            for (auto& v : dens) v *= target / s;
        return GridDensity(g, std::move(dens));
    }
    const auto& gd = std::get<GridDensity>(mu);
    std::vector<double> dens(gd.density());
    for (std::size_t i = 0; i < dens.size(); ++i)
        if (dens[i] != 0.0) dens[i] *= cell_ball_fraction(gd.grid(), i, center, t);
    return GridDensity(gd.grid(), std::move(dens));
}

Measure scaled(const Measure& mu, double lambda) {
    if (!is_finite_nonneg(lambda)) throw ParameterError("scaled: factor must be finite and >= 0");
    return std::visit(overloaded{
                          [&](const AtomicMeasure& m) -> Measure {
                              auto w = m.weights();
                              for (auto& v : w) v *= lambda;
                              return AtomicMeasure(m.dim(), m.points(), std::move(w));
                          },
                          [&](const RadialMeasure& m) -> Measure {
                              auto c = m.cumulative();
                              for (auto& v : c) v *= lambda;
                              return RadialMeasure(m.center(), m.radii(), std::move(c));
                          },
                          [&](const GridDensity& m) -> Measure {
                              auto d = m.density();
                              for (auto& v : d) v *= lambda;
                              return GridDensity(m.grid(), std::move(d));
                          },
                      },
                      mu);
}

RadialMeasure add(const RadialMeasure& a, const RadialMeasure& b) {
    if (a.dim() != b.dim() || distance(a.center(), b.center()) != 0.0)
        throw ParameterError("radial add: measures must share their center");
    std::vector<double> rad;
    std::merge(a.radii().begin(), a.radii().end(), b.radii().begin(), b.radii().end(), std::back_inserter(rad));
    rad.erase(std::unique(rad.begin(), rad.end()), rad.end());
    std::vector<double> cum(rad.size());
    for (std::size_t k = 0; k < rad.size(); ++k) cum[k] = a.mass_within(rad[k]) + b.mass_within(rad[k]);
    for (std::size_t k = 1; k < cum.size(); ++k) cum[k] = std::max(cum[k], cum[k - 1]);
    return RadialMeasure(a.center(), std::move(rad), std::move(cum));
}

double bump_value(int dim, double h, double r) {
    if (r >= h) return 0.0;
    const double t = r / h;
    const double c = 1.0 / (unit_sphere_area(dim) * std::pow(h, dim) * bump_moment(dim, 1.0));
    return c * std::pow(1.0 - t * t, 4);
}

double bump_cumulative(int dim, double h, double r) {
    const double t = std::min(r / h, 1.0);
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return bump_moment(dim, t) / bump_moment(dim, 1.0);
}

GridDensity mollify(const Measure& mu, double bandwidth, const CartesianGrid& grid) {
    if (!(bandwidth > 0.0)) throw ParameterError("mollify: bandwidth must be positive");
    if (grid.max_spacing() > bandwidth)
        throw NumericalError("mollify: grid spacing exceeds the bandwidth (under-resolved bump)");
    const int n = grid.dim();
    if (measure_dim(mu) != n) throw ParameterError("mollify: grid dimension does not match the measure");

    // Source masses as weighted points.
    std::vector<Point> pts;
    std::vector<double> w;
    if (const auto* a = std::get_if<AtomicMeasure>(&mu)) {
        pts = a->points();
        w = a->weights();
    } else {
        GridDensity src = std::holds_alternative<GridDensity>(mu) ? std::get<GridDensity>(mu)
                                                                  : radial_to_grid(std::get<RadialMeasure>(mu), grid);
        if (const auto* r = std::get_if<RadialMeasure>(&mu)) {
            // Renormalize the sampled radial density to its exact mass.
            double s = 0.0;
            for (double v : src.density()) s += v;
            s *= src.grid().cell_volume();
            auto d = src.density();
            if (s > 0.0)
                for (auto& v : d) v *= (r->total_mass() - r->atom_mass()) / s;
            src = GridDensity(src.grid(), std::move(d));
            if (r->atom_mass() > 0.0) {
                pts.push_back(r->center());
                w.push_back(r->atom_mass());
            }
        }
        for (std::size_t i = 0; i < src.grid().size(); ++i) {
            if (src.density()[i] == 0.0) continue;
            pts.push_back(src.grid().center(i));
            w.push_back(src.cell_mass(i));
        }
    }

    const auto& rule = gauss_legendre(3);
    const Point glo = grid.lower(), ghi = grid.upper();
    std::vector<double> dens(grid.size(), 0.0);
    std::vector<double> c(n), y(n);
    std::vector<std::pair<std::size_t, double>> local;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        if (w[k] == 0.0) continue;
        const Point& at = pts[k];
        for (int d = 0; d < n; ++d)
            if (at[d] - bandwidth < glo[d] - 1e-12 || at[d] + bandwidth > ghi[d] + 1e-12)
                throw ParameterError("mollify: grid must cover supp mu expanded by the bandwidth");
        std::vector<int> lo(n), hi(n);
        for (int d = 0; d < n; ++d) std::tie(lo[d], hi[d]) = axis_range(grid, d, at[d] - bandwidth, at[d] + bandwidth);
        local.clear();
        double sum = 0.0;
        for_each_in_box(grid, lo, hi, [&](std::size_t flat) {
            grid.center(flat, c.data());
            // Tensor Gauss rule over the cell.
            std::vector<int> sub(n, 0);
            double acc = 0.0;
            while (true) {
                double wt = 1.0;
                for (int d = 0; d < n; ++d) {
                    const double h = grid.spacing()[d];
                    y[d] = c[d] + 0.5 * h * rule.nodes[sub[d]];
                    wt *= 0.5 * rule.weights[sub[d]];
                }
                acc += wt * bump_value(n, bandwidth, distance(y, at));
                int d = n - 1;
                while (d >= 0) {
                    if (++sub[d] < 3) break;
                    sub[d] = 0;
                    --d;
                }
                if (d < 0) break;
            }
            if (acc > 0.0) {
                local.emplace_back(flat, acc);
                sum += acc;
            }
        });
        if (sum <= 0.0) {
            // Bump narrower than every Gauss point spacing: the grid check above
            // makes this unreachable unless h is tiny relative to round-off.
            throw NumericalError("mollify: bump not resolved by the grid");
        }
        for (const auto& [flat, acc] : local) dens[flat] += (acc / sum) * w[k] / grid.cell_volume();
    }
    return GridDensity(grid, std::move(dens));
}

RadialMeasure mollified_dirac_radial(const Point& center, double mass, double bandwidth, int pieces) {
    if (!(bandwidth > 0.0) || pieces < 1) throw ParameterError("mollified dirac: bad bandwidth or piece count");
    if (!is_finite_nonneg(mass)) throw ParameterError("mollified dirac: mass must be >= 0");
    const int n = static_cast<int>(center.size());
    std::vector<double> rad(pieces), cum(pieces);
    for (int k = 0; k < pieces; ++k) {
        rad[k] = bandwidth * (k + 1) / pieces;
        cum[k] = mass * bump_cumulative(n, bandwidth, rad[k]);
    }
    cum.back() = mass;
    return RadialMeasure(center, std::move(rad), std::move(cum));
}

RadialMeasure radial_measure_from_density(const RadialGrid& grid, std::span<const double> density) {
    if (density.size() != grid.size()) throw ParameterError("radial density: value count does not match grid");
    std::vector<double> rad(grid.size()), cum(grid.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!is_finite_nonneg(density[i])) throw NumericalError("radial density: values must be finite and >= 0");
        acc += density[i] * grid.shell_volume(i);
        rad[i] = grid.edges()[i + 1];
        cum[i] = acc;
    }
    return RadialMeasure(grid.center(), std::move(rad), std::move(cum));
}

}  // namespace wolffkit
