#include "wolffkit/potential.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>

#include "wolffkit/parallel.hpp"

namespace wolffkit {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

struct Form {
    int N;
    double a;
    double e;
    double R;
    bool maximal;
};

Form form_of(const PotentialSpec& s) {
    s.validate();
    return {s.N, s.order(), s.power(), s.R, s.kind == PotentialKind::frac_maximal};
}

// int_lo^hi r^{-c-1} dr, hi may be infinite.
double power_tail(double lo, double hi, double c) {
    if (!(hi > lo)) return 0.0;
    if (!std::isfinite(hi)) return std::pow(lo, -c) / c;
    return std::pow(lo, -c) * -std::expm1(-c * std::log(hi / lo)) / c;
}

std::vector<double> make_nodes(double r_lo, double r_hi, const QuadratureConfig& quad) {
    if (!(r_hi > r_lo)) r_hi = 10.0 * r_lo;
    int per_decade = quad.nodes_per_decade;
    const double decades = std::log10(r_hi / r_lo);
    if (decades * per_decade + 1 > quad.max_nodes)
        per_decade = std::max(1, static_cast<int>((quad.max_nodes - 1) / decades));
    return log_nodes(r_lo, r_hi, per_decade);
}

double integrate(const Form& f, std::span<const double> nodes, std::span<const double> m,
                 const std::function<double(double)>& refine, const QuadratureConfig& quad) {
    if (f.maximal) return detail::node_maximal(nodes, m, f.N, f.a, f.R);
    return detail::node_power_integral(nodes, m, f.N, f.a, f.e, f.R, refine, quad);
}

// ---------------------------------------------------------------------------
// Radial sources: piecewise-constant densities on annuli [edges[k], edges[k+1])
// around a center, plus an optional central atom.

struct RadialSource {
    int N = 0;
    std::vector<double> edges;

    // Segments fully inside B_rho(x) for |x - center| = a, and partial
    // volume coefficients |annulus_k ∩ B_rho(x)|.
    std::size_t terms(double a, double rho, std::vector<std::pair<std::uint32_t, double>>& partial) const {
        partial.clear();
        const auto first = edges.begin() + 1;
        std::size_t kfull = 0;
        if (rho - a > 0.0) kfull = static_cast<std::size_t>(std::upper_bound(first, edges.end(), rho - a) - first);
        const auto k_start =
            static_cast<std::size_t>(std::upper_bound(first, edges.end(), std::abs(a - rho)) - first);
        const std::size_t K = edges.size() - 1;
        double prev = -1.0;
        for (std::size_t k = std::max(kfull, k_start); k < K && edges[k] < rho + a; ++k) {
            const double lo = prev >= 0.0 ? prev : ball_intersection_volume(N, edges[k], rho, a);
            const double hi = ball_intersection_volume(N, edges[k + 1], rho, a);
            prev = hi;
            if (hi > lo) partial.emplace_back(static_cast<std::uint32_t>(k), hi - lo);
        }
        return kfull;
    }
};

std::vector<double> radial_prefix(const RadialSource& src, std::span<const double> dens) {
    std::vector<double> prefix(dens.size() + 1, 0.0);
    const double omega = unit_ball_volume(src.N);
    for (std::size_t k = 0; k < dens.size(); ++k)
        prefix[k + 1] =
            prefix[k] + dens[k] * omega * (std::pow(src.edges[k + 1], src.N) - std::pow(src.edges[k], src.N));
    return prefix;
}

class RadialOperator {
public:
    RadialOperator(RadialSource src, std::vector<double> distances, const QuadratureConfig& quad)
        : src_(std::move(src)), quad_(quad) {
        // Group equal distances.
        order_.resize(distances.size());
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        std::sort(order_.begin(), order_.end(), [&](auto i, auto j) { return distances[i] < distances[j]; });
        slot_.resize(distances.size());
        for (std::size_t idx : order_) {
            const double d = distances[idx];
            if (unique_.empty() || d > unique_.back() * (1.0 + 1e-13) + 1e-300) unique_.push_back(d);
            slot_[idx] = unique_.size() - 1;
        }
        const double outer = src_.edges.back();
        const double far = unique_.empty() ? outer : unique_.back() + outer;
        nodes_ = make_nodes(quad.r_min_factor * 2.0 * outer, far, quad);

        rows_.resize(unique_.size());
        parallel_for(unique_.size(), [&](std::size_t u) {
            Row& row = rows_[u];
            const double a = unique_[u];
            std::vector<std::pair<std::uint32_t, double>> partial;
            row.offsets.push_back(0);
            for (std::size_t j = 0; j < nodes_.size(); ++j) {
                row.kfull.push_back(static_cast<std::uint32_t>(src_.terms(a, nodes_[j], partial)));
                row.partial.insert(row.partial.end(), partial.begin(), partial.end());
                row.offsets.push_back(row.partial.size());
                if (nodes_[j] >= a + outer) break;
            }
        });
    }

    std::size_t unique_count() const { return unique_.size(); }
    double unique_distance(std::size_t u) const { return unique_[u]; }
    std::size_t slot(std::size_t i) const { return slot_[i]; }
    std::size_t size() const { return slot_.size(); }

    // Per unique distance, one value per form.
    std::vector<std::vector<double>> apply_unique(std::span<const double> dens, double atom,
                                                  std::span<const Form> forms) const {
        if (dens.size() + 1 != src_.edges.size()) throw ParameterError("radial operator: density size mismatch");
        const auto prefix = radial_prefix(src_, dens);
        std::vector<std::vector<double>> out(forms.size(), std::vector<double>(unique_.size(), 0.0));
        if (prefix.back() + atom == 0.0) return out;
        parallel_for(unique_.size(), [&](std::size_t u) {
            const Row& row = rows_[u];
            const double a = unique_[u];
            const std::size_t J = row.kfull.size();
            std::vector<double> m(J);
            for (std::size_t j = 0; j < J; ++j) {
                double s = prefix[row.kfull[j]] + (a <= nodes_[j] ? atom : 0.0);
                for (std::size_t t = row.offsets[j]; t < row.offsets[j + 1]; ++t)
                    s += dens[row.partial[t].first] * row.partial[t].second;
                m[j] = std::clamp(s, 0.0, prefix.back() + atom);
            }
            std::vector<std::pair<std::uint32_t, double>> partial;
            const auto refine = [&](double rho) {
                const std::size_t kfull = src_.terms(a, rho, partial);
                double s = prefix[kfull] + (a <= rho ? atom : 0.0);
                for (const auto& [k, c] : partial) s += dens[k] * c;
                return std::clamp(s, 0.0, prefix.back() + atom);
            };
            const std::span<const double> nodes(nodes_.data(), J);
            for (std::size_t f = 0; f < forms.size(); ++f) out[f][u] = integrate(forms[f], nodes, m, refine, quad_);
        });
        return out;
    }

    std::vector<std::vector<double>> apply(std::span<const double> dens, double atom,
                                           std::span<const Form> forms) const {
        const auto uniq = apply_unique(dens, atom, forms);
        std::vector<std::vector<double>> out(forms.size(), std::vector<double>(slot_.size()));
        for (std::size_t f = 0; f < forms.size(); ++f)
            for (std::size_t i = 0; i < slot_.size(); ++i) out[f][i] = uniq[f][slot_[i]];
        return out;
    }

private:
    struct Row {
        std::vector<std::uint32_t> kfull;
        std::vector<std::size_t> offsets;
        std::vector<std::pair<std::uint32_t, double>> partial;
    };
    RadialSource src_;
    QuadratureConfig quad_;
    std::vector<std::size_t> order_;
    std::vector<std::size_t> slot_;
    std::vector<double> unique_;
    std::vector<double> nodes_;
    std::vector<Row> rows_;
};

// Radial measure -> annulus densities + atom.
RadialSource radial_source_of(const RadialMeasure& mu, std::vector<double>& dens, double& atom) {
    RadialSource src;
    src.N = mu.dim();
    src.edges = {0.0};
    dens.clear();
    atom = mu.atom_mass();
    const double omega = unit_ball_volume(src.N);
    for (const auto& s : mu.segments()) {
        if (s.hi <= s.lo) continue;
        src.edges.push_back(s.hi);
        dens.push_back(s.b / omega);
    }
    if (src.edges.size() == 1) {
        // Pure atom (or empty): one dummy annulus.
        src.edges.push_back(mu.outer_radius() > 0.0 ? mu.outer_radius() : 1.0);
        dens.push_back(0.0);
    }
    return src;
}

RadialSource radial_source_of(const RadialGrid& g) {
    RadialSource src;
    src.N = g.dim();
    src.edges = g.edges();
    return src;
}

// ---------------------------------------------------------------------------
// Cartesian sources: each cell is treated as a uniform ball of the cell's
// volume centered at the cell center, so mu(B_rho(x)) is a sum of lens
// volumes. On evaluation points whose offsets to cell centers are multiples
// of h/2, squared distances are integers in units of (h/2)^2 and the profile
// is assembled from a histogram over those integers.

class CartesianOperator {
public:
    CartesianOperator(CartesianGrid grid, std::vector<Point> points, const QuadratureConfig& quad)
        : grid_(std::move(grid)), points_(std::move(points)), quad_(quad) {
        const int n = grid_.dim();
        vol_ = grid_.cell_volume();
        radius_ = std::pow(vol_ / unit_ball_volume(n), 1.0 / n);
        lattice_ok_ = grid_.isotropic();
        unit_ = 0.5 * grid_.spacing()[0];

        double diag2 = 0.0;
        for (int d = 0; d < n; ++d) diag2 += std::pow(grid_.spacing()[d] * grid_.shape()[d], 2);
        const Point lo = grid_.lower(), hi = grid_.upper();
        double far = 0.0;
        offsets_.assign(points_.size() * n, 0);
        lattice_.assign(points_.size(), 0);
        kmax_.assign(points_.size(), 0);
        std::int64_t kcap = 0;
        for (std::size_t i = 0; i < points_.size(); ++i) {
            const Point& x = points_[i];
            if (static_cast<int>(x.size()) != n) throw ParameterError("potential: point dimension mismatch");
            double f2 = 0.0;
            for (int d = 0; d < n; ++d) {
                const double e = std::max(std::abs(x[d] - lo[d]), std::abs(x[d] - hi[d]));
                f2 += e * e;
            }
            far = std::max(far, std::sqrt(f2) + radius_);
            if (!lattice_ok_) continue;
            bool on = true;
            std::int64_t k = 0;
            for (int d = 0; d < n && on; ++d) {
                const double o = (x[d] - (grid_.origin()[d] + 0.5 * grid_.spacing()[d])) / unit_;
                const double r = std::round(o);
                if (std::abs(o - r) > 1e-9 * std::max(1.0, std::abs(o)) || std::abs(r) > 1e7) on = false;
                const auto o0 = static_cast<std::int64_t>(r);
                offsets_[i * n + d] = o0;
                const std::int64_t o_last = o0 - 2 * (grid_.shape()[d] - 1);
                k += std::max(o0 * o0, o_last * o_last);
            }
            if (on) {
                lattice_[i] = 1;
                kmax_[i] = k;
                kcap = std::max(kcap, k);
            }
        }
        nodes_ = make_nodes(quad.r_min_factor * std::sqrt(diag2), std::max(far, radius_), quad);

        if (kcap > 0 || std::any_of(lattice_.begin(), lattice_.end(), [](char c) { return c != 0; })) {
            // Per node: cells with k <= kfull are fully inside; k in (kfull, kend] partial.
            kfull_.resize(nodes_.size());
            toff_.assign(nodes_.size() + 1, 0);
            for (std::size_t j = 0; j < nodes_.size(); ++j) {
                const double rho = nodes_[j];
                std::int64_t kf = -1;
                if (rho >= radius_) {
                    kf = static_cast<std::int64_t>(std::floor(std::pow((rho - radius_) / unit_, 2)));
                    while (kf >= 0 && unit_ * std::sqrt(static_cast<double>(kf)) + radius_ > rho) --kf;
                    while (unit_ * std::sqrt(static_cast<double>(kf + 1)) + radius_ <= rho) ++kf;
                }
                kf = std::min(kf, kcap);
                kfull_[j] = kf;
                for (std::int64_t k = kf + 1; k <= kcap; ++k) {
                    const double d = unit_ * std::sqrt(static_cast<double>(k));
                    if (d >= rho + radius_) break;
                    frac_.push_back(ball_intersection_volume(n, radius_, rho, d) / vol_);
                }
                toff_[j + 1] = frac_.size();
            }
        }
    }

    std::size_t size() const { return points_.size(); }

    std::vector<std::vector<double>> apply(std::span<const double> density, std::span<const Form> forms) const {
        if (density.size() != grid_.size()) throw ParameterError("potential: density size does not match the grid");
        std::vector<std::vector<double>> out(forms.size(), std::vector<double>(points_.size(), 0.0));
        std::vector<double> mass(density.size());
        double total = 0.0;
        for (std::size_t c = 0; c < mass.size(); ++c) {
            if (!is_finite_nonneg(density[c])) throw NumericalError("potential: density must be finite and >= 0");
            mass[c] = density[c] * vol_;
            total += mass[c];
        }
        if (total == 0.0) return out;
        parallel_for(points_.size(), [&](std::size_t i) {
            std::vector<double> m;
            std::function<double(double)> refine;
            std::vector<double> hist, prefix;
            std::vector<std::pair<double, double>> sorted;
            std::vector<double> sorted_prefix;
            std::size_t J = 0;
            if (lattice_[i]) {
                J = lattice_profile(i, mass, hist, prefix, m);
                refine = [&](double rho) { return lattice_mass(hist, prefix, rho, total); };
            } else {
                sorted_profile(points_[i], mass, sorted, sorted_prefix);
                refine = [&](double rho) { return sorted_mass(sorted, sorted_prefix, rho); };
                const double far = sorted.empty() ? 0.0 : sorted.back().first + radius_;
                for (J = 0; J < nodes_.size();) {
                    m.push_back(refine(nodes_[J]));
                    ++J;
                    if (nodes_[J - 1] >= far) break;
                }
            }
            const std::span<const double> nodes(nodes_.data(), J);
            for (std::size_t f = 0; f < forms.size(); ++f) out[f][i] = integrate(forms[f], nodes, m, refine, quad_);
        });
        return out;
    }

private:
    std::size_t lattice_profile(std::size_t i, std::span<const double> mass, std::vector<double>& hist,
                                std::vector<double>& prefix, std::vector<double>& m) const {
        const int n = grid_.dim();
        const std::int64_t kmax = kmax_[i];
        hist.assign(static_cast<std::size_t>(kmax) + 1, 0.0);
        std::vector<std::vector<std::int64_t>> sq(n);
        for (int d = 0; d < n; ++d) {
            sq[d].resize(grid_.shape()[d]);
            for (int c = 0; c < grid_.shape()[d]; ++c) {
                const std::int64_t o = offsets_[i * n + d] - 2 * c;
                sq[d][c] = o * o;
            }
        }
        // Odometer over all cells, last axis innermost.
        std::vector<int> idx(n, 0);
        std::vector<std::int64_t> partial(n + 1, 0);
        const int inner = grid_.shape()[n - 1];
        std::size_t flat = 0;
        while (true) {
            for (int d = 0; d + 1 < n; ++d) partial[d + 1] = partial[d] + sq[d][idx[d]];
            const std::int64_t base = partial[n - 1];
            const auto& last = sq[n - 1];
            for (int c = 0; c < inner; ++c, ++flat)
                if (mass[flat] != 0.0) hist[static_cast<std::size_t>(base + last[c])] += mass[flat];
            int d = n - 2;
            while (d >= 0) {
                if (++idx[d] < grid_.shape()[d]) break;
                idx[d] = 0;
                --d;
            }
            if (d < 0) break;
        }
        prefix.resize(hist.size());
        double acc = 0.0;
        for (std::size_t k = 0; k < hist.size(); ++k) prefix[k] = (acc += hist[k]);
        const double total = acc;
        m.clear();
        std::size_t J = 0;
        for (; J < nodes_.size();) {
            const std::int64_t kf = kfull_[J];
            double s = kf >= 0 ? prefix[static_cast<std::size_t>(std::min(kf, kmax))] : 0.0;
            if (kf < kmax) {
                const std::size_t begin = toff_[J];
                const std::size_t count = std::min<std::size_t>(toff_[J + 1] - begin, kmax - kf);
                for (std::size_t t = 0; t < count; ++t) {
                    const double h = hist[static_cast<std::size_t>(kf + 1) + t];
                    if (h != 0.0) s += h * frac_[begin + t];
                }
            }
            m.push_back(std::min(s, total));
            ++J;
            if (kf >= kmax) break;
        }
        return J;
    }

    double lattice_mass(const std::vector<double>& hist, const std::vector<double>& prefix, double rho,
                        double total) const {
        const int n = grid_.dim();
        const auto kmax = static_cast<std::int64_t>(hist.size()) - 1;
        std::int64_t kf = -1;
        if (rho >= radius_) {
            kf = std::min(kmax, static_cast<std::int64_t>(std::floor(std::pow((rho - radius_) / unit_, 2))));
            while (kf >= 0 && unit_ * std::sqrt(static_cast<double>(kf)) + radius_ > rho) --kf;
            while (kf < kmax && unit_ * std::sqrt(static_cast<double>(kf + 1)) + radius_ <= rho) ++kf;
        }
        double s = kf >= 0 ? prefix[static_cast<std::size_t>(kf)] : 0.0;
        for (std::int64_t k = kf + 1; k <= kmax; ++k) {
            const double d = unit_ * std::sqrt(static_cast<double>(k));
            if (d >= rho + radius_) break;
            const double h = hist[static_cast<std::size_t>(k)];
            if (h != 0.0) s += h * ball_intersection_volume(n, radius_, rho, d) / vol_;
        }
        return std::min(s, total);
    }

    void sorted_profile(const Point& x, std::span<const double> mass, std::vector<std::pair<double, double>>& sorted,
                        std::vector<double>& prefix) const {
        std::vector<double> c(grid_.dim());
        sorted.clear();
        for (std::size_t k = 0; k < mass.size(); ++k) {
            if (mass[k] == 0.0) continue;
            grid_.center(k, c.data());
            sorted.emplace_back(distance(c, x), mass[k]);
        }
        std::sort(sorted.begin(), sorted.end());
        prefix.assign(sorted.size() + 1, 0.0);
        for (std::size_t k = 0; k < sorted.size(); ++k) prefix[k + 1] = prefix[k] + sorted[k].second;
    }

    double sorted_mass(const std::vector<std::pair<double, double>>& sorted, const std::vector<double>& prefix,
                       double rho) const {
        const auto full = std::upper_bound(sorted.begin(), sorted.end(), rho - radius_,
                                           [](double v, const auto& p) { return v < p.first; });
        double s = prefix[static_cast<std::size_t>(full - sorted.begin())];
        for (auto it = full; it != sorted.end() && it->first < rho + radius_; ++it)
            s += it->second * ball_intersection_volume(grid_.dim(), radius_, rho, it->first) / vol_;
        return std::min(s, prefix.back());
    }

    CartesianGrid grid_;
    std::vector<Point> points_;
    QuadratureConfig quad_;
    double vol_ = 0.0, radius_ = 0.0, unit_ = 0.0;
    bool lattice_ok_ = false;
    std::vector<std::int64_t> offsets_;
    std::vector<char> lattice_;
    std::vector<std::int64_t> kmax_;
    std::vector<double> nodes_;
    std::vector<std::int64_t> kfull_;
    std::vector<std::size_t> toff_;
    std::vector<double> frac_;
};

// ---------------------------------------------------------------------------
// Exact integration for radial measures at their center.

double segment_integral(double A, double B, double lo, double hi, int N, double a, double e) {
    if (!(hi > lo)) return 0.0;
    const double c = (N - a) * e;
    if (B == 0.0) {
        if (A <= 0.0) return 0.0;
        if (lo == 0.0) return kInf;
        return std::pow(A, e) * power_tail(lo, hi, c);
    }
    if (A == 0.0) {
        const double ae = a * e;
        return std::pow(B, e) * (std::pow(hi, ae) - std::pow(lo, ae)) / ae;
    }
    if (lo == 0.0) return A > 0.0 ? kInf : 0.0;
    if (e == 1.0) return A * power_tail(lo, hi, N - a) + B * (std::pow(hi, a) - std::pow(lo, a)) / a;
    const auto& rule = gauss_legendre(20);
    const double tl = std::log(lo), th = std::log(hi);
    const int panels = std::max(1, static_cast<int>(std::ceil((th - tl) / 0.05)));
    const double w = (th - tl) / panels;
    double s = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double mid = tl + (k + 0.5) * w;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double t = mid + 0.5 * w * rule.nodes[q];
            const double mass = std::max(0.0, A + B * std::exp(N * t));
            s += 0.5 * w * rule.weights[q] * std::pow(mass, e) * std::exp(-c * t);
        }
    }
    return s;
}

double radial_center_integral(const RadialMeasure& mu, const Form& f) {
    if (mu.total_mass() == 0.0) return 0.0;
    double s = 0.0;
    for (const auto& seg : mu.segments()) {
        if (seg.lo >= f.R) break;
        s += segment_integral(seg.a, seg.b, seg.lo, std::min(seg.hi, f.R), f.N, f.a, f.e);
        if (!std::isfinite(s)) return kInf;
    }
    if (mu.atom_mass() > 0.0 && (mu.radii().size() == 1)) return kInf;
    const double outer = mu.outer_radius();
    if (f.R > outer) s += std::pow(mu.total_mass(), f.e) * power_tail(outer, f.R, (f.N - f.a) * f.e);
    return s;
}

double radial_center_maximal(const RadialMeasure& mu, const Form& f) {
    if (mu.total_mass() == 0.0) return 0.0;
    if (mu.atom_mass() > 0.0) return kInf;
    const int N = f.N;
    const double a = f.a;
    auto value = [&](double A, double B, double r) { return (A + B * std::pow(r, N)) / std::pow(r, N - a); };
    double best = 0.0;
    for (const auto& seg : mu.segments()) {
        if (seg.lo >= f.R) break;
        const double hi = std::min(seg.hi, f.R);
        if (seg.lo == 0.0) {
            if (seg.a > 0.0) return kInf;
            if (a == 0.0) best = std::max(best, seg.b);
        } else {
            best = std::max(best, value(seg.a, seg.b, seg.lo));
        }
        // A r^{a-N} + B r^a has no interior maximum.
        best = std::max(best, value(seg.a, seg.b, hi));
    }
    return best;
}

std::vector<double> eval_distances(const SampleSet& at, const Point& center) {
    std::vector<double> out;
    if (const auto* rg = std::get_if<RadialGrid>(&at)) {
        if (distance(rg->center(), center) == 0.0) return rg->nodes();
    }
    for (const auto& p : sample_points(at)) out.push_back(distance(p, center));
    return out;
}

std::vector<Form> forms_of(std::span<const PotentialSpec> specs, int dim) {
    std::vector<Form> forms;
    for (const auto& s : specs) {
        if (s.N != dim) throw ParameterError("potential: spec dimension does not match the measure");
        forms.push_back(form_of(s));
    }
    return forms;
}

double atomic_exact(const AtomicMeasure& mu, const Form& f, std::span<const double> x) {
    const auto prof = distance_profile(mu, x);
    if (f.maximal) return detail::step_maximal(prof, f.N, f.a, f.R);
    return detail::step_power_integral(prof, f.N, f.a, f.e, f.R);
}

std::vector<std::vector<double>> radial_batch(const RadialMeasure& mu, std::span<const Form> forms,
                                              const std::vector<double>& dist, const QuadratureConfig& quad) {
    std::vector<double> dens;
    double atom = 0.0;
    auto src = radial_source_of(mu, dens, atom);
    RadialOperator op(std::move(src), dist, quad);
    auto uniq = op.apply_unique(dens, atom, forms);
    for (std::size_t u = 0; u < op.unique_count(); ++u) {
        if (op.unique_distance(u) != 0.0) continue;
        for (std::size_t f = 0; f < forms.size(); ++f)
            uniq[f][u] = forms[f].maximal ? radial_center_maximal(mu, forms[f]) : radial_center_integral(mu, forms[f]);
    }
    std::vector<std::vector<double>> out(forms.size(), std::vector<double>(dist.size()));
    for (std::size_t f = 0; f < forms.size(); ++f)
        for (std::size_t i = 0; i < dist.size(); ++i) out[f][i] = uniq[f][op.slot(i)];
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

PotentialKind parse_potential_kind(const std::string& name) {
    if (name == "wolff") return PotentialKind::wolff;
    if (name == "riesz") return PotentialKind::riesz;
    if (name == "ell") return PotentialKind::ell;
    if (name == "frac_maximal" || name == "maximal") return PotentialKind::frac_maximal;
    throw ParameterError("unknown potential kind '" + name + "'");
}

std::string to_string(PotentialKind kind) {
    switch (kind) {
        case PotentialKind::wolff:
            return "wolff";
        case PotentialKind::riesz:
            return "riesz";
        case PotentialKind::ell:
            return "ell";
        case PotentialKind::frac_maximal:
            return "frac_maximal";
    }
    return "?";
}

PotentialSpec PotentialSpec::wolff(int N, double alpha, double p, double R) {
    return {N, alpha, p, R, PotentialKind::wolff, 1.0};
}
PotentialSpec PotentialSpec::riesz(int N, double beta, double R) {
    return {N, beta, 2.0, R, PotentialKind::riesz, 1.0};
}
PotentialSpec PotentialSpec::ell(int N, double alpha, double s, double R) {
    return {N, alpha, 2.0, R, PotentialKind::ell, s};
}
PotentialSpec PotentialSpec::frac_maximal(int N, double alpha, double R) {
    return {N, alpha, 2.0, R, PotentialKind::frac_maximal, 1.0};
}

void PotentialSpec::validate() const {
    if (N < 1) throw ParameterError("potential: N must be >= 1");
    if (!(R > 0.0)) throw ParameterError("potential: R must be positive (or inf)");
    switch (kind) {
        case PotentialKind::wolff:
            if (!(p > 1.0) || !std::isfinite(p)) throw ParameterError("wolff: p must be > 1");
            if (!(alpha > 0.0)) throw ParameterError("wolff: alpha must be > 0");
            if (!(N - alpha * p > 0.0)) throw ParameterError("wolff: requires alpha * p < N");
            break;
        case PotentialKind::riesz:
            if (!(alpha > 0.0) || !(alpha < N)) throw ParameterError("riesz: requires 0 < beta < N");
            break;
        case PotentialKind::ell:
            if (!(s > 0.0) || !std::isfinite(s)) throw ParameterError("ell: s must be > 0");
            if (!(alpha > 0.0) || !(alpha < N)) throw ParameterError("ell: requires 0 < alpha < N");
            break;
        case PotentialKind::frac_maximal:
            if (!(alpha >= 0.0) || !(alpha < N)) throw ParameterError("frac_maximal: requires 0 <= alpha < N");
            break;
    }
}

double PotentialSpec::order() const { return kind == PotentialKind::wolff ? alpha * p : alpha; }

double PotentialSpec::power() const {
    switch (kind) {
        case PotentialKind::wolff:
            return 1.0 / (p - 1.0);
        case PotentialKind::ell:
            return s;
        default:
            return 1.0;
    }
}

void QuadratureConfig::validate() const {
    if (nodes_per_decade < 8) throw ParameterError("quadrature: nodes_per_decade must be >= 8");
    if (!(r_min_factor > 0.0) || !(r_min_factor < 1.0)) throw ParameterError("quadrature: r_min_factor in (0, 1)");
    if (max_nodes < 16) throw ParameterError("quadrature: max_nodes must be >= 16");
    if (!(refine_tol > 0.0)) throw ParameterError("quadrature: refine_tol must be > 0");
}

namespace detail {

double step_power_integral(std::span<const std::pair<double, double>> profile, int N, double a, double e,
                           double R) {
    const double c = (N - a) * e;
    double s = 0.0;
    for (std::size_t k = 0; k < profile.size(); ++k) {
        const auto [d, M] = profile[k];
        if (d >= R) break;
        if (M == 0.0) continue;
        if (d == 0.0) return kInf;
        const double next = k + 1 < profile.size() ? std::min(profile[k + 1].first, R) : R;
        s += std::pow(M, e) * power_tail(d, next, c);
    }
    return s;
}

double step_maximal(std::span<const std::pair<double, double>> profile, int N, double a, double R) {
    double best = 0.0;
    for (const auto& [d, M] : profile) {
        if (d >= R) break;
        if (M == 0.0) continue;
        if (d == 0.0) return kInf;
        best = std::max(best, M / std::pow(d, N - a));
    }
    return best;
}

double node_power_integral(std::span<const double> nodes, std::span<const double> m, int N, double a, double e,
                           double R, const std::function<double(double)>& refine, const QuadratureConfig& quad) {
    if (nodes.empty() || m.back() == 0.0 || !(R > 0.0)) return 0.0;
    const double c = (N - a) * e;
    auto g = [&](double mass) { return mass > 0.0 ? std::pow(mass, e) : 0.0; };

    // Below the first node m is extrapolated as m0 (r / r0)^N.
    const double r0 = nodes[0];
    if (R <= r0) return g(m[0]) * std::pow(r0, -N * e) * std::pow(R, a * e) / (a * e);
    double s = g(m[0]) * std::pow(r0, -c) / (a * e);

    // Product trapezoid: g linear in t = log r, weight e^{-ct} integrated exactly.
    auto panel = [&](double lo, double hi, double g0, double g1, double& proxy) {
        const double h = std::log(hi / lo);
        const double E0 = std::pow(lo, -c);
        const double E1 = std::pow(hi, -c);
        const double D = E0 * -std::expm1(-c * h);
        proxy = 0.5 * std::abs(g1 - g0) * D / c;
        return g0 * D / c + (g1 - g0) * (D / (c * c * h) - E1 / c);
    };

    struct Panel {
        double lo, hi, m0, m1, value, proxy;
    };
    std::vector<Panel> panels;
    panels.reserve(nodes.size());
    for (std::size_t j = 0; j + 1 < nodes.size(); ++j) {
        const double lo = nodes[j];
        if (lo >= R) break;
        double hi = nodes[j + 1], m1 = m[j + 1];
        if (hi > R) {
            m1 = refine ? refine(R)
                        : m[j] + (m[j + 1] - m[j]) * std::log(R / lo) / std::log(nodes[j + 1] / lo);
            hi = R;
        }
        Panel p{lo, hi, m[j], m1, 0.0, 0.0};
        p.value = panel(lo, hi, g(p.m0), g(p.m1), p.proxy);
        panels.push_back(p);
    }
    double body = 0.0;
    for (const auto& p : panels) body += p.value;
    const double scale = s + body;

    if (refine && scale > 0.0) {
        const double tol = quad.refine_tol * scale;
        std::function<double(double, double, double, double, int)> split = [&](double lo, double hi, double m0,
                                                                                double m1, int depth) {
            double proxy = 0.0;
            const double v = panel(lo, hi, g(m0), g(m1), proxy);
            if (proxy <= tol || depth >= quad.max_refine_depth) return v;
            const double mid = std::sqrt(lo * hi);
            const double mm = refine(mid);
            return split(lo, mid, m0, mm, depth + 1) + split(mid, hi, mm, m1, depth + 1);
        };
        body = 0.0;
        for (const auto& p : panels) body += p.proxy > tol ? split(p.lo, p.hi, p.m0, p.m1, 0) : p.value;
    }
    s += body;
    const double last = nodes.back();
    if (R > last) s += g(m.back()) * power_tail(last, R, c);
    return s;
}

double node_maximal(std::span<const double> nodes, std::span<const double> m, int N, double a, double R) {
    if (nodes.empty() || m.back() == 0.0 || !(R > 0.0)) return 0.0;
    const double r0 = nodes[0];
    if (R <= r0) return m[0] * std::pow(R, a) / std::pow(r0, N);
    double best = 0.0;
    for (std::size_t j = 0; j < nodes.size() && nodes[j] < R; ++j)
        best = std::max(best, m[j] / std::pow(nodes[j], N - a));
    return best;
}

}  // namespace detail

double evaluate(const Measure& mu, const PotentialSpec& spec, std::span<const double> x,
                const QuadratureConfig& quad) {
    const Form f = form_of(spec);
    if (spec.N != measure_dim(mu) || static_cast<int>(x.size()) != spec.N)
        throw ParameterError("potential: dimension mismatch between spec, measure and point");
    if (const auto* a = std::get_if<AtomicMeasure>(&mu)) return atomic_exact(*a, f, x);
    if (const auto* r = std::get_if<RadialMeasure>(&mu)) {
        if (distance(r->center(), x) == 0.0) return f.maximal ? radial_center_maximal(*r, f) : radial_center_integral(*r, f);
    }
    return evaluate_quadrature(mu, spec, x, quad);
}

double evaluate_quadrature(const Measure& mu, const PotentialSpec& spec, std::span<const double> x,
                           const QuadratureConfig& quad) {
    quad.validate();
    const Form f = form_of(spec);
    if (spec.N != measure_dim(mu) || static_cast<int>(x.size()) != spec.N)
        throw ParameterError("potential: dimension mismatch between spec, measure and point");
    const std::array<Form, 1> forms{f};
    if (const auto* a = std::get_if<AtomicMeasure>(&mu)) {
        const auto prof = distance_profile(*a, x);
        if (prof.empty()) return 0.0;
        auto refine = [&](double rho) {
            double s = 0.0;
            for (const auto& [d, M] : prof)
                if (d <= rho) s = M;
            return s;
        };
        const double diam = support_diameter(mu);
        const double far = prof.back().first;
        double r_lo = quad.r_min_factor * std::max(diam, far);
        if (r_lo == 0.0) r_lo = quad.r_min_factor;
        const double nearest = prof.front().first;
        if (nearest > r_lo) r_lo = nearest * (1.0 - 1e-9);
        const auto nodes = make_nodes(r_lo, std::max(far, r_lo * 10.0), quad);
        std::vector<double> m(nodes.size());
        for (std::size_t j = 0; j < nodes.size(); ++j) m[j] = refine(nodes[j]);
        return integrate(f, nodes, m, refine, quad);
    }
    if (const auto* r = std::get_if<RadialMeasure>(&mu)) {
        return radial_batch(*r, forms, {distance(r->center(), x)}, quad)[0][0];
    }
    const auto& gd = std::get<GridDensity>(mu);
    CartesianOperator op(gd.grid(), {Point(x.begin(), x.end())}, quad);
    return op.apply(gd.density(), forms)[0][0];
}

double wolff(const Measure& mu, const PotentialSpec& spec, std::span<const double> x, const QuadratureConfig& quad) {
    if (spec.kind != PotentialKind::wolff) throw ParameterError("wolff: spec.kind must be wolff");
    return evaluate(mu, spec, x, quad);
}

double riesz(const Measure& mu, const PotentialSpec& spec, std::span<const double> x, const QuadratureConfig& quad) {
    if (spec.kind != PotentialKind::riesz) throw ParameterError("riesz: spec.kind must be riesz");
    return evaluate(mu, spec, x, quad);
}

double ell(const Measure& mu, double alpha, double s, double R, std::span<const double> x,
           const QuadratureConfig& quad) {
    return evaluate(mu, PotentialSpec::ell(measure_dim(mu), alpha, s, R), x, quad);
}

double frac_maximal(const Measure& mu, double alpha, double R, std::span<const double> x,
                    const QuadratureConfig& quad) {
    return evaluate(mu, PotentialSpec::frac_maximal(measure_dim(mu), alpha, R), x, quad);
}

std::vector<Field> evaluate_on(const Measure& mu, std::span<const PotentialSpec> specs, const SampleSet& at,
                               const QuadratureConfig& quad) {
    quad.validate();
    const int dim = measure_dim(mu);
    if (sample_dim(at) != dim) throw ParameterError("potential: sample set dimension does not match the measure");
    const auto forms = forms_of(specs, dim);
    std::vector<std::vector<double>> values;
    if (const auto* a = std::get_if<AtomicMeasure>(&mu)) {
        const auto pts = sample_points(at);
        values.assign(forms.size(), std::vector<double>(pts.size()));
        parallel_for(pts.size(), [&](std::size_t i) {
            const auto prof = distance_profile(*a, pts[i]);
            for (std::size_t f = 0; f < forms.size(); ++f)
                values[f][i] = forms[f].maximal ? detail::step_maximal(prof, dim, forms[f].a, forms[f].R)
                                                : detail::step_power_integral(prof, dim, forms[f].a, forms[f].e,
                                                                              forms[f].R);
        });
    } else if (const auto* r = std::get_if<RadialMeasure>(&mu)) {
        values = radial_batch(*r, forms, eval_distances(at, r->center()), quad);
    } else {
        const auto& gd = std::get<GridDensity>(mu);
        CartesianOperator op(gd.grid(), sample_points(at), quad);
        values = op.apply(gd.density(), forms);
    }
    std::vector<Field> out;
    for (auto& v : values) out.push_back(Field{at, std::move(v)});
    return out;
}

Field evaluate_on(const Measure& mu, const PotentialSpec& spec, const SampleSet& at, const QuadratureConfig& quad) {
    return std::move(evaluate_on(mu, std::span<const PotentialSpec>(&spec, 1), at, quad)[0]);
}

Measure field_as_measure(const Field& f) {
    if (const auto* g = std::get_if<CartesianGrid>(&f.samples)) return GridDensity(*g, f.values);
    if (const auto* r = std::get_if<RadialGrid>(&f.samples)) return radial_measure_from_density(*r, f.values);
    throw ParameterError("potential_of_field: field must live on a grid");
}

Field potential_of_field(const Field& f, const PotentialSpec& spec, const SampleSet& at,
                         const QuadratureConfig& quad) {
    FieldPotentialOperator op(f.samples, at, quad);
    return Field{at, std::move(op.apply(f.values, std::span<const PotentialSpec>(&spec, 1))[0])};
}

struct FieldPotentialOperator::Impl {
    SampleSet source;
    SampleSet eval;
    std::variant<std::monostate, RadialOperator, CartesianOperator> op;
};

FieldPotentialOperator::FieldPotentialOperator(SampleSet source, SampleSet eval, QuadratureConfig quad)
    : impl_(std::make_unique<Impl>()) {
    quad.validate();
    if (sample_dim(source) != sample_dim(eval))
        throw ParameterError("potential: source and evaluation sets differ in dimension");
    impl_->source = std::move(source);
    impl_->eval = std::move(eval);
    if (const auto* g = std::get_if<CartesianGrid>(&impl_->source)) {
        impl_->op.emplace<CartesianOperator>(*g, sample_points(impl_->eval), quad);
    } else if (const auto* r = std::get_if<RadialGrid>(&impl_->source)) {
        impl_->op.emplace<RadialOperator>(radial_source_of(*r), eval_distances(impl_->eval, r->center()), quad);
    } else {
        throw ParameterError("potential_of_field: field must live on a grid");
    }
}

FieldPotentialOperator::~FieldPotentialOperator() = default;
FieldPotentialOperator::FieldPotentialOperator(FieldPotentialOperator&&) noexcept = default;
FieldPotentialOperator& FieldPotentialOperator::operator=(FieldPotentialOperator&&) noexcept = default;

const SampleSet& FieldPotentialOperator::source() const { return impl_->source; }
const SampleSet& FieldPotentialOperator::eval() const { return impl_->eval; }

std::vector<std::vector<double>> FieldPotentialOperator::apply(std::span<const double> density,
                                                               std::span<const PotentialSpec> specs) const {
    const auto forms = forms_of(specs, sample_dim(impl_->source));
    if (density.size() != sample_count(impl_->source))
        throw ParameterError("potential_of_field: value count does not match the source grid");
    for (double v : density)
        if (!is_finite_nonneg(v)) throw NumericalError("potential_of_field: field values must be finite and >= 0");
    if (const auto* r = std::get_if<RadialOperator>(&impl_->op)) return r->apply(density, 0.0, forms);
    return std::get<CartesianOperator>(impl_->op).apply(density, forms);
}

}  // namespace wolffkit
