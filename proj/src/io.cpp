#include "wolffkit/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace wolffkit {

namespace {

const Json& field(const Json& doc, const char* key, const std::string& where) {
    if (!doc.is_object() || !doc.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
    return doc.at(key);
}

double number(const Json& v, const std::string& what) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf" || s == "Infinity") return kInf;
        if (s == "-inf" || s == "-Infinity") return -kInf;
    }
    throw ConfigError(what + ": expected a number");
}

std::vector<double> numbers(const Json& v, const std::string& what) {
    if (!v.is_array()) throw ConfigError(what + ": expected an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& x : v) out.push_back(number(x, what));
    return out;
}

std::vector<int> integers(const Json& v, const std::string& what) {
    if (!v.is_array()) throw ConfigError(what + ": expected an array of integers");
    std::vector<int> out;
    for (const auto& x : v) {
        if (!x.is_number_integer()) throw ConfigError(what + ": expected an array of integers");
        out.push_back(x.get<int>());
    }
    return out;
}

CartesianGrid grid_from(const Json& doc, const std::string& where) {
    return CartesianGrid(numbers(field(doc, "origin", where), where + ".origin"),
                         numbers(field(doc, "spacing", where), where + ".spacing"),
                         integers(field(doc, "shape", where), where + ".shape"));
}

Json point_json(const Point& x) {
    Json a = Json::array();
    for (double v : x) a.push_back(json_number(v));
    return a;
}

template <class T>
Json array_json(const std::vector<T>& v) {
    Json a = Json::array();
    for (const auto& x : v) {
        if constexpr (std::is_floating_point_v<T>) a.push_back(json_number(x));
        else a.push_back(x);
    }
    return a;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fixed(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

}  // namespace

Measure measure_from_json(const Json& doc) {
    std::string kind;
    try {
        kind = field(doc, "kind", "measure").get<std::string>();
        if (kind == "atomic") {
            const int dim = field(doc, "dim", "measure").get<int>();
            std::vector<Point> pts;
            std::vector<double> w;
            for (const auto& a : field(doc, "atoms", "measure")) {
                pts.push_back(numbers(field(a, "x", "measure.atoms[]"), "measure.atoms[].x"));
                w.push_back(number(field(a, "mass", "measure.atoms[]"), "measure.atoms[].mass"));
            }
            return AtomicMeasure(dim, std::move(pts), std::move(w));
        }
        if (kind == "radial")
            return RadialMeasure(numbers(field(doc, "center", "measure"), "measure.center"),
                                 numbers(field(doc, "radii", "measure"), "measure.radii"),
                                 numbers(field(doc, "cumulative", "measure"), "measure.cumulative"));
        if (kind == "mollified_dirac")
            return mollified_dirac_radial(numbers(field(doc, "center", "measure"), "measure.center"),
                                          number(field(doc, "mass", "measure"), "measure.mass"),
                                          number(field(doc, "bandwidth", "measure"), "measure.bandwidth"),
                                          doc.value("pieces", 200));
        if (kind == "grid")
            return GridDensity(grid_from(doc, "measure"), numbers(field(doc, "density", "measure"), "measure.density"));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("measure: ") + e.what());
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
    throw ConfigError("measure: unknown kind '" + kind + "'");
}

Json measure_to_json(const Measure& mu) {
    Json doc;
    if (const auto* a = std::get_if<AtomicMeasure>(&mu)) {
        doc["kind"] = "atomic";
        doc["dim"] = a->dim();
        Json atoms = Json::array();
        for (std::size_t i = 0; i < a->size(); ++i) atoms.push_back({{"x", point_json(a->points()[i])}, {"mass", json_number(a->weights()[i])}});
        doc["atoms"] = atoms;
    } else if (const auto* r = std::get_if<RadialMeasure>(&mu)) {
        doc["kind"] = "radial";
        doc["center"] = point_json(r->center());
        doc["radii"] = array_json(r->radii());
        doc["cumulative"] = array_json(r->cumulative());
    } else {
        const auto& g = std::get<GridDensity>(mu);
        doc["kind"] = "grid";
        doc["origin"] = point_json(g.grid().origin());
        doc["spacing"] = array_json(g.grid().spacing());
        doc["shape"] = array_json(g.grid().shape());
        doc["density"] = array_json(g.density());
    }
    doc["units"] = "dimensionless";
    return doc;
}

CompactSet compact_set_from_json(const Json& doc) {
    CompactSet K;
    try {
        if (doc.contains("balls")) {
            std::vector<Ball> balls;
            for (const auto& b : doc.at("balls"))
                balls.push_back({numbers(field(b, "center", "set.balls[]"), "set.balls[].center"),
                                 number(field(b, "radius", "set.balls[]"), "set.balls[].radius")});
            K = CompactSet::balls(std::move(balls));
        } else if (doc.contains("mask")) {
            const auto& m = doc.at("mask");
            GridMask gm{grid_from(m, "set.mask"), {}};
            for (const auto& c : field(m, "cells", "set.mask")) gm.mask.push_back(c.get<int>() != 0 ? 1 : 0);
            K.shape = std::move(gm);
        } else {
            throw ConfigError("set: missing field 'balls' or 'mask'");
        }
        K.validate();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("set: ") + e.what());
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
    return K;
}

Json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
}

std::map<std::string, std::string> parse_key_values(const std::string& text, const std::string& source) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(source + ":" + std::to_string(lineno) + ": expected key = value");
        const auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        if (key.empty()) throw ConfigError(source + ":" + std::to_string(lineno) + ": empty key");
        if (kv.count(key)) throw ConfigError(source + ": duplicate field '" + key + "'");
        kv[key] = value;
    }
    return kv;
}

ParamSet params_from_text(const std::string& text, const std::string& source) {
    ParamSet ps;
    for (const auto& [key, value] : parse_key_values(text, source)) {
        auto as_double = [&]() {
            if (value == "inf" || value == "+inf") return kInf;
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(value, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != value.size() || value.empty()) throw ConfigError(source + ": field '" + key + "' is not a number");
            return v;
        };
        if (key == "N") {
            const double v = as_double();
            if (v != std::floor(v) || v < 1 || v > 6) throw ConfigError(source + ": field 'N' must be an integer in [1, 6]");
            ps.N = static_cast<int>(v);
        } else if (key == "p") ps.p = as_double();
        else if (key == "q1") ps.q1 = as_double();
        else if (key == "q2") ps.q2 = as_double();
        else if (key == "alpha") ps.alpha = as_double();
        else if (key == "beta") ps.beta = as_double();
        else if (key == "R") ps.R = as_double();
        else throw ConfigError(source + ": unknown field '" + key + "'");
    }
    return ps;
}

ParamSet read_params(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return params_from_text(ss.str(), path.string());
}

std::string params_to_text(const ParamSet& ps) {
    std::ostringstream out;
    out << "N = " << ps.N << "\n"
        << "p = " << format_double(ps.p) << "\n"
        << "q1 = " << format_double(ps.q1) << "\n"
        << "q2 = " << format_double(ps.q2) << "\n"
        << "alpha = " << format_double(ps.alpha) << "\n"
        << "beta = " << format_double(ps.beta) << "\n"
        << "R = " << format_double(ps.R) << "\n";
    return out.str();
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

Json json_number(double x) {
    if (std::isfinite(x)) return x;
    return format_double(x);
}

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (std::size_t j = 0; j < header.size(); ++j) out += (j ? "," : "") + header[j];
    out += "\n";
    for (const auto& row : rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out += ",";
            out += format_double(row[j]);
        }
        out += "\n";
    }
    return out;
}

std::string field_csv(const Field& f, const std::string& value_name) {
    std::vector<std::vector<double>> rows;
    rows.reserve(f.size());
    if (const auto* r = std::get_if<RadialGrid>(&f.samples)) {
        for (std::size_t i = 0; i < f.size(); ++i) rows.push_back({r->node(i), f.values[i]});
        return csv({"r", value_name}, rows);
    }
    const auto pts = sample_points(f.samples);
    std::vector<std::string> header;
    const int n = sample_dim(f.samples);
    for (int d = 0; d < n; ++d) header.push_back("x" + std::to_string(d));
    header.push_back(value_name);
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto row = pts[i];
        row.push_back(f.values[i]);
        rows.push_back(std::move(row));
    }
    return csv(header, rows);
}

Json report_to_json(const ConditionReport& rep) {
    Json doc;
    doc["condition"] = to_string(rep.condition);
    doc["best_constant"] = json_number(rep.best_constant);
    doc["witness"] = {{"location", point_json(rep.witness.location)}, {"scale", json_number(rep.witness.scale)}};
    doc["samples"] = rep.samples;
    doc["verdict"] = to_string(rep.verdict);
    doc["unreliable"] = rep.unreliable;
    doc["vacuous"] = rep.vacuous;
    doc["warnings"] = rep.warnings;
    Json extra = Json::object();
    for (const auto& [k, v] : rep.extra) extra[k] = json_number(v);
    doc["extra"] = extra;
    return doc;
}

std::string per_sample_csv(const ConditionReport& rep) {
    const int n = rep.per_sample.empty() ? static_cast<int>(rep.witness.location.size())
                                         : static_cast<int>(rep.per_sample.front().location.size());
    std::vector<std::string> header;
    for (int d = 0; d < n; ++d) header.push_back("x" + std::to_string(d));
    header.push_back("scale");
    header.push_back("ratio");
    std::vector<std::vector<double>> rows;
    for (const auto& s : rep.per_sample) {
        auto row = s.location;
        row.push_back(s.scale);
        row.push_back(s.ratio);
        rows.push_back(std::move(row));
    }
    return csv(header, rows);
}

std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                     const std::vector<PlotSeries>& series, bool log_x, bool log_y) {
    constexpr double W = 640, H = 420, L = 70, Rm = 20, T = 40, B = 50;
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
    auto usable = [&](double x, double y) {
        return std::isfinite(x) && std::isfinite(y) && (!log_x || x > 0.0) && (!log_y || y > 0.0);
    };
    double x0 = kInf, x1 = -kInf, y0 = kInf, y1 = -kInf;
    for (const auto& s : series)
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            x0 = std::min(x0, tx(s.x[i]));
            x1 = std::max(x1, tx(s.x[i]));
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    if (!(x0 <= x1)) x0 = 0, x1 = 1;
    if (!(y0 <= y1)) y0 = 0, y1 = 1;
    if (x1 == x0) x0 -= 0.5, x1 += 0.5;
    if (y1 == y0) y0 -= 0.5, y1 += 0.5;
    auto px = [&](double v) { return L + (tx(v) - x0) / (x1 - x0) * (W - L - Rm); };
    auto py = [&](double v) { return H - B - (ty(v) - y0) / (y1 - y0) * (H - T - B); };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape_xml(title) << "</text>\n";
    o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - Rm << "\" height=\"" << H - T - B
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double fx = x0 + (x1 - x0) * k / 4.0, fy = y0 + (y1 - y0) * k / 4.0;
        const double gx = L + (W - L - Rm) * k / 4.0, gy = H - B - (H - T - B) * k / 4.0;
        const double vx = log_x ? std::pow(10.0, fx) : fx, vy = log_y ? std::pow(10.0, fy) : fy;
        char bx[32], by[32];
        std::snprintf(bx, sizeof bx, "%.3g", vx);
        std::snprintf(by, sizeof by, "%.3g", vy);
        o << "<text x=\"" << fixed(gx) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << bx << "</text>\n";
        o << "<text x=\"" << L - 6 << "\" y=\"" << fixed(gy + 4) << "\" text-anchor=\"end\">" << by << "</text>\n";
    }
    o << "<text x=\"" << (L + W - Rm) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << escape_xml(xlabel) << "</text>\n";
    o << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << (T + H - B) / 2
      << ")\">" << escape_xml(ylabel) << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* c = colors[k % 6];
        if (s.scatter) {
            for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
                if (usable(s.x[i], s.y[i]))
                    o << "<circle cx=\"" << fixed(px(s.x[i])) << "\" cy=\"" << fixed(py(s.y[i])) << "\" r=\"3\" fill=\"" << c << "\"/>\n";
        } else {
            o << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
                if (usable(s.x[i], s.y[i])) o << fixed(px(s.x[i])) << "," << fixed(py(s.y[i])) << " ";
            o << "\"/>\n";
        }
        o << "<text x=\"" << L + 10 << "\" y=\"" << T + 16 + 14 * k << "\" fill=\"" << c << "\">" << escape_xml(s.name) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace wolffkit
