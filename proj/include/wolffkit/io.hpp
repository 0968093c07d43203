#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "wolffkit/capacity.hpp"
#include "wolffkit/criteria.hpp"
#include "wolffkit/grid.hpp"
#include "wolffkit/measure.hpp"

namespace wolffkit {

using Json = nlohmann::ordered_json;

/// Measure documents:
///   {"kind": "atomic", "dim": N, "atoms": [{"x": [...], "mass": m}, ...]}
///   {"kind": "radial", "center": [...], "radii": [...], "cumulative": [...]}
///   {"kind": "mollified_dirac", "center": [...], "mass": m, "bandwidth": h, "pieces": 200}
///   {"kind": "grid", "origin": [...], "spacing": [...], "shape": [...], "density": [...]}
/// An optional "units" string is carried through and otherwise ignored.
Measure measure_from_json(const Json& doc);
Json measure_to_json(const Measure& mu);

/// {"balls": [{"center": [...], "radius": r}, ...]} or
/// {"mask": {"origin": [...], "spacing": [...], "shape": [...], "cells": [0, 1, ...]}}.
CompactSet compact_set_from_json(const Json& doc);

Json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// `key = value` lines; '#' starts a comment. Keys are ParamSet field names
/// (N, p, q1, q2, alpha, beta, R). R accepts inf.
std::map<std::string, std::string> parse_key_values(const std::string& text, const std::string& source = "params");
ParamSet params_from_text(const std::string& text, const std::string& source = "params");
ParamSet read_params(const std::filesystem::path& path);
std::string params_to_text(const ParamSet& ps);

/// Shortest form that still carries 17 significant digits; inf, -inf, nan spelled out.
std::string format_double(double x);
/// Finite numbers as JSON numbers, the rest as strings.
Json json_number(double x);

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);
/// Radial fields: r,value. Otherwise x0,...,x{N-1},value.
std::string field_csv(const Field& f, const std::string& value_name = "value");

Json report_to_json(const ConditionReport& rep);
std::string per_sample_csv(const ConditionReport& rep);

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    /// Markers instead of a polyline.
    bool scatter = false;
};

/// Static SVG chart; log axes drop nonpositive values.
std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                     const std::vector<PlotSeries>& series, bool log_x = false, bool log_y = false);

}  // namespace wolffkit
