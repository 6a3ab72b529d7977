#pragma once

// CSV and JSON serialization of data, chains and summaries. Numbers are
// written with 17 significant digits so files round-trip exactly and reruns
// compare byte for byte.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "limitset/bezier.hpp"
#include "limitset/measures.hpp"
#include "limitset/sampler.hpp"
#include "limitset/tail_prep.hpp"

namespace limitset {

/// "%.17g"; "inf", "-inf" and "nan" for non-finite values.
std::string format_double(double v);

/// Two numeric columns per row. A first row that does not parse as numbers
/// is taken as a header. Blank lines are skipped. Throws DomainError on a
/// malformed row, std::runtime_error when the file cannot be read.
std::vector<Point2> read_points_csv(const std::filesystem::path& path);
void write_points_csv(const std::filesystem::path& path, std::span<const Point2> points);

/// r, w, r0, exceed per record.
void write_polar_csv(const std::filesystem::path& path, const PolarSample& sample);

/// One row per stored draw: p02..p61, alpha, log_posterior, eta.
void write_chain_csv(const std::filesystem::path& path, const PosteriorSample& chain);

nlohmann::json to_json(const SplineParams& params);
/// Keys p02..p61. Throws DomainError for a missing or non-numeric key.
SplineParams spline_params_from_json(const nlohmann::json& j);

/// Aggregate curves: grid, lambda_median, tau1_median, tau2_median.
void write_measures_csv(const std::filesystem::path& path, const PosteriorSummary& summary);
/// Per-draw curves in long form: draw, measure, grid, value.
void write_per_draw_csv(const std::filesystem::path& path, const PosteriorSummary& summary);
/// angle, radius_median.
void write_boundary_csv(const std::filesystem::path& path, const PosteriorSummary& summary);
/// eta median and interval, P(AD), grids and median curves.
nlohmann::json summary_json(const PosteriorSummary& summary);

/// Writes `text` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// Splits one CSV line on commas (no quoting).
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace limitset
