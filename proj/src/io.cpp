#include "limitset/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "limitset/errors.hpp"

namespace limitset {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

bool parse_double(std::string s, double& out) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t start = s.find_first_not_of(" \t");
  if (start == std::string::npos) return false;
  const char* first = s.data() + start;
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<Point2> read_points_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<Point2> pts;
  std::string line;
  std::size_t lineno = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv_line(line);
    Point2 p;
    const bool ok = cells.size() >= 2 && parse_double(cells[0], p.x) && parse_double(cells[1], p.y);
    if (!ok) {
      if (first_content) {
        first_content = false;
        continue;
      }
      throw DomainError(path.string() + ":" + std::to_string(lineno) +
                        ": expected two numeric columns");
    }
    first_content = false;
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw DomainError(path.string() + ":" + std::to_string(lineno) + ": non-finite value");
    }
    pts.push_back(p);
  }
  return pts;
}

void write_points_csv(const fs::path& path, std::span<const Point2> points) {
  auto out = open_out(path);
  out << "x1,x2\n";
  for (const auto& p : points) out << format_double(p.x) << ',' << format_double(p.y) << '\n';
}

void write_polar_csv(const fs::path& path, const PolarSample& sample) {
  auto out = open_out(path);
  out << "r,w,r0,exceed\n";
  for (const auto& r : sample.records) {
    out << format_double(r.r) << ',' << format_double(r.w) << ',' << format_double(r.r0) << ','
        << (r.exceed ? 1 : 0) << '\n';
  }
}

void write_chain_csv(const fs::path& path, const PosteriorSample& chain) {
  auto out = open_out(path);
  for (auto name : SplineParams::kNames) out << name << ',';
  out << "alpha,log_posterior,eta\n";
  for (const auto& d : chain.draws) {
    for (double v : d.params.values) out << format_double(v) << ',';
    out << format_double(d.alpha) << ',' << format_double(d.log_posterior) << ','
        << format_double(eta(GaugeSpline::from_params(d.params))) << '\n';
  }
}

nlohmann::json to_json(const SplineParams& params) {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t i = 0; i < kNumSplineParams; ++i) {
    j[std::string(SplineParams::kNames[i])] = params[i];
  }
  return j;
}

SplineParams spline_params_from_json(const nlohmann::json& j) {
  SplineParams p;
  for (std::size_t i = 0; i < kNumSplineParams; ++i) {
    const std::string key(SplineParams::kNames[i]);
    if (!j.contains(key) || !j[key].is_number()) {
      throw DomainError("spline parameter '" + key + "' is missing or not a number");
    }
    p[i] = j[key].get<double>();
  }
  return p;
}

void write_measures_csv(const fs::path& path, const PosteriorSummary& s) {
  auto out = open_out(path);
  out << "measure,grid,value\n";
  auto block = [&](const char* name, const std::vector<double>& grid,
                   const std::vector<double>& v) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      out << name << ',' << format_double(grid[i]) << ',' << format_double(v[i]) << '\n';
    }
  };
  block("lambda", s.omega_grid, s.lambda_median);
  block("tau1", s.delta_grid, s.tau1_median);
  block("tau2", s.delta_grid, s.tau2_median);
}

void write_per_draw_csv(const fs::path& path, const PosteriorSummary& s) {
  auto out = open_out(path);
  out << "draw,measure,grid,value\n";
  for (std::size_t d = 0; d < s.per_draw.size(); ++d) {
    const auto& m = s.per_draw[d];
    out << d << ",eta,," << format_double(m.eta) << '\n';
    for (std::size_t i = 0; i < s.omega_grid.size(); ++i) {
      out << d << ",lambda," << format_double(s.omega_grid[i]) << ','
          << format_double(m.lambda[i]) << '\n';
    }
    for (std::size_t i = 0; i < s.delta_grid.size(); ++i) {
      out << d << ",tau1," << format_double(s.delta_grid[i]) << ',' << format_double(m.tau1[i])
          << '\n';
      out << d << ",tau2," << format_double(s.delta_grid[i]) << ',' << format_double(m.tau2[i])
          << '\n';
    }
  }
}

void write_boundary_csv(const fs::path& path, const PosteriorSummary& s) {
  auto out = open_out(path);
  out << "angle,radius_median\n";
  for (std::size_t i = 0; i < s.angle_grid.size(); ++i) {
    out << format_double(s.angle_grid[i]) << ',' << format_double(s.boundary_radius_median[i])
        << '\n';
  }
}

nlohmann::json summary_json(const PosteriorSummary& s) {
  nlohmann::json j;
  j["n_draws"] = s.per_draw.size();
  j["eta_median"] = s.eta_median;
  j["eta_lower"] = s.eta_lower;
  j["eta_upper"] = s.eta_upper;
  j["prob_ad"] = s.prob_ad;
  j["omega_grid"] = s.omega_grid;
  j["delta_grid"] = s.delta_grid;
  j["lambda_median"] = s.lambda_median;
  j["tau1_median"] = s.tau1_median;
  j["tau2_median"] = s.tau2_median;
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace limitset
