#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "radvac/background.hpp"
#include "radvac/diagnostics.hpp"
#include "radvac/oracle.hpp"
#include "radvac/solver.hpp"

namespace radvac::io {

using Json = nlohmann::json;

// 17 significant digits; non-finite values become "nan"/"inf" text.
std::string format_number(double x);

// Serializes with sorted keys and 17-digit numbers; non-finite numbers become null.
std::string dump_json(const Json& j, int indent = 2);

void write_text(const std::filesystem::path& path, const std::string& content);
void write_json(const std::filesystem::path& path, const Json& j);

struct SeriesPoint {
  double tau;
  std::string quantity;
  double value;
};

// tau,r,H,H_tau
void write_trajectory_csv(const std::filesystem::path& path,
                          const std::vector<PerturbationState>& states);
// tau,quantity,value
void write_series_csv(const std::filesystem::path& path, const std::vector<SeriesPoint>& series);
// t,tau,a,a_t,a_tau
void write_affine_csv(const std::filesystem::path& path, const AffineMotion& motion);
// r,value
void write_grid_csv(const std::filesystem::path& path, const GridFunction& f);

Json to_json(const AprioriMonitor& m);
Json to_json(const EnergyReport& r);
Json to_json(const Discrepancy& d);
Json to_json(const DecayFit& f);

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Minimal static line plot; log_y drops nonpositive points.
std::string svg_line_plot(const std::string& title, const std::string& xlabel,
                          const std::string& ylabel, const std::vector<SvgSeries>& series,
                          bool log_y = false);

}  // namespace radvac::io
