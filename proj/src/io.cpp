#include "radvac/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "radvac/error.hpp"

namespace radvac::io {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", x);
}

namespace {

void dump(const Json& j, int indent, int depth, std::string& out) {
  const std::string pad = indent > 0 ? std::string(static_cast<size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close = indent > 0 ? std::string(static_cast<size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad;
        out += Json(it.key()).dump();
        out += indent > 0 ? ": " : ":";
        dump(it.value(), indent, depth + 1, out);
      }
      out += nl;
      out += close;
      out += "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Numeric arrays stay on one line.
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_number(); });
      out += "[";
      if (!flat) out += nl;
      bool first = true;
      for (const auto& e : j) {
        if (!first) {
          out += ",";
          if (flat)
            out += " ";
          else
            out += nl;
        }
        first = false;
        if (!flat) out += pad;
        dump(e, indent, depth + 1, out);
      }
      if (!flat) {
        out += nl;
        out += close;
      }
      out += "]";
      return;
    }
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      out += std::isfinite(x) ? format_number(x) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::kInvalidParameter, "cannot open " + path.string() + " for writing");
  return f;
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::string out;
  dump(j, indent, 0, out);
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  auto f = open_out(path);
  f << content;
}

void write_json(const std::filesystem::path& path, const Json& j) {
  write_text(path, dump_json(j) + "\n");
}

void write_trajectory_csv(const std::filesystem::path& path,
                          const std::vector<PerturbationState>& states) {
  auto f = open_out(path);
  f << "tau,r,H,H_tau\n";
  for (const auto& s : states)
    for (int j = 0; j < s.H.size(); ++j)
      f << format_number(s.tau) << ',' << format_number(s.H.grid().node(j)) << ','
        << format_number(s.H[j]) << ',' << format_number(s.H_tau[j]) << '\n';
}

void write_series_csv(const std::filesystem::path& path, const std::vector<SeriesPoint>& series) {
  auto f = open_out(path);
  f << "tau,quantity,value\n";
  for (const auto& p : series)
    f << format_number(p.tau) << ',' << p.quantity << ',' << format_number(p.value) << '\n';
}

void write_affine_csv(const std::filesystem::path& path, const AffineMotion& motion) {
  auto f = open_out(path);
  f << "t,tau,a,a_t,a_tau\n";
  for (const auto& m : motion.samples)
    f << format_number(m.t) << ',' << format_number(m.tau) << ',' << format_number(m.a) << ','
      << format_number(m.a_t) << ',' << format_number(m.a_tau) << '\n';
}

void write_grid_csv(const std::filesystem::path& path, const GridFunction& g) {
  auto f = open_out(path);
  f << "r,value\n";
  for (int j = 0; j < g.size(); ++j)
    f << format_number(g.grid().node(j)) << ',' << format_number(g[j]) << '\n';
}

Json to_json(const AprioriMonitor& m) {
  return {{"ok", m.ok()},
          {"sn", m.sn},
          {"j_dev", m.j_dev},
          {"dtheta", m.dth},
          {"d2theta", m.d2th},
          {"sn_bound", m.sn_bound},
          {"j_bound", m.j_bound},
          {"dtheta_bound", m.dth_bound},
          {"d2theta_bound", m.d2th_bound}};
}

Json to_json(const EnergyReport& r) {
  Json z = Json::array();
  for (const auto& row : r.Z) z.push_back(Json(std::vector<double>(row.begin(), row.end())));
  return {{"tau", r.tau},
          {"N", r.N},
          {"S_N", r.S_N},
          {"E", r.E},
          {"D", r.D},
          {"D_velocity", r.D_velocity},
          {"D_potential", r.D_potential},
          {"C", r.C},
          {"Z", z},
          {"apriori", to_json(r.apriori)},
          {"direct_commutator", r.direct_commutator}};
}

Json to_json(const Discrepancy& d) {
  return {{"rel_sup", d.rel_sup},         {"rel_norm", d.rel_norm},
          {"rel_perturbation", d.rel_perturbation}, {"t_begin", d.t_begin},
          {"t_end", d.t_end},             {"samples", d.samples}};
}

Json to_json(const DecayFit& f) {
  return {{"rate", f.rate},
          {"intercept", f.intercept},
          {"samples", f.samples},
          {"e_folds", f.e_folds},
          {"a0", f.a0}};
}

std::string svg_line_plot(const std::string& title, const std::string& xlabel,
                          const std::string& ylabel, const std::vector<SvgSeries>& series,
                          bool log_y) {
  constexpr double W = 640, H = 400, L = 70, R = 150, T = 40, B = 50;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  auto ty = [&](double y) { return log_y ? std::log10(y) : y; };
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (log_y && s.y[i] <= 0)) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  if (!(x1 > x0)) x0 = 0, x1 = 1;
  if (!(y1 > y0)) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (ty(y) - y0) / (y1 - y0) * (H - T - B); };

  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n"
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
      W, H, (W - R + L) / 2, title, L, T, W - L - R, H - T - B);
  for (int k = 0; k <= 4; ++k) {
    const double fx = x0 + k * (x1 - x0) / 4, fy = y0 + k * (y1 - y0) / 4;
    out += fmt::format("<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"middle\">{:.3g}</text>\n",
                       px(fx), H - B + 16, fx);
    out += fmt::format("<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\">{}</text>\n", L - 4,
                       H - B - k * (H - T - B) / 4 + 4,
                       log_y ? fmt::format("1e{:.1f}", fy) : fmt::format("{:.3g}", fy));
  }
  out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", (W - R + L) / 2,
                     H - 10, xlabel);
  out += fmt::format(
      "<text x=\"15\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 15 {})\">{}</text>\n",
      (H - B + T) / 2, (H - B + T) / 2, ylabel);
  for (size_t s = 0; s < series.size(); ++s) {
    const char* c = colors[s % std::size(colors)];
    std::string pts;
    for (size_t i = 0; i < series[s].x.size() && i < series[s].y.size(); ++i) {
      const double x = series[s].x[i], y = series[s].y[i];
      if (!std::isfinite(x) || !std::isfinite(y) || (log_y && y <= 0)) continue;
      pts += fmt::format("{:.2f},{:.2f} ", px(x), py(y));
    }
    out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                       c, pts);
    out += fmt::format("<text x=\"{}\" y=\"{}\" fill=\"{}\">{}</text>\n", W - R + 8,
                       T + 16 * (s + 1), c, series[s].label);
  }
  out += "</svg>\n";
  return out;
}

}  // namespace radvac::io
