#pragma once

// Result persistence: series.csv, snapshots/NNNN.csv, report.json, and a
// minimal SVG polyline plot. All numbers carry 17 significant digits and
// files are byte-identical across reruns of the same config+seed.

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "erds/config.hpp"

namespace erds {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string series_header(int n) {
  std::string h = "t,dt,H,E";
  for (int i = 1; i <= n; ++i) h += ",m_" + std::to_string(i);
  h += ",G,cumP,cumRDh,min_u,dist_alpha";
  return h;
}

inline void write_series_csv(const std::string& path, const Trajectory& traj, int n) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("io: cannot write " + path);
  out << series_header(n) << "\n";
  for (const auto& r : traj.series) {
    out << fmt17(r.t) << ',' << fmt17(r.dt) << ',' << fmt17(r.H) << ','
        << fmt17(r.energy);
    for (int i = 0; i < n; ++i)
      out << ',' << fmt17(i < static_cast<int>(r.masses.size()) ? r.masses[i] : 0.0);
    out << ',' << fmt17(r.G) << ',' << fmt17(r.cumP) << ',' << fmt17(r.cumRDh) << ','
        << fmt17(r.min_u) << ',' << fmt17(r.dist) << "\n";
  }
}

inline void write_snapshots(const std::string& dir, const Trajectory& traj) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    char name[16];
    std::snprintf(name, sizeof(name), "%04zu.csv", k);
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    if (!out) throw std::runtime_error("io: cannot write snapshot " + std::string(name));
    const StateField& s = traj.states[k];
    out << "x,u";
    for (int i = 1; i <= s.n(); ++i) out << ",c_" << i;
    out << "\n";
    for (int j = 0; j < s.grid.cells; ++j) {
      out << fmt17(s.grid.x_center(j));
      for (int i = 0; i < 1 + s.n(); ++i) out << ',' << fmt17(s.values(j, i));
      out << "\n";
    }
  }
}

inline Json report_to_json(const DiagnosticsReport& rep) {
  Json j;
  j["experiment"] = rep.experiment;
  j["all_pass"] = rep.all_pass();
  for (const auto& [k, v] : rep.scalars) j["scalars"][k] = v;
  for (const auto& [k, c] : rep.checks)
    j["checks"][k] = {{"pass", c.pass}, {"tolerance", c.tolerance}, {"value", c.value}};
  for (const auto& [k, m] : rep.tallies)
    for (const auto& [kk, v] : m) j["tallies"][k][kk] = v;
  return j;
}

// log-scale polyline of a positive series vs t; clamps at 1e-300.
inline void write_svg(const std::string& path,
                      const std::vector<std::pair<double, double>>& series,
                      const std::string& label) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("io: cannot write " + path);
  const double W = 640, Hg = 400, pad = 40;
  double t0 = series.front().first, t1 = series.back().first;
  if (t1 <= t0) t1 = t0 + 1.0;
  double lo = 1e300, hi = -1e300;
  for (const auto& [t, v] : series) {
    const double y = std::log10(std::max(v, 1e-300));
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  if (hi <= lo) hi = lo + 1.0;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
      << Hg << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << pad << "\" y=\"20\">" << label << " (log10 vs t)</text>\n"
      << "<polyline fill=\"none\" stroke=\"black\" points=\"";
  for (const auto& [t, v] : series) {
    const double x = pad + (t - t0) / (t1 - t0) * (W - 2 * pad);
    const double y = Hg - pad -
                     (std::log10(std::max(v, 1e-300)) - lo) / (hi - lo) * (Hg - 2 * pad);
    out << fmt17(x) << ',' << fmt17(y) << ' ';
  }
  out << "\"/>\n</svg>\n";
}

inline void write_outputs(const Trajectory& traj, const DiagnosticsReport& rep,
                          const RunConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  const int n = cfg.exp.model.n();
  if (cfg.formats.count("csv")) {
    write_series_csv((fs::path(cfg.out_dir) / "series.csv").string(), traj, n);
    write_snapshots((fs::path(cfg.out_dir) / "snapshots").string(), traj);
  }
  if (cfg.formats.count("json")) {
    Json j = report_to_json(rep);
    j["config"] = cfg.echo;
    std::ofstream out(fs::path(cfg.out_dir) / "report.json", std::ios::binary);
    if (!out) throw std::runtime_error("io: cannot write report.json");
    out << j.dump(2) << "\n";
  }
  if (cfg.formats.count("svg") && traj.series.size() >= 2) {
    std::vector<std::pair<double, double>> hs;
    const double H_end = traj.series.back().H;
    bool use_dist = std::isfinite(traj.series.front().dist);
    for (const auto& r : traj.series)
      hs.emplace_back(r.t, use_dist ? r.dist : r.H - H_end + 1e-30);
    write_svg((fs::path(cfg.out_dir) / "plot.svg").string(), hs,
              use_dist ? "dist_alpha" : "H - H(T)");
  }
}

} // namespace erds
