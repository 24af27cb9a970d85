#include "nlwave/report.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "nlwave/errors.hpp"
#include "nlwave/norms.hpp"

namespace nlwave {

ojson to_json(const LinearDiagnostics& d) {
  ojson j;
  j["invertibility_margin"] = d.invertibility_margin;
  j["invertibility_bound"] = d.invertibility_bound;
  j["min_determinant"] = d.min_determinant;
  j["min_O_modulus"] = d.min_O_modulus;
  j["max_determinant_O_discrepancy"] = d.max_determinant_O_discrepancy;
  j["max_mode_growth_rate"] = d.max_mode_growth_rate;
  j["pointwise_product_integral"] = d.pointwise_product_integral;
  j["boundary_leak_ratio"] = d.boundary_leak_ratio;
  j["grid_leak_warning"] = d.grid_leak_warning;
  return j;
}

ojson to_json(const PicardReport& r) {
  ojson j;
  j["data_norm_M"] = r.data_norm_M;
  j["fbar"] = r.fbar;
  j["selected_window"] = r.selected_window;
  j["window_binds"] = r.window_binds;
  j["iterations"] = r.iterations;
  j["deltas"] = r.deltas;
  j["rhos"] = r.rhos;
  j["stopping_threshold"] = r.stopping_threshold;
  j["max_blow_norm"] = r.max_blow_norm;
  j["status"] = r.status;
  return j;
}

ojson to_json(const IdentityReport& r) {
  ojson j;
  j["c_at_zero"] = r.c_at_zero;
  j["s_at_zero"] = r.s_at_zero;
  j["pythagorean"] = r.pythagorean;
  j["s_derivative"] = r.s_derivative;
  j["c_second_derivative"] = r.c_second_derivative;
  j["growth_excess"] = r.growth_excess;
  j["growth_checked"] = r.growth_checked;
  return j;
}

ojson to_json(const ResidualReport& r) {
  ojson j;
  j["pde_max"] = r.pde_max;
  j["condition_u"] = r.condition_u;
  j["condition_ut"] = r.condition_ut;
  j["pde_timeline"] = r.pde_timeline;
  return j;
}

namespace {
ojson entry_json(const EstimateEntry& e) {
  ojson j;
  j["lhs"] = e.lhs;
  j["rhs"] = e.rhs;
  j["ratio"] = e.ratio;
  j["applicable"] = e.applicable;
  return j;
}
}  // namespace

ojson to_json(const EstimateReport& r) {
  ojson j;
  j["sup_laplacian_g"] = entry_json(r.sup_laplacian_g);
  j["sup_plain_g"] = entry_json(r.sup_plain_g);
  j["sup_sqrt_psi"] = entry_json(r.sup_sqrt_psi);
  j["sobolev_uniform"] = entry_json(r.sobolev_uniform);
  j["weighted_lq"] = entry_json(r.weighted_lq);
  return j;
}

ojson to_json(const OracleComparison& c) {
  ojson j;
  j["max_rel_error"] = c.max_rel_error;
  j["worst_mode"] = c.worst_mode;
  j["modes_checked"] = c.modes_checked;
  return j;
}

ojson strip_timings(const ojson& report) {
  ojson copy = report;
  copy.erase("timings");
  return copy;
}

namespace {

std::string number_text(double v) {
  std::ostringstream out;
  out << std::setprecision(12) << v;
  return out.str();
}

void render_node(const ojson& node, const std::string& path,
                 std::vector<std::pair<std::string, std::string>>& rows) {
  if (node.is_object()) {
    for (const auto& item : node.items())
      render_node(item.value(), path.empty() ? item.key() : path + "." + item.key(),
                  rows);
    return;
  }
  if (node.is_array()) {
    bool numeric = std::all_of(node.begin(), node.end(),
                               [](const ojson& e) { return e.is_number(); });
    if (numeric && node.size() > 4) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (const auto& e : node) {
        double v = e.get<double>();
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      rows.emplace_back(path, "[" + std::to_string(node.size()) + " values, min " +
                                  number_text(lo) + ", max " + number_text(hi) + "]");
    } else {
      rows.emplace_back(path, node.dump());
    }
    return;
  }
  if (node.is_number_float()) {
    rows.emplace_back(path, number_text(node.get<double>()));
    return;
  }
  rows.emplace_back(path, node.dump());
}

}  // namespace

std::string render_text(const ojson& report) {
  std::vector<std::pair<std::string, std::string>> rows;
  render_node(report, "", rows);
  std::size_t width = 0;
  for (const auto& [k, v] : rows) width = std::max(width, k.size());
  std::ostringstream out;
  for (const auto& [k, v] : rows)
    out << k << std::string(width - k.size() + 2, ' ') << v << "\n";
  return out.str();
}

void write_report(const std::string& dir, const ojson& report) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir + "/report.json", std::ios::binary);
    if (!out) throw ConfigError("report: cannot write " + dir + "/report.json");
    out << report.dump(2) << "\n";
  }
  {
    std::ofstream out(dir + "/report.txt", std::ios::binary);
    if (!out) throw ConfigError("report: cannot write " + dir + "/report.txt");
    out << render_text(report);
  }
}

void write_norm_csv(const std::string& path, const SolutionTimeline& sol,
                    const OperatorFamily& fam, double s, double p, double q) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("report: cannot write " + path);
  out << "t,sobolev_u,sup_au,sobolev_ut,sup_aut\n";
  out << std::setprecision(17);
  for (std::size_t k = 0; k < sol.samples(); ++k) {
    const Field au = apply_family(fam, sol.u[k]);
    const Field aut = apply_family(fam, sol.ut[k]);
    out << sol.times[k] << "," << sobolev_norm(sol.u[k], s, p, q) << ","
        << lp_norm(au, inf_exponent, q) << ","
        << sobolev_norm(sol.ut[k], s, p, q) << ","
        << lp_norm(aut, inf_exponent, q) << "\n";
  }
}

}  // namespace nlwave
