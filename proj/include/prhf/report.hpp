#pragma once

// JSON and CSV serialization of solver results. CSV numbers use "%.16e"
// (17 significant digits), ',' separators and '\n' line endings so that
// identical runs give identical bytes.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <json.hpp>
#include <map>
#include <string>
#include <vector>

#include "prhf/analysis.hpp"
#include "prhf/greens.hpp"
#include "prhf/scf.hpp"

namespace prhf {

using Json = nlohmann::ordered_json;

inline std::string csv_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline Json to_json(const EnergyBreakdown& e) {
  return Json{{"kinetic", e.kinetic}, {"nuclear", e.nuclear}, {"direct", e.direct},
              {"exchange", e.exchange}, {"total", e.total}};
}

inline Json to_json(const AtomSystem& s) {
  return Json{{"Z", s.Z}, {"N", s.N}, {"alpha", s.alpha}, {"q", s.q}};
}

inline Json to_json(const MinimizerCertificate& c) {
  Json clauses = Json::array();
  for (const auto& cl : c.clauses) {
    clauses.push_back(Json{{"name", cl.name}, {"passed", cl.passed}, {"measured", cl.measured},
                           {"tolerance", cl.tolerance}, {"detail", cl.detail}});
  }
  return Json{{"passed", c.passed()}, {"clauses", clauses}};
}

inline Json to_json(const SCFReport& r) {
  Json trace = Json::array();
  for (const auto& e : r.energy_trace) trace.push_back(e.total);
  Json levels = Json::array();
  for (const auto& l : r.levels) {
    levels.push_back(Json{{"ell", l.ell}, {"spin", l.spin}, {"index", l.index}, {"eps", l.eps},
                          {"eps_hartree", l.eps * r.sys.inv_alpha()}, {"occupation", l.occupation}});
  }
  Json j{{"system", to_json(r.sys)},
         {"algorithm", to_string(r.algorithm)},
         {"converged", r.converged},
         {"iterations", r.iterations},
         {"anion_regime", r.anion_regime},
         {"energy", to_json(r.energy)},
         {"commutator", r.commutator},
         {"purification", r.purification},
         {"energy_trace", trace},
         {"step_sizes", r.step_sizes},
         {"levels", levels}};
  if (r.algorithm == Algorithm::RoothaanLevelShift) j["final_level_shift"] = r.final_level_shift;
  return j;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

inline void write_json(const std::string& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

/// Column label of an occupied orbital, e.g. "P_l0_s1_2".
inline std::string orbital_label(int ell, int spin, int k) {
  return "P_l" + std::to_string(ell) + "_s" + std::to_string(spin) + "_" + std::to_string(k);
}

/// r followed by P(r) of every occupied orbital (eigenvectors of h inside
/// the occupied space, ascending eps).
inline std::string orbitals_csv(const SCFResult& res) {
  const auto orbs = occupied_orbitals(res.density, res.fock, res.ops.grid);
  std::map<std::pair<int, int>, int> seen;
  std::string s = "r";
  for (const auto& o : orbs) s += "," + orbital_label(o.ell, o.spin, seen[{o.ell, o.spin}]++);
  s += "\n";
  const auto& grid = res.ops.grid;
  for (int i = 0; i < grid.n; ++i) {
    s += csv_number(grid.r[i]);
    for (const auto& o : orbs) s += "," + csv_number(o.p[i]);
    s += "\n";
  }
  return s;
}

inline std::string energy_trace_csv(const SCFReport& r) {
  std::string s = "iteration,total,kinetic,nuclear,direct,exchange\n";
  for (std::size_t i = 0; i < r.energy_trace.size(); ++i) {
    const auto& e = r.energy_trace[i];
    s += std::to_string(i) + "," + csv_number(e.total) + "," + csv_number(e.kinetic) + "," + csv_number(e.nuclear) +
         "," + csv_number(e.direct) + "," + csv_number(e.exchange) + "\n";
  }
  return s;
}

inline std::string kernel_csv(const KernelSamples& k) {
  std::string s = "u,G,term1,term2,term3\n";
  for (Eigen::Index i = 0; i < k.u.size(); ++i) {
    s += csv_number(k.u[i]) + "," + csv_number(k.total[i]) + "," + csv_number(k.term1[i]) + "," +
         csv_number(k.term2[i]) + "," + csv_number(k.term3[i]) + "\n";
  }
  return s;
}

inline std::string sweep_csv(const std::vector<BindingRow>& rows) {
  std::string s = "N,energy,eps_homo,iterations,converged,below_previous\n";
  for (const auto& r : rows) {
    s += std::to_string(r.N) + "," + csv_number(r.energy) + "," + csv_number(r.eps_homo) + "," +
         std::to_string(r.iterations) + "," + (r.converged ? "1" : "0") + "," + (r.below_previous ? "1" : "0") + "\n";
  }
  return s;
}

inline Json to_json(const std::vector<BindingRow>& rows) {
  Json arr = Json::array();
  for (const auto& r : rows) {
    arr.push_back(Json{{"N", r.N}, {"energy", r.energy}, {"eps_homo", r.eps_homo}, {"iterations", r.iterations},
                       {"converged", r.converged}, {"below_previous", r.below_previous}});
  }
  return arr;
}

}  // namespace prhf
