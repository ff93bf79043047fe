// Command-line front end: solve, verify, greens and sweep driven by a
// key=value config file. Exit codes: 0 success, 1 config error,
// 2 not converged, 3 certificate or verification failure.

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>

#include "prhf/prhf.hpp"

extern "C" void openblas_set_num_threads(int);

namespace {

using namespace prhf;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitFailure = 3;

std::shared_ptr<spdlog::logger> logger() {
  static auto log = spdlog::stderr_color_mt("prhf");
  return log;
}

std::string prepare_output(const RunConfig& cfg, const std::string& override_dir) {
  const std::string dir = override_dir.empty() ? cfg.output_dir : override_dir;
  std::filesystem::create_directories(dir);
  return dir;
}

RunConfig load(const std::string& path) {
  auto cfg = load_config(path);
  logger()->set_level(cfg.log_level == "debug" ? spdlog::level::debug : spdlog::level::info);
  return cfg;
}

SolverOptions sweep_options(const SolverOptions& base) {
  SolverOptions o = base;
  o.shells.clear();
  o.occupation_mode = OccupationMode::Aufbau;
  o.initial_guess = InitialGuess::BareNucleus;
  return o;
}

int run_solve(const std::string& path, const std::string& out_dir) {
  const auto cfg = load(path);
  const auto dir = prepare_output(cfg, out_dir);
  logger()->info("solving Z={} N={} alpha={} on n={} r_max={}", cfg.system.Z, cfg.system.N, cfg.system.alpha,
                 cfg.solver.n, cfg.solver.r_max);
  const auto res = solve_scf_unchecked(cfg.system, cfg.solver);
  logger()->info("{} after {} iterations, E = {:.12f}", res.report.converged ? "converged" : "NOT converged",
                 res.report.iterations, res.report.energy.total);
  if (res.report.anion_regime) logger()->info("N >= Z + 1: existence of a minimizer is not guaranteed");

  Json report{{"timestamp", utc_timestamp()}};
  report.update(to_json(res.report));
  const auto cert = minimizer_certificate(res);
  report["certificate"] = to_json(cert);
  write_json(dir + "/report.json", report);
  write_text(dir + "/orbitals.csv", orbitals_csv(res));
  write_text(dir + "/energy_trace.csv", energy_trace_csv(res.report));

  if (!res.report.converged) return kExitNotConverged;
  if (!cert.passed()) {
    for (const auto& name : cert.failed()) logger()->error("certificate clause failed: {}", name);
    return kExitFailure;
  }
  return kExitOk;
}

int run_verify(const std::string& path, const std::string& out_dir) {
  const auto cfg = load(path);
  const auto dir = prepare_output(cfg, out_dir);
  Json suites = Json::object();
  bool all_pass = true;
  int code = kExitOk;
  auto record = [&](const SuiteResult& s) {
    Json entry{{"status", to_string(s.status)}};
    entry.update(s.details);
    suites[s.name] = entry;
    logger()->info("suite {}: {}", s.name, to_string(s.status));
    all_pass &= s.status == SuiteStatus::Pass;
  };

  if (cfg.verify.certificate || cfg.verify.decay) {
    const auto res = solve_scf_unchecked(cfg.system, cfg.solver);
    if (!res.report.converged) {
      logger()->error("SCF did not converge after {} iterations", res.report.iterations);
      suites["scf"] = Json{{"status", "fail"}, {"converged", false}, {"iterations", res.report.iterations}};
      all_pass = false;
      code = kExitNotConverged;
    } else {
      if (cfg.verify.certificate) record(certificate_suite(res));
      if (cfg.verify.decay) {
        std::optional<FitWindow> window;
        if (cfg.decay_r1) window = FitWindow{*cfg.decay_r1, *cfg.decay_r2};
        record(decay_suite(res, window));
      }
    }
  }
  if (cfg.verify.herbst) {
    const auto shells = cfg.solver.shells.empty() ? default_shells(cfg.system, cfg.solver.include_p) : cfg.solver.shells;
    record(herbst_suite(cfg.system, build_grid(cfg.solver.n, cfg.solver.r_max), resolved_ell_max(shells, cfg.solver)));
  }
  if (cfg.verify.kato) record(kato_suite(cfg.kato_samples, cfg.kato_n, cfg.kato_r_max, cfg.seed));
  if (cfg.verify.greens) {
    record(greens_suite(cfg.system.alpha * cfg.greens_energy, cfg.system.alpha, cfg.greens_n, cfg.greens_r_max));
  }
  if (cfg.verify.binding) {
    const int n_max = cfg.sweep_n_max > 0 ? cfg.sweep_n_max : cfg.system.N;
    if (n_max >= cfg.system.Z + 1.0) {
      record({"binding", SuiteStatus::Inconclusive, Json{{"error", "N_max must be below Z + 1"}}});
    } else {
      try {
        record(binding_suite(binding_monotonicity(cfg.system.Z, cfg.system.alpha, n_max, sweep_options(cfg.solver))));
      } catch (const NotConverged& e) {
        record({"binding", SuiteStatus::Fail, Json{{"error", std::string("NotConverged: ") + e.what()}}});
        code = kExitNotConverged;
      }
    }
  }

  Json out{{"timestamp", utc_timestamp()}, {"system", to_json(cfg.system)}, {"passed", all_pass}, {"suites", suites}};
  write_json(dir + "/verify.json", out);
  if (code != kExitOk) return code;
  return all_pass ? kExitOk : kExitFailure;
}

int run_greens(const std::string& path, const std::string& out_dir) {
  const auto cfg = load(path);
  const auto dir = prepare_output(cfg, out_dir);
  const double E = cfg.system.alpha * cfg.greens_energy;
  const auto kernel = greens_kernel(E, cfg.system.alpha);
  const auto s = sample_kernel(kernel);
  bool positive = true;
  double worst = 0.0;
  for (Eigen::Index j = 0; j < s.u.size(); ++j) {
    positive &= s.total[j] > 0.0;
    worst = std::max(worst, s.total[j] / kernel.est1_bound(s.u[j]));
  }
  write_text(dir + "/greens_kernel.csv", kernel_csv(s));
  write_json(dir + "/greens.json", Json{{"timestamp", utc_timestamp()},
                                        {"E", E},
                                        {"alpha", kernel.alpha},
                                        {"nu", kernel.nu},
                                        {"bound_constant", kernel.bound_constant},
                                        {"mesh_nodes", kernel.mesh.size()},
                                        {"positive", positive},
                                        {"max_G_over_bound", worst}});
  logger()->info("kernel at E = {} (nu = {}), {} mesh nodes", E, kernel.nu, kernel.mesh.size());
  return positive && worst <= 1.0 + 1e-12 ? kExitOk : kExitFailure;
}

int run_sweep(const std::string& path, const std::string& out_dir) {
  const auto cfg = load(path);
  const auto dir = prepare_output(cfg, out_dir);
  const int n_max = cfg.sweep_n_max > 0 ? cfg.sweep_n_max : cfg.system.N;
  const auto rows = binding_monotonicity(cfg.system.Z, cfg.system.alpha, n_max, sweep_options(cfg.solver));
  write_text(dir + "/sweep.csv", sweep_csv(rows));
  const auto suite = binding_suite(rows);
  write_json(dir + "/sweep.json", Json{{"timestamp", utc_timestamp()},
                                       {"Z", cfg.system.Z},
                                       {"alpha", cfg.system.alpha},
                                       {"status", to_string(suite.status)},
                                       {"rows", to_json(rows)}});
  return suite.status == SuiteStatus::Pass ? kExitOk : kExitFailure;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    logger()->error("config error: {}", e.what());
    return kExitConfig;
  } catch (const InvalidSystem& e) {
    logger()->error("invalid system: {}", e.what());
    return kExitConfig;
  } catch (const BadOptions& e) {
    logger()->error("bad options: {}", e.what());
    return kExitConfig;
  } catch (const BadGrid& e) {
    logger()->error("bad grid: {}", e.what());
    return kExitConfig;
  } catch (const NotConverged& e) {
    logger()->error("NotConverged: {}", e.what());
    return kExitNotConverged;
  } catch (const std::exception& e) {
    logger()->error("{}", e.what());
    return kExitFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("PRHF_THREADS")) {
    const int t = std::atoi(threads);
    if (t > 0) openblas_set_num_threads(t);
  }

  CLI::App app{"Pseudorelativistic Hartree-Fock solver"};
  app.require_subcommand(1);
  std::string config, out_dir;
  std::function<int()> action;
  auto add = [&](const std::string& name, const std::string& help, int (*fn)(const std::string&, const std::string&)) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("config", config, "key=value config file")->required();
    sub->add_option("-o,--output", out_dir, "output directory (overrides output_dir)");
    sub->callback([&, fn] { action = [&, fn] { return fn(config, out_dir); }; });
  };
  add("solve", "run the SCF and write report.json, orbitals.csv, energy_trace.csv", run_solve);
  add("verify", "run the enabled verification suites and write verify.json", run_verify);
  add("greens", "tabulate the resolvent kernel into greens_kernel.csv", run_greens);
  add("sweep", "E(N) for N = 1..N_max into sweep.csv and sweep.json", run_sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }
  return guarded(action);
}
