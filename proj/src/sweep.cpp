#include <algorithm>
#include <chrono>
#include <iostream>
#include <map>
#include <sstream>

#include "bfcnn/csv.hpp"
#include "bfcnn/harness.hpp"

namespace bfcnn {

std::vector<RunResult> run_sweep_points(const BfcnnBlueprint& bp, const RunConfig& cfg, bool parallel) {
  const int n = static_cast<int>(cfg.T_grid.size());
  std::vector<RunResult> out(n);
  if (!parallel || cfg.parallelism <= 1) {
    for (int i = 0; i < n; ++i) out[i] = run_lockstep(bp, cfg, cfg.T_grid[i]);
    return out;
  }
  // run_lockstep catches its own failures; the blueprint is read-only.
#pragma omp parallel for schedule(dynamic, 1) num_threads(cfg.parallelism)
  for (int i = 0; i < n; ++i) {
    try {
      out[i] = run_lockstep(bp, cfg, cfg.T_grid[i]);
    } catch (const std::exception& ex) {
      out[i].T = cfg.T_grid[i];
      out[i].failure = ex.what();
    }
  }
  return out;
}

std::vector<FitRow> fit_by_iteration(const std::vector<RunResult>& runs, bool trimmed) {
  std::map<int, std::pair<std::vector<double>, std::vector<double>>> series;
  for (const auto& r : runs)
    for (const auto& e : r.errors) {
      series[e.iteration].first.push_back(r.T);
      series[e.iteration].second.push_back(e.err_total);
    }
  std::vector<FitRow> rows;
  for (auto& [m, s] : series) {
    auto [T, err] = s;
    if (trimmed) trim_overshoot(T, err);
    try {
      rows.push_back({m, fit_convergence_order(T, err)});
    } catch (const std::invalid_argument&) {
      // not enough usable points for this iteration
    }
  }
  return rows;
}

std::string fit_csv(const std::string& dataset, const std::vector<FitRow>& rows) {
  std::string out = "dataset,iteration,v,intercept,r2,n_points\n";
  for (const auto& r : rows)
    out += csv_field(dataset) + "," + std::to_string(r.iteration) + "," + fmt(r.fit.v) + "," +
           fmt(r.fit.intercept) + "," + fmt(r.fit.r2) + "," + std::to_string(r.fit.n_points) + "\n";
  return out;
}

int cmd_sweep(const RunConfig& cfg, const std::string& config_path) {
  validate_config(cfg);
  if (cfg.T_grid.size() < 2) throw ConfigError("sweep needs at least 2 phase lengths in [run] T_grid");
  auto t0 = std::chrono::steady_clock::now();
  std::vector<std::string> warnings;
  DatasetSpec ds = load_dataset(cfg.dataset, cfg.base_dir, &warnings);
  BfcnnBlueprint bp = blueprint_for(cfg, ds);
  const auto root = output_root(cfg) / ds.name;
  if (cfg.emit_crn) write_file_atomic(root / "blueprint.crn", emit_blueprint(bp));

  auto runs = run_sweep_points(bp, cfg, cfg.parallelism > 1);
  int failed = 0;
  for (auto& r : runs) {
    write_run_dir(root / T_dirname(r.T), bp, cfg, r, "sweep " + config_path);
    if (r.failure) {
      ++failed;
      std::cerr << "T=" << fmt(r.T) << " failed: " << *r.failure << "\n";
    }
  }

  std::vector<const RunResult*> order;
  for (const auto& r : runs) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(), [](auto a, auto b) { return a->T < b->T; });
  std::string merged;
  for (const auto* r : order) {
    std::string part = trace_csv(ds.name, *r);
    merged += merged.empty() ? part : part.substr(part.find('\n') + 1);
  }
  write_file_atomic(root / "sweep.csv", merged);

  auto raw = fit_by_iteration(runs, false);
  auto trimmed = fit_by_iteration(runs, true);
  write_file_atomic(root / "fit_summary.csv", fit_csv(ds.name, raw));
  write_file_atomic(root / "fit_summary_trimmed.csv", fit_csv(ds.name, trimmed));

  std::ostringstream m;
  m << "software = bfcnn " << kVersion << "\ncommand = sweep " << config_path << "\n[config echo]\n";
  std::istringstream in(cfg.source_text);
  for (std::string line; std::getline(in, line);) m << "  " << line << "\n";
  m << "dataset = " << ds.name << "\npoints = " << runs.size() << "\nfailed_points = " << failed << "\n";
  for (const auto* r : order) m << "run = " << (root / T_dirname(r->T)).string() << "\n";
  m << "file = " << (root / "sweep.csv").string() << "\n";
  m << "file = " << (root / "fit_summary.csv").string() << "\n";
  m << "file = " << (root / "fit_summary_trimmed.csv").string() << "\n";
  for (const auto& w : warnings) m << "warning = " << w << "\n";
  for (const auto* r : order) m << "wall_seconds T=" << fmt(r->T) << " = " << fmt(r->seconds) << "\n";
  m << "wall_seconds = "
    << fmt(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()) << "\n";
  write_file_atomic(root / "manifest.txt", m.str());

  std::cout << "sweep " << ds.name << ": " << runs.size() << " points, " << failed << " failed\n";
  for (const auto& f : raw)
    std::cout << "  iteration " << f.iteration << ": v=" << fmt(f.fit.v) << " r2=" << fmt(f.fit.r2) << "\n";
  std::cout << "output: " << root.string() << "\n";
  return failed ? 1 : 0;
}

}  // namespace bfcnn
