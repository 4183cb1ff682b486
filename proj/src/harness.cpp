#include "bfcnn/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bfcnn/csv.hpp"
#include "bfcnn/naming.hpp"

namespace bfcnn {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string manifest_header(const RunConfig& cfg, const std::string& command, const std::string& config_path) {
  std::ostringstream m;
  m << "software = bfcnn " << kVersion << "\n";
  m << "command = " << command << "\n";
  m << "config = " << config_path << "\n";
  m << "[config echo]\n";
  std::istringstream in(cfg.source_text);
  for (std::string line; std::getline(in, line);) m << "  " << line << "\n";
  return m.str();
}

}  // namespace

std::filesystem::path output_root(const RunConfig& cfg) {
  if (const char* env = std::getenv("BFCNN_OUTPUT_ROOT"); env && *env) return env;
  return cfg.output;
}

std::string T_dirname(double T) { return "T=" + fmt(T); }

RunResult run_lockstep(const BfcnnBlueprint& bp, const RunConfig& cfg, double T) {
  auto t0 = std::chrono::steady_clock::now();
  RunResult r;
  r.T = T;
  ReferenceState ref{read_weights(bp, bp.initial_state), 0};
  r.reference.push_back(ref);

  ClockConfig clock{T, cfg.max_iterations, cfg.trace};
  ConcentrationState state = bp.initial_state;
  SignHistory history;
  try {
    for (int m = 1; m <= cfg.max_iterations; ++m) {
      IterationRecord rec = run_iteration(bp, state, m, clock, cfg.integrator, &history);
      if (!rec.terminated)
        ref = dual_rail_step(ref, batch_for_iteration(bp.dataset, m, bp.shape.p_batch), cfg.eta);
      r.reference.push_back(ref);

      ErrorRecord e = realization_error(rec.weights, ref.rails, cfg.c);
      e.dataset = bp.dataset.name;
      e.T = T;
      e.iteration = m;
      e.train_err_max = rec.train_err_max;
      e.terminated = rec.terminated;
      r.errors.push_back(e);

      for (const auto& w : rec.warnings) r.warnings.push_back("iteration " + std::to_string(m) + ": " + w);
      for (const auto& d : rec.degenerate)
        r.warnings.push_back("iteration " + std::to_string(m) + ": degenerate annihilation at " + d);
      const bool stop = rec.terminated;
      r.records.push_back(std::move(rec));
      if (stop) {
        r.terminated_at = m;
        break;
      }
    }
  } catch (const std::exception& ex) {
    r.failure = ex.what();
  }
  r.seconds = seconds_since(t0);
  return r;
}

std::string trace_csv(const std::string& dataset, const RunResult& r) {
  std::string out = "dataset,T,iteration,err_w1,err_w2,err_total,train_err_max,terminated\n";
  for (const auto& e : r.errors)
    out += csv_field(dataset) + "," + fmt(r.T) + "," + std::to_string(e.iteration) + "," + fmt(e.err_w1) +
           "," + fmt(e.err_w2) + "," + fmt(e.err_total) + "," + fmt(e.train_err_max) + "," +
           (e.terminated ? "1" : "0") + "\n";
  return out;
}

std::string errors_csv(const std::string& dataset, const RunResult& r) {
  std::string out = "dataset,T,iteration,rail,row,col,sim,ref,abs_diff\n";
  for (std::size_t k = 0; k < r.records.size(); ++k) {
    const auto& sim = r.records[k].weights;
    const auto& ref = r.reference[k + 1].rails;
    for (int rail : {1, -1})
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          double s = rail > 0 ? sim.pos[i][j] : sim.neg[i][j];
          double f = rail > 0 ? ref.pos[i][j] : ref.neg[i][j];
          out += csv_field(dataset) + "," + fmt(r.T) + "," + std::to_string(r.records[k].iteration) + "," +
                 (rail > 0 ? "+" : "-") + "," + std::to_string(i + 1) + "," + std::to_string(j + 1) + "," +
                 fmt(s) + "," + fmt(f) + "," + fmt(std::abs(s - f)) + "\n";
        }
  }
  return out;
}

std::string weights_csv(const RunResult& r, bool reference) {
  std::ostringstream out;
  out << "iteration,rail,row,col,value\n";
  if (reference) {
    for (std::size_t m = 0; m < r.reference.size(); ++m) write_weight_rows(out, static_cast<int>(m), r.reference[m].rails);
  } else {
    if (!r.reference.empty()) write_weight_rows(out, 0, r.reference[0].rails);
    for (const auto& rec : r.records) write_weight_rows(out, rec.iteration, rec.weights);
  }
  return out.str();
}

std::string outputs_csv(const BfcnnBlueprint& bp, const RunResult& r) {
  std::string out = "iteration,slot,sample,y,y_ref,e_pos,e_neg,e\n";
  for (std::size_t k = 0; k < r.records.size(); ++k) {
    const auto& rec = r.records[k];
    auto batch = batch_for_iteration(bp.dataset, rec.iteration, bp.shape.p_batch);
    auto fwd = feedforward(r.reference[k].W(), batch);
    for (int l = 0; l < bp.shape.p_batch && l < static_cast<int>(rec.y.size()); ++l) {
      out += std::to_string(rec.iteration) + "," + std::to_string(l + 1) + "," +
             std::to_string(batch_column(rec.iteration, l + 1, bp.shape.p_batch, bp.shape.p)) + "," +
             fmt(rec.y[l]) + "," + fmt(fwd.y[l]) + ",";
      if (l < static_cast<int>(rec.e.size()))
        out += fmt(rec.e_pos[l]) + "," + fmt(rec.e_neg[l]) + "," + fmt(rec.e[l]);
      else
        out += ",,";
      out += "\n";
    }
  }
  return out;
}

std::string snapshots_csv(const BfcnnBlueprint& bp, const RunResult& r) {
  std::string out = "iteration,phase,label,species,value\n";
  for (const auto& rec : r.records)
    for (const auto& snap : rec.snapshots)
      for (std::size_t s = 0; s < snap.state.size(); ++s)
        out += std::to_string(rec.iteration) + "," + std::to_string(snap.phase_index) + "," + snap.label + "," +
               csv_field(bp.global_species[s]) + "," + fmt(snap.state[s]) + "\n";
  return out;
}

void write_run_dir(const std::filesystem::path& dir, const BfcnnBlueprint& bp, const RunConfig& cfg,
                   const RunResult& r, const std::string& command) {
  std::vector<std::string> files = {"trace.csv", "errors.csv", "weights.csv", "reference_weights.csv",
                                    "outputs.csv"};
  std::string manifest = manifest_header(cfg, command, "");
  try {
    write_file_atomic(dir / "trace.csv", trace_csv(bp.dataset.name, r));
    write_file_atomic(dir / "errors.csv", errors_csv(bp.dataset.name, r));
    write_file_atomic(dir / "weights.csv", weights_csv(r, false));
    write_file_atomic(dir / "reference_weights.csv", weights_csv(r, true));
    write_file_atomic(dir / "outputs.csv", outputs_csv(bp, r));
    if (cfg.trace) {
      write_file_atomic(dir / "snapshots.csv", snapshots_csv(bp, r));
      files.push_back("snapshots.csv");
    }
  } catch (const std::exception& ex) {
    manifest += "write_error = " + std::string(ex.what()) + "\n";
  }
  std::ostringstream m;
  m << manifest;
  m << "dataset = " << bp.dataset.name << "\n";
  m << "T = " << fmt(r.T) << "\n";
  m << "iterations_run = " << r.records.size() << "\n";
  m << "terminated_at = " << (r.terminated_at ? std::to_string(*r.terminated_at) : "none") << "\n";
  m << "status = " << (r.failure ? "failed: " + *r.failure : "ok") << "\n";
  for (const auto& f : files) m << "file = " << (dir / f).string() << "\n";
  m << "wall_seconds = " << fmt(r.seconds) << "\n";
  for (const auto& w : r.warnings) m << "warning = " << w << "\n";
  write_file_atomic(dir / "manifest.txt", m.str());
}

int cmd_train(const RunConfig& cfg, const std::string& config_path) {
  validate_config(cfg);
  if (cfg.T_grid.size() != 1) throw ConfigError("train needs exactly one phase length: set [run] T");
  std::vector<std::string> warnings;
  DatasetSpec ds = load_dataset(cfg.dataset, cfg.base_dir, &warnings);
  BfcnnBlueprint bp = blueprint_for(cfg, ds);
  const auto root = output_root(cfg) / ds.name;
  if (cfg.emit_crn) write_file_atomic(root / "blueprint.crn", emit_blueprint(bp));

  RunResult r = run_lockstep(bp, cfg, cfg.T_grid[0]);
  r.warnings.insert(r.warnings.begin(), warnings.begin(), warnings.end());
  const auto dir = root / T_dirname(r.T);
  write_run_dir(dir, bp, cfg, r, "train " + config_path);

  std::cout << "dataset " << ds.name << " T=" << fmt(r.T) << ": " << r.records.size() << " iteration(s), ";
  if (r.terminated_at)
    std::cout << "terminated at " << *r.terminated_at;
  else
    std::cout << "no termination";
  if (!r.errors.empty()) std::cout << ", last err_total " << fmt(r.errors.back().err_total);
  std::cout << "\noutput: " << dir.string() << "\n";
  if (r.failure) {
    std::cerr << "run failed: " << *r.failure << "\n";
    return 1;
  }
  return 0;
}

int cmd_simulate_module(const RunConfig& cfg, const std::string& config_path) {
  validate_config(cfg);
  const ModuleConfig& mc = cfg.module;
  if (mc.label.empty() == mc.crn_file.empty())
    throw ConfigError("[module] needs exactly one of module = <label> or crn_file = <path>");
  if (!(mc.duration > 0.0)) throw ConfigError("[module] duration must be positive");

  Crn crn;
  ConcentrationState x0;
  std::string label;
  if (!mc.label.empty()) {
    DatasetSpec ds = load_dataset(cfg.dataset, cfg.base_dir);
    BfcnnBlueprint bp = blueprint_for(cfg, ds);
    const auto& mod = bp.module(mc.label);
    if (mod.kind != ModuleKind::Crn) throw ConfigError("module '" + mc.label + "' is not a reaction network");
    crn = mod.crn;
    label = mc.label;
    for (const auto& s : crn.species()) x0.push_back(bp.initial_state[bp.id(s.name)]);
  } else {
    std::filesystem::path p = mc.crn_file;
    if (p.is_relative() && !cfg.base_dir.empty()) p = cfg.base_dir / p;
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    crn = parse_crn_text(ss.str());
    label = p.stem().string();
    x0.assign(crn.size(), 0.0);
  }
  for (const auto& [name, v] : mc.initial) x0[crn.id(name)] = v;

  auto t0 = std::chrono::steady_clock::now();
  IntegratorConfig ic = cfg.integrator;
  ic.dense_samples = std::max<std::size_t>(2, mc.samples);
  const auto dir = output_root(cfg) / "simulate" / label;
  std::string status = "ok";
  int code = 0;
  try {
    Trajectory traj = integrate(crn, x0, mc.duration, ic);
    std::ostringstream tr;
    write_trajectory_csv(tr, crn, traj);
    write_file_atomic(dir / "trajectory.csv", tr.str());
    std::string end = "species,value\n";
    for (std::size_t i = 0; i < crn.size(); ++i) end += csv_field(crn.name(i)) + "," + fmt(traj.endpoint[i]) + "\n";
    write_file_atomic(dir / "endpoint.csv", end);
    std::cout << "simulated " << label << " for " << fmt(mc.duration) << " time units; output: " << dir.string()
              << "\n";
  } catch (const IntegrationFailure& f) {
    status = std::string("failed: ") + f.what() + " at t=" + fmt(f.last_time);
    code = 1;
    std::cerr << status << "\n";
  }
  std::string m = manifest_header(cfg, "simulate-module " + config_path, config_path);
  m += "module = " + label + "\nstatus = " + status + "\nwall_seconds = " + fmt(seconds_since(t0)) + "\n";
  write_file_atomic(dir / "manifest.txt", m);
  return code;
}

int cmd_bounds(const RunConfig& cfg, const std::string& config_path) {
  const BoundsConfig& b = cfg.bounds;
  const auto dir = output_root(cfg) / "bounds";
  std::string m = manifest_header(cfg, "bounds " + config_path, config_path);
  if (b.m >= 1) {
    std::string out = "iteration,ER,ES\n";
    for (int k = 1; k <= b.m; ++k) {
      Vec2 v = iteration_error_bound(b.coeffs, b.T, b.p_batch, k);
      out += std::to_string(k) + "," + fmt(v[0]) + "," + fmt(v[1]) + "\n";
    }
    write_file_atomic(dir / "bounds.csv", out);
    std::cout << out;
    m += "file = " + (dir / "bounds.csv").string() + "\n";
  }
  if (b.envelope) {
    auto e = envelope_params((*b.envelope)[0], (*b.envelope)[1], (*b.envelope)[2]);
    std::string out = "a,b,delta,U_min,v_max\n" + fmt(e.a) + "," + fmt(e.b) + "," + fmt(e.delta) + "," +
                      fmt(e.U_min) + "," + fmt(e.v_max) + "\n";
    write_file_atomic(dir / "envelope.csv", out);
    std::cout << out;
    m += "file = " + (dir / "envelope.csv").string() + "\n";
  }
  if (b.m < 1 && !b.envelope) throw ConfigError("bounds needs [bounds] m >= 1 or an [envelope] section");
  write_file_atomic(dir / "manifest.txt", m);
  return 0;
}

bool OracleCase::pass() const { return std::abs(actual - expected) <= tol; }

std::vector<OracleCase> oracle_cases(const IntegratorConfig& cfg) {
  std::vector<OracleCase> out;
  auto run = [&](const Crn& crn, ConcentrationState x0, double T, const std::string& species) {
    auto end = integrate_endpoint(crn, x0, T, cfg);
    return end[crn.id(species)];
  };
  {
    Crn c = CrnBuilder().add({}, {"A"}, 2.0).add({"A"}, {}, 1.0).build();
    out.push_back({"relaxation a=2 x0=0 t=1", closed_form_oracle(OracleKind::Relaxation, {2, 0}, 1), run(c, {0.0}, 1, "A"), 1e-8});
  }
  {
    Crn c = CrnBuilder().add({"A"}, {}, 1.0).build();
    out.push_back({"decay x0=1 t=1", closed_form_oracle(OracleKind::Decay, {1}, 1), run(c, {1.0}, 1, "A"), 1e-8});
  }
  {
    Crn c = CrnBuilder().add({"X", "Y"}, {}, 1.0).build();
    out.push_back({"annihilation (2,1) t=2", closed_form_oracle(OracleKind::Annihilation, {2, 1}, 2), run(c, {2.0, 1.0}, 2, "X"), 1e-8});
    out.push_back({"annihilation (2,1) t=50", closed_form_oracle(OracleKind::Annihilation, {2, 1}, 50), run(c, {2.0, 1.0}, 50, "X"), 1e-8});
  }
  {
    // Positive-rail logistic with a decaying catalyst.
    Crn c = CrnBuilder().add({"N", "P"}, {"N", "P", "P"}, 1.0).add({"N", "P", "P"}, {"N", "P"}, 1.0).add({"N"}, {}, 1.0).build();
    out.push_back({"logistic p0=0.5 n0=1 t=3", closed_form_oracle(OracleKind::Logistic, {0.5, 1}, 3), run(c, {1.0, 0.5}, 3, "P"), 1e-8});
    out.push_back({"logistic p0=0.5 n0=1 t=50", closed_form_oracle(OracleKind::Logistic, {0.5, 1}, 50), run(c, {1.0, 0.5}, 50, "P"), 1e-8});
  }
  {
    // Negative rail: p follows the logistic with -n.
    Crn c = CrnBuilder().add({"N", "P", "P"}, {"N", "P", "P", "P"}, 1.0).add({"N", "P"}, {"N"}, 1.0).add({"N"}, {}, 1.0).build();
    out.push_back({"negative logistic p0=0.5 n0=2 t=50", closed_form_oracle(OracleKind::Logistic, {0.5, -2}, 50), run(c, {2.0, 0.5}, 50, "P"), 1e-8});
  }
  return out;
}

int cmd_oracle_check(const RunConfig& cfg, const std::string& config_path) {
  validate_config(cfg);
  auto cases = oracle_cases(cfg.integrator);
  std::string csv = "case,expected,actual,abs_err,tol,pass\n";
  int failed = 0;
  for (const auto& c : cases) {
    csv += csv_field(c.name) + "," + fmt(c.expected) + "," + fmt(c.actual) + "," + fmt(std::abs(c.actual - c.expected)) +
           "," + fmt(c.tol) + "," + (c.pass() ? "1" : "0") + "\n";
    std::cout << (c.pass() ? "PASS " : "FAIL ") << c.name << ": expected " << fmt(c.expected) << ", got "
              << fmt(c.actual) << "\n";
    if (!c.pass()) ++failed;
  }
  const auto dir = output_root(cfg) / "oracle_check";
  write_file_atomic(dir / "oracle_check.csv", csv);
  std::string m = manifest_header(cfg, "oracle-check " + config_path, config_path);
  m += "cases = " + std::to_string(cases.size()) + "\nfailed = " + std::to_string(failed) + "\n";
  write_file_atomic(dir / "manifest.txt", m);
  return failed ? 1 : 0;
}

}  // namespace bfcnn
