#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "bfcnn/csv.hpp"
#include "bfcnn/harness.hpp"

namespace bfcnn {

namespace pt = boost::property_tree;

namespace {

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& part : split(v, ',')) {
    if (trim(part).empty()) continue;
    try {
      out.push_back(parse_double(part));
    } catch (const std::invalid_argument&) {
      throw ConfigError(key + ": '" + trim(part) + "' is not a number");
    }
  }
  return out;
}

double num(const std::string& key, const std::string& v) {
  try {
    return parse_double(v);
  } catch (const std::invalid_argument&) {
    throw ConfigError(key + ": '" + v + "' is not a number");
  }
}

long integer(const std::string& key, const std::string& v) {
  double d = num(key, v);
  if (d != static_cast<double>(static_cast<long>(d))) throw ConfigError(key + " must be an integer");
  return static_cast<long>(d);
}

bool flag(const std::string& key, const std::string& v) {
  std::string t = trim(v);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError(key + " must be true or false");
}

Mat3 matrix(const std::string& key, const std::string& v) {
  auto xs = parse_list(key, v);
  if (xs.size() != 9) throw ConfigError(key + " needs 9 values (3x3, row-major)");
  Mat3 m{};
  for (int i = 0; i < 9; ++i) m[i / 3][i % 3] = xs[i];
  return m;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  // The INI reader only knows ';' comments.
  std::string cleaned;
  {
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
      std::string t = trim(line);
      if (!t.empty() && t[0] == '#') continue;
      cleaned += line + "\n";
    }
  }
  pt::ptree tree;
  try {
    std::istringstream in(cleaned);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(e.message(), e.line());
  }

  RunConfig cfg;
  cfg.base_dir = base_dir;
  cfg.source_text = text;
  std::optional<Mat3> w_pos, w_neg;
  std::map<int, IterationCoefficients> iters;

  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError("key '" + section + "' outside a [section]");
    auto key_of = [&](const std::string& k) { return section + "." + k; };
    for (const auto& [k, node] : body) {
      const std::string v = trim(node.data());
      const std::string key = key_of(k);
      if (section == "run") {
        if (k == "dataset") cfg.dataset = v;
        else if (k == "batch") cfg.p_batch = static_cast<int>(integer(key, v));
        else if (k == "T") cfg.T_grid = {num(key, v)};
        else if (k == "T_grid") cfg.T_grid = parse_list(key, v);
        else if (k == "k") cfg.k = num(key, v);
        else if (k == "k_pre") cfg.k_pre = num(key, v);
        else if (k == "eta") cfg.eta = num(key, v);
        else if (k == "threshold") cfg.threshold = num(key, v);
        else if (k == "max_iterations") cfg.max_iterations = static_cast<int>(integer(key, v));
        else if (k == "seed") cfg.seed = static_cast<std::uint64_t>(integer(key, v));
        else if (k == "output") cfg.output = v;
        else if (k == "trace") cfg.trace = flag(key, v);
        else if (k == "emit_crn") cfg.emit_crn = flag(key, v);
        else if (k == "parallelism") cfg.parallelism = static_cast<int>(integer(key, v));
        else if (k == "c") cfg.c = num(key, v);
        else throw ConfigError("unknown key " + key);
      } else if (section == "integrator") {
        if (k == "rel_tol") cfg.integrator.rel_tol = num(key, v);
        else if (k == "abs_tol") cfg.integrator.abs_tol = num(key, v);
        else if (k == "max_step") cfg.integrator.max_step = num(key, v);
        else if (k == "parallel_rhs") cfg.integrator.parallel_rhs = flag(key, v);
        else throw ConfigError("unknown key " + key);
      } else if (section == "weights") {
        if (k == "w_pos") w_pos = matrix(key, v);
        else if (k == "w_neg") w_neg = matrix(key, v);
        else throw ConfigError("unknown key " + key);
      } else if (section == "module") {
        if (k == "module") cfg.module.label = v;
        else if (k == "crn_file") cfg.module.crn_file = v;
        else if (k == "duration") cfg.module.duration = num(key, v);
        else if (k == "samples") cfg.module.samples = static_cast<std::size_t>(integer(key, v));
        else throw ConfigError("unknown key " + key);
      } else if (section == "initial") {
        cfg.module.initial[k] = num(key, v);
      } else if (section == "bounds") {
        if (k == "m") cfg.bounds.m = static_cast<int>(integer(key, v));
        else if (k == "T") cfg.bounds.T = num(key, v);
        else if (k == "batch") cfg.bounds.p_batch = static_cast<int>(integer(key, v));
        else throw ConfigError("unknown key " + key);
      } else if (section == "envelope") {
        if (!cfg.bounds.envelope) cfg.bounds.envelope = std::array<double, 3>{0, 0, 0};
        if (k == "a") (*cfg.bounds.envelope)[0] = num(key, v);
        else if (k == "b") (*cfg.bounds.envelope)[1] = num(key, v);
        else if (k == "delta") (*cfg.bounds.envelope)[2] = num(key, v);
        else throw ConfigError("unknown key " + key);
      } else if (section.rfind("iteration.", 0) == 0) {
        int m = static_cast<int>(integer(section, section.substr(10)));
        auto& c = iters[m];
        if (k == "R") c.rs[0] = num(key, v);
        else if (k == "S") c.rs[1] = num(key, v);
        else if (k == "D") {
          auto xs = parse_list(key, v);
          if (xs.size() != 5) throw ConfigError(key + " needs 5 values");
          std::copy(xs.begin(), xs.end(), c.D.begin());
        } else if (k == "C") {
          auto xs = parse_list(key, v);
          if (xs.size() != 2) throw ConfigError(key + " needs 2 values");
          std::copy(xs.begin(), xs.end(), c.C.begin());
        } else throw ConfigError("unknown key " + key);
      } else {
        throw ConfigError("unknown section [" + section + "]");
      }
    }
  }
  if (w_pos || w_neg) {
    DualRailMatrices w;
    if (w_pos) w.pos = *w_pos;
    if (w_neg) w.neg = *w_neg;
    cfg.initial_weights = w;
  }
  int expect = 1;
  for (const auto& [m, c] : iters) {
    if (m != expect) throw ConfigError("[iteration." + std::to_string(expect) + "] is missing");
    cfg.bounds.coeffs.push_back(c);
    ++expect;
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

void validate_config(const RunConfig& cfg) {
  if (cfg.p_batch < 1) throw ConfigError("batch must be positive");
  for (double T : cfg.T_grid)
    if (!(T > 0.0)) throw ConfigError("phase lengths must be positive");
  if (!(cfg.k > 1.0)) throw ConfigError("k must exceed 1");
  if (!(cfg.k_pre > 1.0)) throw ConfigError("k_pre must exceed 1");
  if (!(cfg.eta > 0.0 && cfg.eta <= 1.0)) throw ConfigError("eta must lie in (0, 1]");
  if (!(cfg.threshold > 0.0)) throw ConfigError("threshold must be positive");
  if (cfg.max_iterations < 0) throw ConfigError("max_iterations must be nonnegative");
  if (cfg.parallelism < 1) throw ConfigError("parallelism must be at least 1");
  if (!(cfg.c > 0.0)) throw ConfigError("c must be positive");
  if (!(cfg.integrator.rel_tol > 0.0) || !(cfg.integrator.abs_tol > 0.0))
    throw ConfigError("integrator tolerances must be positive");
  if (cfg.integrator.max_step && !(*cfg.integrator.max_step > 0.0))
    throw ConfigError("max_step must be positive");
}

DatasetSpec load_dataset(const std::string& name_or_path, const std::filesystem::path& base_dir,
                         std::vector<std::string>* warnings) {
  DatasetSpec ds;
  if (name_or_path == "OR" || name_or_path == "XOR") {
    ds.name = name_or_path;
    const bool x = name_or_path == "XOR";
    ds.chi = {{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, x ? 0.0 : 1.0}};
    return ds;
  }
  std::filesystem::path path = name_or_path;
  if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("dataset '" + name_or_path + "' is neither OR, XOR nor a readable file");
  ds.name = path.stem().string();
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto cols = split(t, ',');
    if (line_no == 1 && cols.size() == 3 && trim(cols[0]) == "x1") continue;  // header
    if (cols.size() != 3) throw ParseError("expected 3 columns x1,x2,d", line_no);
    std::array<double, 3> v{};
    for (int i = 0; i < 3; ++i) {
      try {
        v[i] = parse_double(cols[i]);
      } catch (const std::invalid_argument&) {
        throw ParseError("'" + trim(cols[i]) + "' is not a number", line_no);
      }
    }
    if (v[0] < 0 || v[1] < 0) throw ParseError("inputs must be nonnegative", line_no);
    if ((v[2] < 0 || v[2] > 1) && warnings)
      warnings->push_back("dataset line " + std::to_string(line_no) + ": target " + fmt(v[2]) +
                          " lies outside [0, 1]");
    if (v[2] < 0) throw ParseError("target must be nonnegative", line_no);
    ds.chi.push_back(v);
  }
  if (ds.chi.empty()) throw ParseError("dataset has no samples", line_no);
  return ds;
}

DualRailMatrices default_initial_weights(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.1, 0.9);
  DualRailMatrices w;
  for (auto& row : w.pos)
    for (auto& x : row) x = u(rng);
  return w;
}

BuildOptions build_options(const RunConfig& cfg) {
  return {cfg.k, cfg.k_pre, cfg.eta, cfg.threshold};
}

BfcnnBlueprint blueprint_for(const RunConfig& cfg, const DatasetSpec& ds) {
  NetworkShape shape{ds.p(), cfg.p_batch};
  return build_bfcnn(shape, ds, build_options(cfg),
                     cfg.initial_weights.value_or(default_initial_weights(cfg.seed)));
}

}  // namespace bfcnn
