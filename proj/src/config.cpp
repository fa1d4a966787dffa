#include "inverseset/config.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace inverseset {

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::sample: return "sample";
    case Algorithm::full_batch: return "full_batch";
    case Algorithm::ablate_codespace: return "ablate_codespace";
    case Algorithm::ablate_feasibility: return "ablate_feasibility";
    case Algorithm::maximize: return "maximize";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "sample") return Algorithm::sample;
  if (name == "full_batch") return Algorithm::full_batch;
  if (name == "ablate_codespace") return Algorithm::ablate_codespace;
  if (name == "ablate_feasibility") return Algorithm::ablate_feasibility;
  if (name == "maximize") return Algorithm::maximize;
  raise(Errc::config_invalid, "unknown algorithm '" + name + "'");
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

/// Flat "[section] / key = value" file with '#' comments. Keys are
/// addressed as section.key; consumption is tracked so typos fail loudly.
class KvFile {
 public:
  KvFile(const std::string& text, const std::string& origin) : origin_(origin) {
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        require(line.back() == ']', Errc::config_invalid,
                origin_ + ":" + std::to_string(lineno) + ": unterminated section");
        section = trim(line.substr(1, line.size() - 2));
        continue;
      }
      auto eq = line.find('=');
      require(eq != std::string::npos, Errc::config_invalid,
              origin_ + ":" + std::to_string(lineno) + ": expected key = value");
      std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      require(!key.empty(), Errc::config_invalid,
              origin_ + ":" + std::to_string(lineno) + ": empty key");
      std::string full = section.empty() ? key : section + "." + key;
      require(!entries_.count(full), Errc::config_invalid,
              origin_ + ": duplicate key '" + full + "'");
      entries_[full] = value;
    }
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::string get(const std::string& key) {
    auto it = entries_.find(key);
    require(it != entries_.end(), Errc::config_invalid,
            origin_ + ": missing required key '" + key + "'");
    consumed_.insert(key);
    return it->second;
  }

  std::string get_or(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    return get(key);
  }

  double get_double(const std::string& key) { return to_double(key, get(key)); }
  double get_double_or(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    return get_double(key);
  }

  long get_long(const std::string& key) { return to_long(key, get(key)); }
  long get_long_or(const std::string& key, long fallback) {
    if (!has(key)) return fallback;
    return get_long(key);
  }

  bool get_bool_or(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    std::string v = get(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    raise(Errc::config_invalid, origin_ + ": key '" + key +
                                    "' expects a boolean, got '" + v + "'");
  }

  double to_double(const std::string& key, const std::string& v) const {
    double out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    require(res.ec == std::errc() && res.ptr == v.data() + v.size() &&
                std::isfinite(out),
            Errc::config_invalid,
            origin_ + ": key '" + key + "' expects a number, got '" + v + "'");
    return out;
  }

  long to_long(const std::string& key, const std::string& v) const {
    long out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    require(res.ec == std::errc() && res.ptr == v.data() + v.size(),
            Errc::config_invalid,
            origin_ + ": key '" + key + "' expects an integer, got '" + v + "'");
    return out;
  }

  void fail_on_unconsumed() const {
    for (const auto& [key, value] : entries_)
      require(consumed_.count(key) != 0, Errc::config_invalid,
              origin_ + ": unknown key '" + key + "'");
  }

  const std::string& origin() const { return origin_; }

 private:
  std::string origin_;
  std::map<std::string, std::string> entries_;
  std::set<std::string> consumed_;
};

std::string resolve_path(const std::string& dir, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute() || dir.empty()) return path;
  return (std::filesystem::path(dir) / p).lexically_normal().string();
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& dir,
                              const std::string& origin) {
  KvFile kv(text, origin);
  ExperimentConfig cfg;
  cfg.config_text = text;
  cfg.config_dir = dir;

  cfg.problem.g_path = resolve_path(dir, kv.get("problem.G"));
  cfg.problem.e_path = resolve_path(dir, kv.get("problem.E"));
  for (int k = 1;; ++k) {
    std::string key = "problem.constraint" + std::to_string(k);
    if (!kv.has(key)) break;
    auto toks = tokens(kv.get(key));
    require(toks.size() == 3, Errc::config_invalid,
            origin + ": '" + key + "' expects '<model path> <z1> <z2>'");
    ConstraintConfig cc;
    cc.f_path = resolve_path(dir, toks[0]);
    cc.z1 = kv.to_double(key, toks[1]);
    cc.z2 = kv.to_double(key, toks[2]);
    cfg.problem.constraints.push_back(cc);
  }
  require(!cfg.problem.constraints.empty(), Errc::config_invalid,
          origin + ": at least problem.constraint1 is required");
  cfg.problem.mode =
      parse_feasibility_mode(kv.get_or("problem.feasibility_mode",
                                       "paper_one_sided"));

  cfg.algorithm = parse_algorithm(kv.get_or("run.algorithm", "sample"));
  cfg.K = static_cast<std::size_t>(kv.get_long_or("run.K", 10));
  cfg.n = static_cast<std::size_t>(kv.get_long_or("run.n", 100));
  cfg.rng_seed = static_cast<std::uint64_t>(kv.get_long_or("run.rng_seed", 1));
  std::string init = kv.get_or("run.init", "random");
  if (init == "random")
    cfg.init = InitKind::random;
  else if (init == "shared")
    cfg.init = InitKind::shared;
  else
    raise(Errc::config_invalid,
          origin + ": run.init must be 'random' or 'shared', got '" + init + "'");
  cfg.init_radius = kv.get_double_or("run.init_radius", 1.0);
  cfg.walk.beta = kv.get_double_or("run.beta", 1e-2);
  cfg.walk.max_walk_steps = kv.get_long_or("run.max_walk_steps", -1);
  std::string repulse = kv.get_or("run.repulse_history", "last");
  if (repulse == "all")
    cfg.walk.repulse_history = true;
  else
    require(repulse == "last", Errc::config_invalid,
            origin + ": run.repulse_history must be 'last' or 'all'");
  cfg.walk.duplicate_eps = kv.get_double_or("run.duplicate_eps", 1e-9);
  cfg.output_dir = kv.get_or("run.output_dir", "");

  cfg.schedule.mu0 = kv.get_double_or("schedule.mu0", 10.0);
  cfg.schedule.alpha = kv.get_double_or("schedule.alpha", 10.0);
  cfg.schedule.inner_steps =
      static_cast<int>(kv.get_long_or("schedule.inner_steps", 100));
  cfg.schedule.step_length_beta =
      kv.get_double_or("schedule.step_length_beta", 1e-2);
  cfg.schedule.max_outer_iters =
      static_cast<int>(kv.get_long_or("schedule.max_outer_iters", 50));

  cfg.options.multiplier_residual_with_slack =
      kv.get_bool_or("options.multiplier_residual_with_slack", false);
  std::string jitter = kv.get_or("options.symmetry_jitter", "auto");
  if (jitter == "auto")
    cfg.options.symmetry_jitter = -1;
  else if (jitter == "on")
    cfg.options.symmetry_jitter = 1;
  else if (jitter == "off")
    cfg.options.symmetry_jitter = 0;
  else
    raise(Errc::config_invalid,
          origin + ": options.symmetry_jitter must be auto, on or off");
  cfg.options.jitter_magnitude =
      kv.get_double_or("options.jitter_magnitude", 1e-6);

  cfg.maximize_steps = static_cast<int>(kv.get_long_or("maximize.steps", 200));
  cfg.maximize_regularizer =
      kv.get_double_or("maximize.regularizer_weight", 1e-3);

  cfg.coverage_resolution =
      static_cast<int>(kv.get_long_or("metrics.coverage_resolution", 50));
  auto parse_pair = [&](const std::string& key, std::array<double, 2> fallback) {
    if (!kv.has(key)) return fallback;
    auto toks = tokens(kv.get(key));
    require(toks.size() == 2, Errc::config_invalid,
            origin + ": '" + key + "' expects two numbers");
    return std::array<double, 2>{kv.to_double(key, toks[0]),
                                 kv.to_double(key, toks[1])};
  };
  cfg.coverage_lo = parse_pair("metrics.coverage_lo", cfg.coverage_lo);
  cfg.coverage_hi = parse_pair("metrics.coverage_hi", cfg.coverage_hi);

  if (kv.has("plot.coords")) {
    auto toks = tokens(kv.get("plot.coords"));
    require(toks.size() == 2, Errc::config_invalid,
            origin + ": plot.coords expects two encoding indices");
    for (const auto& t : toks)
      cfg.plot_coords.push_back(static_cast<std::size_t>(kv.to_long("plot.coords", t)));
  }

  kv.fail_on_unconsumed();

  if (cfg.algorithm != Algorithm::maximize) {
    require(cfg.K >= 1 && cfg.n >= cfg.K, Errc::config_invalid,
            origin + ": run requires n >= K >= 1 (K=" + std::to_string(cfg.K) +
                ", n=" + std::to_string(cfg.n) + ")");
  }
  for (std::size_t k = 0; k < cfg.problem.constraints.size(); ++k) {
    const auto& cc = cfg.problem.constraints[k];
    require(cc.z2 > cc.z1, Errc::config_invalid,
            origin + ": constraint" + std::to_string(k + 1) + " band [" +
                std::to_string(cc.z1) + ", " + std::to_string(cc.z2) +
                "] is degenerate: z2 must exceed z1");
  }
  validate_schedule(cfg.schedule);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::config_invalid, "cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string dir = std::filesystem::path(path).parent_path().string();
  return parse_config(buf.str(), dir, path);
}

InverseSetProblem build_problem(const ProblemConfig& config) {
  DiffMap G = load_model(config.g_path);
  DiffMap E = load_model(config.e_path);
  std::vector<ConstraintSpec> constraints;
  for (const auto& cc : config.constraints)
    constraints.push_back({load_model(cc.f_path), band_new(cc.z1, cc.z2)});
  return InverseSetProblem(std::move(G), std::move(E), std::move(constraints),
                           config.mode);
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string(buf);
}

namespace {
std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::model_load, "cannot open model file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}
}  // namespace

std::string problem_fingerprint(const ProblemConfig& config) {
  std::ostringstream blob;
  blob << slurp(config.g_path) << '\x1f' << slurp(config.e_path) << '\x1f';
  for (const auto& cc : config.constraints) {
    char z1[32], z2[32];
    auto r1 = std::to_chars(z1, z1 + sizeof z1, cc.z1);
    auto r2 = std::to_chars(z2, z2 + sizeof z2, cc.z2);
    blob << slurp(cc.f_path) << '\x1f' << std::string(z1, r1.ptr) << '\x1f'
         << std::string(z2, r2.ptr) << '\x1f';
  }
  blob << feasibility_mode_name(config.mode);
  return fnv1a_hex(blob.str());
}

}  // namespace inverseset
