#include "curator/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

#include "curator/error.hpp"

namespace curator {

namespace {

constexpr std::string_view kDefaultPrefix =
    "SST-P1-H{hypercubes}-C{num_hypercubes}-X{method}-ns{num_samples}"
    "-window{window}";

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ", ";
    out += s;
  }
  return out;
}

}  // namespace

std::string_view to_string(PointMethod m) {
  switch (m) {
    case PointMethod::full: return "full";
    case PointMethod::random: return "random";
    case PointMethod::stratified: return "stratified";
    case PointMethod::lhs: return "lhs";
    case PointMethod::uips: return "uips";
    case PointMethod::maxent: return "maxent";
  }
  return "?";
}

std::string_view to_string(CubeMethod m) {
  return m == CubeMethod::maxent ? "maxent" : "random";
}

std::vector<std::string> point_method_names() {
  return {"full", "random", "stratified", "lhs", "uips", "maxent"};
}

PointMethod parse_point_method(std::string_view name) {
  for (auto m : {PointMethod::full, PointMethod::random,
                 PointMethod::stratified, PointMethod::lhs, PointMethod::uips,
                 PointMethod::maxent}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown method '" + std::string(name) +
                    "' (valid: " + join(point_method_names()) + ")");
}

CubeMethod parse_cube_method(std::string_view name) {
  if (name == "maxent") return CubeMethod::maxent;
  if (name == "random") return CubeMethod::random;
  throw ConfigError("unknown hypercubes method '" + std::string(name) +
                    "' (valid: maxent, random)");
}

GridDims RunConfig::grid_dims() const {
  auto strided = [](std::size_t n, std::size_t s) { return (n + s - 1) / s; };
  GridDims g;
  g.dims = dataset.dims;
  g.nx = strided(dataset.nx, dataset.skip[0]);
  g.ny = strided(dataset.ny, dataset.skip[1]);
  g.nz = dataset.dims == 2 ? 1 : strided(dataset.nz, dataset.skip[2]);
  g.nt = 1;
  return g;
}

void RunConfig::validate_sampling() const {
  const auto& s = sampling;
  if (s.num_hypercubes < 1) throw ConfigError("num_hypercubes must be >= 1");
  if (s.num_clusters < 1) throw ConfigError("num_clusters must be >= 1");
  for (auto e : s.cube) {
    if (e < 1) throw ConfigError("cube extents (nxsl/nysl/nzsl) must be >= 1");
  }
  const std::size_t volume = s.cube[0] * s.cube[1] * s.cube[2];
  if (s.method != PointMethod::full) {
    if (s.num_samples < 1) throw ConfigError("num_samples must be >= 1");
    if (s.num_samples > volume) {
      throw ConfigError("num_samples (" + std::to_string(s.num_samples) +
                        ") exceeds cube volume nxsl*nysl*nzsl (" +
                        std::to_string(volume) + ")");
    }
  }
  if (s.bins < 1) throw ConfigError("bins must be >= 1");
  if (s.workers < 1) throw ConfigError("workers must be >= 1");
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::size_t points_for_rate(double rate, std::size_t volume) {
  if (rate < 0.0 || rate > 1.0) {
    throw std::invalid_argument("sampling rate must lie in [0, 1]");
  }
  return static_cast<std::size_t>(
      std::floor(rate * static_cast<double>(volume) + 0.5));
}

namespace {

// Repairs two quirks of hand-written configs so they parse: Python-style
// string continuation (`"a"+\` newline `"b"`) and a `key:` line indented
// deeper than the preceding `key: value` sibling.
std::string normalize_yaml(std::string_view text) {
  static const std::regex continuation("\"[ \\t]*\\+[ \\t]*\\\\[ \\t]*\\r?\\n[ \\t]*\"");
  std::string joined = std::regex_replace(std::string(text), continuation, "");

  static const std::regex key_line("^([ ]*)([A-Za-z_][A-Za-z0-9_\\-]*)[ ]*:(.*)$");
  std::istringstream in(joined);
  std::ostringstream out;
  std::string line;
  std::size_t prev_indent = 0;
  bool prev_scalar_entry = false;
  while (std::getline(in, line)) {
    std::smatch m;
    if (std::regex_match(line, m, key_line)) {
      std::size_t indent = m[1].length();
      if (prev_scalar_entry && indent > prev_indent) {
        indent = prev_indent;
        line = std::string(indent, ' ') + line.substr(m[1].length());
      }
      std::string rest = m[3].str();
      const auto first = rest.find_first_not_of(" \t");
      prev_scalar_entry = first != std::string::npos && rest[first] != '#';
      prev_indent = indent;
    } else if (line.find_first_not_of(" \t") != std::string::npos) {
      prev_scalar_entry = false;
    }
    out << line << '\n';
  }
  return out.str();
}

YAML::Node load_yaml(std::string_view text) {
  try {
    return YAML::Load(std::string(text));
  } catch (const YAML::Exception&) {
  }
  try {
    return YAML::Load(normalize_yaml(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("malformed YAML: ") + e.what());
  }
}

class Section {
 public:
  Section(YAML::Node node, std::string name)
      : node_(std::move(node)), name_(std::move(name)) {}

  bool has(const std::string& key) const {
    return node_ && node_.IsMap() && node_[key] && !node_[key].IsNull();
  }

  YAML::Node get(const std::string& key) const {
    if (!has(key)) {
      throw ConfigError("missing required key '" + key + "' in section '" +
                        name_ + "'");
    }
    return node_[key];
  }

  template <typename T>
  T as(const std::string& key) const {
    try {
      return get(key).as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError("invalid value for '" + key + "' in section '" +
                        name_ + "'");
    }
  }

  template <typename T>
  T as_or(const std::string& key, T fallback) const {
    return has(key) ? as<T>(key) : fallback;
  }

  std::size_t positive(const std::string& key) const {
    long long v = as<long long>(key);
    if (v <= 0) {
      throw ConfigError("'" + key + "' must be positive (got " +
                        std::to_string(v) + ")");
    }
    return static_cast<std::size_t>(v);
  }

  std::size_t positive_or(const std::string& key, std::size_t fallback) const {
    return has(key) ? positive(key) : fallback;
  }

  // Scalar or sequence of strings.
  std::vector<std::string> names(const std::string& key) const {
    YAML::Node n = get(key);
    std::vector<std::string> out;
    if (n.IsSequence()) {
      for (const auto& item : n) out.push_back(item.as<std::string>());
    } else {
      out.push_back(n.as<std::string>());
    }
    return out;
  }

 private:
  YAML::Node node_;
  std::string name_;
};

}  // namespace

RunConfig parse_config(std::string_view yaml_text) {
  YAML::Node root = load_yaml(yaml_text);
  if (!root || !root.IsMap()) throw ConfigError("config must be a YAML mapping");
  if (!root["shared"]) throw ConfigError("missing required key 'shared'");
  if (!root["subsample"] && !root["train"] && !root["generate"]) {
    throw ConfigError(
        "config needs at least one of 'subsample', 'train' or 'generate'");
  }

  RunConfig cfg;
  Section shared(root["shared"], "shared");
  auto& ds = cfg.dataset;
  ds.dims = shared.as_or<int>("dims", 3);
  if (ds.dims != 2 && ds.dims != 3) throw ConfigError("'dims' must be 2 or 3");
  ds.dtype = shared.as_or<std::string>("dtype", ds.dtype);
  ds.path = shared.as_or<std::string>("path", "");
  ds.nx = shared.positive("nx");
  ds.ny = shared.positive("ny");
  ds.nz = ds.dims == 3 ? shared.positive("nz") : shared.positive_or("nz", 1);
  if (ds.dims == 2 && ds.nz != 1) throw ConfigError("2D configs need nz = 1");
  ds.roles.input_vars = shared.names("input_vars");
  if (shared.has("output_vars")) ds.roles.output_vars = shared.names("output_vars");
  ds.roles.cluster_var = shared.as<std::string>("cluster_var");
  ds.gravity = shared.as_or<std::string>("gravity", ds.gravity);
  ds.fileprefix = shared.as_or<std::string>("fileprefix", "");
  ds.precision = shared.as_or<int>("precision", 8);
  if (ds.precision != 4 && ds.precision != 8) {
    throw ConfigError("'precision' must be 4 or 8");
  }
  ds.skip = {shared.positive_or("nxskip", 1), shared.positive_or("nyskip", 1),
             shared.positive_or("nzskip", 1)};
  if (shared.has("timesteps")) {
    YAML::Node ts = shared.get("timesteps");
    if (ts.IsScalar() && ts.Scalar() == "all") {
      ds.timesteps.reset();
    } else {
      std::vector<long> list;
      try {
        if (ts.IsSequence()) {
          for (const auto& t : ts) list.push_back(t.as<long>());
        } else {
          list.push_back(ts.as<long>());
        }
      } catch (const YAML::Exception&) {
        throw ConfigError("'timesteps' must be \"all\" or a list of integers");
      }
      ds.timesteps = std::move(list);
    }
  }

  if (root["subsample"]) {
    cfg.has_subsample = true;
    Section sub(root["subsample"], "subsample");
    auto& s = cfg.sampling;
    s.hypercubes = parse_cube_method(sub.as_or<std::string>("hypercubes", "random"));
    s.method = parse_point_method(sub.as_or<std::string>("method", "maxent"));
    s.num_hypercubes = sub.positive("num_hypercubes");
    s.num_samples = s.method == PointMethod::full
                        ? sub.positive_or("num_samples", 0)
                        : sub.positive("num_samples");
    s.num_clusters = sub.positive_or("num_clusters", 20);
    s.cube = {sub.positive("nxsl"), sub.positive("nysl"),
              ds.dims == 3 ? sub.positive("nzsl") : sub.positive_or("nzsl", 1)};
    s.strata = {sub.positive_or("strata_x", 4), sub.positive_or("strata_y", 4),
                ds.dims == 3 ? sub.positive_or("strata_z", 4) : 1};
    s.bins = sub.positive_or("bins", 100);
    if (sub.has("uips_vars")) s.uips_vars = sub.names("uips_vars");
    if (sub.has("seed")) {
      auto text = sub.as<std::string>("seed");
      if (text == "unseeded") {
        s.seed.reset();
      } else {
        s.seed = sub.as<std::uint64_t>("seed");
      }
    }
    s.workers = sub.positive_or("workers", 1);
    // A path under `subsample` (as in older configs) names the data.
    if (sub.has("path")) ds.path = sub.as<std::string>("path");
    cfg.validate_sampling();
  }

  if (root["generate"]) {
    Section gen(root["generate"], "generate");
    GenerateConfig g;
    g.kind = gen.as<std::string>("kind");
    g.nt = gen.positive_or("nt", 1);
    g.time = gen.as_or<double>("t", 0.0);
    g.seed = gen.as_or<std::uint64_t>("seed", 0);
    for (const auto& kv : root["generate"]) {
      const auto key = kv.first.as<std::string>();
      if (key == "kind" || key == "nt" || key == "t" || key == "seed") continue;
      try {
        g.params[key] = kv.second.as<double>();
      } catch (const YAML::Exception&) {
        throw ConfigError("generator parameter '" + key + "' must be numeric");
      }
    }
    cfg.generate = std::move(g);
  }

  if (root["compare"]) {
    Section cmp(root["compare"], "compare");
    if (cmp.has("methods")) {
      cfg.compare.methods = cmp.names("methods");
      for (const auto& m : cfg.compare.methods) parse_point_method(m);
    }
    if (cmp.has("seeds")) {
      cfg.compare.seeds.clear();
      for (const auto& s : cmp.get("seeds")) {
        cfg.compare.seeds.push_back(s.as<std::uint64_t>());
      }
    }
  }

  if (root["bench"]) {
    Section bench(root["bench"], "bench");
    if (bench.has("worker_counts")) {
      for (const auto& w : bench.get("worker_counts")) {
        auto v = w.as<long long>();
        if (v <= 0) throw ConfigError("worker_counts must be positive");
        cfg.bench.worker_counts.push_back(static_cast<std::size_t>(v));
      }
    }
    cfg.bench.repeats = bench.positive_or("repeats", 3);
    cfg.bench.knee_threshold = bench.as_or<double>("knee_threshold", 0.5);
  }

  if (root["train"] && root["train"].IsMap()) {
    for (const auto& kv : root["train"]) {
      const auto key = kv.first.as<std::string>();
      if (kv.second.IsScalar()) {
        cfg.train[key] = kv.second.Scalar();
      } else {
        YAML::Emitter e;
        e << YAML::Flow << kv.second;
        cfg.train[key] = e.c_str();
      }
    }
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string emit_config(const RunConfig& c) {
  YAML::Emitter e;
  e << YAML::BeginMap;

  const auto& ds = c.dataset;
  e << YAML::Key << "shared" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "dims" << YAML::Value << ds.dims;
  e << YAML::Key << "dtype" << YAML::Value << ds.dtype;
  if (!ds.path.empty()) e << YAML::Key << "path" << YAML::Value << ds.path;
  e << YAML::Key << "input_vars" << YAML::Value << YAML::Flow
    << ds.roles.input_vars;
  e << YAML::Key << "output_vars" << YAML::Value << YAML::Flow
    << ds.roles.output_vars;
  e << YAML::Key << "cluster_var" << YAML::Value << ds.roles.cluster_var;
  e << YAML::Key << "nx" << YAML::Value << ds.nx;
  e << YAML::Key << "ny" << YAML::Value << ds.ny;
  e << YAML::Key << "nz" << YAML::Value << ds.nz;
  e << YAML::Key << "gravity" << YAML::Value << ds.gravity;
  e << YAML::Key << "precision" << YAML::Value << ds.precision;
  e << YAML::Key << "nxskip" << YAML::Value << ds.skip[0];
  e << YAML::Key << "nyskip" << YAML::Value << ds.skip[1];
  e << YAML::Key << "nzskip" << YAML::Value << ds.skip[2];
  if (ds.timesteps) {
    e << YAML::Key << "timesteps" << YAML::Value << YAML::Flow << *ds.timesteps;
  } else {
    e << YAML::Key << "timesteps" << YAML::Value << "all";
  }
  if (!ds.fileprefix.empty()) {
    e << YAML::Key << "fileprefix" << YAML::Value << YAML::DoubleQuoted
      << ds.fileprefix;
  }
  e << YAML::EndMap;

  if (c.has_subsample) {
    const auto& s = c.sampling;
    e << YAML::Key << "subsample" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "hypercubes" << YAML::Value << std::string(to_string(s.hypercubes));
    e << YAML::Key << "num_hypercubes" << YAML::Value << s.num_hypercubes;
    e << YAML::Key << "method" << YAML::Value << std::string(to_string(s.method));
    if (s.num_samples > 0) {
      e << YAML::Key << "num_samples" << YAML::Value << s.num_samples;
    }
    e << YAML::Key << "num_clusters" << YAML::Value << s.num_clusters;
    e << YAML::Key << "nxsl" << YAML::Value << s.cube[0];
    e << YAML::Key << "nysl" << YAML::Value << s.cube[1];
    e << YAML::Key << "nzsl" << YAML::Value << s.cube[2];
    e << YAML::Key << "strata_x" << YAML::Value << s.strata[0];
    e << YAML::Key << "strata_y" << YAML::Value << s.strata[1];
    e << YAML::Key << "strata_z" << YAML::Value << s.strata[2];
    e << YAML::Key << "bins" << YAML::Value << s.bins;
    if (!s.uips_vars.empty()) {
      e << YAML::Key << "uips_vars" << YAML::Value << YAML::Flow << s.uips_vars;
    }
    if (s.seed) {
      e << YAML::Key << "seed" << YAML::Value << *s.seed;
    } else {
      e << YAML::Key << "seed" << YAML::Value << "unseeded";
    }
    e << YAML::Key << "workers" << YAML::Value << s.workers;
    e << YAML::EndMap;
  }

  if (c.generate) {
    const auto& g = *c.generate;
    e << YAML::Key << "generate" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "kind" << YAML::Value << g.kind;
    e << YAML::Key << "nt" << YAML::Value << g.nt;
    e << YAML::Key << "t" << YAML::Value << YAML::Precision(17) << g.time;
    e << YAML::Key << "seed" << YAML::Value << g.seed;
    for (const auto& [k, v] : g.params) {
      e << YAML::Key << k << YAML::Value << YAML::Precision(17) << v;
    }
    e << YAML::EndMap;
  }

  e << YAML::Key << "compare" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "methods" << YAML::Value << YAML::Flow << c.compare.methods;
  if (!c.compare.seeds.empty()) {
    e << YAML::Key << "seeds" << YAML::Value << YAML::Flow << c.compare.seeds;
  }
  e << YAML::EndMap;

  e << YAML::Key << "bench" << YAML::Value << YAML::BeginMap;
  if (!c.bench.worker_counts.empty()) {
    e << YAML::Key << "worker_counts" << YAML::Value << YAML::Flow
      << c.bench.worker_counts;
  }
  e << YAML::Key << "repeats" << YAML::Value << c.bench.repeats;
  e << YAML::Key << "knee_threshold" << YAML::Value << YAML::Precision(17)
    << c.bench.knee_threshold;
  e << YAML::EndMap;

  if (!c.train.empty()) {
    e << YAML::Key << "train" << YAML::Value << YAML::BeginMap;
    for (const auto& [k, v] : c.train) {
      // Values that were sequences/maps are stored as flow text; re-parse so
      // they are emitted structurally rather than as quoted strings.
      YAML::Node n = YAML::Load(v);
      if (n.IsScalar()) {
        e << YAML::Key << k << YAML::Value << v;
      } else {
        e << YAML::Key << k << YAML::Value << YAML::Flow << n;
      }
    }
    e << YAML::EndMap;
  }
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

std::string file_prefix(const RunConfig& c) {
  std::string out = c.dataset.fileprefix.empty() ? std::string(kDefaultPrefix)
                                                 : c.dataset.fileprefix;
  auto window = c.train.contains("window") ? c.train.at("window") : "1";
  const std::map<std::string, std::string> fields{
      {"hypercubes", std::string(to_string(c.sampling.hypercubes))},
      {"num_hypercubes", std::to_string(c.sampling.num_hypercubes)},
      {"method", std::string(to_string(c.sampling.method))},
      {"num_samples", std::to_string(c.sampling.num_samples)},
      {"num_clusters", std::to_string(c.sampling.num_clusters)},
      {"window", window},
  };
  for (const auto& [key, value] : fields) {
    const std::string token = "{" + key + "}";
    for (auto pos = out.find(token); pos != std::string::npos;
         pos = out.find(token, pos + value.size())) {
      out.replace(pos, token.size(), value);
    }
  }
  return out;
}

}  // namespace curator
