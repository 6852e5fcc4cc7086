#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "algograph/errors.hpp"
#include "algograph/harness.hpp"
#include "algograph/http_backend.hpp"

namespace algograph::harness {

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& msg) const {
    const auto mark = node.Mark();
    if (mark.line < 0) throw ConfigError(fmt::format("{}: {}", source_, msg));
    throw ConfigError(fmt::format("{}:{}:{}: {}", source_, mark.line + 1, mark.column + 1, msg));
  }

  void only_keys(const YAML::Node& map, std::initializer_list<std::string_view> allowed) const {
    if (!map.IsMap()) fail(map, "expected a mapping");
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      bool ok = false;
      for (auto a : allowed) ok = ok || a == key;
      if (!ok) fail(kv.first, fmt::format("unknown key '{}'", key));
    }
  }

  template <typename T>
  T scalar(const YAML::Node& node, std::string_view what) const {
    if (!node.IsScalar()) fail(node, fmt::format("'{}' must be a scalar", what));
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, fmt::format("'{}' has an invalid value '{}'", what, node.Scalar()));
    }
  }

  std::size_t positive(const YAML::Node& node, std::string_view what) const {
    const auto v = scalar<long long>(node, what);
    if (v < 1) fail(node, fmt::format("'{}' must be >= 1", what));
    return static_cast<std::size_t>(v);
  }

  std::vector<std::size_t> sizes(const YAML::Node& node, std::string_view what) const {
    std::vector<std::size_t> out;
    if (node.IsSequence()) {
      if (node.size() == 0) fail(node, fmt::format("'{}' must not be empty", what));
      for (const auto& item : node) out.push_back(positive(item, what));
    } else {
      out.push_back(positive(node, what));
    }
    return out;
  }

  Curve curve(const YAML::Node& node, std::string_view what) const {
    if (node.IsScalar()) return Curve::constant(scalar<double>(node, what));
    only_keys(node, {"shape", "value", "center", "scale"});
    Curve c;
    const auto shape = node["shape"] ? scalar<std::string>(node["shape"], "shape") : "constant";
    if (shape == "constant") c.shape = Curve::Shape::constant;
    else if (shape == "logistic") c.shape = Curve::Shape::logistic;
    else if (shape == "saturating") c.shape = Curve::Shape::saturating;
    else if (shape == "linear") c.shape = Curve::Shape::linear;
    else fail(node["shape"], fmt::format("unknown curve shape '{}'", shape));
    if (node["value"]) c.value = scalar<double>(node["value"], "value");
    if (node["center"]) c.center = scalar<double>(node["center"], "center");
    if (node["scale"]) c.scale = scalar<double>(node["scale"], "scale");
    if (c.shape != Curve::Shape::constant && c.shape != Curve::Shape::linear && c.scale <= 0.0)
      fail(node, "curve scale must be positive");
    return c;
  }

  CostFunctions functions(const YAML::Node& node, CostFunctions f) const {
    if (node["kind"]) {
      try {
        f.kind = parse_cost_kind(scalar<std::string>(node["kind"], "kind"));
      } catch (const ConfigError& e) {
        fail(node["kind"], e.what());
      }
    }
    if (node["c_pre"]) f.c_pre = scalar<double>(node["c_pre"], "c_pre");
    if (node["c_dec"]) f.c_dec = scalar<double>(node["c_dec"], "c_dec");
    if (f.c_pre < 0 || f.c_dec < 0) fail(node, "cost constants must be non-negative");
    return f;
  }

  Parallelism parallelism(const YAML::Node& node) const {
    const auto text = scalar<std::string>(node, "p");
    if (text == "inf") return Parallelism::unbounded();
    return Parallelism::of(positive(node, "p"));
  }

  MockProfile profile(const YAML::Node& node, const std::string& name,
                      const std::map<std::string, MockProfile>& earlier) const {
    only_keys(node, {"base", "count_miss_rate", "count_false_rate", "count_verbose",
                     "sort_drop_rate", "sort_perturb_rate", "sort_perturb_scale", "sort_swap_rate",
                     "sort_monotone_perturb", "retrieval_p1", "retrieval_p2",
                     "mode1_unknown_share", "rag_p1", "rag_p2"});
    MockProfile p = exact_profile();
    if (node["base"]) {
      const auto base = scalar<std::string>(node["base"], "base");
      if (base == "exact") p = exact_profile();
      else if (base == "default") p = default_profile();
      else if (base == "type1") p = type1_profile();
      else if (auto it = earlier.find(base); it != earlier.end()) p = it->second;
      else fail(node["base"], fmt::format("unknown base profile '{}'", base));
    }
    p.name = name;
    auto set_curve = [&](const char* key, Curve& c) {
      if (node[key]) c = curve(node[key], key);
    };
    set_curve("count_miss_rate", p.count_miss_rate);
    set_curve("count_false_rate", p.count_false_rate);
    set_curve("sort_drop_rate", p.sort_drop_rate);
    set_curve("sort_perturb_rate", p.sort_perturb_rate);
    set_curve("sort_perturb_scale", p.sort_perturb_scale);
    set_curve("sort_swap_rate", p.sort_swap_rate);
    set_curve("retrieval_p1", p.retrieval_p1);
    set_curve("retrieval_p2", p.retrieval_p2);
    set_curve("rag_p1", p.rag_p1);
    set_curve("rag_p2", p.rag_p2);
    if (node["count_verbose"]) p.count_verbose = scalar<bool>(node["count_verbose"], "count_verbose");
    if (node["sort_monotone_perturb"])
      p.sort_monotone_perturb = scalar<bool>(node["sort_monotone_perturb"], "sort_monotone_perturb");
    if (node["mode1_unknown_share"]) {
      p.mode1_unknown_share = scalar<double>(node["mode1_unknown_share"], "mode1_unknown_share");
      if (p.mode1_unknown_share < 0 || p.mode1_unknown_share > 1)
        fail(node["mode1_unknown_share"], "mode1_unknown_share must be in [0, 1]");
    }
    return p;
  }

 private:
  std::string source_;
};

}  // namespace

std::string_view to_string(SweepMode mode) { return mode == SweepMode::vary_n ? "vary-n" : "vary-m"; }

BackendSpec BackendSpec::parse(std::string_view text) {
  BackendSpec spec;
  if (text.starts_with("mock:")) {
    spec.kind = Kind::mock;
    spec.profile = std::string(text.substr(5));
    if (spec.profile.empty()) throw ConfigError("mock backend needs a profile name");
  } else if (text.starts_with("http:")) {
    spec.kind = Kind::http;
    spec.url = std::string(text.substr(5));
    if (spec.url.find("://") == std::string::npos)
      throw ConfigError(fmt::format("http backend needs a full URL, got '{}'", spec.url));
  } else {
    throw ConfigError(fmt::format("backend must be mock:<profile> or http:<url>, got '{}'", text));
  }
  return spec;
}

SweepConfig parse_config(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(fmt::format("{}:{}:{}: {}", source, e.mark.line + 1, e.mark.column + 1, e.msg));
  }
  Reader r(source);
  r.only_keys(root, {"task", "mode", "n", "m", "trials", "seed", "backend", "workers", "output",
                     "merge", "needle_present", "failure_threshold", "cost_model", "http",
                     "profiles"});
  SweepConfig c;
  c.cost_model.system_prompt_tokens = 100;
  c.cost_model.parallelism = Parallelism::of(4);

  if (!root["task"]) r.fail(root, "missing required key 'task'");
  try {
    c.task = tasks::parse_task(r.scalar<std::string>(root["task"], "task"));
  } catch (const ConfigError& e) {
    r.fail(root["task"], e.what());
  }
  if (root["mode"]) {
    const auto mode = r.scalar<std::string>(root["mode"], "mode");
    if (mode == "vary-n") c.mode = SweepMode::vary_n;
    else if (mode == "vary-m") c.mode = SweepMode::vary_m;
    else r.fail(root["mode"], "mode must be 'vary-n' or 'vary-m'");
  }
  if (!root["n"]) r.fail(root, "missing required key 'n'");
  c.n_values = r.sizes(root["n"], "n");
  if (c.mode == SweepMode::vary_m) {
    if (c.n_values.size() != 1) r.fail(root["n"], "vary-m sweeps take a single n");
    if (!root["m"]) r.fail(root, "vary-m sweeps need 'm'");
    c.m_values = r.sizes(root["m"], "m");
  } else if (root["m"]) {
    r.fail(root["m"], "vary-n sweeps set m = n; remove 'm'");
  }
  if (root["trials"]) c.trials = r.positive(root["trials"], "trials");
  if (root["seed"]) c.seed = r.scalar<std::uint64_t>(root["seed"], "seed");
  if (root["workers"]) c.workers = r.positive(root["workers"], "workers");
  if (root["output"]) c.output = r.scalar<std::string>(root["output"], "output");
  if (root["needle_present"]) c.needle_present = r.scalar<bool>(root["needle_present"], "needle_present");
  if (root["failure_threshold"]) {
    c.failure_threshold = r.scalar<double>(root["failure_threshold"], "failure_threshold");
    if (c.failure_threshold < 0 || c.failure_threshold > 1)
      r.fail(root["failure_threshold"], "failure_threshold must be in [0, 1]");
  }
  if (root["merge"]) {
    try {
      c.merge = tasks::parse_merge_mode(r.scalar<std::string>(root["merge"], "merge"));
    } catch (const ConfigError& e) {
      r.fail(root["merge"], e.what());
    }
  }
  if (const auto cm = root["cost_model"]) {
    r.only_keys(cm, {"kind", "c_pre", "c_dec", "system_prompt_tokens", "p", "m_bar", "extra_p"});
    c.cost_model.functions = r.functions(cm, c.cost_model.functions);
    if (cm["system_prompt_tokens"])
      c.cost_model.system_prompt_tokens = r.scalar<std::uint64_t>(cm["system_prompt_tokens"], "system_prompt_tokens");
    if (cm["p"]) c.cost_model.parallelism = r.parallelism(cm["p"]);
    if (cm["m_bar"]) c.cost_model.max_subtask_size = r.positive(cm["m_bar"], "m_bar");
    if (const auto extra = cm["extra_p"]) {
      if (!extra.IsSequence()) r.fail(extra, "'extra_p' must be a list");
      for (const auto& p : extra) c.extra_parallelism.push_back(r.parallelism(p));
    }
  }
  if (const auto profiles = root["profiles"]) {
    if (!profiles.IsMap()) r.fail(profiles, "'profiles' must be a mapping");
    for (const auto& kv : profiles) {
      const auto name = kv.first.as<std::string>();
      if (name == "exact" || name == "default" || name == "type1")
        r.fail(kv.first, fmt::format("profile name '{}' is reserved", name));
      c.profiles[name] = r.profile(kv.second, name, c.profiles);
    }
  }
  if (root["backend"]) {
    try {
      c.backend = BackendSpec::parse(r.scalar<std::string>(root["backend"], "backend"));
    } catch (const ConfigError& e) {
      r.fail(root["backend"], e.what());
    }
  }
  if (const auto http = root["http"]) {
    r.only_keys(http, {"model", "temperature", "max_in_flight"});
    if (http["model"]) c.backend.model = r.scalar<std::string>(http["model"], "model");
    if (http["temperature"]) c.backend.temperature = r.scalar<double>(http["temperature"], "temperature");
    if (http["max_in_flight"]) c.backend.max_in_flight = r.positive(http["max_in_flight"], "max_in_flight");
  }
  if (c.backend.kind == BackendSpec::Kind::mock && !c.profiles.contains(c.backend.profile) &&
      c.backend.profile != "exact" && c.backend.profile != "default" && c.backend.profile != "type1") {
    r.fail(root["backend"] ? root["backend"] : root,
           fmt::format("unknown mock profile '{}'", c.backend.profile));
  }
  try {
    validate_config(c);
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", source, e.what()));
  }
  return c;
}

SweepConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

void validate_config(const SweepConfig& config) {
  if (config.trials == 0) throw ConfigError("trials must be >= 1");
  if (config.n_values.empty()) throw ConfigError("no problem sizes given");
  const bool overlapping = decomposition_rule(config.task) == DecompositionKind::overlapping_half;
  for (const auto& point : grid(config)) {
    if (point.m == 0) throw ConfigError("m must be >= 1");
    if (overlapping && point.m < 2) throw ConfigError("half-overlap chunks need m >= 2");
    if (std::min(point.m, point.n) > config.cost_model.max_subtask_size)
      throw ConfigError(fmt::format("m = {} exceeds m_bar = {}", point.m,
                                    config.cost_model.max_subtask_size));
  }
  for (std::size_t n : config.n_values) {
    // Generation enforces each task's minimum size.
    (void)tasks::generate_instance(config.task, n, config.seed,
                                   tasks::GenerateOptions{config.needle_present});
  }
}

MockProfile resolve_profile(const SweepConfig& config, const std::string& name) {
  if (auto it = config.profiles.find(name); it != config.profiles.end()) return it->second;
  if (name == "exact") return exact_profile();
  if (name == "default") return default_profile();
  if (name == "type1") return type1_profile();
  throw ConfigError(fmt::format("unknown mock profile '{}'", name));
}

std::unique_ptr<LlmBackend> make_backend(const SweepConfig& config) {
  if (config.backend.kind == BackendSpec::Kind::mock) {
    auto profile = resolve_profile(config, config.backend.profile);
    // Simulated call latency follows the sweep's cost model.
    profile.latency = config.cost_model.functions;
    return std::make_unique<MockBackend>(std::move(profile));
  }
  HttpBackendConfig http;
  http.url = config.backend.url;
  http.model = config.backend.model;
  http.api_key = api_key_from_env();
  http.temperature = config.backend.temperature;
  http.max_in_flight = config.backend.max_in_flight;
  return std::make_unique<HttpBackend>(std::move(http));
}

std::vector<GridPoint> grid(const SweepConfig& config) {
  std::vector<GridPoint> out;
  if (config.mode == SweepMode::vary_n) {
    for (std::size_t n : config.n_values) out.push_back({n, n});
  } else {
    for (std::size_t m : config.m_values) out.push_back({config.n_values.front(), m});
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace algograph::harness
