#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "algograph/errors.hpp"
#include "algograph/harness.hpp"
#include "algograph/seed.hpp"

namespace {

using namespace algograph;

constexpr int kConfigError = 2;
constexpr int kBackendError = 3;
constexpr int kThresholdExceeded = 4;

struct Overrides {
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string backend;
  std::string dump_dir;
  std::optional<std::size_t> workers;
};

harness::SweepConfig load(const std::string& path, const Overrides& o) {
  auto config = harness::load_config(path);
  if (!o.out.empty()) config.output = o.out;
  if (o.seed) config.seed = *o.seed;
  if (!o.backend.empty()) {
    const auto spec = harness::BackendSpec::parse(o.backend);
    config.backend.kind = spec.kind;
    config.backend.profile = spec.profile;
    config.backend.url = spec.url;
  }
  if (o.workers) config.workers = *o.workers;
  harness::validate_config(config);
  return config;
}

// Writes to config.output, or stdout when unset.
template <typename Fn>
void emit(const std::string& path, Fn&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError(fmt::format("cannot open output file '{}'", path));
  write(file);
}

int cmd_run(const std::string& path, const Overrides& o) {
  const auto config = load(path, o);
  const auto backend = harness::make_backend(config);
  const auto point = harness::grid(config).front();
  const auto seed = harness::trial_seed(config.seed, point, 0);
  const auto instance = tasks::generate_instance(config.task, point.n, seed,
                                                 tasks::GenerateOptions{config.needle_present});
  tasks::SolveOptions options;
  options.seed = derive_seed(seed, {0x501eULL});
  options.merge = config.merge;
  options.workers = config.workers;
  const auto result = tasks::solve(instance, point.m, *backend, options);
  const auto costs = trace_costs(result.trace, config.cost_model);
  const auto metrics = harness::compute_metrics(instance, result);
  const auto columns = harness::metric_columns(config.task);

  emit(config.output, [&](std::ostream& out) {
    out << fmt::format("task: {}\nn: {}\nm: {}\nk: {}\nseed: {}\n", tasks::to_string(config.task),
                       point.n, result.plan.m, result.plan.k, seed);
    out << "answer: " << describe(result.answer) << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i)
      out << fmt::format("{}: {}\n", columns[i], metrics[i]);
    out << fmt::format("prefill_tokens_total: {}\ndecode_tokens_total: {}\ncall_count: {}\n",
                       costs.prefill_tokens_total, costs.decode_tokens_total, costs.call_count);
    out << fmt::format("latency_sequential: {}\nlatency_p{}: {}\nlatency_inf: {}\n",
                       costs.latency_sequential, config.cost_model.parallelism.label(),
                       costs.latency_parallel_p, costs.latency_parallel_inf);
    out << fmt::format("parse_failures: {}\n", result.trace.parse_failures.size());
  });
  return 0;
}

int cmd_sweep(const std::string& path, const Overrides& o, const std::string& summary_path) {
  const auto config = load(path, o);
  const auto backend = harness::make_backend(config);
  harness::SweepOptions options;
  if (!o.dump_dir.empty()) options.dump_instances = o.dump_dir;
  const auto result = harness::run_sweep(config, *backend, options);
  emit(config.output, [&](std::ostream& out) { harness::write_csv(out, result); });
  if (!summary_path.empty()) {
    const auto summary = harness::summarize(result);
    for (const auto& w : summary.warnings) std::cerr << "warning: " << w << '\n';
    emit(summary_path, [&](std::ostream& out) { harness::write_summary_csv(out, summary); });
  }
  if (result.failures() > 0)
    std::cerr << fmt::format("{} of {} trials failed\n", result.failures(), result.rows.size());
  return result.exceeded(config.failure_threshold) ? kThresholdExceeded : 0;
}

int cmd_predict(const std::string& path, const Overrides& o) {
  const auto config = load(path, o);
  const auto rows = harness::predict(config);
  emit(config.output, [&](std::ostream& out) { harness::write_prediction_csv(out, config, rows); });
  return 0;
}

int cmd_validate(const std::string& path, const Overrides& o) {
  const auto config = load(path, o);
  std::cout << fmt::format("{}: ok ({} grid points x {} trials)\n", path, harness::grid(config).size(),
                           config.trials);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Run and analyze LLM-based algorithms expressed as computational graphs"};
  app.require_subcommand(1);

  Overrides o;
  std::string config_path;
  std::string summary_path;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "YAML sweep description")->required();
    sub->add_option("--out", o.out, "output path (default stdout)");
    sub->add_option("--seed", o.seed, "base seed");
    sub->add_option("--backend", o.backend, "mock:<profile> or http:<url>");
    sub->add_option("--workers", o.workers, "concurrent trials")->check(CLI::PositiveNumber);
  };

  auto* run = app.add_subcommand("run", "solve one instance and print the answer and cost report");
  add_common(run);
  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep and write CSV");
  add_common(sweep);
  sweep->add_option("--dump-instances", o.dump_dir, "write every generated instance here");
  sweep->add_option("--summary", summary_path, "also write mean/std per grid point");
  auto* predict = app.add_subcommand("predict", "write analytic cost and latency predictions");
  add_common(predict);
  auto* validate = app.add_subcommand("validate", "check a config file");
  add_common(validate);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, o);
    if (sweep->parsed()) return cmd_sweep(config_path, o, summary_path);
    if (predict->parsed()) return cmd_predict(config_path, o);
    return cmd_validate(config_path, o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const BackendError& e) {
    std::cerr << "backend error: " << e.what() << '\n';
    return kBackendError;
  } catch (const ExecutionError& e) {
    std::cerr << "execution error: " << e.what() << '\n';
    return kBackendError;
  }
}
