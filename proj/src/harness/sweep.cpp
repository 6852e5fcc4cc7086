#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "algograph/errors.hpp"
#include "algograph/harness.hpp"
#include "algograph/metrics.hpp"
#include "algograph/seed.hpp"

namespace algograph::harness {

using tasks::TaskKind;

std::vector<std::string> metric_columns(TaskKind task) {
  using namespace metrics;
  switch (task) {
    case TaskKind::counting: return {std::string(kErrAbs), std::string(kErrNorm)};
    case TaskKind::sorting:
      return {std::string(kErrExact), std::string(kErrNonMono), std::string(kErrLenMis),
              std::string(kErrLinf), std::string(kErrL1)};
    case TaskKind::retrieval: return {std::string(kErrRetrieval)};
    case TaskKind::rag: return {std::string(kErrExact), std::string(kErrDigits)};
  }
  return {};
}

std::vector<double> compute_metrics(const tasks::Instance& instance,
                                    const tasks::SolveResult& result) {
  struct Visitor {
    const tasks::SolveResult& r;
    std::vector<double> operator()(const tasks::CountingInstance& i) const {
      const auto e = metrics::counting_errors(std::get<std::int64_t>(r.answer), i.truth, i.text.size());
      return {e.absolute, e.normalized};
    }
    std::vector<double> operator()(const tasks::SortingInstance& i) const {
      const auto e = metrics::sorting_errors(std::get<RealList>(r.answer), i.truth);
      return {e.exact_match, e.non_monotonicity, e.length_mismatch, e.fuzzy_linf, e.fuzzy_l1};
    }
    std::vector<double> operator()(const tasks::HaystackInstance& i) const {
      return {metrics::retrieval_error(std::get<AnswerRecord>(r.answer), i.truth)};
    }
    std::vector<double> operator()(const tasks::RagInstance& i) const {
      const auto e = metrics::rag_errors(std::get<Text>(r.answer), i.truth);
      return {e.exact_match, e.digit_fraction_wrong};
    }
  };
  return std::visit(Visitor{result}, instance);
}

std::uint64_t trial_seed(std::uint64_t base, GridPoint point, std::size_t trial) {
  return derive_seed(base, {point.n, point.m, trial});
}

namespace {

std::vector<Parallelism> latency_levels(const SweepConfig& config) {
  std::vector<Parallelism> levels{Parallelism::of(1), Parallelism::of(4), Parallelism::unbounded()};
  auto add = [&](Parallelism p) {
    if (std::find(levels.begin(), levels.end(), p) == levels.end()) levels.push_back(p);
  };
  add(config.cost_model.parallelism);
  for (auto p : config.extra_parallelism) add(p);
  return levels;
}

std::string latency_column(Parallelism p) {
  if (p.is_unbounded()) return "latency_inf";
  if (p.degree() == 1) return "latency_sequential";
  return fmt::format("latency_p{}", p.degree());
}

std::string cell(double v) { return fmt::format("{}", v); }

}  // namespace

std::size_t SweepResult::failures() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(),
                                                [](const TrialRow& r) { return r.failed; }));
}

bool SweepResult::exceeded(double threshold) const {
  return !rows.empty() &&
         static_cast<double>(failures()) > threshold * static_cast<double>(rows.size());
}

SweepResult run_sweep(const SweepConfig& config, const LlmBackend& backend,
                      const SweepOptions& options) {
  validate_config(config);
  const auto levels = latency_levels(config);
  SweepResult result;
  result.task = config.task;
  result.mode = config.mode;
  result.metric_columns = metric_columns(config.task);
  result.cost_columns = {"prefill_tokens_total", "decode_tokens_total", "call_count"};
  for (auto p : levels) result.cost_columns.push_back(latency_column(p));

  struct Job {
    GridPoint point;
    std::size_t trial;
  };
  std::vector<Job> jobs;
  for (const auto& point : grid(config))
    for (std::size_t t = 0; t < config.trials; ++t) jobs.push_back({point, t});
  result.rows.resize(jobs.size());

  if (options.dump_instances) std::filesystem::create_directories(*options.dump_instances);
  const bool real_clock = !backend.deterministic();

  auto run_job = [&](std::size_t index) {
    const Job& job = jobs[index];
    TrialRow& row = result.rows[index];
    row.point = job.point;
    row.trial = job.trial;
    row.seed = trial_seed(config.seed, job.point, job.trial);
    const auto instance = tasks::generate_instance(config.task, job.point.n, row.seed,
                                                   tasks::GenerateOptions{config.needle_present});
    if (options.dump_instances) {
      std::ofstream out(*options.dump_instances /
                        fmt::format("{}-n{}-m{}-t{}.txt", tasks::to_string(config.task),
                                    job.point.n, job.point.m, job.trial));
      tasks::write_instance(out, instance);
    }
    if (job.point.m > job.point.n) row.warning = fmt::format("m={} > n clamped to single call", job.point.m);
    tasks::SolveOptions solve_options;
    solve_options.seed = derive_seed(row.seed, {0x501eULL});
    solve_options.merge = config.merge;
    const auto started = std::chrono::steady_clock::now();
    try {
      const auto solved = tasks::solve(instance, job.point.m, backend, solve_options);
      const auto elapsed = std::chrono::steady_clock::now() - started;
      row.k = solved.plan.k;
      if (solved.plan.rounded) row.warning = fmt::format("odd m={} rounded down to {}", job.point.m, solved.plan.m);
      row.metrics = compute_metrics(instance, solved);
      row.costs = {static_cast<double>(solved.trace.prompt_tokens_total()),
                   static_cast<double>(solved.trace.completion_tokens_total()),
                   static_cast<double>(solved.trace.exchanges.size())};
      for (auto p : levels) row.costs.push_back(trace_latency(solved.trace, p));
      if (real_clock) row.wall_ms = std::chrono::duration<double, std::milli>(elapsed).count();
    } catch (const ExecutionError& e) {
      row.failed = true;
      row.warning = e.what();
    } catch (const BackendError& e) {
      row.failed = true;
      row.warning = e.what();
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(config.workers, jobs.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) run_job(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
              run_job(i);
            } catch (...) {
              std::lock_guard lock(error_mutex);
              if (!first_error) first_error = std::current_exception();
            }
          }
        });
      }
    }
    if (first_error) std::rethrow_exception(first_error);
  }
  return result;
}

void write_csv(std::ostream& out, const SweepResult& result) {
  out << "task,mode,n,m,k,trial,seed,failed,warning";
  for (const auto& c : result.metric_columns) out << ',' << c;
  for (const auto& c : result.cost_columns) out << ',' << c;
  out << ",wall_ms\n";
  for (const auto& row : result.rows) {
    std::string warning = row.warning;
    std::replace(warning.begin(), warning.end(), ',', ';');
    std::replace(warning.begin(), warning.end(), '\n', ' ');
    out << tasks::to_string(result.task) << ',' << to_string(result.mode) << ',' << row.point.n
        << ',' << row.point.m << ',' << row.k << ',' << row.trial << ',' << row.seed << ','
        << (row.failed ? 1 : 0) << ',' << warning;
    for (std::size_t i = 0; i < result.metric_columns.size(); ++i)
      out << ',' << (row.failed ? std::string{} : cell(row.metrics[i]));
    for (std::size_t i = 0; i < result.cost_columns.size(); ++i)
      out << ',' << (row.failed ? std::string{} : cell(row.costs[i]));
    out << ',' << (row.wall_ms ? cell(*row.wall_ms) : std::string{}) << '\n';
  }
}

Summary summarize(const SweepResult& result) {
  Summary s;
  s.task = result.task;
  s.mode = result.mode;
  s.columns = result.metric_columns;
  s.columns.insert(s.columns.end(), result.cost_columns.begin(), result.cost_columns.end());
  const std::size_t width = s.columns.size();

  std::size_t i = 0;
  while (i < result.rows.size()) {
    const GridPoint point = result.rows[i].point;
    std::size_t j = i;
    SummaryRow row;
    row.point = point;
    std::vector<std::vector<double>> samples(width);
    for (; j < result.rows.size() && result.rows[j].point == point; ++j) {
      const auto& r = result.rows[j];
      ++row.trials;
      if (r.failed) {
        ++row.failures;
        continue;
      }
      for (std::size_t c = 0; c < result.metric_columns.size(); ++c) samples[c].push_back(r.metrics[c]);
      for (std::size_t c = 0; c < result.cost_columns.size(); ++c)
        samples[result.metric_columns.size() + c].push_back(r.costs[c]);
    }
    i = j;
    if (row.failures == row.trials) {
      s.warnings.push_back(fmt::format("grid point n={} m={} has no successful trials; omitted",
                                       point.n, point.m));
      continue;
    }
    for (const auto& col : samples) {
      const double count = static_cast<double>(col.size());
      double mean = 0.0;
      for (double v : col) mean += v;
      mean /= count;
      double var = 0.0;
      for (double v : col) var += (v - mean) * (v - mean);
      row.mean.push_back(mean);
      row.stddev.push_back(std::sqrt(var / count));
    }
    s.rows.push_back(std::move(row));
  }
  return s;
}

void write_summary_csv(std::ostream& out, const Summary& summary) {
  out << "task,mode,n,m,trials,failures";
  for (const auto& c : summary.columns) out << ',' << c << "_mean," << c << "_std";
  out << '\n';
  for (const auto& row : summary.rows) {
    out << tasks::to_string(summary.task) << ',' << to_string(summary.mode) << ',' << row.point.n
        << ',' << row.point.m << ',' << row.trials << ',' << row.failures;
    for (std::size_t c = 0; c < row.mean.size(); ++c)
      out << ',' << cell(row.mean[c]) << ',' << cell(row.stddev[c]);
    out << '\n';
  }
}

DecodeLength decode_length(TaskKind task) {
  if (task == TaskKind::sorting) return [](std::size_t m) { return static_cast<double>(m); };
  return [](std::size_t) { return 1.0; };
}

DecompositionKind decomposition_rule(TaskKind task) {
  return (task == TaskKind::retrieval || task == TaskKind::rag) ? DecompositionKind::overlapping_half
                                                               : DecompositionKind::disjoint;
}

std::vector<PredictionRow> predict(const SweepConfig& config) {
  const auto rule = decomposition_rule(config.task);
  const auto dec = decode_length(config.task);
  const auto& model = config.cost_model;
  // The RAG aggregation call sees O(1) retrieved text and emits O(1) tokens.
  const double aggregation =
      config.task == TaskKind::rag
          ? cost_single_call(static_cast<double>(model.system_prompt_tokens) + 1.0, 1.0, model.functions)
          : 0.0;

  std::vector<PredictionRow> rows;
  const auto points = grid(config);
  for (const auto& point : points) {
    PredictionRow row;
    row.point = point;
    row.k = subtask_count(point.n, point.m, rule);
    row.cost = subtask_cost_bound(point.n, point.m, dec, model, Aggregation::sum, rule) + aggregation;
    row.latency = subtask_cost_bound(point.n, point.m, dec, model, Aggregation::parallel, rule) + aggregation;
    std::vector<std::size_t> candidates;
    for (const auto& other : points)
      if (other.n == point.n) candidates.push_back(other.m);
    row.optimal_m_cost = predict_optimal_m(point.n, model, rule, dec, Objective::sum_cost, candidates).m;
    row.optimal_m_latency =
        predict_optimal_m(point.n, model, rule, dec, Objective::parallel_latency, candidates).m;
    rows.push_back(row);
  }
  return rows;
}

void write_prediction_csv(std::ostream& out, const SweepConfig& config,
                          const std::vector<PredictionRow>& rows) {
  const auto p = config.cost_model.parallelism;
  out << "task,mode,n,m,k,predicted_cost,predicted_latency_p" << p.label()
      << ",optimal_m_cost,optimal_m_latency\n";
  for (const auto& row : rows) {
    out << tasks::to_string(config.task) << ',' << to_string(config.mode) << ',' << row.point.n
        << ',' << row.point.m << ',' << row.k << ',' << cell(row.cost) << ',' << cell(row.latency)
        << ',' << row.optimal_m_cost << ',' << row.optimal_m_latency << '\n';
  }
}

}  // namespace algograph::harness
