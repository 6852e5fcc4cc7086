#include <algorithm>
#include <deque>
#include <stdexcept>

#include "algograph/errors.hpp"
#include "algograph/tasks.hpp"

namespace algograph::tasks {

DecompositionPlan plan_decomposition(std::size_t n, std::size_t m, DecompositionKind kind) {
  if (m == 0) throw ConfigError("sub-task size m must be >= 1");
  DecompositionPlan plan;
  plan.kind = kind;
  plan.n = n;
  if (m >= n) {
    plan.clamped = m > n;
    plan.m = n;
    plan.k = n == 0 ? 0 : 1;
    if (n > 0) plan.segments.push_back(Span{0, n});
    return plan;
  }
  if (kind == DecompositionKind::disjoint) {
    plan.m = m;
    for (std::size_t start = 0; start < n; start += m)
      plan.segments.push_back(Span{start, std::min(m, n - start)});
  } else {
    if (m % 2 != 0) {
      plan.rounded = true;
      --m;
    }
    if (m < 2) throw ConfigError("half-overlap chunks need m >= 2");
    plan.m = m;
    const std::size_t k = subtask_count(n, m, kind);
    const std::size_t step = m / 2;
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t start = j * step;
      plan.segments.push_back(Span{start, std::min(m, n - start)});
    }
  }
  plan.k = plan.segments.size();
  return plan;
}

std::vector<double> merge_two_sorted_lists(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (out.size() < a.size() + b.size()) {
    if (i == a.size()) {
      out.push_back(b[j++]);
    } else if (j == b.size()) {
      out.push_back(a[i++]);
    } else if (a[i] <= b[j]) {
      out.push_back(a[i++]);
    } else {
      out.push_back(b[j++]);
    }
  }
  return out;
}

std::string_view to_string(MergeMode mode) {
  return mode == MergeMode::incremental ? "incremental" : "hierarchical";
}

MergeMode parse_merge_mode(std::string_view name) {
  if (name == "incremental") return MergeMode::incremental;
  if (name == "hierarchical") return MergeMode::hierarchical;
  throw ConfigError("merge mode must be 'incremental' or 'hierarchical'");
}

std::vector<double> merge_many(std::vector<std::vector<double>> lists, MergeMode mode) {
  if (lists.empty()) throw std::invalid_argument("merge_many needs at least one list");
  if (mode == MergeMode::incremental) {
    while (lists.size() > 1) {
      auto first = std::move(lists.back());
      lists.pop_back();
      auto second = std::move(lists.back());
      lists.pop_back();
      lists.push_back(merge_two_sorted_lists(first, second));
    }
    return std::move(lists.front());
  }
  std::deque<std::vector<double>> queue(std::make_move_iterator(lists.begin()),
                                        std::make_move_iterator(lists.end()));
  while (queue.size() > 1) {
    const std::size_t rounds = queue.size() / 2;
    for (std::size_t r = 0; r < rounds; ++r) {
      auto first = std::move(queue.front());
      queue.pop_front();
      auto second = std::move(queue.front());
      queue.pop_front();
      queue.push_back(merge_two_sorted_lists(first, second));
    }
  }
  return std::move(queue.front());
}

std::vector<double> insertion_sort(std::vector<double> z,
                                   const std::function<void(std::span<const double>)>& on_swap) {
  for (std::size_t i = 1; i < z.size(); ++i) {
    for (std::size_t j = i; j >= 1; --j) {
      if (z[j] >= z[j - 1]) break;
      std::swap(z[j], z[j - 1]);
      if (on_swap) on_swap(z);
    }
  }
  return z;
}

}  // namespace algograph::tasks
