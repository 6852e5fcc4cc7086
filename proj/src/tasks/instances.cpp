#include <algorithm>
#include <cctype>
#include <cmath>
#include <string_view>

#include <fmt/format.h>

#include "algograph/errors.hpp"
#include "algograph/haystack.hpp"
#include "algograph/seed.hpp"
#include "algograph/tasks.hpp"

namespace algograph::tasks {

std::string_view to_string(TaskKind task) {
  switch (task) {
    case TaskKind::counting: return "counting";
    case TaskKind::sorting: return "sorting";
    case TaskKind::retrieval: return "retrieval";
    case TaskKind::rag: return "rag";
  }
  return "?";
}

TaskKind parse_task(std::string_view name) {
  for (TaskKind t : {TaskKind::counting, TaskKind::sorting, TaskKind::retrieval, TaskKind::rag})
    if (to_string(t) == name) return t;
  throw ConfigError(fmt::format("unknown task '{}'", name));
}

namespace {

constexpr std::string_view kAlphabet =
    "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";

std::string random_code(Rng& rng) {
  std::string code(6, '0');
  for (char& c : code) c = static_cast<char>('0' + uniform_index(rng, 10));
  return code;
}

std::size_t random_confusable(Rng& rng, std::size_t target) {
  const std::size_t pick = uniform_index(rng, haystack::kObjectCount - 1);
  return pick >= target ? pick + 1 : pick;
}

// Fillers are appended until the text reaches n characters; the required
// sentences are placed at random among all fillers but the last, so that the
// final truncation to n only ever cuts a filler.
struct Assembly {
  std::string text;
  std::vector<std::size_t> required_offsets;  // in the order given
};

template <typename MakeFiller>
Assembly assemble(std::size_t n, const std::vector<std::string>& required, Rng& rng,
                  MakeFiller make_filler) {
  std::size_t total = 0;
  for (const auto& s : required) total += s.size();
  if (!required.empty() && total >= n) {
    throw ConfigError(fmt::format("n = {} is too small for the required sentences ({} chars)", n,
                                  total));
  }
  std::vector<std::string> fillers;
  while (total < n) {
    fillers.push_back(make_filler());
    total += fillers.back().size();
  }
  std::string last = std::move(fillers.back());
  fillers.pop_back();

  // Sequence of sentence sources: -1 - i for required i, else filler index.
  std::vector<std::ptrdiff_t> order;
  order.reserve(fillers.size() + required.size());
  for (std::size_t i = 0; i < fillers.size(); ++i) order.push_back(static_cast<std::ptrdiff_t>(i));
  for (std::size_t i = 0; i < required.size(); ++i) {
    const auto pos = uniform_index(rng, order.size() + 1);
    order.insert(order.begin() + static_cast<std::ptrdiff_t>(pos), -1 - static_cast<std::ptrdiff_t>(i));
  }

  Assembly a;
  a.required_offsets.resize(required.size());
  for (auto idx : order) {
    if (idx < 0) {
      const auto r = static_cast<std::size_t>(-1 - idx);
      a.required_offsets[r] = a.text.size();
      a.text += required[r];
    } else {
      a.text += fillers[static_cast<std::size_t>(idx)];
    }
  }
  a.text += last;
  a.text.resize(n);
  return a;
}

}  // namespace

CountingInstance generate_counting(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ConfigError("counting instance needs n >= 1");
  Rng rng(seed);
  CountingInstance inst;
  inst.seed = seed;
  inst.text.resize(n);
  for (char& c : inst.text) {
    c = kAlphabet[uniform_index(rng, kAlphabet.size())];
    if (std::isdigit(static_cast<unsigned char>(c))) ++inst.truth;
  }
  return inst;
}

SortingInstance generate_sorting(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ConfigError("sorting instance needs n >= 1");
  Rng rng(seed);
  SortingInstance inst;
  inst.seed = seed;
  inst.values.resize(n);
  for (double& v : inst.values) v = std::round(uniform01(rng) * 100.0) / 100.0;
  inst.truth = inst.values;
  std::sort(inst.truth.begin(), inst.truth.end());
  return inst;
}

HaystackInstance generate_haystack(std::size_t n, std::uint64_t seed, GenerateOptions options) {
  if (n == 0) throw ConfigError("haystack instance needs n >= 1");
  Rng rng(seed);
  const std::size_t target = uniform_index(rng, haystack::kObjectCount);
  std::vector<std::string> codes(haystack::kObjectCount);
  for (auto& c : codes) c = random_code(rng);

  HaystackInstance inst;
  inst.seed = seed;
  inst.target_object = haystack::object_name(target);
  inst.needle_present = options.needle_present;
  std::vector<std::string> required;
  if (options.needle_present) {
    inst.truth = codes[target];
    required.push_back(haystack::passcode_sentence(inst.target_object, inst.truth));
  } else {
    inst.truth = kIdontKnow;
  }
  auto filler = [&] {
    const auto obj = random_confusable(rng, target);
    return haystack::passcode_sentence(haystack::object_name(obj), codes[obj]);
  };
  auto assembly = assemble(n, required, rng, filler);
  inst.text = std::move(assembly.text);
  if (options.needle_present) {
    // Span excludes the separating space.
    inst.needle_span = Span{assembly.required_offsets[0], required[0].size() - 1};
  }
  return inst;
}

RagInstance generate_rag(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t target = uniform_index(rng, haystack::kObjectCount);
  std::vector<std::string> codes(haystack::kObjectCount);
  for (auto& c : codes) c = random_code(rng);

  RagInstance inst;
  inst.seed = seed;
  inst.target_object = haystack::object_name(target);
  inst.truth = codes[target];
  std::vector<std::string> required;
  for (std::size_t i = 1; i <= 6; ++i)
    required.push_back(haystack::digit_sentence(i, inst.target_object, inst.truth[i - 1]));
  auto filler = [&] {
    const auto obj = random_confusable(rng, target);
    const auto pos = 1 + uniform_index(rng, 6);
    return haystack::digit_sentence(pos, haystack::object_name(obj), codes[obj][pos - 1]);
  };
  auto assembly = assemble(n, required, rng, filler);
  inst.text = std::move(assembly.text);
  for (std::size_t i = 0; i < 6; ++i)
    inst.needle_spans.push_back(Span{assembly.required_offsets[i], required[i].size() - 1});
  return inst;
}

Instance generate_instance(TaskKind task, std::size_t n, std::uint64_t seed,
                           GenerateOptions options) {
  switch (task) {
    case TaskKind::counting: return generate_counting(n, seed);
    case TaskKind::sorting: return generate_sorting(n, seed);
    case TaskKind::retrieval: return generate_haystack(n, seed, options);
    case TaskKind::rag: return generate_rag(n, seed);
  }
  throw ConfigError("unknown task");
}

std::size_t instance_size(const Instance& instance) {
  struct Visitor {
    std::size_t operator()(const CountingInstance& i) const { return i.text.size(); }
    std::size_t operator()(const SortingInstance& i) const { return i.values.size(); }
    std::size_t operator()(const HaystackInstance& i) const { return i.text.size(); }
    std::size_t operator()(const RagInstance& i) const { return i.text.size(); }
  };
  return std::visit(Visitor{}, instance);
}

}  // namespace algograph::tasks
