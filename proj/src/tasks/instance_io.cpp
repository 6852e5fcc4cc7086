#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "algograph/errors.hpp"
#include "algograph/prompts.hpp"
#include "algograph/tasks.hpp"

namespace algograph::tasks {

namespace {

constexpr std::string_view kMagic = "#algograph-instance v1";

std::string span_text(const Span& s) { return fmt::format("{}+{}", s.begin, s.length); }

Span parse_span(const std::string& s) {
  const auto plus = s.find('+');
  if (plus == std::string::npos) throw ConfigError(fmt::format("bad span '{}'", s));
  return Span{std::stoull(s.substr(0, plus)), std::stoull(s.substr(plus + 1))};
}

std::uint64_t parse_u64(const std::map<std::string, std::string>& h, const std::string& key) {
  const auto it = h.find(key);
  if (it == h.end()) throw ConfigError(fmt::format("instance header lacks '{}'", key));
  try {
    return std::stoull(it->second);
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("instance header '{}' is not a number", key));
  }
}

const std::string& field(const std::map<std::string, std::string>& h, const std::string& key) {
  const auto it = h.find(key);
  if (it == h.end()) throw ConfigError(fmt::format("instance header lacks '{}'", key));
  return it->second;
}

}  // namespace

void write_instance(std::ostream& out, const Instance& instance) {
  out << kMagic << '\n';
  struct Visitor {
    std::ostream& out;
    void operator()(const CountingInstance& i) const {
      out << "task: counting\nn: " << i.text.size() << "\nseed: " << i.seed
          << "\ntruth: " << i.truth << "\n---\n" << i.text << '\n';
    }
    void operator()(const SortingInstance& i) const {
      out << "task: sorting\nn: " << i.values.size() << "\nseed: " << i.seed
          << "\ntruth: " << prompts::format_list(i.truth) << "\n---\n"
          << prompts::format_list(i.values) << '\n';
    }
    void operator()(const HaystackInstance& i) const {
      out << "task: retrieval\nn: " << i.text.size() << "\nseed: " << i.seed
          << "\ntruth: " << i.truth << "\ntarget: " << i.target_object
          << "\nneedle_present: " << (i.needle_present ? 1 : 0)
          << "\nneedle_span: " << span_text(i.needle_span) << "\n---\n" << i.text << '\n';
    }
    void operator()(const RagInstance& i) const {
      std::string spans;
      for (const auto& s : i.needle_spans) spans += (spans.empty() ? "" : ",") + span_text(s);
      out << "task: rag\nn: " << i.text.size() << "\nseed: " << i.seed << "\ntruth: " << i.truth
          << "\ntarget: " << i.target_object << "\nneedle_spans: " << spans << "\n---\n"
          << i.text << '\n';
    }
  };
  std::visit(Visitor{out}, instance);
}

Instance read_instance(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic) throw ConfigError("not an algograph instance file");
  std::map<std::string, std::string> header;
  while (std::getline(in, line) && line != "---") {
    const auto colon = line.find(": ");
    if (colon == std::string::npos) throw ConfigError(fmt::format("bad header line '{}'", line));
    header[line.substr(0, colon)] = line.substr(colon + 2);
  }
  if (line != "---") throw ConfigError("instance file has no payload separator");
  std::string payload;
  std::getline(in, payload);

  const auto task = parse_task(field(header, "task"));
  const auto n = parse_u64(header, "n");
  const auto seed = parse_u64(header, "seed");
  switch (task) {
    case TaskKind::counting: {
      CountingInstance i{payload, static_cast<std::int64_t>(parse_u64(header, "truth")), seed};
      if (i.text.size() != n) throw ConfigError("payload length does not match n");
      return i;
    }
    case TaskKind::sorting: {
      auto values = prompts::parse_list(payload);
      auto truth = prompts::parse_list(field(header, "truth"));
      if (!values || !truth || values->size() != n) throw ConfigError("bad sorting payload");
      return SortingInstance{std::move(*values), std::move(*truth), seed};
    }
    case TaskKind::retrieval: {
      HaystackInstance i;
      i.text = payload;
      i.seed = seed;
      i.truth = field(header, "truth");
      i.target_object = field(header, "target");
      i.needle_present = parse_u64(header, "needle_present") != 0;
      i.needle_span = parse_span(field(header, "needle_span"));
      if (i.text.size() != n) throw ConfigError("payload length does not match n");
      return i;
    }
    case TaskKind::rag: {
      RagInstance i;
      i.text = payload;
      i.seed = seed;
      i.truth = field(header, "truth");
      i.target_object = field(header, "target");
      std::stringstream spans(field(header, "needle_spans"));
      std::string item;
      while (std::getline(spans, item, ',')) i.needle_spans.push_back(parse_span(item));
      if (i.text.size() != n) throw ConfigError("payload length does not match n");
      return i;
    }
  }
  throw ConfigError("unknown task");
}

}  // namespace algograph::tasks
