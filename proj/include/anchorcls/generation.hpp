#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "anchorcls/backends.hpp"
#include "anchorcls/io.hpp"

namespace anchorcls {

/// End-marker characters for the quotation-mark-end strategy. Real
/// generators emit curly variants as well as the straight quote, so all
/// three count as markers by default.
struct MarkerConfig {
  std::vector<std::string> markers = {"\"", "“", "”"};

  /// Byte offset and length of the earliest marker in s, if any.
  std::optional<std::pair<std::size_t, std::size_t>> find_first(const std::string& s) const {
    std::optional<std::pair<std::size_t, std::size_t>> best;
    for (const auto& m : markers) {
      if (m.empty()) continue;
      auto pos = s.find(m);
      if (pos != std::string::npos && (!best || pos < best->first)) best = {{pos, m.size()}};
    }
    return best;
  }

  bool ends_with_marker(const std::string& s) const {
    for (const auto& m : markers)
      if (!m.empty() && s.size() >= m.size() && s.compare(s.size() - m.size(), m.size(), m) == 0)
        return true;
    return false;
  }
};

/// A label's identifier, its natural-language description, and the rendered
/// instruction the generator is driven with.
struct ClassDescription {
  std::string class_id;
  std::string description;
  std::string instruction;
};

/// Per-dataset instruction pattern. The pattern holds the placeholder
/// exactly once and ends with an opening quotation mark, so the first
/// generated quote can serve as the end marker.
class InstructionTemplate {
 public:
  static constexpr const char* kPlaceholder = "{description}";

  InstructionTemplate(std::string dataset, std::string pattern, MarkerConfig markers = {})
      : dataset_(std::move(dataset)), pattern_(std::move(pattern)), markers_(std::move(markers)) {
    auto first = pattern_.find(kPlaceholder);
    if (first == std::string::npos)
      throw ConfigError("template for '" + dataset_ + "' lacks the " + kPlaceholder +
                        " placeholder");
    if (pattern_.find(kPlaceholder, first + 1) != std::string::npos)
      throw ConfigError("template for '" + dataset_ + "' contains the placeholder more than once");
    if (!markers_.ends_with_marker(pattern_))
      throw ConfigError("template for '" + dataset_ + "' must end with a quotation mark");
  }

  std::string render(const std::string& description) const {
    if (description.empty()) throw ConfigError("class description must be non-empty");
    std::string out = pattern_;
    out.replace(out.find(kPlaceholder), std::string(kPlaceholder).size(), description);
    return out;
  }

  ClassDescription describe(const std::string& class_id, const std::string& description) const {
    return {class_id, description, render(description)};
  }

  const std::string& dataset() const { return dataset_; }
  const std::string& pattern() const { return pattern_; }

 private:
  std::string dataset_;
  std::string pattern_;
  MarkerConfig markers_;
};

inline std::string render_instruction(const InstructionTemplate& tpl,
                                      const std::string& description) {
  return tpl.render(description);
}

/// Loads a JSON file {dataset_name: pattern}.
inline std::map<std::string, InstructionTemplate> load_templates(const fs::path& path,
                                                                 const MarkerConfig& markers = {}) {
  json j = load_json_file(path);
  if (!j.is_object())
    throw ConfigError("templates file '" + path.string() + "' must be a JSON object");
  std::map<std::string, InstructionTemplate> out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_string())
      throw ConfigError("template '" + it.key() + "' must be a string");
    out.emplace(it.key(), InstructionTemplate(it.key(), it.value().get<std::string>(), markers));
  }
  return out;
}

/// Cuts the continuation at the first generated quotation mark and trims
/// whitespace. nullopt means the sample is rejected: either no marker
/// appeared before the token limit, or nothing preceded it.
inline std::optional<std::string> truncate_at_end_marker(const std::string& raw,
                                                         const MarkerConfig& markers = {}) {
  auto hit = markers.find_first(raw);
  if (!hit) return std::nullopt;
  std::string prefix = trim(raw.substr(0, hit->first));
  if (prefix.empty()) return std::nullopt;
  return prefix;
}

/// One accepted pseudo sample.
struct GeneratedSample {
  std::string class_id;
  std::string text;
  std::string raw;
  std::uint64_t seed = 0;
  bool truncated_at_marker = false;

  json to_json() const {
    return {{"class_id", class_id},
            {"text", text},
            {"seed", seed},
            {"raw_len", raw.size()}};
  }
};

struct GenerationStats {
  int attempts = 0;
  int accepted = 0;
  int shortfall = 0;
  std::map<std::string, int> rejects;  // reason -> count

  json to_json() const {
    return {{"attempts", attempts},
            {"accepted", accepted},
            {"shortfall", shortfall},
            {"rejects", rejects}};
  }
};

struct GenerationResult {
  std::vector<GeneratedSample> samples;
  GenerationStats stats;
};

/// Drives the generator until target_count samples pass the end-marker and
/// exact-duplicate filters, retrying with incremented seeds up to
/// max_attempts. Attempt i uses params.seed + i, so the accepted multiset
/// is a pure function of (class, params, max_attempts) for a deterministic
/// backend.
inline GenerationResult generate_class_samples(const TextGenerator& generator,
                                               const ClassDescription& cls, int target_count,
                                               const SamplingParams& params, int max_attempts,
                                               const MarkerConfig& markers = {}) {
  if (target_count < 1) throw ConfigError("target_count must be >= 1");
  if (max_attempts < target_count)
    throw ConfigError("max_attempts (" + std::to_string(max_attempts) +
                      ") must be >= target_count (" + std::to_string(target_count) + ")");
  if (cls.instruction.empty()) throw ConfigError("class '" + cls.class_id + "' has no instruction");

  GenerationResult result;
  std::set<std::string> seen_texts;
  for (int attempt = 0; attempt < max_attempts && result.stats.accepted < target_count;
       ++attempt) {
    SamplingParams attempt_params = params;
    attempt_params.seed = params.seed + static_cast<std::uint64_t>(attempt);
    std::string raw = generator.continue_text(cls.instruction, attempt_params);
    ++result.stats.attempts;

    auto text = truncate_at_end_marker(raw, markers);
    if (!text) {
      bool has_marker = markers.find_first(raw).has_value();
      ++result.stats.rejects[has_marker ? "empty_prefix" : "no_end_marker"];
      continue;
    }
    if (!seen_texts.insert(*text).second) {
      ++result.stats.rejects["duplicate"];
      continue;
    }
    result.samples.push_back({cls.class_id, *text, raw, attempt_params.seed, true});
    ++result.stats.accepted;
  }

  if (result.stats.accepted == 0) {
    std::string reasons;
    for (const auto& [reason, count] : result.stats.rejects)
      reasons += " " + reason + "=" + std::to_string(count);
    throw DataError("generation yield zero for class '" + cls.class_id + "' after " +
                    std::to_string(result.stats.attempts) + " attempts; rejects:" + reasons);
  }
  result.stats.shortfall = target_count - result.stats.accepted;
  return result;
}

}  // namespace anchorcls
