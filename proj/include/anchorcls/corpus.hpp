#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "anchorcls/io.hpp"
#include "anchorcls/rng.hpp"

namespace anchorcls {

enum class DatasetFormat { jsonl, csv };

inline DatasetFormat dataset_format_from_string(const std::string& s) {
  if (s == "jsonl") return DatasetFormat::jsonl;
  if (s == "csv") return DatasetFormat::csv;
  throw ConfigError("unknown dataset format '" + s + "' (expected jsonl or csv)");
}

inline std::string to_string(DatasetFormat f) {
  return f == DatasetFormat::jsonl ? "jsonl" : "csv";
}

/// A labeled text corpus plus one description per class.
/// Immutable after load; safe for concurrent reads.
struct Dataset {
  struct Record {
    std::string text;
    std::string label;
  };

  std::string name;
  std::vector<Record> records;
  std::map<std::string, std::string> class_descriptions;
  std::map<std::string, std::vector<std::size_t>> records_by_class;

  std::vector<std::string> classes() const {
    std::vector<std::string> out;
    out.reserve(records_by_class.size());
    for (const auto& [label, _] : records_by_class) out.push_back(label);
    return out;
  }

  const std::string& description_of(const std::string& class_id) const {
    auto it = class_descriptions.find(class_id);
    if (it == class_descriptions.end())
      throw ConfigError("no description for class '" + class_id + "'");
    return it->second;
  }
};

namespace detail {

inline void add_record(Dataset& ds, std::string text, std::string label, const fs::path& path,
                       std::size_t line_no) {
  std::string trimmed = trim(text);
  if (trimmed.empty())
    throw DataError("malformed row at " + path.string() + ":" + std::to_string(line_no) +
                    ": empty text");
  if (label.empty())
    throw DataError("malformed row at " + path.string() + ":" + std::to_string(line_no) +
                    ": empty label");
  ds.records_by_class[label].push_back(ds.records.size());
  ds.records.push_back({std::move(trimmed), std::move(label)});
}

}  // namespace detail

/// Loads a dataset file (JSONL rows {"text","label"} or CSV with a
/// text,label header) and its sidecar descriptions file. Record order is
/// preserved. Every label present in the data must have a description.
inline Dataset load_dataset(const fs::path& data_path, const fs::path& descriptions_path,
                            DatasetFormat format, const std::string& name = "") {
  Dataset ds;
  ds.name = name.empty() ? data_path.stem().string() : name;

  if (format == DatasetFormat::jsonl) {
    for_each_jsonl(data_path, [&](std::size_t line_no, const json& row) {
      if (!row.is_object() || !row.contains("text") || !row.contains("label") ||
          !row["text"].is_string() || !row["label"].is_string()) {
        throw DataError("malformed row at " + data_path.string() + ":" +
                        std::to_string(line_no) + ": expected {\"text\": ..., \"label\": ...}");
      }
      detail::add_record(ds, row["text"].get<std::string>(), row["label"].get<std::string>(),
                         data_path, line_no);
    });
  } else {
    auto csv = read_csv(data_path);
    if (csv.empty()) throw DataError("no records in '" + data_path.string() + "'");
    const auto& header = csv.front().fields;
    auto text_it = std::find(header.begin(), header.end(), "text");
    auto label_it = std::find(header.begin(), header.end(), "label");
    if (text_it == header.end() || label_it == header.end())
      throw DataError("csv header of '" + data_path.string() + "' must contain text and label");
    std::size_t text_col = static_cast<std::size_t>(text_it - header.begin());
    std::size_t label_col = static_cast<std::size_t>(label_it - header.begin());
    for (std::size_t i = 1; i < csv.size(); ++i) {
      const auto& rec = csv[i];
      if (rec.fields.size() != header.size())
        throw DataError("malformed row at " + data_path.string() + ":" +
                        std::to_string(rec.line_no) + ": field count mismatch");
      detail::add_record(ds, rec.fields[text_col], rec.fields[label_col], data_path, rec.line_no);
    }
  }

  if (ds.records.empty()) throw DataError("no records in '" + data_path.string() + "'");

  json desc = load_json_file(descriptions_path);
  if (!desc.is_object())
    throw ConfigError("descriptions file '" + descriptions_path.string() +
                      "' must be a JSON object {class: description}");
  for (auto it = desc.begin(); it != desc.end(); ++it) {
    if (!it.value().is_string())
      throw ConfigError("description for class '" + it.key() + "' must be a string");
    ds.class_descriptions[it.key()] = it.value().get<std::string>();
  }
  std::vector<std::string> missing;
  for (const auto& [label, _] : ds.records_by_class)
    if (!ds.class_descriptions.count(label)) missing.push_back(label);
  if (!missing.empty()) {
    std::string msg = "missing description for label(s):";
    for (const auto& m : missing) msg += " '" + m + "'";
    throw ConfigError(msg + " (descriptions file: " + descriptions_path.string() + ")");
  }
  return ds;
}

/// Disjoint class partitions. Only test_classes are consumed by this
/// pipeline; train/valid exist for interoperability with external tooling.
struct ClassSplit {
  std::set<std::string> train_classes;
  std::set<std::string> valid_classes;
  std::set<std::string> test_classes;
};

/// spec holds exactly three disjoint sets (train, valid, test), each a
/// subset of the dataset's classes.
inline ClassSplit split_classes(const Dataset& dataset,
                                const std::vector<std::set<std::string>>& spec) {
  if (spec.size() != 3)
    throw ConfigError("class split spec must contain exactly 3 sets (train, valid, test), got " +
                      std::to_string(spec.size()));
  std::set<std::string> seen;
  for (const auto& part : spec) {
    for (const auto& cls : part) {
      if (!dataset.records_by_class.count(cls))
        throw ConfigError("split references unknown class '" + cls + "'");
      if (!seen.insert(cls).second)
        throw ConfigError("class '" + cls + "' appears in more than one split set");
    }
  }
  return ClassSplit{spec[0], spec[1], spec[2]};
}

/// One N-way K-shot task: N classes, K supports per class, Q queries per
/// class. Supports and queries are disjoint at the record-index level.
struct EpisodeTask {
  std::vector<std::string> classes;                            // draw order, size N
  std::map<std::string, std::vector<std::string>> supports;    // class -> K texts
  std::vector<std::pair<std::string, std::string>> queries;    // (text, gold class)
  std::uint64_t seed = 0;
  std::map<std::string, std::vector<std::size_t>> support_indices;
  std::map<std::string, std::vector<std::size_t>> query_indices;

  json to_json() const {
    json j;
    j["classes"] = classes;
    j["seed"] = seed;
    j["support_indices"] = support_indices;
    j["query_indices"] = query_indices;
    return j;
  }
};

/// Pure function of its arguments: the same seed reproduces the same
/// episode bit-for-bit, on any platform.
inline EpisodeTask sample_episode(const Dataset& dataset, const std::set<std::string>& classes,
                                  int n_way, int k_shot, int n_query, std::uint64_t seed) {
  if (n_way < 1) throw ConfigError("n_way must be >= 1");
  if (k_shot < 0 || n_query < 1) throw ConfigError("k_shot must be >= 0 and n_query >= 1");
  if (classes.size() < static_cast<std::size_t>(n_way))
    throw ConfigError("cannot sample " + std::to_string(n_way) + "-way episode from " +
                      std::to_string(classes.size()) + " classes");

  Rng rng(seed);
  std::vector<std::string> pool(classes.begin(), classes.end());  // sorted: std::set order
  auto chosen_idx = rng.sample_indices(pool.size(), static_cast<std::size_t>(n_way));

  EpisodeTask task;
  task.seed = seed;
  for (auto idx : chosen_idx) task.classes.push_back(pool[idx]);

  const std::size_t need = static_cast<std::size_t>(k_shot) + static_cast<std::size_t>(n_query);
  for (const auto& cls : task.classes) {
    auto it = dataset.records_by_class.find(cls);
    const std::size_t avail = it == dataset.records_by_class.end() ? 0 : it->second.size();
    if (avail < need)
      throw DataError("class '" + cls + "' has " + std::to_string(avail) + " records, needs " +
                      std::to_string(need));
    const auto& members = it->second;
    auto picks = rng.sample_indices(members.size(), need);
    auto& sup = task.supports[cls];
    auto& sup_idx = task.support_indices[cls];
    auto& qry_idx = task.query_indices[cls];
    for (int i = 0; i < k_shot; ++i) {
      std::size_t rec = members[picks[static_cast<std::size_t>(i)]];
      sup.push_back(dataset.records[rec].text);
      sup_idx.push_back(rec);
    }
    for (int i = 0; i < n_query; ++i) {
      std::size_t rec = members[picks[static_cast<std::size_t>(k_shot + i)]];
      task.queries.emplace_back(dataset.records[rec].text, cls);
      qry_idx.push_back(rec);
    }
  }
  return task;
}

}  // namespace anchorcls
