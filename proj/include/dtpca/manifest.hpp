#pragma once

// Dataset manifests and the deterministic per-subject train/test split.

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dtpca/error.hpp"
#include "dtpca/landmarks.hpp"

namespace dtpca {

inline constexpr std::string_view kManifestHeader = "image_path,subject_id,variant,landmark_path";

struct ManifestEntry {
  std::string image_path;
  std::string subject_id;
  std::string variant;
  std::string landmark_path;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
};

/// Subjects in order of first appearance, each with its entry indices in manifest order.
inline std::vector<std::pair<std::string, std::vector<std::size_t>>> group_by_subject(
    const DatasetManifest& manifest) {
  std::vector<std::pair<std::string, std::vector<std::size_t>>> groups;
  std::map<std::string, std::size_t, std::less<>> slot;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    const auto& subject = manifest.entries[i].subject_id;
    auto [it, inserted] = slot.try_emplace(subject, groups.size());
    if (inserted) groups.emplace_back(subject, std::vector<std::size_t>{});
    groups[it->second].second.push_back(i);
  }
  return groups;
}

/// Enforces unique (subject, variant) pairs and an equal variant count per subject.
inline void validate_manifest(const DatasetManifest& manifest, const std::string& name = "<manifest>") {
  if (manifest.entries.empty()) fail(ErrorCategory::data, name + ": manifest has no entries");
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& e : manifest.entries) {
    if (!pairs.emplace(e.subject_id, e.variant).second) {
      fail(ErrorCategory::data, name + ": duplicate (subject, variant) pair (" + e.subject_id + ", " +
                                    e.variant + ")");
    }
  }
  const auto groups = group_by_subject(manifest);
  for (const auto& [subject, idx] : groups) {
    if (idx.size() != groups.front().second.size()) {
      fail(ErrorCategory::data, name + ": ragged manifest, subject " + subject + " has " +
                                    std::to_string(idx.size()) + " variants, expected " +
                                    std::to_string(groups.front().second.size()));
    }
  }
}

inline DatasetManifest parse_manifest(std::string_view text, const std::string& name = "<manifest>") {
  const auto lines = detail::split_lines(text);
  if (lines.empty() || detail::trim(lines.front()) != kManifestHeader) {
    fail(ErrorCategory::data, name + ": missing header line '" + std::string(kManifestHeader) + "'");
  }
  DatasetManifest manifest;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (detail::trim(lines[i]).empty()) continue;
    std::vector<std::string> fields;
    std::string_view rest = lines[i];
    for (;;) {
      const auto comma = rest.find(',');
      fields.emplace_back(detail::trim(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 4 || fields[0].empty() || fields[1].empty() || fields[2].empty() ||
        fields[3].empty()) {
      fail(ErrorCategory::data, name + ": malformed manifest row at line " + std::to_string(i + 1));
    }
    manifest.entries.push_back({fields[0], fields[1], fields[2], fields[3]});
  }
  validate_manifest(manifest, name);
  return manifest;
}

inline DatasetManifest load_manifest(const std::filesystem::path& path) {
  return parse_manifest(detail::read_text_file(path), path.string());
}

inline std::string format_manifest(const DatasetManifest& manifest) {
  std::string out(kManifestHeader);
  out += '\n';
  for (const auto& e : manifest.entries) {
    out += e.image_path + ',' + e.subject_id + ',' + e.variant + ',' + e.landmark_path + '\n';
  }
  return out;
}

struct DatasetSplit {
  DatasetManifest train;
  DatasetManifest test;
};

/// Per subject, the first `train_variants_per_subject` entries in manifest order train; the rest test.
inline DatasetSplit split_dataset(const DatasetManifest& manifest, std::size_t train_variants_per_subject) {
  const auto groups = group_by_subject(manifest);
  if (groups.empty()) fail(ErrorCategory::data, "split_dataset: empty manifest");
  const std::size_t per_subject = groups.front().second.size();
  for (const auto& [subject, idx] : groups) {
    if (idx.size() != per_subject) {
      fail(ErrorCategory::data, "split_dataset: ragged manifest at subject " + subject);
    }
  }
  if (train_variants_per_subject < 1 || train_variants_per_subject >= per_subject) {
    fail(ErrorCategory::usage, "train variants per subject must be in [1, " +
                                   std::to_string(per_subject - 1) + "], got " +
                                   std::to_string(train_variants_per_subject));
  }
  std::vector<bool> to_train(manifest.entries.size(), false);
  for (const auto& [subject, idx] : groups) {
    for (std::size_t j = 0; j < train_variants_per_subject; ++j) to_train[idx[j]] = true;
  }
  DatasetSplit split;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    (to_train[i] ? split.train : split.test).entries.push_back(manifest.entries[i]);
  }
  return split;
}

}  // namespace dtpca
