#ifndef SECTIONVIEW_SNAPSHOT_H_
#define SECTIONVIEW_SNAPSHOT_H_

#include <optional>
#include <string>
#include <string_view>

#include "sectionview/section.h"

namespace sectionview {

inline constexpr int kSnapshotVersion = 1;

struct SnapshotMeta {
  std::string dataset;
  // Free-form creation time; omitted from the body hash.
  std::optional<std::string> timestamp;
  bool operator==(const SnapshotMeta&) const = default;
};

struct Snapshot {
  SectionResult result;
  SnapshotMeta meta;
  // Hex SHA-256 of the document without meta.timestamp and meta.body_hash.
  std::string body_hash;
};

// UTF-8 JSON with top-level keys version, spec, grid, predictions, nearby
// and meta. Keys are sorted and floats carry 17 significant digits, so the
// same inputs always give the same bytes and re-import is bit-exact.
std::string snapshot_export(const SectionResult& result, const SnapshotMeta& meta);

// Throws ValidationError on malformed documents or a body hash mismatch.
Snapshot snapshot_import(std::string_view document);

// Writes the export to `path`. Throws Error when the file cannot be written.
void write_snapshot_file(const std::string& path, const SectionResult& result,
                         const SnapshotMeta& meta);

std::string sha256_hex(std::string_view data);

}  // namespace sectionview

#endif  // SECTIONVIEW_SNAPSHOT_H_
