#include "sectionview/snapshot.h"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>

#include "sectionview/errors.h"
#include "sectionview/json_io.h"

namespace sectionview {

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw Error("hash_error", "SHA-256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

namespace {

std::string body_hash_of(Json doc) {
  Json& meta = doc["meta"];
  meta.erase("timestamp");
  meta.erase("body_hash");
  return sha256_hex(canonical_dump(doc));
}

}  // namespace

std::string snapshot_export(const SectionResult& result,
                            const SnapshotMeta& meta) {
  Json doc = section_to_json(result);
  Json& m = doc["meta"];
  m["dataset"] = meta.dataset;
  m["timestamp"] = meta.timestamp ? Json(*meta.timestamp) : Json(nullptr);
  m["body_hash"] = body_hash_of(doc);
  return canonical_dump(doc) + "\n";
}

Snapshot snapshot_import(std::string_view document) {
  Json doc = Json::parse(document, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw ValidationError("snapshot is not valid JSON");
  Snapshot s;
  s.result = section_from_json(doc);
  const Json& meta = doc["meta"];
  try {
    s.meta.dataset = meta.at("dataset").get<std::string>();
    const Json& ts = meta.at("timestamp");
    if (!ts.is_null()) s.meta.timestamp = ts.get<std::string>();
    s.body_hash = meta.at("body_hash").get<std::string>();
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed snapshot meta: ") + e.what());
  }
  if (body_hash_of(doc) != s.body_hash) {
    throw ValidationError("snapshot body hash mismatch");
  }
  return s;
}

void write_snapshot_file(const std::string& path, const SectionResult& result,
                         const SnapshotMeta& meta) {
  const std::string body = snapshot_export(result, meta);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("write_error", "cannot open '" + path + "' for writing");
  out << body;
  out.flush();
  if (!out) throw Error("write_error", "failed writing '" + path + "'");
}

}  // namespace sectionview
