// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "json_model.hpp"
#include "ptxlat/codegen.hpp"
#include "ptxlat/error.hpp"

namespace ptxlat::codegen {

namespace {

constexpr int kManifestSchema = 1;

}  // namespace

const BenchInfo* Manifest::find(std::string_view id) const noexcept {
  for (const auto& b : benchmarks) {
    if (b.id == id) return &b;
  }
  return nullptr;
}

void Manifest::put(BenchInfo info) {
  for (auto& b : benchmarks) {
    if (b.id == info.id) {
      b = std::move(info);
      return;
    }
  }
  benchmarks.push_back(std::move(info));
}

std::string manifest_to_text(const Manifest& manifest) {
  nlohmann::json j;
  j["schema_version"] = kManifestSchema;
  j["capacities"] = {{"l1_bytes", manifest.capacities.l1_bytes}, {"l2_bytes", manifest.capacities.l2_bytes}};
  j["benchmarks"] = nlohmann::json::array();
  for (const auto& b : manifest.benchmarks) j["benchmarks"].push_back(detail::bench_to_json(b));
  return j.dump(2) + "\n";
}

Manifest manifest_from_text(std::string_view text) {
  auto j = detail::parse_json_text(text, "manifest");
  if (!j.is_object()) throw ParseError("manifest must be a JSON object");
  int schema = j.value("schema_version", 0);
  if (schema != kManifestSchema) {
    throw MigrationError(fmt::format("manifest schema_version {} is not supported (expected {})", schema,
                                     kManifestSchema));
  }
  Manifest m;
  if (auto it = j.find("capacities"); it != j.end()) {
    m.capacities.l1_bytes = it->value("l1_bytes", m.capacities.l1_bytes);
    m.capacities.l2_bytes = it->value("l2_bytes", m.capacities.l2_bytes);
  }
  const auto& list = detail::require(j, "benchmarks");
  if (!list.is_array()) throw ParseError("'benchmarks' must be an array", "benchmarks");
  for (const auto& entry : list) {
    auto info = detail::bench_from_json(entry);
    if (m.find(info.id)) throw ValidationError(fmt::format("duplicate benchmark id '{}'", info.id));
    m.benchmarks.push_back(std::move(info));
  }
  return m;
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
  out << manifest_to_text(manifest);
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read manifest '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return manifest_from_text(buf.str());
}

}  // namespace ptxlat::codegen
