// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "json_model.hpp"
#include "ptxlat/error.hpp"
#include "ptxlat/report.hpp"
#include "strings.hpp"

namespace ptxlat::report {

namespace {

using ptxlat::detail::json;

const std::set<std::string> kTopKeys = {"schema_version", "architecture", "generated_at", "records",
                                        "memory",         "tensor_ops",   "clock_overhead"};
const std::set<std::string> kRecordKeys = {"signature", "mapping", "cycles_min", "cycles_max",
                                           "approximate", "source", "mapping_mismatch", "note"};
const std::set<std::string> kMemoryKeys = {"level", "cycles", "approximate"};
const std::set<std::string> kTensorKeys = {"shape", "in_type", "acc_type", "layout_a", "layout_b", "layout_c",
                                           "ptx_instruction", "sass_opcode", "sass_count", "per_sass_cycles",
                                           "iters", "measured_throughput", "theoretical_throughput"};

json unknown_fields(const json& object, const std::set<std::string>& known) {
  json out = json::object();
  for (auto it = object.begin(); it != object.end(); ++it) {
    if (!known.contains(it.key())) out[it.key()] = it.value();
  }
  return out;
}

void merge_extra(json& target, const TableDocument& doc, const std::string& key) {
  if (auto it = doc.entry_extra.find(key); it != doc.entry_extra.end()) {
    for (auto f = it->second.begin(); f != it->second.end(); ++f) {
      if (!target.contains(f.key())) target[f.key()] = f.value();
    }
  }
}

void keep_extra(TableDocument& doc, const json& object, const std::set<std::string>& known, const std::string& key) {
  auto extra = unknown_fields(object, known);
  if (!extra.empty()) doc.entry_extra[key] = std::move(extra);
}

bool get_bool(const json& object, std::string_view field) {
  auto it = object.find(field);
  if (it == object.end()) return false;
  if (!it->is_boolean()) throw ParseError(fmt::format("field '{}' must be true or false", field), std::string(field));
  return it->get<bool>();
}

const json& require_array(const json& object, std::string_view field) {
  const auto& v = ptxlat::detail::require(object, field);
  if (!v.is_array()) throw ParseError(fmt::format("field '{}' must be an array", field), std::string(field));
  return v;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read table '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Adds the file name to a parse error raised while reading it.
template <typename Fn>
auto with_path(const std::filesystem::path& path, Fn&& fn) {
  try {
    return fn();
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()), e.token(), e.line());
  }
}

}  // namespace

TableDocument make_document(LatencyTable table) {
  TableDocument doc;
  doc.table = std::move(table);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    if (auto secs = ptxlat::detail::parse_int<std::int64_t>(epoch)) {
      const std::chrono::sys_seconds tp{std::chrono::seconds(*secs)};
      doc.generated_at = fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(tp)));
    }
  }
  return doc;
}

std::string document_to_text(const TableDocument& doc) {
  json j = doc.extra.is_object() ? doc.extra : json::object();
  j["schema_version"] = doc.schema_version;
  j["architecture"] = doc.table.architecture();
  j["generated_at"] = doc.generated_at;

  json records = json::array();
  for (const auto& r : doc.table.records()) {
    json e = {
        {"signature", r.signature},
        {"mapping", r.mapping.notation()},
        {"cycles_min", ptxlat::detail::cycles_to_json(r.cycles_min)},
        {"cycles_max", ptxlat::detail::cycles_to_json(r.cycles_max)},
        {"approximate", r.approximate},
        {"source", to_string(r.source)},
        {"mapping_mismatch", r.mapping_mismatch},
        {"note", r.note},
    };
    merge_extra(e, doc, "records/" + r.signature);
    records.push_back(std::move(e));
  }
  j["records"] = std::move(records);

  json memory = json::array();
  for (const auto& [level, m] : doc.table.memory()) {
    json e = {{"level", to_string(level)},
              {"cycles", ptxlat::detail::cycles_to_json(m.cycles)},
              {"approximate", m.approximate}};
    merge_extra(e, doc, fmt::format("memory/{}", to_string(level)));
    memory.push_back(std::move(e));
  }
  j["memory"] = std::move(memory);

  json ops = json::array();
  for (const auto& op : doc.table.tensor_ops()) {
    auto e = ptxlat::detail::tensor_op_to_json(op);
    merge_extra(e, doc, "tensor_ops/" + op.signature());
    ops.push_back(std::move(e));
  }
  j["tensor_ops"] = std::move(ops);
  j["clock_overhead"] = doc.table.clock_overhead() ? json(*doc.table.clock_overhead()) : json(nullptr);
  return j.dump(2) + "\n";
}

TableDocument document_from_text(std::string_view text) {
  auto j = ptxlat::detail::parse_json_text(text, "table");
  if (!j.is_object()) throw ParseError("a table file must hold a JSON object");
  const auto& version = ptxlat::detail::require(j, "schema_version");
  if (!version.is_number_integer()) throw ParseError("schema_version must be an integer", "schema_version");
  TableDocument doc;
  doc.schema_version = version.get<int>();
  if (doc.schema_version != kTableSchemaVersion) {
    throw MigrationError(fmt::format("table schema_version {} is not supported by this version (expected {}); "
                                     "convert the file or use a matching ptxlat release",
                                     doc.schema_version, kTableSchemaVersion));
  }
  doc.table.set_architecture(j.value("architecture", ""));
  doc.generated_at = j.value("generated_at", "");
  doc.extra = unknown_fields(j, kTopKeys);

  for (const auto& e : require_array(j, "records")) {
    LatencyRecord r;
    r.signature = ptxlat::detail::require_string(e, "signature");
    r.mapping = parse_sass_mapping(r.signature, ptxlat::detail::require_string(e, "mapping"));
    r.cycles_min = ptxlat::detail::cycles_from_json(ptxlat::detail::require(e, "cycles_min"), "cycles_min");
    r.cycles_max = ptxlat::detail::cycles_from_json(ptxlat::detail::require(e, "cycles_max"), "cycles_max");
    r.approximate = get_bool(e, "approximate");
    auto source = parse_source(e.value("source", "measured"));
    if (!source) throw ParseError(fmt::format("{}: invalid source", r.signature), "source");
    r.source = *source;
    r.mapping_mismatch = get_bool(e, "mapping_mismatch");
    r.note = e.value("note", "");
    keep_extra(doc, e, kRecordKeys, "records/" + r.signature);
    doc.table.add(std::move(r));
  }
  if (j.contains("memory")) {
    for (const auto& e : require_array(j, "memory")) {
      auto name = ptxlat::detail::require_string(e, "level");
      auto level = parse_memory_level(name);
      if (!level) throw ParseError(fmt::format("unknown memory level '{}'", name), name);
      MemoryLatency m{ptxlat::detail::cycles_from_json(ptxlat::detail::require(e, "cycles"), "cycles"),
                      get_bool(e, "approximate")};
      if (m.cycles < 0) throw ValidationError(fmt::format("memory level {} has negative cycles", name));
      if (doc.table.memory().contains(*level)) throw ValidationError(fmt::format("duplicate memory level '{}'", name));
      keep_extra(doc, e, kMemoryKeys, "memory/" + name);
      doc.table.set_memory(*level, m);
    }
  }
  if (j.contains("tensor_ops")) {
    for (const auto& e : require_array(j, "tensor_ops")) {
      auto op = ptxlat::detail::tensor_op_from_json(e);
      keep_extra(doc, e, kTensorKeys, "tensor_ops/" + op.signature());
      doc.table.add_tensor_op(std::move(op));
    }
  }
  if (auto it = j.find("clock_overhead"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer() || it->get<std::int64_t>() < 0) {
      throw ParseError("clock_overhead must be a non-negative integer", "clock_overhead");
    }
    doc.table.set_clock_overhead(it->get<std::int64_t>());
  }
  return doc;
}

void save_document(const TableDocument& doc, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write table '{}'", path.string()));
  out << document_to_text(doc);
}

TableDocument load_document(const std::filesystem::path& path) {
  auto text = read_file(path);
  return with_path(path, [&] { return document_from_text(text); });
}

void save(const LatencyTable& table, const std::filesystem::path& path) { save_document(make_document(table), path); }

LatencyTable load(const std::filesystem::path& path) { return load_document(path).table; }

}  // namespace ptxlat::report
