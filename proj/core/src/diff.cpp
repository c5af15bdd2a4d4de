// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <fmt/format.h>

#include "ptxlat/report.hpp"

namespace ptxlat::report {

namespace {

using Bounds = std::pair<Cycles, Cycles>;

void finish(DiffEntry& e) {
  if (e.a && e.b) {
    e.delta_min = e.a->first - e.b->first;
    e.delta_max = e.a->second - e.b->second;
    if (e.b->first != 0) e.percent = boost::rational_cast<double>(e.delta_min / e.b->first) * 100.0;
  }
}

// Records a difference when the bounds or details differ, or a key is
// missing on one side.
void compare(DiffReport& report, std::string section, std::string key, std::optional<Bounds> a,
             std::optional<Bounds> b, std::vector<std::string> details = {}) {
  if (!a && !b) return;
  DiffEntry e;
  e.section = std::move(section);
  e.key = std::move(key);
  e.a = std::move(a);
  e.b = std::move(b);
  if (!e.b) {
    e.kind = ChangeKind::removed;
  } else if (!e.a) {
    e.kind = ChangeKind::added;
  } else if (*e.a == *e.b && details.empty()) {
    return;
  }
  e.details = std::move(details);
  finish(e);
  report.entries.push_back(std::move(e));
}

bool same_throughput(const std::optional<double>& x, const std::optional<double>& y) {
  if (!x || !y) return x.has_value() == y.has_value();
  return std::fabs(*x - *y) <= 1e-9 * std::max(1.0, std::fabs(*y));
}

std::string opt_text(const std::optional<double>& v) { return v ? fmt::format("{}", *v) : std::string("none"); }

}  // namespace

std::string_view to_string(ChangeKind kind) noexcept {
  switch (kind) {
    case ChangeKind::changed: return "changed";
    case ChangeKind::added: return "added";
    case ChangeKind::removed: return "removed";
  }
  return "?";
}

bool DiffReport::shared_keys_equal() const noexcept {
  return std::none_of(entries.begin(), entries.end(), [](const DiffEntry& e) { return e.kind == ChangeKind::changed; });
}

std::string DiffReport::summary() const {
  if (entries.empty()) return "no differences\n";
  std::string out;
  for (const auto& e : entries) {
    auto side = [](const std::optional<Bounds>& s) {
      return s ? format_range(s->first, s->second) : std::string("-");
    };
    out += fmt::format("{} {} {}: {} -> {}", to_string(e.kind), e.section, e.key, side(e.a), side(e.b));
    if (e.a && e.b && (e.delta_min != 0 || e.delta_max != 0)) {
      out += e.delta_min == e.delta_max ? fmt::format(" (delta {}", format_cycles(e.delta_min))
                                        : fmt::format(" (delta {}..{}", format_cycles(e.delta_min),
                                                      format_cycles(e.delta_max));
      out += e.percent ? fmt::format(", {:+.2f}%)", *e.percent) : std::string(")");
    }
    for (const auto& d : e.details) out += fmt::format("; {}", d);
    out += "\n";
  }
  out += fmt::format("{} difference(s)\n", entries.size());
  return out;
}

DiffReport diff(const LatencyTable& a, const LatencyTable& b) {
  DiffReport report;

  for (const auto& ra : a.records()) {
    const auto* rb = b.find(ra.signature);
    std::vector<std::string> details;
    if (rb && ra.mapping.notation() != rb->mapping.notation()) {
      details.push_back(fmt::format("SASS {} -> {}", ra.mapping.notation(), rb->mapping.notation()));
    }
    compare(report, "instruction", ra.signature, Bounds{ra.cycles_min, ra.cycles_max},
            rb ? std::optional<Bounds>(Bounds{rb->cycles_min, rb->cycles_max}) : std::nullopt, std::move(details));
  }
  for (const auto& rb : b.records()) {
    if (!a.find(rb.signature)) compare(report, "instruction", rb.signature, std::nullopt, Bounds{rb.cycles_min, rb.cycles_max});
  }

  for (const auto level : {MemoryLevel::global, MemoryLevel::l2, MemoryLevel::l1, MemoryLevel::shared_load,
                           MemoryLevel::shared_store}) {
    auto bounds = [level](const LatencyTable& t) -> std::optional<Bounds> {
      auto c = t.memory_cycles(level);
      return c ? std::optional<Bounds>(Bounds{*c, *c}) : std::nullopt;
    };
    compare(report, "memory", std::string(to_string(level)), bounds(a), bounds(b));
  }

  auto op_bounds = [](const TensorCoreOp& op) { return Bounds{Cycles(op.total_cycles()), Cycles(op.total_cycles())}; };
  for (const auto& oa : a.tensor_ops()) {
    const auto* ob = b.find_tensor_op(oa.signature());
    std::vector<std::string> details;
    if (ob) {
      if (oa.sass_opcode != ob->sass_opcode || oa.sass_count != ob->sass_count ||
          oa.per_sass_cycles != ob->per_sass_cycles) {
        details.push_back(fmt::format("SASS {}*{} x {} -> {}*{} x {}", oa.sass_count, oa.sass_opcode,
                                      oa.per_sass_cycles, ob->sass_count, ob->sass_opcode, ob->per_sass_cycles));
      }
      if (!same_throughput(oa.measured_throughput, ob->measured_throughput)) {
        details.push_back(fmt::format("measured throughput {} -> {}", opt_text(oa.measured_throughput),
                                      opt_text(ob->measured_throughput)));
      }
      if (!same_throughput(oa.theoretical_throughput, ob->theoretical_throughput)) {
        details.push_back(fmt::format("theoretical throughput {} -> {}", opt_text(oa.theoretical_throughput),
                                      opt_text(ob->theoretical_throughput)));
      }
    }
    compare(report, "tensor", oa.signature(), op_bounds(oa), ob ? std::optional(op_bounds(*ob)) : std::nullopt,
            std::move(details));
  }
  for (const auto& ob : b.tensor_ops()) {
    if (!a.find_tensor_op(ob.signature())) compare(report, "tensor", ob.signature(), std::nullopt, op_bounds(ob));
  }

  auto clock = [](const LatencyTable& t) -> std::optional<Bounds> {
    auto c = t.clock_overhead();
    return c ? std::optional<Bounds>(Bounds{Cycles(*c), Cycles(*c)}) : std::nullopt;
  };
  compare(report, "clock", "clock_overhead", clock(a), clock(b));
  return report;
}

}  // namespace ptxlat::report
