// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

#include "ptxlat/virtual_device.hpp"

#include <fstream>

#include <fmt/format.h>

#include "ptxlat/error.hpp"

namespace ptxlat::vdev {

namespace {

using codegen::BenchKind;
using codegen::ClockWidth;

constexpr std::string_view kBarrier = "BAR.SYNC.DEFER_BLOCKING 0x0";

std::string clock_line(ClockWidth width, int reg) {
  return width == ClockWidth::bits64 ? fmt::format("CS2R R{}, SR_CLOCKLO", reg)
                                     : fmt::format("CS2R.32 R{}, SR_CLOCKLO", reg);
}

// Whole cycles for a rational product; a fractional part rounds up.
std::int64_t whole(const Cycles& c, std::vector<std::string>& notes, std::string_view what) {
  if (c.denominator() == 1) return c.numerator();
  notes.push_back(fmt::format("{} of {} cycles rounded up", what, format_cycles(c)));
  return c.numerator() / c.denominator() + 1;
}

class Builder {
 public:
  Builder(const codegen::BenchInfo& bench, const VirtualDeviceConfig& cfg) : bench_(bench), cfg_(cfg) {}

  // Seed loads and the opening clock read (plus the barrier that a 32-bit
  // read drags in).
  void open(std::vector<std::string> prologue = {}) {
    out_.trace.add_line("MOV R1, c[0x0][0x28]");
    out_.trace.add_line("ULDC.64 UR4, c[0x0][0x118]");
    for (auto& line : prologue) out_.trace.add_line(std::move(line));
    out_.trace.add_line(clock_line(bench_.clock_width, 2));
    if (bench_.clock_width == ClockWidth::bits32) {
      out_.trace.add_line(std::string(kBarrier));
      extra_ += cfg_.barrier_penalty;
      out_.notes.push_back(fmt::format("32-bit clock read adds a barrier ({} cycles)", cfg_.barrier_penalty));
    }
  }

  void close(std::int64_t body_cycles) {
    out_.trace.add_line(clock_line(bench_.clock_width, 20));
    out_.trace.add_line(bench_.clock_width == ClockWidth::bits64 ? "IADD3 R22, P0, -R2, R20, RZ"
                                                                 : "IADD3 R22, -R2, R20, RZ");
    out_.trace.add_line("STG.E.64 [R24.64], R22");
    out_.trace.add_line("EXIT");
    const auto delta = body_cycles + cfg_.clock_overhead + extra_;
    if (delta < 0) throw BackendError(fmt::format("{}: negative modeled delta {}", bench_.id, delta));
    out_.start_clock = cfg_.start_clock;
    out_.end_clock = cfg_.start_clock + static_cast<std::uint64_t>(delta);
  }

  SyntheticResult& result() { return out_; }

 private:
  const codegen::BenchInfo& bench_;
  const VirtualDeviceConfig& cfg_;
  SyntheticResult out_;
  std::int64_t extra_ = 0;
};

Cycles pick(const LatencyRecord& r, std::uint32_t trial) { return trial % 2 == 0 ? r.cycles_min : r.cycles_max; }

std::vector<std::string> expansion_lines(const SassMapping& mapping, std::size_t index) {
  std::vector<std::string> lines;
  const int dst = 4 + 2 * static_cast<int>(index % 8);
  auto emit = [&](std::string_view opcode) { lines.push_back(fmt::format("{} R{}, R{}, R{}", opcode, dst, dst, dst + 1)); };
  if (mapping.multi_instruction) {
    if (mapping.hints.empty()) {
      lines.push_back("CALL.REL.NOINC 0x70");
    } else {
      for (const auto& h : mapping.hints) emit(h);
    }
    return lines;
  }
  for (const auto& term : mapping.expansion) {
    for (std::uint32_t i = 0; i < term.multiplicity; ++i) emit(term.opcode);
  }
  return lines;
}

SyntheticResult run_alu(const codegen::BenchInfo& bench, const LatencyTable& table, const VirtualDeviceConfig& cfg,
                        std::uint32_t trial) {
  const auto* spec = bench.instruction();
  if (!spec) throw BackendError(fmt::format("{}: ALU benchmark without an instruction", bench.id));
  const auto* record = table.find(spec->key());
  if (!record) throw BackendError(fmt::format("the latency table has no record for '{}'", spec->key()));

  Builder b(bench, cfg);
  b.open({"LDG.E R4, [R24.64]", "LDG.E R5, [R24.64+0x8]", "LDG.E R6, [R24.64+0x10]"});
  const auto n = static_cast<std::uint32_t>(bench.timed_count);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (auto& line : expansion_lines(record->mapping, i)) b.result().trace.add_line(std::move(line));
  }
  auto& notes = b.result().notes;
  const auto cpi = pick(*record, trial);
  if (!record->is_point()) {
    notes.push_back(fmt::format("ranged record {}-{}: trial {} uses {}", format_cycles(record->cycles_min),
                                format_cycles(record->cycles_max), trial, format_cycles(cpi)));
  }
  std::int64_t body = whole(cpi * Cycles(static_cast<std::int64_t>(n)), notes, "instruction time");
  if (spec->dependency == Dependency::independent) {
    if (auto it = cfg.cold_start_surcharge.find(n); it != cfg.cold_start_surcharge.end()) body += it->second;
  }
  b.close(body);
  return std::move(b.result());
}

SyntheticResult run_memory(const codegen::BenchInfo& bench, const LatencyTable& table,
                           const MemoryHierarchyModel& mem, const VirtualDeviceConfig& cfg) {
  if (!bench.chase) throw BackendError(fmt::format("{}: memory benchmark without a pointer chase", bench.id));
  const auto& chase = *bench.chase;
  const auto level = resolve_level(chase.cache_op, chase.footprint_bytes(), mem);
  auto it = mem.latencies.find(level);
  if (it == mem.latencies.end()) {
    throw BackendError(fmt::format("the latency table has no record for '{}'", to_string(level)));
  }

  auto resolved = bench;
  resolved.target = level;
  const auto load = trace::expected_mapping(resolved, table).expansion.front().opcode;

  Builder b(bench, cfg);
  b.open({"IMAD.MOV.U32 R2, RZ, RZ, R24", "IMAD.MOV.U32 R3, RZ, RZ, R25"});
  if (const auto* target = bench.memory_level(); target && *target != level) {
    b.result().notes.push_back(fmt::format("{}: footprint of {} bytes with .{} resolves to {}", bench.id,
                                           chase.footprint_bytes(), to_string(chase.cache_op), to_string(level)));
  }
  std::vector<std::string> iteration;
  for (std::uint32_t i = 0; i < chase.unroll; ++i) iteration.push_back(fmt::format("{} R2, [R2.64]", load));
  iteration.push_back("IADD3 R6, P0, R6, 0x4, RZ");
  iteration.push_back("ISETP.GE.U32.AND P0, PT, R6, R7, PT");
  iteration.push_back("@!P0 BRA 0x1c0");
  b.result().trace.add_repeated(std::move(iteration), chase.element_count / chase.unroll);

  auto& notes = b.result().notes;
  b.close(whole(it->second * Cycles(static_cast<std::int64_t>(chase.element_count)), notes, "chase time"));
  return std::move(b.result());
}

SyntheticResult run_shared(const codegen::BenchInfo& bench, const MemoryHierarchyModel& mem,
                           const VirtualDeviceConfig& cfg) {
  const auto* level = bench.memory_level();
  if (!level || (*level != MemoryLevel::shared_load && *level != MemoryLevel::shared_store)) {
    throw BackendError(fmt::format("{}: shared benchmark without a shared level", bench.id));
  }
  auto it = mem.latencies.find(*level);
  if (it == mem.latencies.end()) {
    throw BackendError(fmt::format("the latency table has no record for '{}'", to_string(*level)));
  }
  Builder b(bench, cfg);
  b.open({"IMAD.MOV.U32 R2, RZ, RZ, 0x32"});
  if (*level == MemoryLevel::shared_load) {
    b.result().trace.add_line("LDS.64 R2, [UR4]");
  } else {
    b.result().trace.add_line("STS.64 [UR4], R2");
  }
  b.result().trace.add_line("IADD3 R4, P0, R2, 0x1, RZ");
  auto& notes = b.result().notes;
  std::int64_t body = whole(it->second, notes, "shared access");
  if (bench.subtract_followup) body += cfg.shared_followup_cycles;
  b.close(body);
  return std::move(b.result());
}

SyntheticResult run_wmma(const codegen::BenchInfo& bench, const LatencyTable& table, const VirtualDeviceConfig& cfg) {
  const auto* bench_op = bench.tensor_op();
  if (!bench_op) throw BackendError(fmt::format("{}: wmma benchmark without a tensor op", bench.id));
  const auto* op = table.find_tensor_op(bench_op->signature());
  if (!op) throw BackendError(fmt::format("the latency table has no tensor op '{}'", bench_op->signature()));
  if (bench.iters == 0) throw BackendError(fmt::format("{}: iteration count is 0", bench.id));

  Builder b(bench, cfg);
  std::vector<std::string> prologue;
  for (int i = 0; i < 12; ++i) prologue.push_back(fmt::format("LDG.E.128 R{}, [R24.64+0x{:x}]", 32 + 4 * i, 16 * i));
  // Warp-sync markers sit between the fragment loads and the first clock read.
  prologue.push_back("NOP");
  prologue.push_back("NOP");
  b.open(std::move(prologue));

  const std::string opcode = op->sass_opcode.empty() ? "HMMA.16816.F32" : op->sass_opcode;
  std::vector<std::string> iteration;
  for (int set = 0; set < 4; ++set) {
    for (int s = 0; s < op->sass_count; ++s) {
      iteration.push_back(fmt::format("{} R{}, R{}, R{}, R{}", opcode, 4 + 2 * set, 32 + 4 * set, 48 + 4 * set, 4 + 2 * set));
    }
  }
  b.result().trace.add_repeated(std::move(iteration), bench.iters);

  const auto mma_count = 4 * static_cast<std::int64_t>(bench.iters);
  if (op->measured_throughput) {
    analysis::AnalysisConfig acfg;
    acfg.clock_rate_hz = cfg.clock_rate_hz;
    acfg.work_metric = cfg.work_metric;
    b.result().throughput_cycles =
        analysis::throughput_elapsed_cycles(*op, static_cast<std::uint64_t>(mma_count), *op->measured_throughput, acfg);
  }
  b.close(mma_count * op->total_cycles());
  return std::move(b.result());
}

}  // namespace

MemoryHierarchyModel MemoryHierarchyModel::from_table(const LatencyTable& table,
                                                      const codegen::DeviceCapacities& capacities) {
  MemoryHierarchyModel m;
  m.l1_bytes = capacities.l1_bytes;
  m.l2_bytes = capacities.l2_bytes;
  for (const auto& [level, latency] : table.memory()) m.latencies[level] = latency.cycles;
  return m;
}

void MemoryHierarchyModel::validate() const {
  if (l1_bytes == 0 || l1_bytes >= l2_bytes) {
    throw ConfigError(fmt::format("L1 capacity ({} bytes) must be positive and below L2 ({} bytes)", l1_bytes, l2_bytes));
  }
  auto get = [this](MemoryLevel l) -> std::optional<Cycles> {
    auto it = latencies.find(l);
    return it == latencies.end() ? std::nullopt : std::optional(it->second);
  };
  auto g = get(MemoryLevel::global), l2 = get(MemoryLevel::l2), l1 = get(MemoryLevel::l1);
  if ((g && l2 && !(*g > *l2)) || (l2 && l1 && !(*l2 > *l1)) || (g && l1 && !(*g > *l1))) {
    throw ConfigError("memory latencies must satisfy global > l2 > l1");
  }
}

MemoryLevel resolve_level(CacheOp cache_op, std::uint64_t footprint_bytes, const MemoryHierarchyModel& mem) {
  switch (cache_op) {
    case CacheOp::cv:
    case CacheOp::none:
      return MemoryLevel::global;
    case CacheOp::cg:
      return footprint_bytes < mem.l2_bytes ? MemoryLevel::l2 : MemoryLevel::global;
    case CacheOp::ca:
      if (footprint_bytes < mem.l1_bytes) return MemoryLevel::l1;
      return footprint_bytes < mem.l2_bytes ? MemoryLevel::l2 : MemoryLevel::global;
  }
  return MemoryLevel::global;
}

std::map<std::uint32_t, std::int64_t> default_cold_start_surcharge() {
  const auto& curve = reference_launch_curve();
  std::map<std::uint32_t, std::int64_t> out;
  if (curve.empty()) return out;
  const auto steady = curve.rbegin()->second;
  for (const auto& [n, cpi] : curve) {
    const auto extra = (cpi - steady) * Cycles(n);
    out[n] = extra.numerator() / extra.denominator();
  }
  return out;
}

SyntheticResult run_virtual(const codegen::BenchInfo& bench, const LatencyTable& table,
                            const MemoryHierarchyModel& mem, const VirtualDeviceConfig& cfg, std::uint32_t trial) {
  switch (bench.kind) {
    case BenchKind::clock_overhead: {
      Builder b(bench, cfg);
      b.open();
      b.close(0);
      return std::move(b.result());
    }
    case BenchKind::alu: return run_alu(bench, table, cfg, trial);
    case BenchKind::memory: return run_memory(bench, table, mem, cfg);
    case BenchKind::shared: return run_shared(bench, mem, cfg);
    case BenchKind::wmma: return run_wmma(bench, table, cfg);
  }
  throw BackendError(fmt::format("{}: unknown benchmark kind", bench.id));
}

SyntheticResult run_virtual(const codegen::Microbenchmark& bench, const LatencyTable& table,
                            const MemoryHierarchyModel& mem, const VirtualDeviceConfig& cfg, std::uint32_t trial) {
  return run_virtual(bench.info, table, mem, cfg, trial);
}

void write_fixture(const SyntheticResult& result, const std::string& id, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  result.trace.write_file(dir / (id + ".trace"));
  const auto clocks = dir / (id + ".clocks");
  std::ofstream out(clocks);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", clocks.string()));
  out << fmt::format("CLOCKS {} {}\n", result.start_clock, result.end_clock);
  if (result.throughput_cycles) out << fmt::format("THROUGHPUT {}\n", format_cycles(*result.throughput_cycles));
}

}  // namespace ptxlat::vdev
